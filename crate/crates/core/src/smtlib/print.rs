use std::fmt::Write;

use super::Script;

/// Renders `script` as SMT-LIB 2 text, one command per line.
pub fn print_script(script: &Script) -> String {
    let mut out = String::new();
    for h in &script.header {
        writeln!(out, "{h}").unwrap();
    }
    if let Some(logic) = &script.logic {
        writeln!(out, "(set-logic {logic})").unwrap();
    }
    for s in &script.sorts {
        writeln!(out, "(declare-sort {s} 0)").unwrap();
    }
    for f in &script.funs {
        write!(out, "(declare-fun {f} (").unwrap();
        for (i, s) in f.arg_sorts().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{s}").unwrap();
        }
        writeln!(out, ") {})", f.result_sort()).unwrap();
    }
    for a in &script.assertions {
        writeln!(out, "(assert {a})").unwrap();
    }
    for t in &script.trailing {
        writeln!(out, "{t}").unwrap();
    }
    out
}
