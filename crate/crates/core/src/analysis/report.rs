use std::fmt::Write;

use super::{ConstraintSystem, GroundTermSet, Infinity, Origin, Solution};

/// One line per class: `<sort> {members} <- {setvars}`, `INF` for infinite
/// classes. With `verbose`, each member and each infinity is followed by the
/// constraint that justifies it.
pub fn format_solution(sol: &Solution, cs: &ConstraintSystem, verbose: bool) -> String {
    let mut out = String::new();
    let describe = |k: usize| match cs.get(k) {
        Some((c, r)) => format!("{r}: {c}"),
        None => format!("constraint #{k}"),
    };
    for class in &sol.classes {
        let vars = class
            .setvars
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        match &class.set {
            GroundTermSet::Infinite => writeln!(out, "{} INF <- {{{vars}}}", class.sort).unwrap(),
            GroundTermSet::Finite(ts) => {
                let ms = ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
                writeln!(out, "{} {{{ms}}} <- {{{vars}}}", class.sort).unwrap();
            }
        }
        if !verbose {
            continue;
        }
        if let Some(inf) = &class.infinity {
            let why = match inf {
                Infinity::Constraint(k) => describe(*k),
                Infinity::Cycle => "cyclic template dependency".to_string(),
                Infinity::Propagated(src) => {
                    let v = &sol.classes[*src].setvars[0];
                    format!("template variable ranges over {v} = INF")
                }
                Infinity::Cap => "iteration cap reached".to_string(),
            };
            writeln!(out, "    INF: {why}").unwrap();
        }
        for (t, origin) in &class.provenance {
            let why = match origin {
                Origin::Constraint(k) => describe(*k),
                Origin::Seed => "seed for non-empty set".to_string(),
            };
            writeln!(out, "    {t}: {why}").unwrap();
        }
    }
    out
}
