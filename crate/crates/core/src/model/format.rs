//! Reading and writing models.
//!
//! The internal format is line-oriented:
//!
//! ```text
//! sort U size 2
//! const c -> 1
//! fun f (1) -> 4
//! fun f default -> 0
//! fun g (U!val!0 U!val!1) -> true
//! ```
//!
//! Solver output is accepted when every function is a chain of `ite` over
//! conjunctions of argument equalities.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::ast::{Sort, Symbol};
use crate::smtlib::sexp::{read_all, Atom, SExp};
use crate::smtlib::Script;

use super::{FunTable, Model, ModelError, Value};

fn syntax(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn unquote(name: &str) -> &str {
    name.strip_prefix('|').and_then(|n| n.strip_suffix('|')).unwrap_or(name)
}

fn parse_value(tok: &str, sort: &Sort, line: usize) -> Result<Value, ModelError> {
    let bad = || syntax(line, format!("`{tok}` is not a value of sort {sort}"));
    match sort {
        Sort::Bool => match tok {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(bad()),
        },
        Sort::Int => tok.parse::<BigInt>().map(Value::Int).map_err(|_| bad()),
        Sort::Uninterpreted(_) => {
            let (s, i) = tok.rsplit_once("!val!").ok_or_else(bad)?;
            if s != sort.to_string() && unquote(s) != sort.to_string() {
                return Err(bad());
            }
            Ok(Value::Elem(sort.clone(), i.parse().map_err(|_| bad())?))
        }
        Sort::Array(..) => Err(ModelError::Unsupported(sort.to_string())),
    }
}

fn symbol<'a>(script: &'a Script, name: &str, line: usize) -> Result<&'a Symbol, ModelError> {
    script
        .fun(unquote(name))
        .filter(|f| f.is_uninterpreted())
        .ok_or_else(|| syntax(line, format!("`{name}` is not a declared symbol")))
}

/// Explicit entries and the optional default of one function.
type PartialTable = (BTreeMap<Vec<Value>, Value>, Option<Value>);

/// Reads the internal format against the declarations of `script`. Every
/// declared symbol must be interpreted.
pub fn read_model(text: &str, script: &Script) -> Result<Model, ModelError> {
    let mut m = Model::default();
    let mut tables: BTreeMap<String, PartialTable> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split(';').next().unwrap_or("");
        let spaced = body.replace('(', " ( ").replace(')', " ) ");
        let toks: Vec<&str> = spaced.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["sort", name, "size", n] => {
                let sort = script
                    .sorts
                    .iter()
                    .find(|s| s.to_string() == *name || s.to_string() == unquote(name))
                    .ok_or_else(|| syntax(line, format!("`{name}` is not a declared sort")))?;
                let n: usize = n.parse().map_err(|_| syntax(line, "bad universe size"))?;
                if n == 0 {
                    return Err(syntax(line, "universes are non-empty"));
                }
                m.universes.insert(sort.clone(), n);
            }
            ["const", name, "->", v] => {
                let f = symbol(script, name, line)?;
                if f.arity() != 0 {
                    return Err(syntax(line, format!("`{name}` is not a constant")));
                }
                let v = parse_value(v, f.result_sort(), line)?;
                m.consts.insert(f.name().to_string(), v);
            }
            ["fun", name, "default", "->", v] => {
                let f = symbol(script, name, line)?;
                let v = parse_value(v, f.result_sort(), line)?;
                tables.entry(f.name().to_string()).or_default().1 = Some(v);
            }
            ["fun", name, "(", rest @ ..] => {
                let f = symbol(script, name, line)?;
                let close = rest.iter().position(|t| *t == ")").ok_or_else(|| syntax(line, "missing `)`"))?;
                let (args, tail) = rest.split_at(close);
                let ["->", v] = &tail[1..] else {
                    return Err(syntax(line, "expected `-> value`"));
                };
                if args.len() != f.arity() {
                    return Err(syntax(line, format!("`{name}` takes {} argument(s)", f.arity())));
                }
                let args = args
                    .iter()
                    .zip(f.arg_sorts())
                    .map(|(a, s)| parse_value(a, s, line))
                    .collect::<Result<Vec<_>, _>>()?;
                let v = parse_value(v, f.result_sort(), line)?;
                tables.entry(f.name().to_string()).or_default().0.insert(args, v);
            }
            _ => return Err(syntax(line, format!("unrecognized line `{}`", body.trim()))),
        }
    }
    for (name, (entries, default)) in tables {
        let default = default.ok_or_else(|| ModelError::Missing(format!("default of {name}")))?;
        m.funs.insert(name, FunTable { entries, default });
    }
    for s in &script.sorts {
        m.universes.entry(s.clone()).or_insert(1);
    }
    m.validate(script)?;
    Ok(m)
}

pub fn write_model(m: &Model) -> String {
    let mut out = String::new();
    for (s, n) in &m.universes {
        out.push_str(&format!("sort {s} size {n}\n"));
    }
    for (c, v) in &m.consts {
        out.push_str(&format!("const {} -> {v}\n", crate::ast::quote_symbol(c)));
    }
    for (f, t) in &m.funs {
        let f = crate::ast::quote_symbol(f);
        for (args, v) in &t.entries {
            let args: Vec<String> = args.iter().map(Value::to_string).collect();
            out.push_str(&format!("fun {f} ({}) -> {v}\n", args.join(" ")));
        }
        out.push_str(&format!("fun {f} default -> {}\n", t.default));
    }
    out
}

/// Reads `(get-model)` output. Symbols the solver left out get the default
/// of their sort; symbols the script does not declare are ignored.
pub fn read_solver_model(text: &str, script: &Script) -> Result<Model, ModelError> {
    let items = read_all(text).map_err(|e| syntax(0, e.to_string()))?;
    let mut defs = Vec::new();
    for it in &items {
        collect_commands(it, &mut defs);
    }
    let mut m = Model::default();
    // Universe elements show up as declared constants `S!val!k`.
    for d in &defs {
        if d.head() == Some("declare-fun") {
            if let [_, name, _, sort] = d.as_list().unwrap() {
                let (Some(name), Some(sort)) = (name.as_symbol(), sort.as_symbol()) else { continue };
                if let Some(s) = script.sorts.iter().find(|s| s.to_string() == sort) {
                    if let Some(Ok(i)) = name.rsplit_once("!val!").map(|(_, i)| i.parse::<usize>()) {
                        let n = m.universes.entry(s.clone()).or_insert(0);
                        *n = (*n).max(i + 1);
                    }
                }
            }
        }
    }
    for d in defs.iter().filter(|d| d.head() == Some("define-fun")) {
        let line = d.pos().line;
        let [_, name, params, _, body] = d.as_list().unwrap() else {
            return Err(syntax(line, "malformed define-fun"));
        };
        let Some(f) = name.as_symbol().and_then(|n| script.fun(n)).filter(|f| f.is_uninterpreted()) else {
            continue;
        };
        let params: Vec<&str> = params
            .as_list()
            .ok_or_else(|| syntax(line, "malformed parameters"))?
            .iter()
            .map(|p| p.as_list().and_then(|p| p.first()).and_then(SExp::as_symbol))
            .collect::<Option<_>>()
            .ok_or_else(|| syntax(line, "malformed parameters"))?;
        if params.len() != f.arity() {
            return Err(syntax(line, format!("`{}` arity differs from its declaration", f.name())));
        }
        let mut universes = m.universes.clone();
        for s in &script.sorts {
            universes.entry(s.clone()).or_insert(1);
        }
        let mut entries = BTreeMap::new();
        let mut cur = body;
        loop {
            if cur.head() == Some("ite") {
                let [_, cond, then, els] = cur.as_list().unwrap() else {
                    return Err(syntax(line, "malformed ite"));
                };
                let mut bound: Vec<Option<Value>> = vec![None; params.len()];
                read_condition(cond, &params, f, &mut bound)?;
                let v = solver_value(then, f.result_sort())?;
                for args in expand(&bound, f.arg_sorts(), &universes, f.name())? {
                    entries.entry(args).or_insert_with(|| v.clone());
                }
                cur = els;
            } else {
                let v = solver_value(cur, f.result_sort())?;
                if f.arity() == 0 {
                    m.consts.insert(f.name().to_string(), v);
                } else {
                    m.funs.insert(f.name().to_string(), FunTable { entries, default: v });
                }
                break;
            }
        }
    }
    m.complete(script)?;
    m.validate(script)?;
    Ok(m)
}

/// Internal format unless the text looks like solver output.
pub fn read_any_model(text: &str, script: &Script) -> Result<Model, ModelError> {
    let first = text
        .lines()
        .map(|l| l.split(';').next().unwrap_or("").trim())
        .find(|l| !l.is_empty());
    match first {
        Some(l) if l.starts_with('(') || l == "sat" => read_solver_model(text, script),
        _ => read_model(text, script),
    }
}

fn collect_commands<'a>(e: &'a SExp, out: &mut Vec<&'a SExp>) {
    match e.head() {
        Some("define-fun" | "declare-fun") => out.push(e),
        Some("model") | None => {
            for it in e.as_list().unwrap_or_default() {
                collect_commands(it, out);
            }
        }
        Some(_) => {}
    }
}

fn solver_value(e: &SExp, sort: &Sort) -> Result<Value, ModelError> {
    let line = e.pos().line;
    let bad = || syntax(line, format!("unsupported value for sort {sort}"));
    match (e, sort) {
        (SExp::Atom(Atom::Numeral(n), _), Sort::Int) => Ok(Value::Int(n.clone())),
        (SExp::List(items, _, _), Sort::Int) => match items.as_slice() {
            [neg, SExp::Atom(Atom::Numeral(n), _)] if neg.as_symbol() == Some("-") => Ok(Value::Int(-n.clone())),
            _ => Err(bad()),
        },
        (SExp::Atom(Atom::Symbol(s), _), _) => parse_value(s, sort, line).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn read_condition(
    cond: &SExp,
    params: &[&str],
    f: &Symbol,
    bound: &mut [Option<Value>],
) -> Result<(), ModelError> {
    let line = cond.pos().line;
    let bad = || syntax(line, format!("unsupported condition in the model of `{}`", f.name()));
    match cond.head() {
        Some("and") => {
            for c in &cond.as_list().unwrap()[1..] {
                read_condition(c, params, f, bound)?;
            }
            Ok(())
        }
        Some("=") => {
            let [_, a, b] = cond.as_list().unwrap() else { return Err(bad()) };
            let idx = |e: &SExp| e.as_symbol().and_then(|s| params.iter().position(|p| *p == s));
            let (i, v) = match (idx(a), idx(b)) {
                (Some(i), None) => (i, b),
                (None, Some(i)) => (i, a),
                _ => return Err(bad()),
            };
            let v = solver_value(v, &f.arg_sorts()[i])?;
            if bound[i].as_ref().is_some_and(|w| *w != v) {
                return Err(bad());
            }
            bound[i] = Some(v);
            Ok(())
        }
        _ => Err(bad()),
    }
}

/// Argument tuples matching a partial pattern; unconstrained positions are
/// only allowed over finite universes.
fn expand(
    bound: &[Option<Value>],
    sorts: &[Sort],
    universes: &BTreeMap<Sort, usize>,
    name: &str,
) -> Result<Vec<Vec<Value>>, ModelError> {
    let mut out = vec![Vec::new()];
    for (b, s) in bound.iter().zip(sorts) {
        let choices = match (b, s) {
            (Some(v), _) => vec![v.clone()],
            (None, Sort::Uninterpreted(_)) => {
                (0..universes[s]).map(|i| Value::Elem(s.clone(), i)).collect()
            }
            (None, _) => {
                return Err(ModelError::Unsupported(format!(
                    "model of `{name}` leaves an argument of sort {s} unconstrained"
                )))
            }
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut t = prefix.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    Ok(out)
}
