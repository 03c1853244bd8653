use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use indexmap::IndexMap;

use super::sexp::{read_all, Atom, Pos, SExp};
use super::{Annotation, ParseError, Script};
use crate::ast::{ArithOp, AstError, CmpOp, Formula, Sort, Symbol, Term, Variable};

/// Parses SMT-LIB 2 text into a [`Script`].
///
/// Bound variables get fresh ids in binder order and are renamed (`x!1`, ...)
/// where a name is already taken, so every variable name in the result is
/// unique. `let` and `define-fun` are inlined; annotations are stripped and
/// recorded in [`Script::annotations`].
pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let commands = read_all(text)?;
    let mut p = Parser::default();
    // Reserve every declared name up front so that a binder occurring before
    // a declaration of the same name is renamed consistently.
    for cmd in &commands {
        if let (Some("declare-fun" | "declare-const" | "define-fun"), Some(name)) = (
            cmd.head(),
            cmd.as_list().and_then(|l| l.get(1)).and_then(SExp::as_symbol),
        ) {
            p.used_names.insert(name.to_string());
        }
    }
    let mut script = Script::default();
    for cmd in &commands {
        p.command(cmd, text, &mut script)?;
    }
    script.sorts = p.sorts.into_values().collect();
    script.funs = p.funs.into_values().collect();
    script.var_count = p.next_var;
    Ok(script)
}

#[derive(Clone)]
enum Expr {
    Term(Term),
    Formula(Formula),
}

#[derive(Clone)]
enum Binding {
    Var(Variable),
    Let(Expr),
}

struct Define {
    params: Vec<(String, Sort)>,
    result: Sort,
    body: SExp,
}

#[derive(Default)]
struct Parser {
    sorts: IndexMap<String, Sort>,
    funs: IndexMap<String, Symbol>,
    defines: HashMap<String, Define>,
    scopes: Vec<HashMap<String, Binding>>,
    used_names: HashSet<String>,
    next_var: u32,
    pending_annotations: Vec<String>,
}

fn unsupported(construct: impl Into<String>, pos: Pos) -> ParseError {
    ParseError::Unsupported {
        construct: construct.into(),
        line: pos.line,
        col: pos.col,
    }
}

fn syntax(msg: impl Into<String>, pos: Pos) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

fn sort_error(e: AstError, pos: Pos) -> ParseError {
    ParseError::Sort {
        msg: e.to_string(),
        line: pos.line,
        col: pos.col,
    }
}

fn symbol_of(e: &SExp) -> Result<&str, ParseError> {
    e.as_symbol()
        .ok_or_else(|| syntax(format!("expected a symbol, found `{e}`"), e.pos()))
}

fn list_of(e: &SExp) -> Result<&[SExp], ParseError> {
    e.as_list()
        .ok_or_else(|| syntax(format!("expected a list, found `{e}`"), e.pos()))
}

impl Parser {
    fn command(&mut self, cmd: &SExp, text: &str, script: &mut Script) -> Result<(), ParseError> {
        let items = list_of(cmd)?;
        let head = items
            .first()
            .ok_or_else(|| syntax("empty command", cmd.pos()))?;
        let head = symbol_of(head)?;
        let verbatim = || {
            let (s, e) = cmd.span(text);
            text[s..e].to_string()
        };
        let arg = |i: usize| {
            items
                .get(i)
                .ok_or_else(|| syntax(format!("`{head}` is missing arguments"), cmd.pos()))
        };
        match head {
            "set-logic" => script.logic = Some(symbol_of(arg(1)?)?.to_string()),
            "set-info" | "set-option" => {
                if script.assertions.is_empty() {
                    script.header.push(verbatim());
                } else {
                    script.trailing.push(verbatim());
                }
            }
            "declare-sort" => {
                let name = symbol_of(arg(1)?)?;
                if let Some(n) = items.get(2) {
                    if !matches!(n, SExp::Atom(Atom::Numeral(k), _) if k == &0u32.into()) {
                        return Err(unsupported("declare-sort with nonzero arity", n.pos()));
                    }
                }
                self.sorts
                    .insert(name.to_string(), Sort::uninterpreted(name));
            }
            "declare-fun" => {
                let name = symbol_of(arg(1)?)?;
                let args = list_of(arg(2)?)?
                    .iter()
                    .map(|s| self.sort(s))
                    .collect::<Result<Vec<_>, _>>()?;
                if args.contains(&Sort::Bool) {
                    return Err(unsupported("Bool-sorted function argument", arg(2)?.pos()));
                }
                let result = self.sort(arg(3)?)?;
                self.declare_fun(name, args, result);
            }
            "declare-const" => {
                let name = symbol_of(arg(1)?)?;
                let result = self.sort(arg(2)?)?;
                self.declare_fun(name, Vec::new(), result);
            }
            "define-fun" => {
                let name = symbol_of(arg(1)?)?.to_string();
                let params = list_of(arg(2)?)?
                    .iter()
                    .map(|p| {
                        let pair = list_of(p)?;
                        if pair.len() != 2 {
                            return Err(syntax("malformed parameter", p.pos()));
                        }
                        Ok((symbol_of(&pair[0])?.to_string(), self.sort(&pair[1])?))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let result = self.sort(arg(3)?)?;
                let body = arg(4)?.clone();
                self.used_names.insert(name.clone());
                self.defines.insert(
                    name,
                    Define {
                        params,
                        result,
                        body,
                    },
                );
            }
            "assert" => {
                let e = self.expr(arg(1)?)?;
                let f = self.formula(e, arg(1)?.pos())?;
                let index = script.assertions.len();
                for attributes in self.pending_annotations.drain(..) {
                    script.annotations.push(Annotation {
                        assertion: index,
                        attributes,
                    });
                }
                script.assertions.push(f);
            }
            "check-sat" | "get-model" | "get-value" | "get-info" | "get-assignment"
            | "get-unsat-core" | "get-proof" | "get-option" | "echo" | "exit" => {
                script.trailing.push(verbatim())
            }
            other => return Err(unsupported(other, cmd.pos())),
        }
        Ok(())
    }

    fn declare_fun(&mut self, name: &str, args: Vec<Sort>, result: Sort) {
        self.used_names.insert(name.to_string());
        self.funs
            .insert(name.to_string(), Symbol::uninterpreted(name, args, result));
    }

    fn sort(&self, e: &SExp) -> Result<Sort, ParseError> {
        match e {
            SExp::Atom(Atom::Symbol(s), pos) => match s.as_str() {
                "Int" => Ok(Sort::Int),
                "Bool" => Ok(Sort::Bool),
                "Real" => Err(unsupported("Real", *pos)),
                name => self
                    .sorts
                    .get(name)
                    .cloned()
                    .ok_or_else(|| ParseError::Undeclared {
                        name: name.to_string(),
                        line: pos.line,
                        col: pos.col,
                    }),
            },
            SExp::List(items, pos, _) => match e.head() {
                Some("Array") if items.len() == 3 => Ok(Sort::Array(
                    Arc::new(self.sort(&items[1])?),
                    Arc::new(self.sort(&items[2])?),
                )),
                Some("_") if items.get(1).and_then(SExp::as_symbol) == Some("BitVec") => {
                    Err(unsupported("bit-vector sorts", *pos))
                }
                _ => Err(unsupported(e.to_string(), *pos)),
            },
            other => Err(syntax(format!("expected a sort, found `{other}`"), other.pos())),
        }
    }

    fn lookup(&self, name: &str) -> Option<&Binding> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn fresh_var(&mut self, name: &str, sort: Sort) -> Variable {
        let mut unique = name.to_string();
        let mut k = 1;
        while self.used_names.contains(&unique) {
            unique = format!("{name}!{k}");
            k += 1;
        }
        self.used_names.insert(unique.clone());
        let v = Variable::new(self.next_var, &unique, sort);
        self.next_var += 1;
        v
    }

    fn term(&self, e: Expr, pos: Pos) -> Result<Term, ParseError> {
        match e {
            Expr::Term(t) => Ok(t),
            Expr::Formula(_) => Err(unsupported("Bool-valued term argument", pos)),
        }
    }

    fn formula(&self, e: Expr, pos: Pos) -> Result<Formula, ParseError> {
        match e {
            Expr::Formula(f) => Ok(f),
            Expr::Term(t) if t.sort() == Sort::Bool => Ok(Formula::atom(t)),
            Expr::Term(t) => Err(ParseError::Sort {
                msg: format!("expected a formula, found term `{t}` of sort {}", t.sort()),
                line: pos.line,
                col: pos.col,
            }),
        }
    }

    fn is_bool(e: &Expr) -> bool {
        match e {
            Expr::Formula(_) => true,
            Expr::Term(t) => t.sort() == Sort::Bool,
        }
    }

    fn expr(&mut self, e: &SExp) -> Result<Expr, ParseError> {
        match e {
            SExp::Atom(atom, pos) => self.atom(atom, *pos),
            SExp::List(items, pos, _) => {
                let Some(head) = items.first() else {
                    return Err(syntax("empty expression", *pos));
                };
                let Some(head) = head.as_symbol() else {
                    return Err(unsupported(head.to_string(), head.pos()));
                };
                self.application(head, &items[1..], *pos)
            }
        }
    }

    fn atom(&mut self, atom: &Atom, pos: Pos) -> Result<Expr, ParseError> {
        match atom {
            Atom::Numeral(n) => Ok(Expr::Term(Term::numeral(n.clone()))),
            Atom::Symbol(s) => {
                match s.as_str() {
                    "true" => return Ok(Expr::Formula(Formula::True)),
                    "false" => return Ok(Expr::Formula(Formula::False)),
                    _ => {}
                }
                match self.lookup(s) {
                    Some(Binding::Var(v)) => return Ok(Expr::Term(Term::var(v.clone()))),
                    Some(Binding::Let(e)) => return Ok(e.clone()),
                    None => {}
                }
                if self.defines.contains_key(s.as_str()) {
                    return self.expand_define(s, &[], pos);
                }
                match self.funs.get(s.as_str()) {
                    Some(sym) if sym.arity() == 0 => Ok(Expr::Term(Term::constant(sym.clone()))),
                    Some(_) => Err(syntax(format!("`{s}` used without arguments"), pos)),
                    None => Err(ParseError::Undeclared {
                        name: s.clone(),
                        line: pos.line,
                        col: pos.col,
                    }),
                }
            }
            Atom::Decimal(_) => Err(unsupported("Real", pos)),
            Atom::Str(_) => Err(unsupported("string literal", pos)),
            Atom::Hex(_) | Atom::Binary(_) => Err(unsupported("bit-vector literal", pos)),
            Atom::Keyword(k) => Err(syntax(format!("unexpected keyword `:{k}`"), pos)),
        }
    }

    fn formulas(&mut self, args: &[SExp]) -> Result<Vec<Formula>, ParseError> {
        args.iter()
            .map(|a| {
                let e = self.expr(a)?;
                self.formula(e, a.pos())
            })
            .collect()
    }

    fn terms(&mut self, args: &[SExp]) -> Result<Vec<Term>, ParseError> {
        args.iter()
            .map(|a| {
                let e = self.expr(a)?;
                self.term(e, a.pos())
            })
            .collect()
    }

    fn application(&mut self, head: &str, args: &[SExp], pos: Pos) -> Result<Expr, ParseError> {
        let need = |n: usize| {
            if args.len() < n {
                Err(syntax(format!("`{head}` expects at least {n} argument(s)"), pos))
            } else {
                Ok(())
            }
        };
        match head {
            "let" => {
                need(2)?;
                let mut bound = HashMap::new();
                for b in list_of(&args[0])? {
                    let pair = list_of(b)?;
                    if pair.len() != 2 {
                        return Err(syntax("malformed let binding", b.pos()));
                    }
                    let name = symbol_of(&pair[0])?.to_string();
                    let value = self.expr(&pair[1])?;
                    bound.insert(name, Binding::Let(value));
                }
                self.scopes.push(bound);
                let body = self.expr(&args[1]);
                self.scopes.pop();
                body
            }
            "forall" | "exists" => {
                need(2)?;
                let mut vars = Vec::new();
                let mut scope = HashMap::new();
                for decl in list_of(&args[0])? {
                    let pair = list_of(decl)?;
                    if pair.len() != 2 {
                        return Err(syntax("malformed sorted variable", decl.pos()));
                    }
                    let name = symbol_of(&pair[0])?;
                    let sort = self.sort(&pair[1])?;
                    if sort == Sort::Bool {
                        return Err(unsupported("Bool-sorted quantified variable", decl.pos()));
                    }
                    let v = self.fresh_var(name, sort);
                    scope.insert(name.to_string(), Binding::Var(v.clone()));
                    vars.push(v);
                }
                self.scopes.push(scope);
                let body = self.expr(&args[1]);
                self.scopes.pop();
                let body = self.formula(body?, args[1].pos())?;
                Ok(Expr::Formula(if head == "forall" {
                    Formula::forall(vars, body)
                } else {
                    Formula::exists(vars, body)
                }))
            }
            "!" => {
                need(1)?;
                let attrs: Vec<String> = args[1..].iter().map(|a| a.to_string()).collect();
                if !attrs.is_empty() {
                    self.pending_annotations.push(attrs.join(" "));
                }
                self.expr(&args[0])
            }
            "not" => {
                need(1)?;
                let mut fs = self.formulas(&args[..1])?;
                Ok(Expr::Formula(Formula::not(fs.remove(0))))
            }
            "and" => Ok(Expr::Formula(Formula::and(self.formulas(args)?))),
            "or" => Ok(Expr::Formula(Formula::or(self.formulas(args)?))),
            "=>" => {
                need(2)?;
                let mut fs = self.formulas(args)?;
                let mut acc = fs.pop().unwrap();
                while let Some(prev) = fs.pop() {
                    acc = Formula::implies(prev, acc);
                }
                Ok(Expr::Formula(acc))
            }
            "xor" => {
                need(2)?;
                let mut fs = self.formulas(args)?.into_iter();
                let first = fs.next().unwrap();
                Ok(Expr::Formula(
                    fs.fold(first, |acc, f| Formula::not(Formula::iff(acc, f))),
                ))
            }
            "ite" => {
                if args.len() != 3 {
                    return Err(syntax("`ite` expects 3 arguments", pos));
                }
                let c = self.expr(&args[0])?;
                let c = self.formula(c, args[0].pos())?;
                let t = self.expr(&args[1])?;
                if !Self::is_bool(&t) {
                    return Err(unsupported("term-level ite", pos));
                }
                let t = self.formula(t, args[1].pos())?;
                let e = self.expr(&args[2])?;
                let e = self.formula(e, args[2].pos())?;
                Ok(Expr::Formula(Formula::and(vec![
                    Formula::implies(c.clone(), t),
                    Formula::implies(Formula::not(c), e),
                ])))
            }
            "=" | "distinct" => {
                need(2)?;
                let es = args
                    .iter()
                    .map(|a| self.expr(a))
                    .collect::<Result<Vec<_>, _>>()?;
                if es.iter().any(Self::is_bool) {
                    let fs = es
                        .into_iter()
                        .zip(args)
                        .map(|(e, a)| self.formula(e, a.pos()))
                        .collect::<Result<Vec<_>, _>>()?;
                    let pairs = pairs_for(head, fs.len());
                    let out = pairs
                        .into_iter()
                        .map(|(i, j)| {
                            let iff = Formula::iff(fs[i].clone(), fs[j].clone());
                            if head == "=" {
                                iff
                            } else {
                                Formula::not(iff)
                            }
                        })
                        .collect();
                    return Ok(Expr::Formula(Formula::and(out)));
                }
                let ts = es
                    .into_iter()
                    .zip(args)
                    .map(|(e, a)| self.term(e, a.pos()))
                    .collect::<Result<Vec<_>, _>>()?;
                let sort = ts[0].sort();
                let sym = Symbol::cmp(CmpOp::Eq, sort);
                let out = pairs_for(head, ts.len())
                    .into_iter()
                    .map(|(i, j)| {
                        let eq = Term::apply(sym.clone(), vec![ts[i].clone(), ts[j].clone()])
                            .map_err(|e| sort_error(e, pos))?;
                        Ok(if head == "=" {
                            Formula::atom(eq)
                        } else {
                            Formula::not(Formula::atom(eq))
                        })
                    })
                    .collect::<Result<Vec<_>, ParseError>>()?;
                Ok(Expr::Formula(Formula::and(out)))
            }
            "<" | "<=" | ">" | ">=" => {
                need(2)?;
                let op = match head {
                    "<" => CmpOp::Lt,
                    "<=" => CmpOp::Le,
                    ">" => CmpOp::Gt,
                    _ => CmpOp::Ge,
                };
                let ts = self.terms(args)?;
                let sym = Symbol::cmp(op, Sort::Int);
                let atoms = ts
                    .windows(2)
                    .map(|w| {
                        Term::apply(sym.clone(), w.to_vec())
                            .map(Formula::atom)
                            .map_err(|e| sort_error(e, pos))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if atoms.len() == 1 {
                    let Formula::Atom(t) = atoms.into_iter().next().unwrap() else {
                        unreachable!()
                    };
                    return Ok(Expr::Term(t));
                }
                Ok(Expr::Formula(Formula::and(atoms)))
            }
            "+" | "-" | "*" => {
                need(1)?;
                let ts = self.terms(args)?;
                let op = match (head, ts.len()) {
                    ("-", 1) => ArithOp::Neg,
                    ("-", _) => ArithOp::Sub,
                    ("+", _) => ArithOp::Add,
                    _ => ArithOp::Mul,
                };
                if ts.len() == 1 && op != ArithOp::Neg {
                    return Ok(Expr::Term(ts.into_iter().next().unwrap()));
                }
                let n = ts.len();
                Term::apply(Symbol::arith(op, n), ts)
                    .map(Expr::Term)
                    .map_err(|e| sort_error(e, pos))
            }
            "div" | "mod" | "abs" => {
                let ts = self.terms(args)?;
                let sym = Symbol::unsupported(head, vec![Sort::Int; ts.len()], Sort::Int);
                Term::apply(sym, ts)
                    .map(Expr::Term)
                    .map_err(|e| sort_error(e, pos))
            }
            "select" | "store" => {
                let ts = self.terms(args)?;
                let (arity, result) = match (head, ts.first().map(Term::sort)) {
                    ("select", Some(s @ Sort::Array(_, _))) => {
                        let Sort::Array(_, elem) = &s else { unreachable!() };
                        (2, elem.as_ref().clone())
                    }
                    ("store", Some(s @ Sort::Array(_, _))) => (3, s),
                    _ => return Err(syntax(format!("`{head}` expects an array"), pos)),
                };
                if ts.len() != arity {
                    return Err(syntax(format!("`{head}` expects {arity} arguments"), pos));
                }
                let sorts = ts.iter().map(Term::sort).collect();
                Term::apply(Symbol::unsupported(head, sorts, result), ts)
                    .map(Expr::Term)
                    .map_err(|e| sort_error(e, pos))
            }
            name if self.defines.contains_key(name) => self.expand_define(name, args, pos),
            name => match self.funs.get(name).cloned() {
                Some(sym) => {
                    let ts = self.terms(args)?;
                    Term::apply(sym, ts)
                        .map(Expr::Term)
                        .map_err(|e| sort_error(e, pos))
                }
                None => match name {
                    "define-fun-rec" | "_" | "as" | "match" | "lambda" => {
                        Err(unsupported(name, pos))
                    }
                    _ => Err(ParseError::Undeclared {
                        name: name.to_string(),
                        line: pos.line,
                        col: pos.col,
                    }),
                },
            },
        }
    }

    fn expand_define(&mut self, name: &str, args: &[SExp], pos: Pos) -> Result<Expr, ParseError> {
        let (params, result, body) = {
            let d = &self.defines[name];
            (d.params.clone(), d.result.clone(), d.body.clone())
        };
        if params.len() != args.len() {
            return Err(syntax(
                format!("`{name}` expects {} argument(s)", params.len()),
                pos,
            ));
        }
        let mut scope = HashMap::new();
        for ((pname, psort), a) in params.iter().zip(args) {
            let e = self.expr(a)?;
            let sort = match &e {
                Expr::Formula(_) => Sort::Bool,
                Expr::Term(t) => t.sort(),
            };
            if sort != *psort {
                return Err(ParseError::Sort {
                    msg: format!("argument of `{name}` has sort {sort}, expected {psort}"),
                    line: a.pos().line,
                    col: a.pos().col,
                });
            }
            scope.insert(pname.clone(), Binding::Let(e));
        }
        // The body sees only its parameters and global declarations.
        let saved = std::mem::replace(&mut self.scopes, vec![scope]);
        let out = self.expr(&body);
        self.scopes = saved;
        let out = out?;
        let found = match &out {
            Expr::Formula(_) => Sort::Bool,
            Expr::Term(t) => t.sort(),
        };
        if found != result {
            return Err(ParseError::Sort {
                msg: format!("body of `{name}` has sort {found}, expected {result}"),
                line: pos.line,
                col: pos.col,
            });
        }
        Ok(out)
    }
}

/// Adjacent pairs for chained `=`, all pairs for `distinct`.
fn pairs_for(head: &str, n: usize) -> Vec<(usize, usize)> {
    if head == "=" {
        (0..n - 1).map(|i| (i, i + 1)).collect()
    } else {
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    }
}
