//! Finite models, evaluation, and lifting models of the instantiated formula
//! back to models of the original.
//!
//! A model interprets every uninterpreted symbol by a finite table plus a
//! default. Quantifiers are evaluated over a finite [`Domain`]: the whole
//! universe for declared sorts and an integer window for `Int`.

mod check;
mod format;
mod lift;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::ast::{fold, CmpOp, Formula, Sort, Symbol, SymbolKind, Term, TermKind, VarId};
use crate::smtlib::Script;

pub use check::{check_lifted, CheckReport, Violation, ViolationKind};
pub use format::{read_any_model, read_model, read_solver_model, write_model};
pub use lift::{lift_model, pi_fi, pi_x, project, LiftedModel, Projection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("symbol `{0}` is not interpreted")]
    Missing(String),
    #[error("sort mismatch: {0}")]
    Sort(String),
    #[error("cannot evaluate `{0}`")]
    Unsupported(String),
    #[error("variable `{0}` is unassigned")]
    Unassigned(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("projection into an empty set")]
    EmptyImage,
    #[error("projection into an infinite set")]
    InfiniteSet,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    /// Element `index` of the universe of a declared sort.
    Elem(Sort, usize),
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Whether the value inhabits `sort` under the given universe sizes.
    pub fn has_sort(&self, sort: &Sort, universes: &BTreeMap<Sort, usize>) -> bool {
        match (self, sort) {
            (Value::Bool(_), Sort::Bool) | (Value::Int(_), Sort::Int) => true,
            (Value::Elem(s, i), _) => s == sort && universes.get(s).is_some_and(|n| i < n),
            _ => false,
        }
    }

    /// The value tables fall back to when nothing else is known.
    pub fn default_of(sort: &Sort) -> Result<Value, ModelError> {
        match sort {
            Sort::Bool => Ok(Value::Bool(false)),
            Sort::Int => Ok(Value::int(0)),
            Sort::Uninterpreted(_) => Ok(Value::Elem(sort.clone(), 0)),
            Sort::Array(..) => Err(ModelError::Unsupported(sort.to_string())),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Elem(s, i) => write!(f, "{s}!val!{i}"),
        }
    }
}

/// A finite table with a default for every other argument tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunTable {
    pub entries: BTreeMap<Vec<Value>, Value>,
    pub default: Value,
}

impl FunTable {
    pub fn constant(default: Value) -> FunTable {
        FunTable {
            entries: BTreeMap::new(),
            default,
        }
    }

    pub fn lookup(&self, args: &[Value]) -> &Value {
        self.entries.get(args).unwrap_or(&self.default)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    /// Universe sizes of the declared sorts.
    pub universes: BTreeMap<Sort, usize>,
    pub consts: BTreeMap<String, Value>,
    pub funs: BTreeMap<String, FunTable>,
}

pub type Assignment = BTreeMap<VarId, Value>;

/// Anything that gives uninterpreted symbols a meaning.
pub trait Interpretation {
    fn universe(&self, sort: &Sort) -> usize;
    fn apply_uninterpreted(&self, f: &Symbol, args: &[Value]) -> Result<Value, ModelError>;
}

impl Interpretation for Model {
    fn universe(&self, sort: &Sort) -> usize {
        self.universes.get(sort).copied().unwrap_or(1)
    }

    fn apply_uninterpreted(&self, f: &Symbol, args: &[Value]) -> Result<Value, ModelError> {
        if args.is_empty() {
            if let Some(v) = self.consts.get(f.name()) {
                return Ok(v.clone());
            }
        }
        self.funs
            .get(f.name())
            .map(|t| t.lookup(args).clone())
            .ok_or_else(|| ModelError::Missing(f.name().to_string()))
    }
}

impl Model {
    /// Interprets every symbol `script` declares but `self` lacks by the
    /// default of its result sort, and gives missing sorts one element.
    pub fn complete(&mut self, script: &Script) -> Result<(), ModelError> {
        for s in &script.sorts {
            self.universes.entry(s.clone()).or_insert(1);
        }
        for f in script.funs.iter().filter(|f| f.is_uninterpreted()) {
            let name = f.name().to_string();
            if self.consts.contains_key(&name) || self.funs.contains_key(&name) {
                continue;
            }
            let d = Value::default_of(f.result_sort())?;
            if f.arity() == 0 {
                self.consts.insert(name, d);
            } else {
                self.funs.insert(name, FunTable::constant(d));
            }
        }
        Ok(())
    }

    /// Checks that every declared symbol is interpreted with sort-correct
    /// entries.
    pub fn validate(&self, script: &Script) -> Result<(), ModelError> {
        for s in &script.sorts {
            if self.universes.get(s).is_none_or(|n| *n == 0) {
                return Err(ModelError::Missing(format!("universe of {s}")));
            }
        }
        let bad = |what: String| Err(ModelError::Sort(what));
        for f in script.funs.iter().filter(|f| f.is_uninterpreted()) {
            let name = f.name();
            if f.arity() == 0 {
                match self.consts.get(name) {
                    None => return Err(ModelError::Missing(name.to_string())),
                    Some(v) if !v.has_sort(f.result_sort(), &self.universes) => {
                        return bad(format!("{name} -> {v}"));
                    }
                    Some(_) => {}
                }
                continue;
            }
            let table = self
                .funs
                .get(name)
                .ok_or_else(|| ModelError::Missing(name.to_string()))?;
            if !table.default.has_sort(f.result_sort(), &self.universes) {
                return bad(format!("{name} default -> {}", table.default));
            }
            for (args, v) in &table.entries {
                let ok = args.len() == f.arity()
                    && args.iter().zip(f.arg_sorts()).all(|(a, s)| a.has_sort(s, &self.universes))
                    && v.has_sort(f.result_sort(), &self.universes);
                if !ok {
                    let args: Vec<String> = args.iter().map(Value::to_string).collect();
                    return bad(format!("{name} ({}) -> {v}", args.join(" ")));
                }
            }
        }
        Ok(())
    }

    /// Integer values mentioned anywhere in the model.
    pub fn int_values(&self) -> BTreeSet<BigInt> {
        let mut out = BTreeSet::new();
        let mut add = |v: &Value| {
            if let Value::Int(n) = v {
                out.insert(n.clone());
            }
        };
        self.consts.values().for_each(&mut add);
        for t in self.funs.values() {
            add(&t.default);
            for (args, v) in &t.entries {
                args.iter().for_each(&mut add);
                add(v);
            }
        }
        out
    }
}

/// Values quantifiers range over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub ints: Vec<BigInt>,
    pub universes: BTreeMap<Sort, usize>,
}

/// Margin added around the known integers.
pub const INT_MARGIN: i64 = 3;
/// Widest contiguous integer window before falling back to neighbourhoods.
pub const MAX_WINDOW: usize = 256;

impl Domain {
    /// `[min - 3, max + 3]` around `ints`, or the union of `[v - 3, v + 3]`
    /// when that interval would be wider than [`MAX_WINDOW`].
    pub fn around(ints: &BTreeSet<BigInt>, universes: BTreeMap<Sort, usize>) -> Domain {
        let margin = BigInt::from(INT_MARGIN);
        let (lo, hi) = match (ints.first(), ints.last()) {
            (Some(lo), Some(hi)) => (lo - &margin, hi + &margin),
            _ => (-margin.clone(), margin.clone()),
        };
        let width = &hi - &lo;
        let mut out = BTreeSet::new();
        if width < BigInt::from(MAX_WINDOW) {
            let mut v = lo;
            while v <= hi {
                out.insert(v.clone());
                v += 1;
            }
        } else {
            for n in ints {
                for d in -INT_MARGIN..=INT_MARGIN {
                    out.insert(n + d);
                }
            }
        }
        Domain {
            ints: out.into_iter().collect(),
            universes,
        }
    }

    /// The domain for checking `m` against formulas with the given ground
    /// terms: integers of the model and of the terms' values.
    pub fn for_model<'a>(m: &Model, ground: impl IntoIterator<Item = &'a Term>) -> Domain {
        let mut ints = m.int_values();
        for t in ground {
            if let Ok(Value::Int(n)) = eval_term(m, &Assignment::new(), t) {
                ints.insert(n);
            }
        }
        Domain::around(&ints, m.universes.clone())
    }

    pub fn values(&self, sort: &Sort) -> Result<Vec<Value>, ModelError> {
        match sort {
            Sort::Bool => Ok(vec![Value::Bool(false), Value::Bool(true)]),
            Sort::Int => Ok(self.ints.iter().cloned().map(Value::Int).collect()),
            Sort::Uninterpreted(_) => {
                let n = self.universes.get(sort).copied().unwrap_or(1);
                Ok((0..n).map(|i| Value::Elem(sort.clone(), i)).collect())
            }
            Sort::Array(..) => Err(ModelError::Unsupported(format!("quantifier over {sort}"))),
        }
    }
}

pub fn eval_term<I: Interpretation + ?Sized>(
    m: &I,
    beta: &Assignment,
    t: &Term,
) -> Result<Value, ModelError> {
    match t.kind() {
        TermKind::Var(v) => beta
            .get(&v.id)
            .cloned()
            .ok_or_else(|| ModelError::Unassigned(v.name.to_string())),
        TermKind::Numeral(n) => Ok(Value::Int(n.clone())),
        TermKind::Apply(sym, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term(m, beta, a))
                .collect::<Result<Vec<_>, _>>()?;
            apply(m, sym, &vals)
        }
    }
}

fn apply<I: Interpretation + ?Sized>(m: &I, sym: &Symbol, vals: &[Value]) -> Result<Value, ModelError> {
    let ints = || {
        vals.iter()
            .map(|v| v.as_int().ok_or_else(|| ModelError::Sort(format!("{v} in `{}`", sym.name()))))
            .collect::<Result<Vec<_>, _>>()
    };
    match sym.kind() {
        SymbolKind::UninterpretedFun | SymbolKind::UninterpretedPred => m.apply_uninterpreted(sym, vals),
        SymbolKind::Cmp(CmpOp::Eq) => Ok(Value::Bool(vals[0] == vals[1])),
        SymbolKind::Cmp(op) => {
            let v = ints()?;
            let r = match op {
                CmpOp::Lt => v[0] < v[1],
                CmpOp::Le => v[0] <= v[1],
                CmpOp::Gt => v[0] > v[1],
                CmpOp::Ge => v[0] >= v[1],
                CmpOp::Eq => unreachable!(),
            };
            Ok(Value::Bool(r))
        }
        SymbolKind::Arith(op) => Ok(Value::Int(fold(*op, &ints()?))),
        SymbolKind::Unsupported => {
            let v = ints().map_err(|_| ModelError::Unsupported(sym.name().to_string()))?;
            match (sym.name(), v.as_slice()) {
                ("abs", [a]) => Ok(Value::Int(a.abs())),
                // Euclidean division as in SMT-LIB; division by zero is left
                // unspecified there, so it is not evaluated.
                ("div", [a, b]) if !b.is_zero() => Ok(Value::Int(euclid(a, b).0)),
                ("mod", [a, b]) if !b.is_zero() => Ok(Value::Int(euclid(a, b).1)),
                _ => Err(ModelError::Unsupported(sym.name().to_string())),
            }
        }
    }
}

fn euclid(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let mut q = a / b;
    let mut r = a - &q * b;
    if r.is_negative() {
        if b.is_positive() {
            q -= 1;
            r += b;
        } else {
            q += 1;
            r -= b;
        }
    }
    (q, r)
}

/// Truth of `f` under `(m, beta)`, with quantifiers ranging over `dom`.
pub fn eval_formula<I: Interpretation + ?Sized>(
    m: &I,
    beta: &Assignment,
    f: &Formula,
    dom: &Domain,
) -> Result<bool, ModelError> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(t) => eval_term(m, beta, t)?
            .as_bool()
            .ok_or_else(|| ModelError::Sort(format!("atom `{t}` is not Bool")))?,
        Formula::Not(g) => !eval_formula(m, beta, g, dom)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_formula(m, beta, g, dom)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_formula(m, beta, g, dom)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Implies(a, b) => !eval_formula(m, beta, a, dom)? || eval_formula(m, beta, b, dom)?,
        Formula::Iff(a, b) => eval_formula(m, beta, a, dom)? == eval_formula(m, beta, b, dom)?,
        Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
            let universal = matches!(f, Formula::Forall(..));
            let ranges = vs
                .iter()
                .map(|v| dom.values(&v.sort))
                .collect::<Result<Vec<_>, _>>()?;
            let mut beta = beta.clone();
            let mut found = None;
            for_each_assignment(vs.iter().map(|v| v.id).zip(ranges).collect(), &mut beta, &mut |b| {
                match eval_formula(m, b, body, dom) {
                    Ok(r) if r != universal => {
                        found = Some(Ok(()));
                        false
                    }
                    Ok(_) => true,
                    Err(e) => {
                        found = Some(Err(e));
                        false
                    }
                }
            });
            match found {
                Some(Err(e)) => return Err(e),
                Some(Ok(())) => !universal,
                None => universal,
            }
        }
    })
}

/// Calls `visit` on every extension of `beta` over the ranges until it
/// returns false. Returns whether the enumeration ran to completion.
pub(crate) fn for_each_assignment(
    ranges: Vec<(VarId, Vec<Value>)>,
    beta: &mut Assignment,
    visit: &mut dyn FnMut(&Assignment) -> bool,
) -> bool {
    fn go(
        ranges: &[(VarId, Vec<Value>)],
        beta: &mut Assignment,
        visit: &mut dyn FnMut(&Assignment) -> bool,
    ) -> bool {
        let Some(((x, vals), rest)) = ranges.split_first() else {
            return visit(beta);
        };
        for v in vals {
            beta.insert(*x, v.clone());
            if !go(rest, beta, visit) {
                return false;
            }
        }
        true
    }
    go(&ranges, beta, visit)
}
