use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::analysis::{subsumes, GroundTermSet, Solution};
use crate::ast::{Sort, Symbol, Term, Variable};

use super::{eval_term, Assignment, Domain, FunTable, Interpretation, Model, ModelError, Value};

/// Projection into the values a model gives a finite ground term set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub image: BTreeSet<Value>,
    /// Value of the least term, the target for values that are not integers.
    pub representative: Value,
}

impl Projection {
    /// `None` for the empty set.
    pub fn of_set<I: Interpretation + ?Sized>(
        set: &BTreeSet<Term>,
        m: &I,
    ) -> Result<Option<Projection>, ModelError> {
        let Some(least) = set.first() else { return Ok(None) };
        let empty = Assignment::new();
        let image = set
            .iter()
            .map(|t| eval_term(m, &empty, t))
            .collect::<Result<BTreeSet<_>, _>>()?;
        Ok(Some(Projection {
            image,
            representative: eval_term(m, &empty, least)?,
        }))
    }

    pub fn apply(&self, v: &Value) -> Value {
        project(&self.image, &self.representative, v)
    }
}

/// Members map to themselves, integers to the closest member (the smaller
/// one on ties), anything else to `representative`.
pub fn project(image: &BTreeSet<Value>, representative: &Value, v: &Value) -> Value {
    if image.contains(v) {
        return v.clone();
    }
    let Value::Int(n) = v else {
        return representative.clone();
    };
    image
        .iter()
        .filter_map(|w| w.as_int().map(|k| (k, w)))
        .min_by_key(|(k, _)| ((*k - n).magnitude().clone(), (*k).clone()))
        .map(|(_, w)| w.clone())
        .unwrap_or_else(|| representative.clone())
}

fn finite(set: &GroundTermSet) -> Result<&BTreeSet<Term>, ModelError> {
    set.finite().ok_or(ModelError::InfiniteSet)
}

/// The value projection for a finite, non-empty set.
pub fn pi_x<I: Interpretation + ?Sized>(set: &GroundTermSet, m: &I, v: &Value) -> Result<Value, ModelError> {
    let p = Projection::of_set(finite(set)?, m)?.ok_or(ModelError::EmptyImage)?;
    Ok(p.apply(v))
}

/// The projection applied to argument `i` (1-based) of `f` when lifting
/// through `x`: the identity unless `fGT(f,i)` is subsumed by `vGT(x)`.
/// An empty `fGT(f,i)` has nothing to project into and is also the
/// identity.
pub fn pi_fi<I: Interpretation + ?Sized>(
    x: &Variable,
    f: &Symbol,
    i: usize,
    sol: &Solution,
    m: &I,
    v: &Value,
) -> Result<Value, ModelError> {
    Ok(match position_projection(x, f, i, sol, m)? {
        Some(p) => p.apply(v),
        None => v.clone(),
    })
}

fn position_projection<I: Interpretation + ?Sized>(
    x: &Variable,
    f: &Symbol,
    i: usize,
    sol: &Solution,
    m: &I,
) -> Result<Option<Projection>, ModelError> {
    let vgt = sol.vgt(x);
    finite(vgt)?;
    let fgt = sol.fgt(f, i);
    if !subsumes(fgt, vgt) {
        return Ok(None);
    }
    Projection::of_set(finite(fgt)?, m)
}

/// One lifting step through an eliminated variable.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    pub(crate) var: Variable,
    /// Projection of `vGT(var)` itself.
    pub(crate) own: Projection,
    /// Non-identity projections by symbol name and 0-based position.
    positions: BTreeMap<(String, usize), Projection>,
}

/// A model of the instantiated formula wrapped by the projections of each
/// eliminated variable.
#[derive(Debug, Clone)]
pub struct LiftedModel {
    pub base: Model,
    symbols: Vec<Symbol>,
    /// In wrapping order: the last eliminated variable first.
    pub(crate) steps: Vec<Step>,
}

impl Interpretation for LiftedModel {
    fn universe(&self, sort: &Sort) -> usize {
        self.base.universe(sort)
    }

    fn apply_uninterpreted(&self, f: &Symbol, args: &[Value]) -> Result<Value, ModelError> {
        let mut vals = args.to_vec();
        // The outermost wrapper acts on the arguments first.
        for step in self.steps.iter().rev() {
            for (i, v) in vals.iter_mut().enumerate() {
                if let Some(p) = step.positions.get(&(f.name().to_string(), i)) {
                    *v = p.apply(v);
                }
            }
        }
        self.base.apply_uninterpreted(f, &vals)
    }
}

impl LiftedModel {
    /// Variables lifted through, in wrapping order.
    pub fn eliminated(&self) -> Vec<&Variable> {
        self.steps.iter().map(|s| &s.var).collect()
    }

    /// The model after the first `k` wrapping steps.
    pub fn prefix(&self, k: usize) -> LiftedModel {
        LiftedModel {
            base: self.base.clone(),
            symbols: self.symbols.clone(),
            steps: self.steps[..k].to_vec(),
        }
    }

    /// Finite tables over `dom`. The default is the value at integer
    /// arguments just above the window, so points outside the window may
    /// differ from the exact lifted interpretation.
    pub fn materialize(&self, dom: &Domain) -> Result<Model, ModelError> {
        const MAX_ROWS: usize = 1_000_000;
        let mut out = Model {
            universes: self.base.universes.clone(),
            consts: self.base.consts.clone(),
            funs: self.base.funs.clone(),
        };
        let outside = Value::Int(dom.ints.last().cloned().unwrap_or_default() + BigInt::from(1));
        for f in self.symbols.iter().filter(|f| f.arity() > 0) {
            let ranges = f
                .arg_sorts()
                .iter()
                .map(|s| dom.values(s))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = ranges.iter().fold(1usize, |acc, r| acc.saturating_mul(r.len()));
            if rows > MAX_ROWS {
                return Err(ModelError::Unsupported(format!("table of `{}` with {rows} rows", f.name())));
            }
            let default_args: Vec<Value> = f
                .arg_sorts()
                .iter()
                .map(|s| if s.is_int() { Ok(outside.clone()) } else { Value::default_of(s) })
                .collect::<Result<_, _>>()?;
            let default = self.apply_uninterpreted(f, &default_args)?;
            let mut entries = BTreeMap::new();
            let mut tuple = Vec::new();
            fill(self, f, &ranges, &mut tuple, &default, &mut entries)?;
            out.funs.insert(f.name().to_string(), FunTable { entries, default });
        }
        Ok(out)
    }
}

fn fill(
    m: &LiftedModel,
    f: &Symbol,
    ranges: &[Vec<Value>],
    tuple: &mut Vec<Value>,
    default: &Value,
    entries: &mut BTreeMap<Vec<Value>, Value>,
) -> Result<(), ModelError> {
    let Some((first, rest)) = ranges.split_first() else {
        let v = m.apply_uninterpreted(f, tuple)?;
        if v != *default {
            entries.insert(tuple.clone(), v);
        }
        return Ok(());
    };
    for v in first {
        tuple.push(v.clone());
        fill(m, f, rest, tuple, default, entries)?;
        tuple.pop();
    }
    Ok(())
}

/// Lifts a model of the instantiated formula through every eliminated
/// variable, last eliminated first. `symbols` are the uninterpreted symbols
/// of the original formula.
pub fn lift_model(
    m: &Model,
    sol: &Solution,
    symbols: &[Symbol],
    elim_order: &[Variable],
) -> Result<LiftedModel, ModelError> {
    let symbols: Vec<Symbol> = symbols.iter().filter(|f| f.is_uninterpreted()).cloned().collect();
    let mut lifted = LiftedModel {
        base: m.clone(),
        symbols: symbols.clone(),
        steps: Vec::new(),
    };
    for x in elim_order.iter().rev() {
        let own = Projection::of_set(finite(sol.vgt(x))?, &lifted)?.ok_or(ModelError::EmptyImage)?;
        let mut positions = BTreeMap::new();
        for f in symbols.iter().filter(|f| f.arity() > 0) {
            for i in 0..f.arity() {
                if let Some(p) = position_projection(x, f, i + 1, sol, &lifted)? {
                    positions.insert((f.name().to_string(), i), p);
                }
            }
        }
        lifted.steps.push(Step {
            var: x.clone(),
            own,
            positions,
        });
    }
    Ok(lifted)
}
