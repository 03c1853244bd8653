//! Set constraints over relevant ground terms and their least solution.
//!
//! Every universally quantified variable `x` gets a set variable `vGT(x)` and
//! every argument position `i` of an uninterpreted symbol `f` gets `fGT(f,i)`.
//! [`generate_constraints`] reads the constraints off the literals of a
//! skolemized formula; [`solve_constraints`] computes the least solution,
//! where a set is either a finite set of ground terms or infinite.

mod generate;
mod report;
mod solve;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;

use crate::ast::{Sort, Symbol, Term, Variable};
use crate::smtlib::FreshNames;

pub use generate::generate_constraints;
pub use report::format_solution;
pub use solve::{solve_constraints, solve_constraints_with_cap, DEFAULT_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetVar {
    Vgt(Variable),
    /// Argument position, 1-based.
    Fgt(Symbol, usize),
}

impl SetVar {
    pub fn sort(&self) -> Sort {
        match self {
            SetVar::Vgt(v) => v.sort.clone(),
            SetVar::Fgt(f, i) => f.arg_sorts()[i - 1].clone(),
        }
    }
}

impl fmt::Display for SetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetVar::Vgt(v) => write!(f, "vGT({v})"),
            SetVar::Fgt(s, i) => write!(f, "fGT({s},{i})"),
        }
    }
}

/// The rule a constraint was generated by. `NonGroundCmp` covers a variable
/// compared against a non-ground, non-variable term, which no numbered rule
/// handles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    R0,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    NonGroundCmp,
    /// Supplied directly rather than generated from a formula.
    Given,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::NonGroundCmp => f.write_str("cmp-nonground"),
            Rule::Given => f.write_str("given"),
            r => write!(f, "{r:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    NonEmpty(SetVar),
    EqualSets(SetVar, SetVar),
    Member(Term, SetVar),
    /// Every instance of `template` with `vars[i]` ranging over `vGT(vars[i])`
    /// belongs to `target`.
    TemplateSubset {
        template: Term,
        vars: Vec<Variable>,
        target: SetVar,
    },
    SetInfinite(SetVar),
}

impl Constraint {
    pub fn template(template: Term, target: SetVar) -> Constraint {
        let vars = template.vars();
        Constraint::TemplateSubset {
            template,
            vars,
            target,
        }
    }

    fn setvars(&self) -> Vec<SetVar> {
        match self {
            Constraint::NonEmpty(v) | Constraint::Member(_, v) | Constraint::SetInfinite(v) => {
                vec![v.clone()]
            }
            Constraint::EqualSets(a, b) => vec![a.clone(), b.clone()],
            Constraint::TemplateSubset { vars, target, .. } => vars
                .iter()
                .map(|v| SetVar::Vgt(v.clone()))
                .chain([target.clone()])
                .collect(),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::NonEmpty(v) => write!(f, "{v} nonempty"),
            Constraint::EqualSets(a, b) => write!(f, "{a} = {b}"),
            Constraint::Member(t, v) => write!(f, "{t} in {v}"),
            Constraint::TemplateSubset { template, target, .. } => {
                write!(f, "{template} subset {target}")
            }
            Constraint::SetInfinite(v) => write!(f, "{v} = INF"),
        }
    }
}

/// Constraints in generation order, each tagged with the first rule that
/// produced it, plus the ground terms available for seeding empty sets.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSystem {
    constraints: IndexMap<Constraint, Rule>,
    pub ground_pool: BTreeSet<Term>,
    pub names: FreshNames,
}

impl ConstraintSystem {
    pub fn new() -> ConstraintSystem {
        ConstraintSystem::default()
    }

    pub fn add(&mut self, c: Constraint, rule: Rule) {
        self.constraints.entry(c).or_insert(rule);
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Constraint, Rule)> {
        self.constraints.iter().map(|(c, r)| (c, *r))
    }

    pub fn get(&self, i: usize) -> Option<(&Constraint, Rule)> {
        self.constraints.get_index(i).map(|(c, r)| (c, *r))
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.constraints.contains_key(c)
    }

    /// Set variables in first-mention order.
    pub fn setvars(&self) -> Vec<SetVar> {
        let mut seen = indexmap::IndexSet::new();
        for c in self.constraints.keys() {
            seen.extend(c.setvars());
        }
        seen.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundTermSet {
    Finite(BTreeSet<Term>),
    Infinite,
}

impl GroundTermSet {
    pub fn empty() -> GroundTermSet {
        GroundTermSet::Finite(BTreeSet::new())
    }

    pub fn finite(&self) -> Option<&BTreeSet<Term>> {
        match self {
            GroundTermSet::Finite(s) => Some(s),
            GroundTermSet::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, GroundTermSet::Infinite)
    }

    /// Cardinality, `None` for the infinite set.
    pub fn len(&self) -> Option<usize> {
        self.finite().map(BTreeSet::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }
}

impl<I: IntoIterator<Item = Term>> From<I> for GroundTermSet {
    fn from(it: I) -> GroundTermSet {
        GroundTermSet::Finite(it.into_iter().collect())
    }
}

/// `R ⊑ S`: every term of `R` is a subterm of some term of `S`. The infinite
/// set subsumes everything and is subsumed only by itself.
pub fn subsumes(r: &GroundTermSet, s: &GroundTermSet) -> bool {
    match (r, s) {
        (_, GroundTermSet::Infinite) => true,
        (GroundTermSet::Infinite, GroundTermSet::Finite(_)) => false,
        (GroundTermSet::Finite(r), GroundTermSet::Finite(s)) => r
            .iter()
            .all(|gt1| s.iter().any(|gt2| gt2.contains(gt1))),
    }
}

/// Why a member was added to its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// Index of the `Member` or `TemplateSubset` constraint.
    Constraint(usize),
    Seed,
}

/// Why a class is infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infinity {
    /// A `SetInfinite` constraint, by index.
    Constraint(usize),
    /// The class lies on a cycle of template dependencies.
    Cycle,
    /// A template variable ranges over an infinite class.
    Propagated(usize),
    /// Saturation exceeded the iteration cap.
    Cap,
}

#[derive(Debug, Clone)]
pub struct Class {
    /// Set variables of the class in first-mention order.
    pub setvars: Vec<SetVar>,
    pub sort: Sort,
    pub set: GroundTermSet,
    pub provenance: BTreeMap<Term, Origin>,
    pub infinity: Option<Infinity>,
}

/// Least solution: union-find classes of set variables, each with its set.
#[derive(Debug, Clone)]
pub struct Solution {
    pub classes: Vec<Class>,
    class_of: HashMap<SetVar, usize>,
    /// Fresh constants introduced to seed sets that had to be non-empty.
    pub seeds: Vec<Symbol>,
    pub diagnostics: Vec<String>,
}

static EMPTY: GroundTermSet = GroundTermSet::Finite(BTreeSet::new());

impl Solution {
    pub fn class_of(&self, v: &SetVar) -> Option<usize> {
        self.class_of.get(v).copied()
    }

    /// The set of `v`; set variables the system never mentions are empty.
    pub fn set(&self, v: &SetVar) -> &GroundTermSet {
        match self.class_of(v) {
            Some(c) => &self.classes[c].set,
            None => &EMPTY,
        }
    }

    pub fn vgt(&self, x: &Variable) -> &GroundTermSet {
        self.set(&SetVar::Vgt(x.clone()))
    }

    pub fn fgt(&self, f: &Symbol, i: usize) -> &GroundTermSet {
        self.set(&SetVar::Fgt(f.clone(), i))
    }

    pub fn origin(&self, v: &SetVar, t: &Term) -> Option<&Origin> {
        self.class_of(v)
            .and_then(|c| self.classes[c].provenance.get(t))
    }
}
