use std::fmt;

use super::{Term, VarId, Variable};

/// Sign an atom occurrence carries once negations are pushed inward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Pos,
    Neg,
    Both,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            Polarity::Both => Polarity::Both,
        }
    }

    pub fn join(self, other: Polarity) -> Polarity {
        if self == other {
            self
        } else {
            Polarity::Both
        }
    }

    pub fn has_pos(self) -> bool {
        matches!(self, Polarity::Pos | Polarity::Both)
    }

    pub fn has_neg(self) -> bool {
        matches!(self, Polarity::Neg | Polarity::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// A Bool-sorted term: a predicate application or a comparison.
    Atom(Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<Variable>, Box<Formula>),
    Exists(Vec<Variable>, Box<Formula>),
}

/// Child-index path from a formula root to one of its subformulas.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaPath(pub Vec<usize>);

impl FormulaPath {
    pub fn root() -> FormulaPath {
        FormulaPath(Vec::new())
    }

    pub fn child(&self, i: usize) -> FormulaPath {
        let mut p = self.0.clone();
        p.push(i);
        FormulaPath(p)
    }

    pub fn is_prefix_of(&self, other: &FormulaPath) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn common_prefix(&self, other: &FormulaPath) -> FormulaPath {
        FormulaPath(
            self.0
                .iter()
                .zip(&other.0)
                .take_while(|(a, b)| a == b)
                .map(|(a, _)| *a)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Formula {
    pub fn atom(t: Term) -> Formula {
        Formula::Atom(t)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; collapses the zero- and one-element cases.
    pub fn and(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::True,
            1 => fs.pop().unwrap(),
            _ => Formula::And(fs),
        }
    }

    /// Disjunction; collapses the zero- and one-element cases.
    pub fn or(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::False,
            1 => fs.pop().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(vars: Vec<Variable>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    pub fn exists(vars: Vec<Variable>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => Vec::new(),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => vec![f],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().collect(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
        }
    }

    pub fn child(&self, i: usize) -> Option<&Formula> {
        match self {
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) if i == 0 => Some(f),
            Formula::And(fs) | Formula::Or(fs) => fs.get(i),
            Formula::Implies(a, _) | Formula::Iff(a, _) if i == 0 => Some(a),
            Formula::Implies(_, b) | Formula::Iff(_, b) if i == 1 => Some(b),
            _ => None,
        }
    }

    pub fn child_mut(&mut self, i: usize) -> Option<&mut Formula> {
        match self {
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) if i == 0 => Some(f),
            Formula::And(fs) | Formula::Or(fs) => fs.get_mut(i),
            Formula::Implies(a, _) | Formula::Iff(a, _) if i == 0 => Some(a),
            Formula::Implies(_, b) | Formula::Iff(_, b) if i == 1 => Some(b),
            _ => None,
        }
    }

    pub fn get(&self, path: &FormulaPath) -> Option<&Formula> {
        path.0.iter().try_fold(self, |f, &i| f.child(i))
    }

    pub fn get_mut(&mut self, path: &FormulaPath) -> Option<&mut Formula> {
        path.0.iter().try_fold(self, |f, &i| f.child_mut(i))
    }

    /// Every atom occurrence with its path, in pre-order.
    pub fn atoms(&self) -> Vec<(FormulaPath, &Term)> {
        let mut out = Vec::new();
        self.walk(&FormulaPath::root(), &mut |path, f| {
            if let Formula::Atom(t) = f {
                out.push((path.clone(), t));
            }
        });
        out
    }

    /// Pre-order traversal over all subformulas.
    pub fn walk<'a>(&'a self, path: &FormulaPath, f: &mut impl FnMut(&FormulaPath, &'a Formula)) {
        f(path, self);
        for (i, c) in self.children().into_iter().enumerate() {
            c.walk(&path.child(i), f);
        }
    }

    /// Whether `x` occurs as a variable leaf anywhere in the formula.
    pub fn mentions(&self, x: VarId) -> bool {
        self.atoms().iter().any(|(_, t)| t.vars().iter().any(|v| v.id == x))
    }

    /// Variables occurring in atoms, in first-occurrence order.
    pub fn occurring_vars(&self) -> Vec<Variable> {
        let mut out: Vec<Variable> = Vec::new();
        for (_, t) in self.atoms() {
            for v in t.vars() {
                if !out.iter().any(|o| o.id == v.id) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Quantifier-bound variables in binder pre-order.
    pub fn bound_vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.walk(&FormulaPath::root(), &mut |_, f| {
            if let Formula::Forall(vs, _) | Formula::Exists(vs, _) = f {
                out.extend(vs.iter().cloned());
            }
        });
        out
    }

    pub fn has_quantifier(&self) -> bool {
        let mut found = false;
        self.walk(&FormulaPath::root(), &mut |_, f| {
            found |= matches!(f, Formula::Forall(..) | Formula::Exists(..));
        });
        found
    }

    /// Path of the binder that declares `x`, if any.
    pub fn binder_of(&self, x: VarId) -> Option<FormulaPath> {
        let mut found = None;
        self.walk(&FormulaPath::root(), &mut |path, f| {
            if let Formula::Forall(vs, _) | Formula::Exists(vs, _) = f {
                if found.is_none() && vs.iter().any(|v| v.id == x) {
                    found = Some(path.clone());
                }
            }
        });
        found
    }

    /// Rewrites every atom term bottom-up with `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(t) => Formula::Atom(f(t)),
            Formula::Not(a) => Formula::not(a.map_atoms(f)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::Forall(vs, b) => Formula::Forall(vs.clone(), Box::new(b.map_atoms(f))),
            Formula::Exists(vs, b) => Formula::Exists(vs.clone(), Box::new(b.map_atoms(f))),
        }
    }
}

fn write_binder(f: &mut fmt::Formatter<'_>, q: &str, vs: &[Variable], body: &Formula) -> fmt::Result {
    write!(f, "({q} (")?;
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "({v} {})", v.sort)?;
    }
    write!(f, ") {body})")
}

fn write_nary(f: &mut fmt::Formatter<'_>, op: &str, fs: &[Formula]) -> fmt::Result {
    write!(f, "({op}")?;
    for g in fs {
        write!(f, " {g}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(t) => write!(f, "{t}"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(fs) if fs.is_empty() => f.write_str("true"),
            Formula::Or(fs) if fs.is_empty() => f.write_str("false"),
            Formula::And(fs) => write_nary(f, "and", fs),
            Formula::Or(fs) => write_nary(f, "or", fs),
            Formula::Implies(a, b) => write!(f, "(=> {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(= {a} {b})"),
            Formula::Forall(vs, b) => write_binder(f, "forall", vs, b),
            Formula::Exists(vs, b) => write_binder(f, "exists", vs, b),
        }
    }
}
