use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::analysis::Solution;
use crate::ast::{Formula, FormulaPath, Term, VarId, Variable};

/// Bound on the estimated instantiation cost; `None` is unlimited.
pub type CMax = Option<u128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cost {
    Finite(u128),
    Infinite,
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(c) => write!(f, "{c}"),
            Cost::Infinite => f.write_str("INF"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimPlan {
    pub no_elim: BTreeSet<VarId>,
    /// Instantiation sets of the eliminable variables, least term first.
    pub inst_sets: BTreeMap<VarId, Vec<Term>>,
    /// Cost of each variable as last evaluated.
    pub costs: BTreeMap<VarId, Cost>,
    pub c_max: CMax,
    /// Passes of the outer loop, including the final one that changes nothing.
    pub rounds: usize,
}

/// The selection loop on abstract inputs: `sizes[x]` is `|vGT(x)|` (`None`
/// for infinite) and `scopes[x]` the variables occurring in the body of the
/// binder of `x`, `x` included. Every variable must have an entry in both.
pub fn select_no_elim(
    sizes: &BTreeMap<VarId, Option<usize>>,
    scopes: &BTreeMap<VarId, Vec<VarId>>,
    c_max: CMax,
) -> (BTreeSet<VarId>, BTreeMap<VarId, Cost>, usize) {
    let mut no_elim: BTreeSet<VarId> = sizes
        .iter()
        .filter(|(_, s)| s.is_none())
        .map(|(x, _)| *x)
        .collect();
    let mut costs: BTreeMap<VarId, Cost> = no_elim.iter().map(|x| (*x, Cost::Infinite)).collect();
    let exceeds = |c: u128| c_max.is_some_and(|m| c > m);
    let mut rounds = 0;
    // Stops once nothing is left to examine, so a run takes at most |vars|
    // passes.
    while no_elim.len() < sizes.len() {
        rounds += 1;
        let before = no_elim.len();
        for x in sizes.keys() {
            if no_elim.contains(x) {
                continue;
            }
            let scope = &scopes[x];
            let rep = scope.iter().any(|y| no_elim.contains(y));
            let live: Vec<VarId> = scope.iter().copied().filter(|y| !no_elim.contains(y)).collect();
            let cost = if rep {
                live.iter().fold(1u128, |acc, y| {
                    acc.saturating_mul(sizes[y].expect("infinite variables start in NoElim") as u128)
                })
            } else {
                0
            };
            costs.insert(*x, Cost::Finite(cost));
            if exceeds(cost) {
                // Largest set; the smallest id wins ties.
                let m = live
                    .iter()
                    .copied()
                    .max_by(|a, b| sizes[a].cmp(&sizes[b]).then(b.cmp(a)))
                    .expect("x itself is live");
                no_elim.insert(m);
                costs.insert(m, Cost::Finite(cost));
            }
        }
        if no_elim.len() == before {
            break;
        }
    }
    (no_elim, costs, rounds)
}

/// Variables occurring in the body of the binder of `x`, including `x`.
pub fn scopevars(a: &Formula, binder: &FormulaPath) -> Vec<VarId> {
    let mut out: Vec<VarId> = match a.get(binder) {
        Some(Formula::Forall(_, body)) | Some(Formula::Exists(_, body)) => {
            body.occurring_vars().iter().map(|v| v.id).collect()
        }
        _ => Vec::new(),
    };
    out.sort();
    out
}

/// Universally quantified variables of `a` with their binder paths.
pub fn universal_vars(a: &Formula) -> Vec<(Variable, FormulaPath)> {
    let mut out = Vec::new();
    a.walk(&FormulaPath::root(), &mut |path, f| {
        if let Formula::Forall(vs, _) = f {
            out.extend(vs.iter().map(|v| (v.clone(), path.clone())));
        }
    });
    out
}

/// The NoElim selection on a skolemized formula and its solution.
pub fn compute_no_elim(a: &Formula, sol: &Solution, c_max: CMax) -> ElimPlan {
    let vars = universal_vars(a);
    let mut sizes = BTreeMap::new();
    let mut scopes = BTreeMap::new();
    for (x, binder) in &vars {
        sizes.insert(x.id, sol.vgt(x).len());
        scopes.insert(x.id, scopevars(a, binder));
    }
    let (no_elim, costs, rounds) = select_no_elim(&sizes, &scopes, c_max);
    let inst_sets = vars
        .iter()
        .filter(|(x, _)| !no_elim.contains(&x.id))
        .map(|(x, _)| {
            let set = sol.vgt(x).finite().expect("finite outside NoElim");
            (x.id, set.iter().cloned().collect())
        })
        .collect();
    ElimPlan {
        no_elim,
        inst_sets,
        costs,
        c_max,
        rounds,
    }
}
