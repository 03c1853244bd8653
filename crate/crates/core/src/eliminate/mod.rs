//! Choosing which variables to eliminate and instantiating them.

mod instantiate;
mod plan;

pub use instantiate::{instantiate, is_instance, ElimStats, Instantiated};
pub use plan::{compute_no_elim, scopevars, select_no_elim, universal_vars, CMax, Cost, ElimPlan};

use crate::analysis::{
    generate_constraints, solve_constraints_with_cap, ConstraintSystem, Solution, DEFAULT_CAP,
};
use crate::ast::{Formula, Variable};
use crate::normalize::{polarity_map, skolemize_script};
use crate::smtlib::{FreshNames, Script};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplifyConfig {
    pub c_max: CMax,
    /// Largest finite class the solver builds.
    pub cap: usize,
}

impl Default for SimplifyConfig {
    fn default() -> SimplifyConfig {
        SimplifyConfig {
            c_max: None,
            cap: DEFAULT_CAP,
        }
    }
}

/// Everything the pipeline computed, kept for reporting and model lifting.
#[derive(Debug, Clone)]
pub struct SimplifyResult {
    /// The skolemized input; lifted models are checked against it.
    pub skolemized: Script,
    pub system: ConstraintSystem,
    pub solution: Solution,
    pub plan: ElimPlan,
    pub stats: ElimStats,
    pub elimination_order: Vec<Variable>,
}

/// Skolemize, analyze, plan and instantiate.
pub fn simplify(script: &Script, config: SimplifyConfig) -> Result<(Script, SimplifyResult), Error> {
    let (skolemized, _) = skolemize_script(script);
    let a = Formula::And(skolemized.assertions.clone());
    let mut system = generate_constraints(&a, &polarity_map(&a));
    system.names = FreshNames::for_script(&skolemized);
    let solution = solve_constraints_with_cap(&system, config.cap);
    let plan = compute_no_elim(&a, &solution, config.c_max);
    let inst = instantiate(&skolemized.assertions, &plan)?;

    let mut out = skolemized.clone();
    out.assertions = inst.assertions;
    out.annotations.clear();
    for s in &solution.seeds {
        out.declare(s.clone());
    }
    Ok((
        out,
        SimplifyResult {
            skolemized,
            system,
            solution,
            plan,
            stats: inst.stats,
            elimination_order: inst.elimination_order,
        },
    ))
}
