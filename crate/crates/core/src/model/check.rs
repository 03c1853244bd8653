use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{subsumes, Solution};
use crate::ast::{ground_terms_of, Formula, Polarity, Variable};
use crate::normalize::polarity_map;

use super::lift::{LiftedModel, Projection};
use super::{eval_formula, eval_term, Assignment, Domain, ModelError, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    /// An assertion is false under the lifted model.
    Formula,
    /// A projection left the values of its ground term set.
    Membership,
    /// Lifted and original models disagree on a ground term.
    GroundAgreement,
    /// An uninterpreted literal changed value between a step's input under
    /// the projected assignment and its output.
    UninterpretedLiteral,
    /// An interpreted literal held before a step (projected assignment) but
    /// not after.
    InterpretedLiteral,
}

impl ViolationKind {
    pub const ALL: [ViolationKind; 5] = [
        ViolationKind::Formula,
        ViolationKind::Membership,
        ViolationKind::GroundAgreement,
        ViolationKind::UninterpretedLiteral,
        ViolationKind::InterpretedLiteral,
    ];
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Formula => "formula",
            ViolationKind::Membership => "projection-membership",
            ViolationKind::GroundAgreement => "ground-agreement",
            ViolationKind::UninterpretedLiteral => "uninterpreted-literal",
            ViolationKind::InterpretedLiteral => "interpreted-literal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    /// Checks performed per kind.
    pub checked: BTreeMap<ViolationKind, usize>,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    fn record(&mut self, kind: ViolationKind, ok: bool, detail: impl FnOnce() -> String) {
        *self.checked.entry(kind).or_default() += 1;
        if !ok {
            self.violations.push(Violation { kind, detail: detail() });
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for kind in ViolationKind::ALL {
            let n = self.checked.get(&kind).copied().unwrap_or(0);
            writeln!(f, "{kind}: {n} checked, {} violations", self.count(kind))?;
        }
        for v in &self.violations {
            writeln!(f, "violation {}: {}", v.kind, v.detail)?;
        }
        Ok(())
    }
}

fn show(beta: &Assignment, vars: &[Variable]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .filter_map(|v| beta.get(&v.id).map(|val| format!("{v}={val}")))
        .collect();
    format!("[{}]", parts.join(", "))
}

/// Every assignment of `vars` over `dom` when there are at most `samples`,
/// otherwise `samples` random ones.
fn assignments(
    vars: &[Variable],
    dom: &Domain,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Assignment>, ModelError> {
    let ranges = vars
        .iter()
        .map(|v| dom.values(&v.sort))
        .collect::<Result<Vec<_>, _>>()?;
    let total = ranges.iter().fold(1usize, |acc, r| acc.saturating_mul(r.len()));
    if total <= samples.max(1) {
        let mut out = Vec::new();
        super::for_each_assignment(
            vars.iter().map(|v| v.id).zip(ranges).collect(),
            &mut Assignment::new(),
            &mut |b| {
                out.push(b.clone());
                true
            },
        );
        return Ok(out);
    }
    Ok((0..samples)
        .map(|_| {
            vars.iter()
                .zip(&ranges)
                .map(|(v, r)| (v.id, r[rng.gen_range(0..r.len())].clone()))
                .collect()
        })
        .collect())
}

/// Leading universal variables of `f` and the body below them.
fn universal_prefix(f: &Formula) -> (Vec<Variable>, &Formula) {
    let mut vars = Vec::new();
    let mut cur = f;
    while let Formula::Forall(vs, body) = cur {
        vars.extend(vs.iter().cloned());
        cur = body;
    }
    (vars, cur)
}

/// Property checks of a lifted model against the skolemized original
/// assertions, with quantifiers over a finite domain around the model's
/// values. Assignments are enumerated when there are at most `samples` of
/// them and sampled with `seed` otherwise.
pub fn check_lifted(
    lifted: &LiftedModel,
    assertions: &[Formula],
    sol: &Solution,
    samples: usize,
    seed: u64,
) -> Result<CheckReport, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::default();
    let mut ground = BTreeSet::new();
    for a in assertions {
        for (_, atom) in a.atoms() {
            ground.extend(ground_terms_of(atom));
        }
    }
    let base = &lifted.base;
    let dom = Domain::for_model(base, &ground);

    for (i, a) in assertions.iter().enumerate() {
        let (vars, body) = universal_prefix(a);
        for beta in assignments(&vars, &dom, samples, &mut rng)? {
            let ok = eval_formula(lifted, &beta, body, &dom)?;
            report.record(ViolationKind::Formula, ok, || format!("assertion {} {a} under {}", i + 1, show(&beta, &vars)));
        }
    }

    for step in &lifted.steps {
        let x = &step.var;
        for v in dom.values(&x.sort)? {
            let p = step.own.apply(&v);
            report.record(ViolationKind::Membership, step.own.image.contains(&p), || {
                format!("projection for {x} maps {v} to {p}")
            });
        }
    }

    let empty = Assignment::new();
    for gt in &ground {
        let lv = eval_term(lifted, &empty, gt)?;
        let bv = eval_term(base, &empty, gt)?;
        report.record(ViolationKind::GroundAgreement, lv == bv, || format!("{gt}: {bv} became {lv}"));
    }

    let bound: Vec<Variable> = assertions.iter().flat_map(Formula::bound_vars).collect();
    for k in 0..lifted.steps.len() {
        let before = lifted.prefix(k);
        let after = lifted.prefix(k + 1);
        let x = &lifted.steps[k].var;
        let vgt_x = sol.vgt(x);
        // Projections of every variable whose set `vGT(x)` subsumes.
        let mut projections: BTreeMap<_, Projection> = BTreeMap::new();
        for y in &bound {
            let vgt_y = sol.vgt(y);
            if subsumes(vgt_y, vgt_x) {
                if let Some(p) = Projection::of_set(vgt_y.finite().expect("finite under a finite set"), &before)? {
                    projections.insert(y.id, p);
                }
            }
        }
        for a in assertions {
            let pol = polarity_map(a);
            for (path, atom) in a.atoms() {
                let vars = atom.vars();
                let polarity = pol.get(&path).copied().unwrap_or(Polarity::Both);
                for beta in assignments(&vars, &dom, samples, &mut rng)? {
                    let beta_p: Assignment = beta
                        .iter()
                        .map(|(y, v)| (*y, projections.get(y).map_or_else(|| v.clone(), |p| p.apply(v))))
                        .collect();
                    let l = eval_term(&before, &beta_p, atom)?;
                    let r = eval_term(&after, &beta, atom)?;
                    let detail = || format!("{atom} lifting {x} under {}: {l} then {r}", show(&beta, &vars));
                    if atom.symbol().is_some_and(|s| s.is_uninterpreted()) {
                        report.record(ViolationKind::UninterpretedLiteral, l == r, detail);
                    } else {
                        let (l, r) = (l == Value::Bool(true), r == Value::Bool(true));
                        let ok = match polarity {
                            Polarity::Pos => !l || r,
                            Polarity::Neg => l || !r,
                            Polarity::Both => l == r,
                        };
                        report.record(ViolationKind::InterpretedLiteral, ok, detail);
                    }
                }
            }
        }
    }
    Ok(report)
}
