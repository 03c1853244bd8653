use std::collections::{BTreeMap, HashMap};

use crate::ast::{
    occurrence_count, substitute_many, AstError, Formula, FormulaPath, Term, VarId, Variable,
};

use super::plan::{universal_vars, ElimPlan};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ElimStats {
    pub vars_total: usize,
    pub vars_eliminated: usize,
    pub instantiations: usize,
    /// Occurrences of each remaining variable before and after.
    pub occurrences: BTreeMap<VarId, (usize, usize)>,
}

impl ElimStats {
    /// `key=value` pairs on one line.
    pub fn line(&self) -> String {
        let (before, after) = self
            .occurrences
            .values()
            .fold((0, 0), |(b, a), (x, y)| (b + x, a + y));
        format!(
            "vars_total={} vars_eliminated={} instantiations={} remaining_occurrences_before={} remaining_occurrences_after={}",
            self.vars_total, self.vars_eliminated, self.instantiations, before, after
        )
    }
}

#[derive(Debug, Clone)]
pub struct Instantiated {
    pub assertions: Vec<Formula>,
    pub stats: ElimStats,
    pub elimination_order: Vec<Variable>,
    /// For each eliminated variable, the subformula that was instantiated.
    pub instantiated: Vec<(Variable, Formula)>,
}

/// Instantiates every variable outside `plan.no_elim` with its set.
///
/// Variables are processed innermost binder first. The minimal subformula
/// `B` containing all occurrences of `x` is replaced by the conjunction of
/// its instances when it sits under an even number of negations below the
/// binder, by their disjunction otherwise; `B` is widened to the outermost
/// `iff` between it and the binder, since no sign is defined inside one.
/// Assertions that changed are split at their top-level conjunctions.
pub fn instantiate(assertions: &[Formula], plan: &ElimPlan) -> Result<Instantiated, AstError> {
    let mut out: Vec<Formula> = assertions.to_vec();
    let mut stats = ElimStats::default();
    let mut order = Vec::new();
    let mut instantiated = Vec::new();
    let mut changed = vec![false; out.len()];

    let mut remaining: Vec<Variable> = Vec::new();
    for (i, a) in assertions.iter().enumerate() {
        let vars = universal_vars(a);
        stats.vars_total += vars.len();
        let mut post = binder_postorder(a);
        post.retain(|(v, _)| plan.inst_sets.contains_key(&v.id));
        for (v, _) in &post {
            order.push((i, v.clone()));
        }
        remaining.extend(
            vars.into_iter()
                .map(|(v, _)| v)
                .filter(|v| !plan.inst_sets.contains_key(&v.id)),
        );
    }
    for id in plan.inst_sets.keys() {
        if !order.iter().any(|(_, v)| v.id == *id) {
            return Err(AstError::VarAbsent(format!("#{}", id.0)));
        }
    }
    let before: BTreeMap<VarId, usize> = remaining
        .iter()
        .map(|v| (v.id, assertions.iter().map(|a| occurrence_count(a, v.id)).sum()))
        .collect();

    for (i, x) in &order {
        let set = &plan.inst_sets[&x.id];
        let a = &mut out[*i];
        let binder = a.binder_of(x.id).ok_or_else(|| AstError::VarAbsent(x.name.to_string()))?;
        if a.mentions(x.id) {
            let b = enclosing_node(a, &binder, x);
            let negated = negations_between(a, &binder, &b) % 2 == 1;
            let node = a.get(&b).expect("path from this formula").clone();
            let instances: Vec<Formula> = set
                .iter()
                .map(|gt| {
                    let map = HashMap::from([(x.id, gt.clone())]);
                    node.map_atoms(&mut |t| substitute_many(t, &map))
                })
                .collect();
            stats.instantiations += instances.len();
            let replacement = if negated { Formula::or(instances) } else { Formula::and(instances) };
            instantiated.push((x.clone(), node));
            *a.get_mut(&b).unwrap() = replacement;
        }
        remove_from_binder(a, &binder, x.id);
        changed[*i] = true;
        stats.vars_eliminated += 1;
    }

    let mut assertions_out = Vec::new();
    for (f, ch) in out.into_iter().zip(changed) {
        if ch {
            flatten_and(f, &mut assertions_out);
        } else {
            assertions_out.push(f);
        }
    }
    stats.occurrences = before
        .into_iter()
        .map(|(id, b)| {
            let after = assertions_out.iter().map(|a| occurrence_count(a, id)).sum();
            (id, (b, after))
        })
        .collect();
    Ok(Instantiated {
        assertions: assertions_out,
        stats,
        elimination_order: order.into_iter().map(|(_, v)| v).collect(),
        instantiated,
    })
}

/// Universal variables ordered innermost binder first, declaration order
/// within a binder.
fn binder_postorder(a: &Formula) -> Vec<(Variable, FormulaPath)> {
    let mut out = Vec::new();
    fn go(f: &Formula, path: FormulaPath, out: &mut Vec<(Variable, FormulaPath)>) {
        for (i, c) in f.children().into_iter().enumerate() {
            go(c, path.child(i), out);
        }
        if let Formula::Forall(vs, _) = f {
            out.extend(vs.iter().map(|v| (v.clone(), path.clone())));
        }
    }
    go(a, FormulaPath::root(), &mut out);
    out
}

fn enclosing_node(a: &Formula, binder: &FormulaPath, x: &Variable) -> FormulaPath {
    let mut lcp: Option<FormulaPath> = None;
    for (path, atom) in a.atoms() {
        if binder.is_prefix_of(&path) && atom.vars().iter().any(|v| v.id == x.id) {
            lcp = Some(match lcp {
                None => path,
                Some(p) => p.common_prefix(&path),
            });
        }
    }
    let b = lcp.expect("x occurs below its binder");
    // Widen to the outermost iff strictly between the binder and b.
    let body = binder.child(0);
    let mut node = a.get(&body).unwrap();
    let mut cur = body.clone();
    for &i in &b.0[body.len()..] {
        if matches!(node, Formula::Iff(..)) {
            return cur;
        }
        node = node.child(i).unwrap();
        cur = cur.child(i);
    }
    b
}

fn negations_between(a: &Formula, binder: &FormulaPath, b: &FormulaPath) -> usize {
    let mut node = a.get(binder).unwrap();
    let mut n = 0;
    for &i in &b.0[binder.len()..] {
        match node {
            Formula::Not(_) => n += 1,
            Formula::Implies(..) if i == 0 => n += 1,
            _ => {}
        }
        node = node.child(i).unwrap();
    }
    n
}

fn remove_from_binder(a: &mut Formula, binder: &FormulaPath, x: VarId) {
    let node = a.get_mut(binder).unwrap();
    let Formula::Forall(vs, body) = node else {
        unreachable!("binder path points at a forall")
    };
    vs.retain(|v| v.id != x);
    if vs.is_empty() {
        let body = std::mem::replace(body.as_mut(), Formula::True);
        *node = body;
    }
}

fn flatten_and(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(fs) => {
            for g in fs {
                flatten_and(g, out);
            }
        }
        g => out.push(g),
    }
}

/// Whether `conjunct` is `b[gt/x]` for one of the recorded instantiations.
pub fn is_instance(conjunct: &Formula, b: &Formula, x: &Variable, set: &[Term]) -> bool {
    set.iter().any(|gt| {
        let map = HashMap::from([(x.id, gt.clone())]);
        &b.map_atoms(&mut |t| substitute_many(t, &map)) == conjunct
    })
}
