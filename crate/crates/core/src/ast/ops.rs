use std::collections::{BTreeSet, HashMap};

use super::{AstError, Formula, FormulaPath, Term, TermKind, VarId, Variable};

/// `t[gt/x]`. `gt` must be ground and of the sort of `x`.
pub fn substitute(t: &Term, x: &Variable, gt: &Term) -> Result<Term, AstError> {
    check_replacement(x, gt)?;
    let map = HashMap::from([(x.id, gt.clone())]);
    Ok(substitute_many(t, &map))
}

/// `A[gt/x]` on formulas; binders are left untouched.
pub fn substitute_formula(f: &Formula, x: &Variable, gt: &Term) -> Result<Formula, AstError> {
    check_replacement(x, gt)?;
    let map = HashMap::from([(x.id, gt.clone())]);
    Ok(f.map_atoms(&mut |t| substitute_many(t, &map)))
}

fn check_replacement(x: &Variable, gt: &Term) -> Result<(), AstError> {
    if !gt.is_ground() {
        return Err(AstError::NotGround(gt.clone()));
    }
    let found = gt.sort();
    if found != x.sort {
        return Err(AstError::SortMismatch {
            expected: x.sort.clone(),
            found,
            context: format!("substitution for `{}`", x.name),
        });
    }
    Ok(())
}

/// Simultaneous substitution. Replacements must be sort-correct; this is the
/// unchecked core used by the checked wrappers and by template instantiation.
pub fn substitute_many(t: &Term, map: &HashMap<VarId, Term>) -> Term {
    if t.is_ground() {
        return t.clone();
    }
    match t.kind() {
        TermKind::Var(v) => map.get(&v.id).cloned().unwrap_or_else(|| t.clone()),
        TermKind::Numeral(_) => t.clone(),
        TermKind::Apply(sym, args) => {
            let new_args: Vec<Term> = args.iter().map(|a| substitute_many(a, map)).collect();
            if new_args == *args {
                t.clone()
            } else {
                Term::apply(sym.clone(), new_args).expect("sort-preserving substitution")
            }
        }
    }
}

/// All ground subterms of `t`, including `t` itself when ground.
pub fn ground_terms_of(t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    collect_ground(t, &mut out);
    out
}

/// Ground subterms of the atoms' arguments. Atoms themselves are Bool-valued
/// and are not collected.
pub fn ground_terms_of_formula(f: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for (_, atom) in f.atoms() {
        for arg in atom.args() {
            collect_ground(arg, &mut out);
        }
    }
    out
}

fn collect_ground(t: &Term, out: &mut BTreeSet<Term>) {
    if t.is_ground() {
        if out.insert(t.clone()) {
            for a in t.args() {
                collect_ground(a, out);
            }
        }
    } else {
        for a in t.args() {
            collect_ground(a, out);
        }
    }
}

/// Path of the minimal subformula of `f` containing every occurrence of `x`.
pub fn smallest_enclosing_subformula(f: &Formula, x: &Variable) -> Result<FormulaPath, AstError> {
    let mut lcp: Option<FormulaPath> = None;
    for (path, atom) in f.atoms() {
        if atom.vars().iter().any(|v| v.id == x.id) {
            lcp = Some(match lcp {
                None => path,
                Some(p) => p.common_prefix(&path),
            });
        }
    }
    lcp.ok_or_else(|| AstError::VarAbsent(x.name.to_string()))
}

/// Number of `x` leaves in `f`.
pub fn occurrence_count(f: &Formula, x: VarId) -> usize {
    let mut n = 0;
    for (_, atom) in f.atoms() {
        atom.visit(&mut |t| {
            if t.as_var().is_some_and(|v| v.id == x) {
                n += 1;
            }
        });
    }
    n
}
