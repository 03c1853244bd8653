//! Independent set-constraint semantics: round-robin saturation over raw set
//! variables, and an exhaustive search for smaller solutions.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use sufgt_core::analysis::{Constraint, ConstraintSystem, GroundTermSet, Rule, SetVar, Solution};
use sufgt_core::ast::{substitute_many, Sort, Symbol, Term, VarId, Variable};
use sufgt_core::smtlib::FreshNames;

/// Terms larger than this only arise from dependency cycles.
const SIZE_BOUND: usize = 64;

/// `None` is the infinite set.
pub type Assign = HashMap<SetVar, Option<BTreeSet<Term>>>;

struct Sig {
    a: Term,
    b: Term,
    c: Term,
    g: Symbol,
    k: Symbol,
    h: Symbol,
}

fn sig() -> Sig {
    let u = Sort::uninterpreted("U");
    let con = |n: &str, s: Sort| Term::constant(Symbol::uninterpreted(n, vec![], s));
    Sig {
        a: con("a", u.clone()),
        b: con("b", u.clone()),
        c: con("c", Sort::Int),
        g: Symbol::uninterpreted("g", vec![u.clone()], u.clone()),
        k: Symbol::uninterpreted("k", vec![Sort::Int], u.clone()),
        h: Symbol::uninterpreted("h", vec![u.clone(), u], Sort::Int),
    }
}

fn app(f: &Symbol, args: Vec<Term>) -> Term {
    Term::apply(f.clone(), args).unwrap()
}

/// A random system over Int and one declared sort with at most 8
/// constraints and at most 4 pool terms. Every `vGT` variable is non-empty,
/// as in generated systems.
pub fn random_system(rng: &mut impl Rng) -> ConstraintSystem {
    let s = sig();
    let u = Sort::uninterpreted("U");
    let nvars = rng.gen_range(1..=3u32);
    let vars: Vec<Variable> = (0..nvars)
        .map(|i| Variable::new(i, &format!("x{i}"), if rng.gen_bool(0.5) { u.clone() } else { Sort::Int }))
        .collect();
    let candidates = [
        s.a.clone(),
        s.b.clone(),
        s.c.clone(),
        Term::numeral(0),
        Term::numeral(1),
        app(&s.g, vec![s.a.clone()]),
        app(&s.k, vec![s.c.clone()]),
        app(&s.h, vec![s.a.clone(), s.b.clone()]),
    ];
    let npool = rng.gen_range(0..=4);
    let pool: Vec<Term> = candidates.choose_multiple(rng, npool).cloned().collect();

    let mut setvars: Vec<SetVar> = vars.iter().cloned().map(SetVar::Vgt).collect();
    setvars.extend([
        SetVar::Fgt(s.g.clone(), 1),
        SetVar::Fgt(s.k.clone(), 1),
        SetVar::Fgt(s.h.clone(), 1),
        SetVar::Fgt(s.h.clone(), 2),
    ]);
    let of_sort = |sort: &Sort| -> Vec<SetVar> { setvars.iter().filter(|v| v.sort() == *sort).cloned().collect() };

    let mut cs = ConstraintSystem::new();
    for x in &vars {
        cs.add(Constraint::NonEmpty(SetVar::Vgt(x.clone())), Rule::Given);
    }
    let extra = rng.gen_range(0..=8 - nvars as usize);
    for _ in 0..extra {
        let target = setvars.choose(rng).unwrap().clone();
        let sort = target.sort();
        let roll = rng.gen_range(0..100);
        let c = if roll < 30 {
            let ts: Vec<&Term> = pool.iter().filter(|t| t.sort() == sort).collect();
            match ts.choose(rng) {
                Some(t) => Constraint::Member((*t).clone(), target),
                None => continue,
            }
        } else if roll < 50 {
            let other = of_sort(&sort).choose(rng).unwrap().clone();
            if other == target {
                continue;
            }
            Constraint::EqualSets(target, other)
        } else if roll < 92 {
            let var_of = |rng: &mut dyn rand::RngCore, sort: &Sort| -> Option<Term> {
                let vs: Vec<&Variable> = vars.iter().filter(|v| v.sort == *sort).collect();
                vs.choose(rng).map(|v| Term::var((*v).clone()))
            };
            let template = if sort == u {
                if rng.gen_bool(0.5) {
                    var_of(rng, &u).map(|x| app(&s.g, vec![x]))
                } else {
                    var_of(rng, &Sort::Int).map(|x| app(&s.k, vec![x]))
                }
            } else {
                let x = var_of(rng, &u);
                let y = if rng.gen_bool(0.5) { var_of(rng, &u) } else { Some(s.b.clone()) };
                x.zip(y).map(|(x, y)| app(&s.h, vec![x, y]))
            };
            match template {
                Some(t) => Constraint::template(t, target),
                None => continue,
            }
        } else {
            Constraint::SetInfinite(target)
        };
        cs.add(c, Rule::Given);
    }
    cs.ground_pool = pool.into_iter().collect();
    cs.names = FreshNames::from_names(["a", "b", "c", "g", "k", "h"].map(String::from));
    cs
}

fn instances(template: &Term, vars: &[Variable], sets: &[&BTreeSet<Term>]) -> Vec<Term> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    if sets.iter().any(|s| s.is_empty()) {
        return out;
    }
    let sets: Vec<Vec<&Term>> = sets.iter().map(|s| s.iter().collect()).collect();
    loop {
        let map: HashMap<VarId, Term> = vars.iter().zip(&idx).enumerate().map(|(j, (v, i))| (v.id, sets[j][*i].clone())).collect();
        out.push(substitute_many(template, &map));
        let mut j = 0;
        loop {
            if j == idx.len() {
                return out;
            }
            idx[j] += 1;
            if idx[j] < sets[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// One round-robin pass; returns whether anything changed.
fn step(cs: &ConstraintSystem, a: &mut Assign, cap: usize) -> bool {
    let mut changed = false;
    let mut grow = |a: &mut Assign, v: &SetVar, ts: Vec<Term>| {
        if let Some(Some(set)) = a.get_mut(v) {
            for t in ts {
                if t.size() > SIZE_BOUND {
                    a.insert(v.clone(), None);
                    changed = true;
                    return;
                }
                changed |= set.insert(t);
            }
            if set.len() > cap {
                a.insert(v.clone(), None);
                changed = true;
            }
        }
    };
    let make_inf = |a: &mut Assign, v: &SetVar| -> bool {
        let was = a[v].is_some();
        a.insert(v.clone(), None);
        was
    };
    let mut inf_changed = false;
    for (c, _) in cs.iter() {
        match c {
            Constraint::NonEmpty(_) => {}
            Constraint::Member(t, v) => grow(a, v, vec![t.clone()]),
            Constraint::SetInfinite(v) => inf_changed |= make_inf(a, v),
            Constraint::EqualSets(x, y) => match (a[x].clone(), a[y].clone()) {
                (None, _) | (_, None) => {
                    inf_changed |= make_inf(a, x);
                    inf_changed |= make_inf(a, y);
                }
                (Some(sx), Some(sy)) => {
                    grow(a, x, sy.into_iter().collect());
                    grow(a, y, sx.into_iter().collect());
                }
            },
            Constraint::TemplateSubset { template, vars, target } => {
                let sources: Vec<Option<BTreeSet<Term>>> =
                    vars.iter().map(|x| a[&SetVar::Vgt(x.clone())].clone()).collect();
                if sources.iter().any(Option::is_none) {
                    inf_changed |= make_inf(a, target);
                } else {
                    let sets: Vec<&BTreeSet<Term>> = sources.iter().map(|s| s.as_ref().unwrap()).collect();
                    if sets.iter().map(|s| s.len()).product::<usize>() > cap {
                        inf_changed |= make_inf(a, target);
                    } else {
                        grow(a, target, instances(template, vars, &sets));
                    }
                }
            }
        }
    }
    changed || inf_changed
}

fn reaches(cs: &ConstraintSystem, from: &SetVar) -> HashSet<SetVar> {
    let mut edges: HashMap<SetVar, Vec<SetVar>> = HashMap::new();
    for (c, _) in cs.iter() {
        match c {
            Constraint::EqualSets(x, y) => {
                edges.entry(x.clone()).or_default().push(y.clone());
                edges.entry(y.clone()).or_default().push(x.clone());
            }
            Constraint::TemplateSubset { vars, target, .. } => {
                for x in vars {
                    edges.entry(SetVar::Vgt(x.clone())).or_default().push(target.clone());
                }
            }
            _ => {}
        }
    }
    let mut seen = HashSet::from([from.clone()]);
    let mut stack = vec![from.clone()];
    while let Some(v) = stack.pop() {
        for w in edges.get(&v).into_iter().flatten() {
            if seen.insert(w.clone()) {
                stack.push(w.clone());
            }
        }
    }
    seen
}

/// The least solution by saturation. An empty set that must be non-empty is
/// seeded once no other such set upstream of it remains, with the least pool
/// term of its sort or the solver's fresh seed for that sort.
pub fn saturate(cs: &ConstraintSystem, seeds: &[Symbol], cap: usize) -> Assign {
    let mut a: Assign = cs.setvars().into_iter().map(|v| (v, Some(BTreeSet::new()))).collect();
    let mut pool = cs.ground_pool.clone();
    let order = cs.setvars();
    loop {
        while step(cs, &mut a, cap) {}
        let nonempty: Vec<SetVar> = cs
            .iter()
            .filter_map(|(c, _)| match c {
                Constraint::NonEmpty(v) if a[v].as_ref().is_some_and(BTreeSet::is_empty) => Some(v.clone()),
                _ => None,
            })
            .collect();
        if nonempty.is_empty() {
            return a;
        }
        let reach: HashMap<SetVar, HashSet<SetVar>> = nonempty.iter().map(|v| (v.clone(), reaches(cs, v))).collect();
        let chosen = order
            .iter()
            .filter(|v| nonempty.contains(v))
            .find(|c| !nonempty.iter().any(|d| d != *c && reach[d].contains(*c) && !reach[*c].contains(d)))
            .expect("some candidate has no strict upstream candidate")
            .clone();
        let sort = chosen.sort();
        let seed = match pool.iter().find(|t| t.sort() == sort) {
            Some(t) => t.clone(),
            // A seed the solver did not introduce is only harmless if it
            // ends up in infinite sets; the comparison reports it otherwise.
            None => match seeds.iter().find(|s| *s.result_sort() == sort) {
                Some(sym) => Term::constant(sym.clone()),
                None => Term::constant(Symbol::uninterpreted("oracle!seed", vec![], sort)),
            },
        };
        pool.insert(seed.clone());
        a.get_mut(&chosen).unwrap().as_mut().unwrap().insert(seed);
    }
}

/// Compares the solver's sets with [`saturate`] on every set variable.
pub fn compare(cs: &ConstraintSystem, sol: &Solution, cap: usize) -> Result<(), String> {
    let expected = saturate(cs, &sol.seeds, cap);
    for v in cs.setvars() {
        let got = match sol.set(&v) {
            GroundTermSet::Infinite => None,
            GroundTermSet::Finite(s) => Some(s.clone()),
        };
        if got != expected[&v] {
            return Err(format!("{v}: solver {got:?}, oracle {:?}", expected[&v]));
        }
    }
    Ok(())
}

fn satisfies(cs: &ConstraintSystem, a: &Assign) -> bool {
    cs.iter().all(|(c, _)| match c {
        Constraint::NonEmpty(v) => a[v].as_ref().is_none_or(|s| !s.is_empty()),
        Constraint::Member(t, v) => a[v].as_ref().is_none_or(|s| s.contains(t)),
        Constraint::SetInfinite(v) => a[v].is_none(),
        Constraint::EqualSets(x, y) => a[x] == a[y],
        Constraint::TemplateSubset { template, vars, target } => {
            let sources: Vec<&Option<BTreeSet<Term>>> = vars.iter().map(|x| &a[&SetVar::Vgt(x.clone())]).collect();
            match &a[target] {
                None => true,
                Some(t) => {
                    if sources.iter().any(|s| s.is_none()) {
                        return false;
                    }
                    let sets: Vec<&BTreeSet<Term>> = sources.iter().map(|s| s.as_ref().unwrap()).collect();
                    instances(template, vars, &sets).iter().all(|i| t.contains(i))
                }
            }
        }
    })
}

pub enum Minimality {
    Minimal,
    /// Too many subset assignments to enumerate.
    Skipped,
}

/// Checks that the solver's assignment satisfies `cs` and that no strictly
/// smaller assignment does, enumerating every subset of every finite class.
pub fn check_minimal(cs: &ConstraintSystem, sol: &Solution, limit: usize) -> Result<Minimality, String> {
    let setvars = cs.setvars();
    let mut classes: Vec<(Vec<SetVar>, Vec<Term>)> = Vec::new();
    let mut base: Assign = HashMap::new();
    for v in &setvars {
        match sol.set(v) {
            GroundTermSet::Infinite => {
                base.insert(v.clone(), None);
            }
            GroundTermSet::Finite(s) => {
                base.insert(v.clone(), Some(s.clone()));
                let id = sol.class_of(v);
                match classes.iter_mut().find(|(vs, _)| vs.iter().any(|w| sol.class_of(w) == id)) {
                    Some((vs, _)) => vs.push(v.clone()),
                    None => classes.push((vec![v.clone()], s.iter().cloned().collect())),
                }
            }
        }
    }
    if !satisfies(cs, &base) {
        return Err("the solver's assignment violates a constraint".into());
    }
    let bits: usize = classes.iter().map(|(_, s)| s.len()).sum();
    if bits > limit.ilog2() as usize {
        return Ok(Minimality::Skipped);
    }
    for mask in 0..(1u64 << bits) - 1 {
        let mut a = base.clone();
        let mut off = 0;
        for (vs, terms) in &classes {
            let sub: BTreeSet<Term> = terms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> (off + i) & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect();
            off += terms.len();
            for v in vs {
                a.insert(v.clone(), Some(sub.clone()));
            }
        }
        if satisfies(cs, &a) {
            return Err(format!("a strictly smaller assignment (mask {mask:b}) satisfies the system"));
        }
    }
    Ok(Minimality::Minimal)
}
