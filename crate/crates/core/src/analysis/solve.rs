use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;

use crate::ast::{substitute_many, Sort, Symbol, Term, VarId};

use super::{Class, Constraint, ConstraintSystem, GroundTermSet, Infinity, Origin, SetVar, Solution};

/// Largest finite class the saturation will build before giving up.
pub const DEFAULT_CAP: usize = 10_000;

pub fn solve_constraints(cs: &ConstraintSystem) -> Solution {
    solve_constraints_with_cap(cs, DEFAULT_CAP)
}

/// Least solution of `cs`.
///
/// Classes of the union-find over `EqualSets` are processed in topological
/// order of the template dependencies, so each class is computed once from
/// final inputs. Classes on a dependency cycle are infinite: every template
/// source is some `vGT(x)`, and those are non-empty. A class still empty when
/// reached that must be non-empty is seeded with the least ground term of its
/// sort from the pool, or with a fresh constant.
pub fn solve_constraints_with_cap(cs: &ConstraintSystem, cap: usize) -> Solution {
    let setvars = cs.setvars();
    let index: HashMap<SetVar, usize> = setvars.iter().cloned().zip(0..).collect();
    let mut uf = UnionFind::<usize>::new(setvars.len());
    for (c, _) in cs.iter() {
        if let Constraint::EqualSets(a, b) = c {
            uf.union(index[a], index[b]);
        }
    }
    let mut class_id: HashMap<usize, usize> = HashMap::new();
    let mut classes: Vec<Class> = Vec::new();
    let mut class_of: HashMap<SetVar, usize> = HashMap::new();
    for (i, v) in setvars.iter().enumerate() {
        let rep = uf.find(i);
        let id = *class_id.entry(rep).or_insert_with(|| {
            classes.push(Class {
                setvars: Vec::new(),
                sort: v.sort(),
                set: GroundTermSet::empty(),
                provenance: BTreeMap::new(),
                infinity: None,
            });
            classes.len() - 1
        });
        debug_assert_eq!(classes[id].sort, v.sort());
        classes[id].setvars.push(v.clone());
        class_of.insert(v.clone(), id);
    }

    let n = classes.len();
    let mut members: Vec<Vec<(Term, usize)>> = vec![Vec::new(); n];
    let mut templates: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut nonempty = vec![false; n];
    let mut graph = DiGraph::<usize, ()>::with_capacity(n, 0);
    let nodes: Vec<NodeIndex> = (0..n).map(|i| graph.add_node(i)).collect();
    for (k, (c, _)) in cs.iter().enumerate() {
        match c {
            Constraint::NonEmpty(v) => nonempty[class_of[v]] = true,
            Constraint::EqualSets(..) => {}
            Constraint::Member(t, v) => members[class_of[v]].push((t.clone(), k)),
            Constraint::SetInfinite(v) => {
                let id = class_of[v];
                classes[id].infinity.get_or_insert(Infinity::Constraint(k));
            }
            Constraint::TemplateSubset { vars, target, .. } => {
                let t = class_of[target];
                templates[t].push(k);
                for x in vars {
                    let s = class_of[&SetVar::Vgt(x.clone())];
                    graph.update_edge(nodes[s], nodes[t], ());
                }
            }
        }
    }

    // tarjan_scc yields components in reverse topological order.
    let mut sccs = tarjan_scc(&graph);
    sccs.reverse();
    for scc in &sccs {
        let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        if cyclic {
            for node in scc {
                classes[graph[*node]].infinity.get_or_insert(Infinity::Cycle);
            }
        }
    }

    let mut pool: BTreeSet<Term> = cs.ground_pool.clone();
    let mut names = cs.names.clone();
    let mut seed_for: HashMap<Sort, Term> = HashMap::new();
    let mut seeds: Vec<Symbol> = Vec::new();
    let mut diagnostics = Vec::new();

    for scc in &sccs {
        for node in scc {
            let id = graph[*node];
            if classes[id].infinity.is_none() {
                let propagated = templates[id].iter().find_map(|&k| {
                    template_sources(cs, k, &class_of)
                        .into_iter()
                        .find(|&s| classes[s].infinity.is_some())
                });
                if let Some(src) = propagated {
                    classes[id].infinity = Some(Infinity::Propagated(src));
                }
            }
            if classes[id].infinity.is_some() {
                classes[id].set = GroundTermSet::Infinite;
                continue;
            }
            let mut set = BTreeSet::new();
            let mut prov = BTreeMap::new();
            for (t, k) in &members[id] {
                if set.insert(t.clone()) {
                    prov.insert(t.clone(), Origin::Constraint(*k));
                }
            }
            let mut overflow = false;
            for &k in &templates[id] {
                let Some((Constraint::TemplateSubset { template, vars, .. }, _)) = cs.get(k) else {
                    unreachable!()
                };
                let domains: Vec<Vec<Term>> = vars
                    .iter()
                    .map(|x| {
                        let s = class_of[&SetVar::Vgt(x.clone())];
                        classes[s].set.finite().unwrap().iter().cloned().collect()
                    })
                    .collect();
                let count = domains
                    .iter()
                    .try_fold(1usize, |acc, d| acc.checked_mul(d.len()));
                if count.is_none_or(|c| c > cap) {
                    overflow = true;
                    break;
                }
                let ids: Vec<VarId> = vars.iter().map(|v| v.id).collect();
                for_each_tuple(&domains, &mut |tuple| {
                    let map: HashMap<VarId, Term> = ids.iter().copied().zip(tuple.iter().cloned()).collect();
                    let inst = substitute_many(template, &map);
                    if set.insert(inst.clone()) {
                        prov.insert(inst, Origin::Constraint(k));
                    }
                });
                if set.len() > cap {
                    overflow = true;
                    break;
                }
            }
            overflow |= set.len() > cap;
            if overflow {
                diagnostics.push(format!(
                    "iteration cap {cap} reached while saturating {{{}}}; treated as INF",
                    classes[id]
                        .setvars
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
                classes[id].infinity = Some(Infinity::Cap);
                classes[id].set = GroundTermSet::Infinite;
                continue;
            }
            if set.is_empty() && nonempty[id] {
                let sort = classes[id].sort.clone();
                let seed = match pool.iter().find(|t| t.sort() == sort) {
                    Some(t) => t.clone(),
                    None => seed_for
                        .entry(sort.clone())
                        .or_insert_with(|| {
                            let name = names.fresh("seed", &sort.to_string());
                            let sym = Symbol::uninterpreted(&name, vec![], sort.clone());
                            seeds.push(sym.clone());
                            Term::constant(sym)
                        })
                        .clone(),
                };
                pool.insert(seed.clone());
                set.insert(seed.clone());
                prov.insert(seed, Origin::Seed);
            }
            classes[id].set = GroundTermSet::Finite(set);
            classes[id].provenance = prov;
        }
    }

    Solution {
        classes,
        class_of,
        seeds,
        diagnostics,
    }
}

fn template_sources(cs: &ConstraintSystem, k: usize, class_of: &HashMap<SetVar, usize>) -> Vec<usize> {
    match cs.get(k) {
        Some((Constraint::TemplateSubset { vars, .. }, _)) => vars
            .iter()
            .map(|x| class_of[&SetVar::Vgt(x.clone())])
            .collect(),
        _ => Vec::new(),
    }
}

/// Calls `f` on every element of the cartesian product, first domain slowest.
pub(crate) fn for_each_tuple(domains: &[Vec<Term>], f: &mut impl FnMut(&[Term])) {
    if domains.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; domains.len()];
    let mut tuple: Vec<Term> = domains.iter().map(|d| d[0].clone()).collect();
    loop {
        f(&tuple);
        let mut k = domains.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                tuple[k] = domains[k][idx[k]].clone();
                break;
            }
            idx[k] = 0;
            tuple[k] = domains[k][0].clone();
        }
    }
}
