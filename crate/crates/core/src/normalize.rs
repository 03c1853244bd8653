//! Skolemization and polarity, computed as if the formula were in negation
//! normal form but without rewriting it.

use std::collections::{BTreeMap, HashMap};

use crate::ast::{substitute_many, Formula, FormulaPath, Polarity, Symbol, Term, Variable};
use crate::smtlib::{FreshNames, Script};

/// Polarity of every atom occurrence, keyed by its path.
pub type PolarityMap = BTreeMap<FormulaPath, Polarity>;

/// Skolemizes every assertion of `script` and declares the new symbols.
pub fn skolemize_script(script: &Script) -> (Script, Vec<Symbol>) {
    let mut names = FreshNames::for_script(script);
    let mut out = script.clone();
    let mut skolems = Vec::new();
    out.assertions = script
        .assertions
        .iter()
        .map(|a| {
            let (f, mut syms) = skolemize(a, &mut names);
            skolems.append(&mut syms);
            f
        })
        .collect();
    for s in &skolems {
        out.declare(s.clone());
    }
    (out, skolems)
}

/// Replaces existentially acting variables (positive `exists`, negative
/// `forall`) by skolem terms over the enclosing universal variables.
///
/// A negative `exists` acts universally; it is rewritten to
/// `not (forall (not ...))` so that no existential binder remains. An `iff`
/// with a quantifier below it is first split into two implications, since
/// its children occur with both signs. Bound variables that no longer occur
/// are dropped.
pub fn skolemize(f: &Formula, names: &mut FreshNames) -> (Formula, Vec<Symbol>) {
    let mut cx = Skolemizer {
        names,
        universals: Vec::new(),
        skolems: Vec::new(),
        map: HashMap::new(),
    };
    let out = cx.go(f, Polarity::Pos);
    (out, cx.skolems)
}

struct Skolemizer<'a> {
    names: &'a mut FreshNames,
    universals: Vec<Variable>,
    skolems: Vec<Symbol>,
    map: HashMap<crate::ast::VarId, Term>,
}

impl Skolemizer<'_> {
    fn go(&mut self, f: &Formula, pol: Polarity) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(t) => {
                if self.map.is_empty() {
                    f.clone()
                } else {
                    Formula::Atom(substitute_many(t, &self.map))
                }
            }
            Formula::Not(a) => match self.go(a, pol.flip()) {
                // Only produced by the negative-exists rewrite below.
                Formula::Not(inner) if matches!(*inner, Formula::Forall(..)) => *inner,
                g => Formula::not(g),
            },
            Formula::And(fs) => Formula::And(fs.iter().map(|g| self.go(g, pol)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| self.go(g, pol)).collect()),
            Formula::Implies(a, b) => {
                let a = self.go(a, pol.flip());
                Formula::implies(a, self.go(b, pol))
            }
            Formula::Iff(a, b) => {
                if a.has_quantifier() || b.has_quantifier() {
                    let split = Formula::And(vec![
                        Formula::implies(a.as_ref().clone(), b.as_ref().clone()),
                        Formula::implies(b.as_ref().clone(), a.as_ref().clone()),
                    ]);
                    self.go(&split, pol)
                } else {
                    let a = self.go(a, Polarity::Both);
                    Formula::iff(a, self.go(b, Polarity::Both))
                }
            }
            Formula::Forall(vs, body) => match pol {
                Polarity::Neg => self.skolem(vs, body, pol),
                _ => self.universal(vs, body, pol),
            },
            Formula::Exists(vs, body) => match pol {
                Polarity::Neg => {
                    // not (exists v. b)  ==  not (not (forall v. not b))
                    let inner = self.universal(vs, &Formula::not(body.as_ref().clone()), Polarity::Pos);
                    Formula::not(inner)
                }
                _ => self.skolem(vs, body, pol),
            },
        }
    }

    fn universal(&mut self, vs: &[Variable], body: &Formula, pol: Polarity) -> Formula {
        let depth = self.universals.len();
        self.universals.extend(vs.iter().cloned());
        let body = self.go(body, pol);
        self.universals.truncate(depth);
        let kept: Vec<Variable> = vs.iter().filter(|v| body.mentions(v.id)).cloned().collect();
        Formula::forall(kept, body)
    }

    fn skolem(&mut self, vs: &[Variable], body: &Formula, pol: Polarity) -> Formula {
        let args: Vec<Term> = self.universals.iter().cloned().map(Term::var).collect();
        let arg_sorts = self.universals.iter().map(|u| u.sort.clone()).collect::<Vec<_>>();
        for v in vs {
            let name = self.names.fresh("sk", v.base_name());
            let sym = Symbol::uninterpreted(&name, arg_sorts.clone(), v.sort.clone());
            let t = Term::apply(sym.clone(), args.clone()).expect("skolem arguments are well-sorted");
            self.skolems.push(sym);
            self.map.insert(v.id, t);
        }
        let out = self.go(body, pol);
        for v in vs {
            self.map.remove(&v.id);
        }
        out
    }
}

/// Polarity of each atom occurrence: flipped under `not` and on the left of
/// `=>`, `Both` anywhere below an `iff`.
pub fn polarity_map(f: &Formula) -> PolarityMap {
    let mut out = PolarityMap::new();
    fill(f, FormulaPath::root(), Polarity::Pos, &mut out);
    out
}

fn fill(f: &Formula, path: FormulaPath, pol: Polarity, out: &mut PolarityMap) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(_) => {
            out.insert(path, pol);
        }
        Formula::Not(a) => fill(a, path.child(0), pol.flip(), out),
        Formula::Forall(_, a) | Formula::Exists(_, a) => fill(a, path.child(0), pol, out),
        Formula::And(fs) | Formula::Or(fs) => {
            for (i, g) in fs.iter().enumerate() {
                fill(g, path.child(i), pol, out);
            }
        }
        Formula::Implies(a, b) => {
            fill(a, path.child(0), pol.flip(), out);
            fill(b, path.child(1), pol, out);
        }
        Formula::Iff(a, b) => {
            fill(a, path.child(0), Polarity::Both, out);
            fill(b, path.child(1), Polarity::Both, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::TermKind;
    use crate::smtlib::parse_script;
    use proptest::prelude::*;

    fn skolemized(src: &str) -> (Script, Vec<Symbol>) {
        skolemize_script(&parse_script(src).unwrap())
    }

    #[test]
    fn existential_constant() {
        let (s, sk) = skolemized(
            "(declare-fun f (Int) Int)(declare-fun c1 () Int)\
             (assert (exists ((z Int)) (= (f z) c1)))",
        );
        assert_eq!(sk.len(), 1);
        assert_eq!(sk[0].arity(), 0);
        assert_eq!(s.assertions[0].to_string(), "(= (f sk!z!0) c1)");
        assert!(s.fun("sk!z!0").is_some());
    }

    #[test]
    fn existential_over_universal() {
        let (s, _) = skolemized(
            "(declare-fun p (Int Int) Bool)(declare-fun f (Int) Int)(declare-fun c2 () Int)\
             (assert (exists ((z Int)) (forall ((y Int)) (or (not (p y z)) (= (f y) c2)))))",
        );
        assert_eq!(
            s.assertions[0].to_string(),
            "(forall ((y Int)) (or (not (p y sk!z!0)) (= (f y) c2)))"
        );
    }

    #[test]
    fn skolem_arguments_are_enclosing_universals() {
        let (s, sk) = skolemized(
            "(declare-sort U 0)(declare-fun q (U Int) Bool)\
             (assert (forall ((u U)) (exists ((z Int)) (q u z))))",
        );
        assert_eq!(sk[0].arity(), 1);
        let Formula::Forall(vs, body) = &s.assertions[0] else { panic!() };
        let Formula::Atom(t) = body.as_ref() else { panic!() };
        let skt = &t.args()[1];
        let TermKind::Apply(sym, args) = skt.kind() else { panic!() };
        assert_eq!(sym, &sk[0]);
        let free: Vec<_> = args.iter().flat_map(|a| a.vars()).collect();
        assert_eq!(free, vs.clone());
    }

    #[test]
    fn negative_quantifiers_swap_roles() {
        let (s, sk) = skolemized(
            "(declare-fun p (Int) Bool)\
             (assert (not (forall ((x Int)) (p x))))\
             (assert (not (exists ((y Int)) (p y))))",
        );
        assert_eq!(sk.len(), 1);
        assert_eq!(s.assertions[0].to_string(), "(not (p sk!x!0))");
        assert_eq!(
            s.assertions[1].to_string(),
            "(forall ((y Int)) (not (p y)))"
        );
        assert!(s.assertions.iter().all(|a| {
            let mut ex = false;
            a.walk(&FormulaPath::root(), &mut |_, g| ex |= matches!(g, Formula::Exists(..)));
            !ex
        }));
    }

    #[test]
    fn iff_over_quantifier_is_split() {
        let (s, sk) = skolemized(
            "(declare-fun p (Int) Bool)(declare-fun q () Bool)\
             (assert (= q (forall ((x Int)) (p x))))",
        );
        assert_eq!(sk.len(), 1);
        assert_eq!(
            s.assertions[0].to_string(),
            "(and (=> q (forall ((x Int)) (p x))) (=> (p sk!x!0) q))"
        );
    }

    #[test]
    fn unused_bound_variables_are_dropped() {
        let (s, _) = skolemized(
            "(declare-fun p (Int) Bool)(assert (forall ((x Int) (y Int)) (p x)))",
        );
        assert_eq!(s.assertions[0].to_string(), "(forall ((x Int)) (p x))");
    }

    #[test]
    fn clause_polarities() {
        let s = parse_script(
            "(declare-fun p (Int Int) Bool)(declare-fun f (Int) Int)(declare-fun c2 () Int)\
             (declare-fun c3 () Int)(declare-fun c () Int)\
             (assert (forall ((y Int)) (or (not (p y c3)) (= (f y) c2))))\
             (assert (forall ((x Int)) (not (<= x c))))",
        )
        .unwrap();
        let pm = polarity_map(&s.assertions[0]);
        let got: Vec<_> = pm.iter().map(|(p, pol)| (p.0.clone(), *pol)).collect();
        assert_eq!(got, vec![(vec![0, 0, 0], Polarity::Neg), (vec![0, 1], Polarity::Pos)]);
        let pm = polarity_map(&s.assertions[1]);
        assert_eq!(pm.values().copied().collect::<Vec<_>>(), vec![Polarity::Neg]);
    }

    #[test]
    fn iff_gives_both() {
        let s = parse_script(
            "(declare-fun a () Bool)(declare-fun b () Bool)(assert (=> a (= a b)))",
        )
        .unwrap();
        let pm = polarity_map(&s.assertions[0]);
        assert_eq!(
            pm.values().copied().collect::<Vec<_>>(),
            vec![Polarity::Neg, Polarity::Both, Polarity::Both]
        );
    }

    // Oracle: rewrite to NNF and distribute into clauses, then read off the
    // signs under which each labelled occurrence ends up.
    #[derive(Clone, Debug)]
    enum P {
        Lit(usize),
        Not(Box<P>),
        And(Vec<P>),
        Or(Vec<P>),
        Imp(Box<P>, Box<P>),
        Iff(Box<P>, Box<P>),
    }

    fn prop() -> impl Strategy<Value = P> {
        let leaf = Just(P::Lit(0));
        leaf.prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| P::Not(Box::new(a))),
                proptest::collection::vec(inner.clone(), 2..3).prop_map(P::And),
                proptest::collection::vec(inner.clone(), 2..3).prop_map(P::Or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| P::Imp(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| P::Iff(Box::new(a), Box::new(b))),
            ]
        })
    }

    fn label(p: &P, next: &mut usize) -> P {
        match p {
            P::Lit(_) => {
                *next += 1;
                P::Lit(*next - 1)
            }
            P::Not(a) => P::Not(Box::new(label(a, next))),
            P::And(fs) => P::And(fs.iter().map(|f| label(f, next)).collect()),
            P::Or(fs) => P::Or(fs.iter().map(|f| label(f, next)).collect()),
            P::Imp(a, b) => {
                let a = label(a, next);
                P::Imp(Box::new(a), Box::new(label(b, next)))
            }
            P::Iff(a, b) => {
                let a = label(a, next);
                P::Iff(Box::new(a), Box::new(label(b, next)))
            }
        }
    }

    type Clauses = Vec<Vec<(usize, bool)>>;

    fn cnf(p: &P, pos: bool) -> Clauses {
        let and = |a: Clauses, b: Clauses| [a, b].concat();
        let or = |a: Clauses, b: Clauses| {
            let mut out = Vec::new();
            for x in &a {
                for y in &b {
                    out.push([x.clone(), y.clone()].concat());
                }
            }
            out
        };
        match (p, pos) {
            (P::Lit(i), s) => vec![vec![(*i, s)]],
            (P::Not(a), s) => cnf(a, !s),
            (P::And(fs), true) | (P::Or(fs), false) => {
                fs.iter().map(|f| cnf(f, pos)).reduce(and).unwrap()
            }
            (P::Or(fs), true) | (P::And(fs), false) => {
                fs.iter().map(|f| cnf(f, pos)).reduce(or).unwrap()
            }
            (P::Imp(a, b), true) => or(cnf(a, false), cnf(b, true)),
            (P::Imp(a, b), false) => and(cnf(a, true), cnf(b, false)),
            (P::Iff(a, b), true) => and(
                or(cnf(a, false), cnf(b, true)),
                or(cnf(b, false), cnf(a, true)),
            ),
            (P::Iff(a, b), false) => and(
                or(cnf(a, true), cnf(b, true)),
                or(cnf(a, false), cnf(b, false)),
            ),
        }
    }

    fn to_formula(p: &P, atoms: &[Term]) -> Formula {
        match p {
            P::Lit(i) => Formula::atom(atoms[*i].clone()),
            P::Not(a) => Formula::not(to_formula(a, atoms)),
            P::And(fs) => Formula::And(fs.iter().map(|f| to_formula(f, atoms)).collect()),
            P::Or(fs) => Formula::Or(fs.iter().map(|f| to_formula(f, atoms)).collect()),
            P::Imp(a, b) => Formula::implies(to_formula(a, atoms), to_formula(b, atoms)),
            P::Iff(a, b) => Formula::iff(to_formula(a, atoms), to_formula(b, atoms)),
        }
    }

    proptest! {
        #[test]
        fn polarity_agrees_with_distributed_cnf(shape in prop()) {
            let mut n = 0;
            let p = label(&shape, &mut n);
            let atoms: Vec<Term> = (0..n)
                .map(|i| Term::constant(Symbol::uninterpreted(&format!("a{i}"), vec![], crate::ast::Sort::Bool)))
                .collect();
            let f = to_formula(&p, &atoms);
            let mut signs = vec![(false, false); n];
            for clause in cnf(&p, true) {
                for (i, s) in clause {
                    if s { signs[i].0 = true } else { signs[i].1 = true }
                }
            }
            let pm = polarity_map(&f);
            prop_assert_eq!(pm.len(), n);
            for (path, pol) in &pm {
                let Some(Formula::Atom(t)) = f.get(path) else { panic!() };
                let i: usize = t.symbol().unwrap().name()[1..].parse().unwrap();
                let want = match signs[i] {
                    (true, false) => Polarity::Pos,
                    (false, true) => Polarity::Neg,
                    _ => Polarity::Both,
                };
                prop_assert_eq!(*pol, want);
            }
        }
    }
}
