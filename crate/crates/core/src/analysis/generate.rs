use crate::ast::{CmpOp, Formula, Polarity, SymbolKind, Term, TermKind, Variable};
use crate::normalize::PolarityMap;
use crate::smtlib::FreshNames;

use super::{Constraint, ConstraintSystem, Rule, SetVar};

/// Builds the constraint system of a skolemized formula.
///
/// An atom occurrence of polarity `Pos` acts as the literal itself, `Neg` as
/// its negation, and `Both` as both.
pub fn generate_constraints(a: &Formula, pol: &PolarityMap) -> ConstraintSystem {
    let mut cs = ConstraintSystem::new();
    let mut names: Vec<String> = Vec::new();
    for x in a.bound_vars() {
        names.push(x.name.to_string());
        cs.add(Constraint::NonEmpty(SetVar::Vgt(x)), Rule::R0);
    }
    for (path, atom) in a.atoms() {
        atom.visit(&mut |t| {
            if let Some(s) = t.symbol() {
                names.push(s.name().to_string());
            }
            application(&mut cs, t);
        });
        let p = pol.get(&path).copied().unwrap_or(Polarity::Pos);
        comparison(&mut cs, atom, p);
    }
    cs.ground_pool = crate::ast::ground_terms_of_formula(a);
    cs.names = FreshNames::from_names(names);
    cs
}

fn application(cs: &mut ConstraintSystem, t: &Term) {
    let TermKind::Apply(sym, args) = t.kind() else {
        return;
    };
    match sym.kind() {
        SymbolKind::UninterpretedFun | SymbolKind::UninterpretedPred => {
            for (i, arg) in args.iter().enumerate() {
                let target = SetVar::Fgt(sym.clone(), i + 1);
                if let Some(x) = arg.as_var() {
                    cs.add(Constraint::EqualSets(SetVar::Vgt(x.clone()), target), Rule::R1);
                } else if arg.is_ground() {
                    cs.add(Constraint::Member(arg.clone(), target), Rule::R2);
                } else {
                    cs.add(Constraint::template(arg.clone(), target), Rule::R3);
                }
            }
        }
        SymbolKind::Arith(_) | SymbolKind::Unsupported => {
            for arg in args {
                if let Some(x) = arg.as_var() {
                    cs.add(Constraint::SetInfinite(SetVar::Vgt(x.clone())), Rule::R4);
                }
            }
        }
        SymbolKind::Cmp(_) => {}
    }
}

fn comparison(cs: &mut ConstraintSystem, atom: &Term, pol: Polarity) {
    let TermKind::Apply(sym, args) = atom.kind() else {
        return;
    };
    let SymbolKind::Cmp(op) = sym.kind() else {
        return;
    };
    let (l, r) = (&args[0], &args[1]);
    let inf = |cs: &mut ConstraintSystem, x: &Variable, rule| {
        cs.add(Constraint::SetInfinite(SetVar::Vgt(x.clone())), rule)
    };
    let (x, op, gt) = match (l.as_var(), r.as_var()) {
        (Some(x), Some(y)) => {
            inf(cs, x, Rule::R5);
            inf(cs, y, Rule::R5);
            return;
        }
        (Some(x), None) => (x, *op, r),
        (None, Some(x)) => (x, op.flipped(), l),
        (None, None) => return,
    };
    if !gt.is_ground() {
        inf(cs, x, Rule::NonGroundCmp);
        return;
    }
    let vx = || SetVar::Vgt(x.clone());
    if pol.has_pos() {
        match op {
            CmpOp::Le => cs.add(Constraint::Member(gt.offset(1), vx()), Rule::R6),
            CmpOp::Ge => cs.add(Constraint::Member(gt.offset(-1), vx()), Rule::R7),
            CmpOp::Lt | CmpOp::Gt => cs.add(Constraint::Member(gt.clone(), vx()), Rule::R11),
            CmpOp::Eq if x.sort.is_int() => {
                cs.add(Constraint::Member(gt.offset(-1), vx()), Rule::R13);
                cs.add(Constraint::Member(gt.offset(1), vx()), Rule::R13);
            }
            CmpOp::Eq => inf(cs, x, Rule::R14),
        }
    }
    if pol.has_neg() {
        match op {
            CmpOp::Le | CmpOp::Ge => cs.add(Constraint::Member(gt.clone(), vx()), Rule::R8),
            CmpOp::Lt => cs.add(Constraint::Member(gt.offset(-1), vx()), Rule::R9),
            CmpOp::Gt => cs.add(Constraint::Member(gt.offset(1), vx()), Rule::R10),
            CmpOp::Eq => cs.add(Constraint::Member(gt.clone(), vx()), Rule::R12),
        }
    }
}
