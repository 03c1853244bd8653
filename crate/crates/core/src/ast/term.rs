use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{quote_symbol, ArithOp, AstError, Sort, Symbol, SymbolKind, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermKind {
    Var(Variable),
    Apply(Symbol, Vec<Term>),
    Numeral(BigInt),
}

struct TermNode {
    kind: TermKind,
    hash: u64,
    size: usize,
    ground: bool,
}

/// An immutable, hash-consed term.
///
/// Every `Term` is interned in a process-wide table, so `==` is pointer
/// equality and `clone` is a reference-count bump.
#[derive(Clone)]
pub struct Term(Arc<TermNode>);

static INTERNER: LazyLock<Mutex<HashMap<TermKind, Term>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn intern(kind: TermKind) -> Term {
    let mut table = INTERNER.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = table.get(&kind) {
        return t.clone();
    }
    let (size, ground) = match &kind {
        TermKind::Var(_) => (1, false),
        TermKind::Numeral(_) => (1, true),
        TermKind::Apply(_, args) => (
            1 + args.iter().map(Term::size).sum::<usize>(),
            args.iter().all(Term::is_ground),
        ),
    };
    // DefaultHasher::new() uses fixed keys, so the hash is stable across runs.
    let mut hasher = DefaultHasher::new();
    kind.hash(&mut hasher);
    let node = TermNode {
        hash: hasher.finish(),
        kind: kind.clone(),
        size,
        ground,
    };
    let term = Term(Arc::new(node));
    table.insert(kind, term.clone());
    term
}

impl Term {
    pub fn var(v: Variable) -> Term {
        intern(TermKind::Var(v))
    }

    pub fn numeral(n: impl Into<BigInt>) -> Term {
        intern(TermKind::Numeral(n.into()))
    }

    /// A constant, i.e. the application of a nullary symbol.
    pub fn constant(sym: Symbol) -> Term {
        intern(TermKind::Apply(sym, Vec::new()))
    }

    /// Builds `sym(args)`, checking arity and argument sorts. Arithmetic over
    /// numerals is folded to a numeral.
    pub fn apply(sym: Symbol, args: Vec<Term>) -> Result<Term, AstError> {
        if sym.arity() != args.len() {
            return Err(AstError::Arity {
                symbol: sym.name().to_string(),
                expected: sym.arity(),
                found: args.len(),
            });
        }
        for (expected, arg) in sym.arg_sorts().iter().zip(&args) {
            let found = arg.sort();
            if *expected != found {
                return Err(AstError::SortMismatch {
                    expected: expected.clone(),
                    found,
                    context: format!("argument `{arg}` of `{}`", sym.name()),
                });
            }
        }
        if let SymbolKind::Arith(op) = sym.kind() {
            if let Some(values) = args.iter().map(Term::as_numeral).collect::<Option<Vec<_>>>() {
                return Ok(Term::numeral(fold(*op, &values)));
            }
        }
        Ok(intern(TermKind::Apply(sym, args)))
    }

    /// `self + delta` for the ±1 offsets used by the comparison rules.
    /// Numerals are folded; other terms get a symbolic `(+ t 1)` / `(- t 1)`.
    pub fn offset(&self, delta: i64) -> Term {
        if let Some(n) = self.as_numeral() {
            return Term::numeral(n + BigInt::from(delta));
        }
        if delta == 0 {
            return self.clone();
        }
        let op = if delta > 0 { ArithOp::Add } else { ArithOp::Sub };
        let amount = Term::numeral(delta.unsigned_abs());
        Term::apply(Symbol::arith(op, 2), vec![self.clone(), amount])
            .expect("offset is only applied to Int terms")
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_ground(&self) -> bool {
        self.0.ground
    }

    pub fn sort(&self) -> Sort {
        match self.kind() {
            TermKind::Var(v) => v.sort.clone(),
            TermKind::Apply(sym, _) => sym.result_sort().clone(),
            TermKind::Numeral(_) => Sort::Int,
        }
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self.kind() {
            TermKind::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_numeral(&self) -> Option<&BigInt> {
        match self.kind() {
            TermKind::Numeral(n) => Some(n),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self.kind() {
            TermKind::Apply(_, args) => args,
            _ => &[],
        }
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match self.kind() {
            TermKind::Apply(sym, _) => Some(sym),
            _ => None,
        }
    }

    /// Whether `sub` occurs in `self` (reflexively).
    pub fn contains(&self, sub: &Term) -> bool {
        if self == sub {
            return true;
        }
        if sub.size() >= self.size() {
            return false;
        }
        self.args().iter().any(|a| a.contains(sub))
    }

    /// Visits every subterm in pre-order, including `self`.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for arg in self.args() {
            arg.visit(f);
        }
    }

    /// Variables of the term in first-occurrence order, without duplicates.
    pub fn vars(&self) -> Vec<Variable> {
        let mut out: Vec<Variable> = Vec::new();
        self.visit(&mut |t| {
            if let Some(v) = t.as_var() {
                if !out.iter().any(|o| o.id == v.id) {
                    out.push(v.clone());
                }
            }
        });
        out
    }
}

pub(crate) fn fold(op: ArithOp, values: &[&BigInt]) -> BigInt {
    match op {
        ArithOp::Add => values.iter().fold(BigInt::zero(), |acc, v| acc + *v),
        ArithOp::Mul => values.iter().fold(BigInt::one(), |acc, v| acc * *v),
        ArithOp::Neg => -values[0].clone(),
        ArithOp::Sub => {
            let (first, rest) = values.split_first().expect("subtraction has operands");
            if rest.is_empty() {
                -(*first).clone()
            } else {
                rest.iter().fold((*first).clone(), |acc, v| acc - *v)
            }
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for Term {
    /// Term size first, then a structural lexicographic comparison.
    fn cmp(&self, other: &Term) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.size()
            .cmp(&other.size())
            .then_with(|| structural_cmp(self, other))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn structural_cmp(a: &Term, b: &Term) -> Ordering {
    fn rank(t: &Term) -> u8 {
        match t.kind() {
            TermKind::Numeral(_) => 0,
            TermKind::Var(_) => 1,
            TermKind::Apply(..) => 2,
        }
    }
    match (a.kind(), b.kind()) {
        (TermKind::Numeral(x), TermKind::Numeral(y)) => x.cmp(y),
        (TermKind::Var(x), TermKind::Var(y)) => x.name.cmp(&y.name).then(x.id.cmp(&y.id)),
        (TermKind::Apply(f, xs), TermKind::Apply(g, ys)) => f
            .name()
            .cmp(g.name())
            .then_with(|| {
                for (x, y) in xs.iter().zip(ys) {
                    let c = x.cmp(y);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                xs.len().cmp(&ys.len())
            })
            .then_with(|| f.cmp(g)),
        _ => rank(a).cmp(&rank(b)),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TermKind::Var(v) => write!(f, "{v}"),
            TermKind::Numeral(n) if n.is_negative() => write!(f, "(- {})", n.abs()),
            TermKind::Numeral(n) => write!(f, "{n}"),
            TermKind::Apply(sym, args) if args.is_empty() => write!(f, "{sym}"),
            TermKind::Apply(sym, args) => {
                let name = match sym.kind() {
                    SymbolKind::Cmp(_) | SymbolKind::Arith(_) => sym.name().to_string(),
                    _ => quote_symbol(sym.name()),
                };
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::CmpOp;

    fn int_const(name: &str) -> Term {
        Term::constant(Symbol::uninterpreted(name, vec![], Sort::Int))
    }

    #[test]
    fn hash_consing_shares_structure() {
        let f = Symbol::uninterpreted("f", vec![Sort::Int], Sort::Int);
        let a = Term::apply(f.clone(), vec![int_const("c1")]).unwrap();
        let b = Term::apply(f, vec![int_const("c1")]).unwrap();
        assert!(Arc::ptr_eq(&a.0, &b.0));
        assert_eq!(a, b);
    }

    #[test]
    fn numeral_arithmetic_is_folded() {
        let t = Term::apply(
            Symbol::arith(ArithOp::Sub, 2),
            vec![Term::numeral(3), Term::numeral(1)],
        )
        .unwrap();
        assert_eq!(t, Term::numeral(2));
        assert_eq!(Term::numeral(5).offset(1), Term::numeral(6));
    }

    #[test]
    fn symbolic_offset_stays_symbolic() {
        let c = int_const("c3");
        let t = c.offset(-1);
        assert_eq!(t.to_string(), "(- c3 1)");
        assert!(t.is_ground());
    }

    #[test]
    fn apply_rejects_ill_sorted_arguments() {
        let u = Sort::uninterpreted("U");
        let a = Term::constant(Symbol::uninterpreted("a", vec![], u));
        let err = Term::apply(Symbol::cmp(CmpOp::Le, Sort::Int), vec![a, Term::numeral(1)]);
        assert!(matches!(err, Err(AstError::SortMismatch { .. })));
    }

    #[test]
    fn ordering_is_size_then_lexicographic() {
        let f = Symbol::uninterpreted("f", vec![Sort::Int], Sort::Int);
        let c1 = int_const("c1");
        let c4 = int_const("c4");
        let fc1 = Term::apply(f, vec![c1.clone()]).unwrap();
        let mut v = vec![fc1.clone(), c4.clone(), c1.clone()];
        v.sort();
        assert_eq!(v, vec![c1, c4, fc1]);
    }

    #[test]
    fn negative_numerals_print_as_smtlib() {
        assert_eq!(Term::numeral(-7).to_string(), "(- 7)");
    }
}
