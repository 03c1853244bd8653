//! The running example and its variants as SMT-LIB text.

/// Original formula with existentials.
pub const FIG1A: &str = "
(declare-fun c1 () Int)
(declare-fun c2 () Int)
(declare-fun f (Int) Int)
(declare-fun p (Int Int) Bool)
(assert (not (= c1 c2)))
(assert (forall ((x Int)) (= (f x) (f c1))))
(assert (exists ((z Int)) (forall ((y Int)) (or (not (p y z)) (= (f y) c2)))))
(assert (exists ((z Int)) (= (f z) c1)))
(check-sat)
";

/// The same after skolemization, with the skolem constants named `c3`, `c4`.
pub const FIG1B: &str = "
(declare-fun c1 () Int)
(declare-fun c2 () Int)
(declare-fun c3 () Int)
(declare-fun c4 () Int)
(declare-fun f (Int) Int)
(declare-fun p (Int Int) Bool)
(assert (not (= c1 c2)))
(assert (forall ((x Int)) (= (f x) (f c1))))
(assert (forall ((y Int)) (or (not (p y c3)) (= (f y) c2))))
(assert (= (f c4) c1))
(check-sat)
";

/// Expected ground assertions after complete elimination of `FIG1A`.
pub const FIG1C: [&str; 6] = [
    "(not (= c1 c2))",
    "(= (f c1) (f c1))",
    "(= (f sk!z!1) (f c1))",
    "(or (not (p c1 sk!z!0)) (= (f c1) c2))",
    "(or (not (p sk!z!1 sk!z!0)) (= (f sk!z!1) c2))",
    "(= (f sk!z!1) c1)",
];

/// A model of the instantiated formula that is arbitrary away from the
/// instantiated points.
pub const FIG1D: &str = "
const c1 -> 1
const c2 -> 2
const sk!z!0 -> 3
const sk!z!1 -> 4
fun f (1) -> 1
fun f (4) -> 1
fun f default -> 7
fun p (1 3) -> false
fun p (4 3) -> false
fun p default -> true
";

/// `FIG1A` with `p` replaced by `<=`: unsatisfiable.
pub const FIG1_LE: &str = "
(declare-fun c1 () Int)
(declare-fun c2 () Int)
(declare-fun f (Int) Int)
(assert (not (= c1 c2)))
(assert (forall ((x Int)) (= (f x) (f c1))))
(assert (exists ((z Int)) (forall ((y Int)) (or (not (<= y z)) (= (f y) c2)))))
(assert (exists ((z Int)) (= (f z) c1)))
(check-sat)
";

/// Three candidate values for `y`; `x` and `z` stay quantified because they
/// occur under arithmetic.
pub const EXAMPLE1: &str = "
(declare-fun psi (Int) Bool)
(declare-fun phi (Int Int Int) Bool)
(declare-fun a () Int)
(declare-fun b () Int)
(declare-fun c () Int)
(assert (forall ((x Int))
  (or (psi (+ x 0)) (psi x)
      (forall ((y Int) (z Int))
        (and (phi x y z) (<= (* z 1) 0)
             (=> (or (= y a) (= y b) (= y c)) (phi x y z)))))))
(check-sat)
";
