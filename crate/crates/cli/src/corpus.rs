//! Seeded random quantified formulas over Int and one declared sort.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    /// Nesting depth of quantifier blocks.
    pub max_depth: usize,
    /// Uninterpreted symbols declared per formula.
    pub symbols: usize,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams { max_depth: 2, symbols: 3 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum S {
    Int,
    U,
    Bool,
}

impl S {
    fn name(self) -> &'static str {
        match self {
            S::Int => "Int",
            S::U => "U",
            S::Bool => "Bool",
        }
    }
}

struct Sym {
    name: &'static str,
    args: &'static [S],
    result: S,
}

const POOL: [Sym; 7] = [
    Sym { name: "a", args: &[], result: S::Int },
    Sym { name: "b", args: &[], result: S::U },
    Sym { name: "f", args: &[S::Int], result: S::Int },
    Sym { name: "g", args: &[S::U], result: S::U },
    Sym { name: "h", args: &[S::U], result: S::Int },
    Sym { name: "p", args: &[S::Int], result: S::Bool },
    Sym { name: "q", args: &[S::Int, S::U], result: S::Bool },
];

struct Gen<'a> {
    rng: ChaCha8Rng,
    syms: Vec<&'a Sym>,
    fresh: usize,
}

impl Gen<'_> {
    fn term(&mut self, sort: S, vars: &[(String, S)], depth: usize) -> Option<String> {
        let apps: Vec<&Sym> = self
            .syms
            .iter()
            .copied()
            .filter(|s| s.result == sort && !s.args.is_empty())
            .collect();
        if depth > 0 && !apps.is_empty() && self.rng.gen_bool(0.35) {
            let f = *apps.choose(&mut self.rng).unwrap();
            let args: Option<Vec<String>> = f.args.iter().map(|s| self.term(*s, vars, depth - 1)).collect();
            if let Some(args) = args {
                return Some(format!("({} {})", f.name, args.join(" ")));
            }
        }
        let mut leaves: Vec<String> = vars.iter().filter(|(_, s)| *s == sort).map(|(v, _)| v.clone()).collect();
        leaves.extend(self.syms.iter().filter(|s| s.result == sort && s.args.is_empty()).map(|s| s.name.to_string()));
        if sort == S::Int {
            if self.rng.gen_bool(0.2) || leaves.is_empty() {
                let n: i32 = self.rng.gen_range(-1..=2);
                return Some(if n < 0 { format!("(- {})", -n) } else { n.to_string() });
            }
            if depth > 0 && self.rng.gen_bool(0.1) {
                let t = self.term(S::Int, vars, depth - 1)?;
                return Some(format!("(+ {t} 1)"));
            }
        }
        leaves.choose(&mut self.rng).cloned()
    }

    fn atom(&mut self, vars: &[(String, S)]) -> String {
        loop {
            let a = match self.rng.gen_range(0..4) {
                0 => {
                    let op = *["=", "<=", "<"].choose(&mut self.rng).unwrap();
                    let (l, r) = (self.term(S::Int, vars, 2), self.term(S::Int, vars, 2));
                    l.zip(r).map(|(l, r)| format!("({op} {l} {r})"))
                }
                1 => {
                    let (l, r) = (self.term(S::U, vars, 2), self.term(S::U, vars, 2));
                    l.zip(r).map(|(l, r)| format!("(= {l} {r})"))
                }
                _ => {
                    let preds: Vec<&Sym> = self.syms.iter().copied().filter(|s| s.result == S::Bool).collect();
                    preds.choose(&mut self.rng).copied().and_then(|p| {
                        let args: Option<Vec<String>> = p.args.iter().map(|s| self.term(*s, vars, 2)).collect();
                        args.map(|a| format!("({} {})", p.name, a.join(" ")))
                    })
                }
            };
            if let Some(a) = a {
                return if self.rng.gen_bool(0.4) { format!("(not {a})") } else { a };
            }
        }
    }

    fn clause(&mut self, vars: &[(String, S)]) -> String {
        let k = self.rng.gen_range(1..=3);
        let lits: Vec<String> = (0..k).map(|_| self.atom(vars)).collect();
        if k == 1 {
            lits.into_iter().next().unwrap()
        } else {
            format!("(or {})", lits.join(" "))
        }
    }

    fn formula(&mut self, depth: usize, vars: &mut Vec<(String, S)>) -> String {
        if depth == 0 {
            return self.clause(vars);
        }
        let q = if self.rng.gen_bool(0.75) { "forall" } else { "exists" };
        let n = self.rng.gen_range(1..=2);
        let mut binders = Vec::new();
        for _ in 0..n {
            let sort = if self.rng.gen_bool(0.6) { S::Int } else { S::U };
            let v = format!("v{}", self.fresh);
            self.fresh += 1;
            binders.push(format!("({v} {})", sort.name()));
            vars.push((v, sort));
        }
        let inner = self.formula(depth - 1, vars);
        let body = if depth > 1 && self.rng.gen_bool(0.5) {
            format!("(or {} {inner})", self.clause(vars))
        } else {
            inner
        };
        vars.truncate(vars.len() - n);
        format!("({q} ({}) {body})", binders.join(" "))
    }
}

/// One formula; the same seed always gives the same text.
pub fn generate(seed: u64, params: GenParams) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut syms: Vec<&Sym> = POOL.iter().collect::<Vec<_>>().choose_multiple(&mut rng, params.symbols.min(POOL.len())).copied().collect();
    syms.sort_by_key(|s| s.name);
    let mut g = Gen { rng, syms, fresh: 0 };
    let mut out = String::from("(declare-sort U 0)\n");
    for s in &g.syms {
        let args: Vec<&str> = s.args.iter().map(|a| a.name()).collect();
        out.push_str(&format!("(declare-fun {} ({}) {})\n", s.name, args.join(" "), s.result.name()));
    }
    let assertions = g.rng.gen_range(2..=4);
    for i in 0..assertions {
        // At least one quantified assertion per formula.
        let depth = if i == 0 { g.rng.gen_range(1..=params.max_depth.max(1)) } else { g.rng.gen_range(0..=params.max_depth) };
        let f = g.formula(depth, &mut Vec::new());
        out.push_str(&format!("(assert {f})\n"));
    }
    out.push_str("(check-sat)\n");
    out
}

/// Writes `count` formulas named `gen_NNN.smt2` into `dir`.
pub fn write_corpus(dir: &Path, count: usize, seed: u64, params: GenParams) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    (0..count)
        .map(|i| {
            let p = dir.join(format!("gen_{i:03}.smt2"));
            fs::write(&p, generate(seed.wrapping_add(i as u64), params))?;
            Ok(p)
        })
        .collect()
}
