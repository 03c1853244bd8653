//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines are always printed; exits non-zero when any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::fixtures::{EXAMPLE1, FIG1A, FIG1B, FIG1C, FIG1D, FIG1_LE};
use common::oracle::{check_minimal, compare, random_system, Minimality};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sufgt::bench::{self, BenchRecord, Config};
use sufgt::corpus::{write_corpus, GenParams};
use sufgt::solver::{Run, SolverCmd, Status};
use sufgt_core::analysis::{
    generate_constraints, solve_constraints, solve_constraints_with_cap, GroundTermSet, SetVar, DEFAULT_CAP,
};
use sufgt_core::ast::{occurrence_count, Formula, Sort, Symbol, Term, VarId};
use sufgt_core::eliminate::{select_no_elim, simplify, CMax, SimplifyConfig};
use sufgt_core::model::{check_lifted, lift_model, pi_x, read_model, Domain, Interpretation, Model, Value};
use sufgt_core::normalize::polarity_map;
use sufgt_core::smtlib::{parse_script, print_script, FreshNames};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn run(src: &str, c_max: CMax) -> Result<(sufgt_core::smtlib::Script, sufgt_core::eliminate::SimplifyResult), String> {
    let s = parse_script(src).map_err(|e| e.to_string())?;
    simplify(&s, SimplifyConfig { c_max, ..Default::default() }).map_err(|e| e.to_string())
}

fn z3() -> Option<SolverCmd> {
    let cmd = SolverCmd::from_env(Duration::from_secs(10)).ok()?;
    cmd.locate().ok().map(|_| cmd)
}

fn solve_text(solver: &SolverCmd, dir: &Path, name: &str, text: &str) -> Status {
    let p = dir.join(name);
    std::fs::write(&p, text).expect("write scratch file");
    solver.run(&p).status
}

fn criterion1() -> Check {
    let start = Instant::now();
    let (out, res) = run(FIG1A, None)?;
    let mut got: Vec<String> = out.assertions.iter().map(|a| a.to_string()).collect();
    let mut want: Vec<String> = FIG1C.iter().map(|s| s.to_string()).collect();
    got.sort();
    want.sort();
    ensure(got == want, || format!("got {got:?}"))?;
    ensure(res.stats.vars_eliminated == 2, || res.stats.line())?;
    within(start, Duration::from_secs(1))?;
    Ok("six ground assertions, vars_eliminated=2".into())
}

fn criterion2() -> Check {
    let s = parse_script(FIG1B).map_err(|e| e.to_string())?;
    let a = Formula::And(s.assertions.clone());
    let mut cs = generate_constraints(&a, &polarity_map(&a));
    cs.names = FreshNames::for_script(&s);
    let sol = solve_constraints(&cs);
    let x = s.assertions[1].bound_vars()[0].clone();
    let y = s.assertions[2].bound_vars()[0].clone();
    let f = s.fun("f").unwrap().clone();
    let p = s.fun("p").unwrap().clone();
    let id = sol.class_of(&SetVar::Vgt(x.clone()));
    for v in [SetVar::Vgt(y), SetVar::Fgt(f, 1), SetVar::Fgt(p, 1)] {
        ensure(sol.class_of(&v) == id, || format!("{v} is in another class"))?;
    }
    let set: Vec<String> = sol.vgt(&x).finite().map_or_else(Vec::new, |s| s.iter().map(Term::to_string).collect());
    ensure(set == ["c1", "c4"], || format!("class is {set:?}"))?;
    Ok("shared class is {c1, c4}".into())
}

fn criterion3(solver: &SolverCmd) -> Check {
    let start = Instant::now();
    let (out, res) = run(FIG1_LE, None)?;
    let y = res.skolemized.assertions[2].bound_vars()[0].clone();
    let set: Vec<String> = res.plan.inst_sets[&y.id].iter().map(Term::to_string).collect();
    ensure(set.iter().any(|t| t == "sk!z!0"), || format!("set for y is {set:?}"))?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let simplified = solve_text(solver, dir.path(), "simpl.smt2", &print_script(&out));
    let original = solve_text(solver, dir.path(), "orig.smt2", FIG1_LE);
    ensure(simplified == Status::Unsat && original == Status::Unsat, || {
        format!("simplified {simplified}, original {original}")
    })?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("witness in {set:?}; {} reports unsat on both", solver.name))
}

fn criterion4() -> Check {
    let (out, res) = run(FIG1A, None)?;
    let m = read_model(FIG1D, &out).map_err(|e| e.to_string())?;
    let lifted =
        lift_model(&m, &res.solution, &res.skolemized.funs, &res.elimination_order).map_err(|e| e.to_string())?;
    let dom = Domain::for_model(&m, []);
    let f = out.fun("f").unwrap();
    let p = out.fun("p").unwrap();
    for v in &dom.ints {
        let v = Value::Int(v.clone());
        let fv = lifted.apply_uninterpreted(f, std::slice::from_ref(&v)).map_err(|e| e.to_string())?;
        ensure(fv == Value::int(1), || format!("f({v}) = {fv}"))?;
        let pv = lifted.apply_uninterpreted(p, &[v.clone(), Value::int(3)]).map_err(|e| e.to_string())?;
        ensure(pv == Value::Bool(false), || format!("p({v}, 3) = {pv}"))?;
    }
    let report = check_lifted(&lifted, &res.skolemized.assertions, &res.solution, 1000, 0).map_err(|e| e.to_string())?;
    ensure(report.is_ok(), || report.to_string())?;
    Ok(format!("{} domain points, zero violations", dom.ints.len()))
}

fn criterion5() -> Check {
    let parsed = parse_script(EXAMPLE1).map_err(|e| e.to_string())?;
    let (out, res) = run(EXAMPLE1, None)?;
    let (x, z) = (VarId(0), VarId(2));
    let inner = |f: &Formula| -> Option<Formula> {
        let Formula::Forall(_, body) = f else { return None };
        let Formula::Or(ds) = body.as_ref() else { return None };
        ds.get(2).cloned()
    };
    let before = inner(&parsed.assertions[0]).ok_or("unexpected input shape")?;
    let after = inner(&out.assertions[0]).ok_or("unexpected output shape")?;
    ensure(res.plan.inst_sets.values().any(|s| s.len() == 3), || "no set of size 3".into())?;
    let Formula::Forall(vs, _) = &after else { return Err(format!("inner binder gone: {after}")) };
    ensure(vs.iter().map(|v| v.id).eq([z]), || format!("inner binder is {vs:?}"))?;
    let mut counts = Vec::new();
    for v in [x, z] {
        let (b, a) = (occurrence_count(&before, v), occurrence_count(&after, v));
        ensure(a == 3 * b, || format!("{v:?}: {b} occurrences became {a}"))?;
        counts.push(format!("{b}->{a}"));
    }
    Ok(format!("y binder removed, occurrences x {} z {}", counts[0], counts[1]))
}

/// Binder trees with random sizes, as in a formula: each binder's scope
/// holds its own variables, everything bound below, and some enclosing ones.
fn random_scopes(rng: &mut ChaCha8Rng) -> (BTreeMap<VarId, Option<usize>>, BTreeMap<VarId, Vec<VarId>>) {
    let binders = rng.gen_range(1..6usize);
    let parent: Vec<Option<usize>> =
        (0..binders).map(|b| if b == 0 || rng.gen_bool(0.3) { None } else { Some(rng.gen_range(0..b)) }).collect();
    let mut own = Vec::new();
    let mut sizes = BTreeMap::new();
    let mut next = 0u32;
    for _ in 0..binders {
        let k = rng.gen_range(1..4);
        own.push((next..next + k).map(VarId).collect::<Vec<_>>());
        for i in next..next + k {
            sizes.insert(VarId(i), if rng.gen_bool(0.2) { None } else { Some(rng.gen_range(1..8)) });
        }
        next += k;
    }
    let mut used: Vec<BTreeSet<VarId>> = own.iter().map(|o| o.iter().copied().collect()).collect();
    for b in 0..binders {
        let mut a = parent[b];
        while let Some(p) = a {
            let extra: Vec<VarId> = own[p].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            used[b].extend(extra);
            a = parent[p];
        }
    }
    for b in (0..binders).rev() {
        if let Some(p) = parent[b] {
            let below = used[b].clone();
            used[p].extend(below);
        }
    }
    let scopes = (0..binders)
        .flat_map(|b| own[b].iter().map(|x| (*x, used[b].iter().copied().collect())).collect::<Vec<_>>())
        .collect();
    (sizes, scopes)
}

fn criterion6() -> Check {
    let start = Instant::now();
    let ids = |v: &[u32]| v.iter().copied().map(VarId).collect::<BTreeSet<_>>();
    let one_scope = |s: &[Option<usize>]| {
        let all: Vec<VarId> = (0..s.len() as u32).map(VarId).collect();
        let sizes: BTreeMap<_, _> = all.iter().copied().zip(s.iter().copied()).collect();
        let scopes: BTreeMap<_, _> = all.iter().map(|x| (*x, all.clone())).collect();
        (sizes, scopes)
    };
    let (s, sc) = one_scope(&[Some(3), Some(4), None]);
    for (c, want) in [(Some(10), ids(&[1, 2])), (Some(12), ids(&[2]))] {
        let got = select_no_elim(&s, &sc, c).0;
        ensure(got == want, || format!("cmax {c:?}: {got:?}"))?;
    }
    let (s, sc) = one_scope(&[Some(3), Some(4), Some(2)]);
    ensure(select_no_elim(&s, &sc, None).0.is_empty(), || "unlimited keeps a variable".into())?;
    let (_, res) = run(FIG1A, Some(0))?;
    ensure(res.plan.no_elim.is_empty() && res.stats.vars_eliminated == 2, || {
        format!("cmax 0 on the running example: {:?}", res.plan.no_elim)
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0;
    for _ in 0..1000 {
        let (sizes, scopes) = random_scopes(&mut rng);
        let c_max = if rng.gen_bool(0.1) { None } else { Some(rng.gen_range(0..60u128)) };
        let (ne, _, rounds) = select_no_elim(&sizes, &scopes, c_max);
        ensure(rounds <= sizes.len(), || format!("{rounds} passes over {} variables", sizes.len()))?;
        worst = worst.max(rounds);
        for x in sizes.keys().filter(|x| !ne.contains(x)) {
            let sc = &scopes[x];
            let cost: u128 = if sc.iter().any(|y| ne.contains(y)) {
                sc.iter().filter(|y| !ne.contains(y)).map(|y| sizes[y].unwrap_or(0) as u128).product()
            } else {
                0
            };
            ensure(c_max.is_none_or(|m| cost <= m), || format!("{x:?} left with cost {cost}"))?;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("cmax 0/10/12/unlimited traces match; 1000 random runs, at most {worst} passes"))
}

fn criterion7() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut enumerated, mut skipped) = (0, 0);
    for i in 0..3000 {
        let cs = random_system(&mut rng);
        ensure(cs.len() <= 8 && cs.ground_pool.len() <= 4, || "generator out of bounds".into())?;
        let sol = solve_constraints_with_cap(&cs, DEFAULT_CAP);
        compare(&cs, &sol, DEFAULT_CAP).map_err(|e| format!("system {i}: {e}"))?;
        match check_minimal(&cs, &sol, 1 << 16).map_err(|e| format!("system {i}: {e}"))? {
            Minimality::Minimal => enumerated += 1,
            Minimality::Skipped => skipped += 1,
        }
    }
    ensure(skipped == 0, || format!("{skipped} systems too large to enumerate"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("3000 systems, zero mismatches, {enumerated} enumerated exhaustively"))
}

fn criterion8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let consts: Vec<Symbol> = (0..6).map(|i| Symbol::uninterpreted(&format!("k{i}"), vec![], Sort::Int)).collect();
    for i in 0..10_000 {
        let mut m = Model::default();
        for c in &consts {
            m.consts.insert(c.name().to_string(), Value::int(rng.gen_range(-30..30)));
        }
        let n = rng.gen_range(1..=consts.len());
        let set: BTreeSet<Term> = consts.choose_multiple(&mut rng, n).map(|c| Term::constant(c.clone())).collect();
        let image: Vec<BigInt> = set
            .iter()
            .map(|t| m.consts[t.symbol().unwrap().name()].as_int().unwrap().clone())
            .collect();
        let gts = GroundTermSet::Finite(set);
        let v = BigInt::from(rng.gen_range(-60..60));
        let p = pi_x(&gts, &m, &Value::Int(v.clone())).map_err(|e| e.to_string())?;
        let pv = p.as_int().ok_or("non-integer projection")?.clone();
        ensure(image.contains(&pv), || format!("pair {i}: {pv} not in {image:?}"))?;
        let again = pi_x(&gts, &m, &p).map_err(|e| e.to_string())?;
        ensure(again == p, || format!("pair {i}: projecting {p} gives {again}"))?;
        let d = (&pv - &v).magnitude().clone();
        for w in &image {
            let dw = (w - &v).magnitude().clone();
            ensure(dw > d || (dw == d && *w >= pv), || format!("pair {i}: {w} is closer to {v} than {pv}"))?;
        }
    }
    Ok("10000 pairs: idempotent, members, closest".into())
}

fn criterion9(solver: &SolverCmd) -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inputs = write_corpus(&dir.path().join("in"), 100, 9000, GenParams { max_depth: 2, symbols: 3 })
        .map_err(|e| e.to_string())?;
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let report = bench::difftest(&inputs, solver, Config::Complete, &dir.path().join("out"), jobs)
        .map_err(|e| e.to_string())?;
    let conflicts: Vec<String> = report.conflicts().iter().map(|r| r.file.clone()).collect();
    ensure(conflicts.is_empty(), || format!("conflicts in {conflicts:?}"))?;
    let eliminated = report.rows.iter().filter(|r| r.vars_eliminated > 0).count();
    within(start, Duration::from_secs(600))?;
    Ok(format!(
        "100 formulas, {} definite pairs, {eliminated} with eliminations, zero conflicts",
        report.definite_pairs()
    ))
}

/// Independent recomputation from the printed CSV fields.
fn recompute(t_orig: &str, t_simpl: &str) -> f64 {
    let fix = |s: &str| {
        let t: f64 = s.parse().unwrap();
        if t == 0.0 {
            0.5
        } else {
            t
        }
    };
    fix(t_orig) / fix(t_simpl)
}

fn criterion10() -> Check {
    let synthetic = [(12.0, 3.0), (0.0, 4.0), (5.0, 0.0), (0.0, 0.0), (600.0, 0.25), (1.2345, 0.0004), (0.0004, 2.5)];
    let rows: Vec<BenchRecord> = synthetic
        .iter()
        .enumerate()
        .map(|(i, (a, b))| BenchRecord {
            file: format!("s{i}.smt2"),
            config: Config::Complete,
            original: Run { status: Status::Sat, seconds: *a },
            simplified: Run { status: Status::Sat, seconds: *b },
            t_preproc: 0.0,
            vars_eliminated: 0,
            speedup: bench::speedup(*a, *b),
        })
        .collect();
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf).map_err(|e| e.to_string())?;
    // A bench run over generated inputs with a stub solver: 20 files, 3 configs.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inputs = write_corpus(&dir.path().join("in"), 20, 100, GenParams::default()).map_err(|e| e.to_string())?;
    let stub = SolverCmd::parse("sh -c 'echo sat' {file}", Duration::from_secs(10)).map_err(|e| e.to_string())?;
    let bench_rows = bench::run_bench(&inputs, &stub, &bench::configs(&[100]), &dir.path().join("out"), 2)
        .map_err(|e| e.to_string())?;
    ensure(bench_rows.len() == 60, || format!("{} rows", bench_rows.len()))?;
    bench::write_csv(&bench_rows, &mut buf).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(buf.as_slice());
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        if &rec[0] == "file" {
            continue;
        }
        let want = format!("{:.3}", recompute(&rec[3], &rec[5]));
        ensure(want == rec[8], || format!("{}: speedup {} recomputed as {want}", &rec[0], &rec[8]))?;
        checked += 1;
    }
    Ok(format!(
        "{checked} rows recomputed to 3 decimals. Note: the published aggregate speedups were measured on \
         2012 competition benchmarks with 2012-era solvers and are not reproduced here"
    ))
}

fn main() -> ExitCode {
    let solver = z3();
    let mut outcomes: Vec<(u32, Outcome)> = Vec::new();
    fn record(outcomes: &mut Vec<(u32, Outcome)>, n: u32, check: Check) {
        outcomes.push((n, check.map_or_else(Outcome::Fail, Outcome::Pass)));
    }
    record(&mut outcomes, 1, criterion1());
    record(&mut outcomes, 2, criterion2());
    match &solver {
        Some(s) => record(&mut outcomes, 3, criterion3(s)),
        None => outcomes.push((3, Outcome::Skip("no external solver found (set SUFGT_SOLVER)".into()))),
    }
    record(&mut outcomes, 4, criterion4());
    record(&mut outcomes, 5, criterion5());
    record(&mut outcomes, 6, criterion6());
    record(&mut outcomes, 7, criterion7());
    record(&mut outcomes, 8, criterion8());
    match &solver {
        Some(s) => record(&mut outcomes, 9, criterion9(s)),
        None => outcomes.push((9, Outcome::Skip("no external solver found (set SUFGT_SOLVER)".into()))),
    }
    record(&mut outcomes, 10, criterion10());

    outcomes.sort_by_key(|(n, _)| *n);
    let mut failed = 0;
    for (n, o) in &outcomes {
        match o {
            Outcome::Pass(msg) => println!("criterion {n}: pass: {msg}"),
            Outcome::Fail(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL: {msg}");
            }
            Outcome::Skip(msg) => println!("criterion {n}: skipped: {msg}"),
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
