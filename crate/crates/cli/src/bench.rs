//! Timing original against simplified inputs under an external solver.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sufgt_core::eliminate::{simplify, CMax, SimplifyConfig};
use sufgt_core::smtlib::{parse_script, print_script};

use crate::solver::{Run, SolverCmd, SolverError, Status};

pub const HEADER: [&str; 9] =
    ["file", "config", "status_orig", "t_orig", "status_simpl", "t_simpl", "t_preproc", "vars_elim", "speedup"];

/// How an input is preprocessed before the second solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Config {
    /// Reprinted without elimination.
    Original,
    /// Every finite variable eliminated.
    Complete,
    CMax(u128),
}

impl Config {
    pub fn c_max(self) -> Option<CMax> {
        match self {
            Config::Original => None,
            Config::Complete => Some(None),
            Config::CMax(n) => Some(Some(n)),
        }
    }

    fn file_tag(self) -> String {
        match self {
            Config::CMax(n) => format!("cmax{n}"),
            c => c.to_string(),
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Original => f.write_str("original"),
            Config::Complete => f.write_str("complete"),
            Config::CMax(n) => write!(f, "cmax={n}"),
        }
    }
}

/// Original, complete elimination, then one config per threshold.
pub fn configs(cmaxes: &[u128]) -> Vec<Config> {
    let mut out = vec![Config::Original, Config::Complete];
    out.extend(cmaxes.iter().map(|n| Config::CMax(*n)));
    out
}

/// The time as the CSV prints it, three decimals.
pub fn round3(t: f64) -> f64 {
    format!("{t:.3}").parse().expect("formatted float parses")
}

/// Old time over new time, a zero time counted as half a second.
pub fn speedup(t_orig: f64, t_simpl: f64) -> f64 {
    let fix = |t: f64| {
        let t = round3(t);
        if t == 0.0 {
            0.5
        } else {
            t
        }
    };
    fix(t_orig) / fix(t_simpl)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub file: String,
    pub config: Config,
    pub original: Run,
    pub simplified: Run,
    pub t_preproc: f64,
    pub vars_eliminated: usize,
    pub speedup: f64,
}

impl BenchRecord {
    pub fn fields(&self) -> [String; 9] {
        [
            self.file.clone(),
            self.config.to_string(),
            self.original.status.to_string(),
            format!("{:.3}", self.original.seconds),
            self.simplified.status.to_string(),
            format!("{:.3}", self.simplified.seconds),
            format!("{:.3}", self.t_preproc),
            self.vars_eliminated.to_string(),
            format!("{:.3}", self.speedup),
        ]
    }
}

pub fn write_csv<W: io::Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug)]
pub enum BenchError {
    Solver(SolverError),
    Io(PathBuf, io::Error),
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Solver(e) => e.fmt(f),
            BenchError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl std::error::Error for BenchError {}

/// The `.smt2` files of `dir`, sorted by name.
pub fn list_inputs(dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let io_err = |e| BenchError::Io(dir.to_path_buf(), e);
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let p = entry.map_err(io_err)?.path();
        if p.is_file() && p.extension().is_some_and(|e| e == "smt2") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// A preprocessed input. `path` is `None` when preprocessing failed.
#[derive(Debug, Clone)]
struct Prepared {
    input: usize,
    config: Config,
    path: Option<PathBuf>,
    seconds: f64,
    vars_eliminated: usize,
}

fn prepare(input: &Path, index: usize, config: Config, out_dir: &Path) -> Result<Prepared, BenchError> {
    let start = Instant::now();
    let failed = Prepared { input: index, config, path: None, seconds: 0.0, vars_eliminated: 0 };
    let Ok(text) = fs::read_to_string(input) else { return Ok(failed) };
    let Ok(script) = parse_script(&text) else { return Ok(failed) };
    let (printed, vars_eliminated) = match config.c_max() {
        None => (print_script(&script), 0),
        Some(c_max) => match simplify(&script, SimplifyConfig { c_max, ..Default::default() }) {
            Ok((out, res)) => (print_script(&out), res.stats.vars_eliminated),
            Err(_) => return Ok(failed),
        },
    };
    let seconds = start.elapsed().as_secs_f64();
    let stem = input.file_stem().map_or_else(|| format!("input{index}"), |s| s.to_string_lossy().into_owned());
    let path = out_dir.join(format!("{stem}.{}.smt2", config.file_tag()));
    fs::write(&path, printed).map_err(|e| BenchError::Io(path.clone(), e))?;
    Ok(Prepared { input: index, config, path: Some(path), seconds, vars_eliminated })
}

/// One row per input and config, in input order. Inputs are never
/// modified; preprocessed scripts are written to `out_dir`. Up to `jobs`
/// solver processes run at once.
pub fn run_bench(
    inputs: &[PathBuf],
    solver: &SolverCmd,
    configs: &[Config],
    out_dir: &Path,
    jobs: usize,
) -> Result<Vec<BenchRecord>, BenchError> {
    solver.locate().map_err(BenchError::Solver)?;
    fs::create_dir_all(out_dir).map_err(|e| BenchError::Io(out_dir.to_path_buf(), e))?;
    let mut prepared = Vec::new();
    for (i, input) in inputs.iter().enumerate() {
        for c in configs {
            prepared.push(prepare(input, i, *c, out_dir)?);
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let (originals, simplified): (Vec<Run>, Vec<Run>) = pool.install(|| {
        let originals = inputs.par_iter().map(|p| solver.run(p)).collect();
        let simplified = prepared
            .par_iter()
            .map(|p| match &p.path {
                Some(path) => solver.run(path),
                None => Run { status: Status::Error, seconds: 0.0 },
            })
            .collect();
        (originals, simplified)
    });
    Ok(prepared
        .into_iter()
        .zip(simplified)
        .map(|(p, simplified)| {
            let original = originals[p.input].clone();
            BenchRecord {
                file: inputs[p.input]
                    .file_name()
                    .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
                config: p.config,
                speedup: speedup(original.seconds, simplified.seconds),
                original,
                simplified,
                t_preproc: p.seconds,
                vars_eliminated: p.vars_eliminated,
            }
        })
        .collect())
}

/// Original against simplified status, per input.
#[derive(Debug, Clone)]
pub struct DiffReport {
    pub rows: Vec<BenchRecord>,
}

impl DiffReport {
    pub fn conflicts(&self) -> Vec<&BenchRecord> {
        self.rows
            .iter()
            .filter(|r| r.original.status.conflicts(r.simplified.status))
            .collect()
    }

    pub fn definite_pairs(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.original.status.is_definite() && r.simplified.status.is_definite())
            .count()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let (a, b) = (r.original.status, r.simplified.status);
            let mark = if a.conflicts(b) { " CONFLICT" } else { "" };
            writeln!(f, "{} {} {a} {b}{mark}", r.file, r.config)?;
        }
        writeln!(
            f,
            "files={} definite_pairs={} conflicts={}",
            self.rows.len(),
            self.definite_pairs(),
            self.conflicts().len()
        )
    }
}

pub fn difftest(
    inputs: &[PathBuf],
    solver: &SolverCmd,
    config: Config,
    out_dir: &Path,
    jobs: usize,
) -> Result<DiffReport, BenchError> {
    Ok(DiffReport { rows: run_bench(inputs, solver, &[config], out_dir, jobs)? })
}
