//! External solvers run as opaque subprocesses.

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use wait_timeout::ChildExt;

/// Template used when neither a flag nor `SUFGT_SOLVER` names a solver.
pub const DEFAULT_TEMPLATE: &str = "z3 {file}";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(600);
pub const PLACEHOLDER: &str = "{file}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
    Timeout,
    Error,
}

impl Status {
    /// Status from the first line of output that is a check-sat answer.
    pub fn from_output(out: &str) -> Status {
        out.lines()
            .find_map(|l| match l.trim() {
                "sat" => Some(Status::Sat),
                "unsat" => Some(Status::Unsat),
                "unknown" => Some(Status::Unknown),
                _ => None,
            })
            .unwrap_or(Status::Error)
    }

    pub fn is_definite(self) -> bool {
        matches!(self, Status::Sat | Status::Unsat)
    }

    /// Sat against unsat; anything indefinite never conflicts.
    pub fn conflicts(self, other: Status) -> bool {
        self.is_definite() && other.is_definite() && self != other
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Unknown => "unknown",
            Status::Timeout => "timeout",
            Status::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    Template(String),
    NotFound(String),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Template(msg) => write!(f, "bad solver template: {msg}"),
            SolverError::NotFound(prog) => write!(f, "solver `{prog}` not found"),
        }
    }
}

impl std::error::Error for SolverError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverCmd {
    pub argv: Vec<String>,
    pub timeout: Duration,
    pub name: String,
}

/// One solver invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub status: Status,
    pub seconds: f64,
}

impl SolverCmd {
    /// Splits a shell-style template; `{file}` must occur exactly once.
    pub fn parse(template: &str, timeout: Duration) -> Result<SolverCmd, SolverError> {
        let n = template.matches(PLACEHOLDER).count();
        if n != 1 {
            return Err(SolverError::Template(format!("`{template}` has {n} `{PLACEHOLDER}` placeholders, expected 1")));
        }
        let argv = shell_words::split(template).map_err(|e| SolverError::Template(e.to_string()))?;
        let Some(prog) = argv.first() else {
            return Err(SolverError::Template("empty command".into()));
        };
        let name = Path::new(prog)
            .file_name()
            .map_or_else(|| prog.clone(), |s| s.to_string_lossy().into_owned());
        Ok(SolverCmd { argv, timeout, name })
    }

    /// The template from `SUFGT_SOLVER`, else the default.
    pub fn from_env(timeout: Duration) -> Result<SolverCmd, SolverError> {
        let t = std::env::var("SUFGT_SOLVER").unwrap_or_else(|_| DEFAULT_TEMPLATE.to_string());
        SolverCmd::parse(&t, timeout)
    }

    /// Resolved path of the executable.
    pub fn locate(&self) -> Result<PathBuf, SolverError> {
        let prog = &self.argv[0];
        let found = if prog.contains(std::path::MAIN_SEPARATOR) {
            let p = PathBuf::from(prog);
            p.is_file().then_some(p)
        } else {
            std::env::var_os("PATH").and_then(|paths| {
                std::env::split_paths(&paths).map(|d| d.join(prog)).find(|p| p.is_file())
            })
        };
        found.ok_or_else(|| SolverError::NotFound(prog.clone()))
    }

    /// Runs on `file`; failures to spawn and timeouts become statuses.
    pub fn run(&self, file: &Path) -> Run {
        let file = file.to_string_lossy();
        let args: Vec<String> = self.argv[1..].iter().map(|a| a.replace(PLACEHOLDER, &file)).collect();
        let start = Instant::now();
        let child = Command::new(self.argv[0].replace(PLACEHOLDER, &file))
            .args(&args)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn();
        let Ok(mut child) = child else {
            return Run { status: Status::Error, seconds: 0.0 };
        };
        // Drain stdout concurrently so a chatty solver cannot block on a full pipe.
        let mut stdout = child.stdout.take().expect("piped");
        let reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = stdout.read_to_string(&mut s);
            s
        });
        let waited = child.wait_timeout(self.timeout);
        let status = match waited {
            Ok(Some(_)) => None,
            Ok(None) => {
                let _ = child.kill();
                let _ = child.wait();
                Some(Status::Timeout)
            }
            Err(_) => {
                let _ = child.kill();
                let _ = child.wait();
                Some(Status::Error)
            }
        };
        let seconds = start.elapsed().as_secs_f64();
        match status {
            // A grandchild may still hold the pipe open; the reader is left to finish on its own.
            Some(Status::Timeout) => Run { status: Status::Timeout, seconds: self.timeout.as_secs_f64() },
            Some(s) => Run { status: s, seconds },
            None => {
                let out = reader.join().unwrap_or_default();
                Run { status: Status::from_output(&out), seconds }
            }
        }
    }
}
