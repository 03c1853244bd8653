//! A pragmatic SMT-LIB 2 subset: reading scripts into the AST and printing
//! them back.
//!
//! Supported: `set-logic`, `set-info`, `set-option`, `declare-sort` (arity 0),
//! `declare-fun`, `declare-const`, non-recursive `define-fun` (inlined),
//! `assert`, and verbatim pass-through of query commands such as `check-sat`
//! and `get-model`. Terms may use Bool/Int/declared sorts, uninterpreted
//! functions, `= < <= > >= + - *`, `distinct`, `let`, quantifiers and
//! formula-level `ite`. Arrays parse; their operators are opaque to the
//! analysis.

mod parse;
mod print;
pub mod sexp;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::ast::{Formula, Sort, Symbol};

pub use parse::parse_script;
pub use print::print_script;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unsupported construct `{construct}`")]
    Unsupported {
        construct: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: undeclared symbol `{name}`")]
    Undeclared { name: String, line: usize, col: usize },
    #[error("{line}:{col}: ill-sorted expression: {msg}")]
    Sort { msg: String, line: usize, col: usize },
}

/// An annotation attribute list stripped from an assertion, e.g.
/// `:pattern ((f x))` or `:named a1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub assertion: usize,
    pub attributes: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Script {
    pub logic: Option<String>,
    /// `set-info` / `set-option` commands seen before the first assertion.
    pub header: Vec<String>,
    pub sorts: Vec<Sort>,
    /// Declared symbols in first-seen order.
    pub funs: Vec<Symbol>,
    pub assertions: Vec<Formula>,
    pub annotations: Vec<Annotation>,
    /// Query and output commands, verbatim.
    pub trailing: Vec<String>,
    /// Number of variable ids handed out; ids are `0..var_count`.
    pub var_count: u32,
}

impl Script {
    pub fn fun(&self, name: &str) -> Option<&Symbol> {
        self.funs.iter().find(|s| s.name() == name)
    }

    /// Declares `sym` unless a symbol of that name exists already.
    pub fn declare(&mut self, sym: Symbol) {
        if self.fun(sym.name()).is_none() {
            self.funs.push(sym);
        }
    }

    /// Everything except the recorded annotations, which printing drops.
    pub fn same_structure(&self, other: &Script) -> bool {
        self.logic == other.logic
            && self.header == other.header
            && self.sorts == other.sorts
            && self.funs == other.funs
            && self.assertions == other.assertions
            && self.trailing == other.trailing
    }

    /// Names of declared symbols and bound variables.
    pub fn used_names(&self) -> HashSet<String> {
        let mut names: HashSet<String> = self.funs.iter().map(|s| s.name().to_string()).collect();
        for a in &self.assertions {
            names.extend(a.bound_vars().iter().map(|v| v.name.to_string()));
        }
        names
    }
}

/// Generator of collision-free names for introduced symbols.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    used: HashSet<String>,
    counters: HashMap<String, usize>,
}

impl FreshNames {
    pub fn for_script(script: &Script) -> FreshNames {
        FreshNames {
            used: script.used_names(),
            counters: HashMap::new(),
        }
    }

    /// `prefix!<name>!<n>`, numbering each prefix separately.
    pub fn fresh(&mut self, prefix: &str, name: &str) -> String {
        let counter = self.counters.entry(prefix.to_string()).or_default();
        loop {
            let candidate = format!("{prefix}!{name}!{counter}");
            *counter += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    pub fn from_names(names: impl IntoIterator<Item = String>) -> FreshNames {
        FreshNames {
            used: names.into_iter().collect(),
            counters: HashMap::new(),
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }
}
