//! Sorted first-order terms and formulas.
//!
//! Terms are hash-consed: two structurally equal terms share one allocation,
//! so equality is a pointer comparison. Formulas are ordinary trees that hold
//! terms at their atoms.

mod formula;
mod ops;
mod term;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use formula::{Formula, FormulaPath, Polarity};
pub use ops::{
    ground_terms_of, ground_terms_of_formula, occurrence_count, smallest_enclosing_subformula,
    substitute, substitute_formula, substitute_many,
};
pub use term::{Term, TermKind};
pub(crate) use term::fold;

/// Errors raised when building or rewriting AST nodes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("sort mismatch: expected {expected}, found {found} in {context}")]
    SortMismatch {
        expected: Sort,
        found: Sort,
        context: String,
    },
    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("substituted term `{0}` is not ground")]
    NotGround(Term),
    #[error("variable `{0}` does not occur in the formula")]
    VarAbsent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    Int,
    Uninterpreted(Arc<str>),
    /// Parsed so that array benchmarks load; array operators are treated as
    /// unsupported interpreted symbols by the analysis.
    Array(Arc<Sort>, Arc<Sort>),
}

impl Sort {
    pub fn uninterpreted(name: &str) -> Sort {
        Sort::Uninterpreted(Arc::from(name))
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Sort::Int)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("Bool"),
            Sort::Int => f.write_str("Int"),
            Sort::Uninterpreted(name) => f.write_str(&quote_symbol(name)),
            Sort::Array(index, elem) => write!(f, "(Array {index} {elem})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// The operator obtained by swapping the two operands: `a op b` iff `b op' a`.
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

impl ArithOp {
    pub fn name(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub | ArithOp::Neg => "-",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    UninterpretedFun,
    UninterpretedPred,
    Cmp(CmpOp),
    Arith(ArithOp),
    /// Interpreted by some theory but outside the supported operator set
    /// (`select`, `store`, `div`, `mod`, `abs`, ...).
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolDecl {
    pub name: Arc<str>,
    pub arg_sorts: Vec<Sort>,
    pub result_sort: Sort,
    pub kind: SymbolKind,
}

/// Shared handle to a symbol declaration.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<SymbolDecl>);

impl Symbol {
    pub fn new(decl: SymbolDecl) -> Symbol {
        Symbol(Arc::new(decl))
    }

    /// An uninterpreted function (or predicate, when `result` is Bool).
    pub fn uninterpreted(name: &str, args: Vec<Sort>, result: Sort) -> Symbol {
        let kind = if result == Sort::Bool {
            SymbolKind::UninterpretedPred
        } else {
            SymbolKind::UninterpretedFun
        };
        Symbol::new(SymbolDecl {
            name: Arc::from(name),
            arg_sorts: args,
            result_sort: result,
            kind,
        })
    }

    pub fn cmp(op: CmpOp, operand: Sort) -> Symbol {
        Symbol::new(SymbolDecl {
            name: Arc::from(op.name()),
            arg_sorts: vec![operand.clone(), operand],
            result_sort: Sort::Bool,
            kind: SymbolKind::Cmp(op),
        })
    }

    pub fn arith(op: ArithOp, arity: usize) -> Symbol {
        let arity = if op == ArithOp::Neg { 1 } else { arity };
        Symbol::new(SymbolDecl {
            name: Arc::from(op.name()),
            arg_sorts: vec![Sort::Int; arity],
            result_sort: Sort::Int,
            kind: SymbolKind::Arith(op),
        })
    }

    pub fn unsupported(name: &str, args: Vec<Sort>, result: Sort) -> Symbol {
        Symbol::new(SymbolDecl {
            name: Arc::from(name),
            arg_sorts: args,
            result_sort: result,
            kind: SymbolKind::Unsupported,
        })
    }

    pub fn decl(&self) -> &SymbolDecl {
        &self.0
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.arg_sorts.len()
    }

    pub fn arg_sorts(&self) -> &[Sort] {
        &self.0.arg_sorts
    }

    pub fn result_sort(&self) -> &Sort {
        &self.0.result_sort
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.0.kind
    }

    pub fn is_uninterpreted(&self) -> bool {
        matches!(
            self.0.kind,
            SymbolKind::UninterpretedFun | SymbolKind::UninterpretedPred
        )
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&quote_symbol(self.name()))
    }
}

/// Unique identifier of a bound variable within one script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub id: VarId,
    pub name: Arc<str>,
    pub sort: Sort,
}

impl Variable {
    pub fn new(id: u32, name: &str, sort: Sort) -> Variable {
        Variable {
            id: VarId(id),
            name: Arc::from(name),
            sort,
        }
    }

    /// The user-facing name without the `!k` suffix added by renaming.
    pub fn base_name(&self) -> &str {
        self.name.split('!').next().unwrap_or(&self.name)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&quote_symbol(&self.name))
    }
}

/// Renders `name` as an SMT-LIB symbol, adding `|...|` when needed.
pub fn quote_symbol(name: &str) -> String {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}
