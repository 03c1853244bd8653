//! Sufficient ground term sets for quantified SMT formulas.
//!
//! The pipeline computes, for every universally quantified variable, a set of
//! ground terms that is enough to instantiate the variable without changing
//! satisfiability. Variables whose set is finite are eliminated; a cost bound
//! keeps the instantiation from blowing up the remaining quantifiers. Models of
//! the simplified formula can be lifted back to models of the original.
//!
//! ```text
//! parse -> skolemize -> polarity -> constraints -> solve -> plan -> instantiate
//! ```

pub mod analysis;
pub mod ast;
pub mod eliminate;
pub mod model;
pub mod normalize;
pub mod smtlib;

mod error;

pub use error::Error;
