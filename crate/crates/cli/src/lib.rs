//! Command-line driver and evaluation harness around `sufgt-core`.

pub mod bench;
pub mod corpus;
pub mod solver;
