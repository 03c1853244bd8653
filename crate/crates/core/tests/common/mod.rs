//! Oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod fixtures;
pub mod oracle;
