pub mod absorption;
pub mod classes;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod expander;
pub mod graph;
pub mod latin;
pub mod pseudorandom;
pub mod solvers;
pub mod steiner;
pub mod switchers;

pub use error::{Error, Result};
