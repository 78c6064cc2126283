//! Multilevel polynomial partitions of point sets and the partition tree
//! built on them for exact semialgebraic range counting.

pub mod error;
pub mod poly;
pub mod rational;

pub use error::{Error, Result};
pub mod groebner;
pub mod partition;
pub mod projection;
pub mod multilevel;
pub mod cells;
pub mod rangesearch;
pub mod harness;
