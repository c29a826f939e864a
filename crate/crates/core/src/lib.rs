pub mod analysis;
pub mod arith;
pub mod breaking;
pub mod chains;
pub mod citation;
pub mod cli;
pub mod error;
pub mod families;
pub mod graph;
pub mod group;
pub mod linalg;
pub mod neron;
pub mod topology;

#[cfg(test)]
pub(crate) mod oracles;

pub use error::{Error, GraphError, Result};
