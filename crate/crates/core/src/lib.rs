//! Loss landscapes of quantum neural networks as Wishart processes.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod landscape;
pub mod model;
pub mod quad;
pub mod randmat;
pub mod simulator;
pub mod stats;
pub mod wishart_process;

pub use error::{JawsError, Result};
