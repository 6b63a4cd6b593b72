pub mod cli;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod heuristic;
pub mod metrics;
pub mod ratemodel;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
