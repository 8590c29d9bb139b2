//! Symbolic streams, subshift models, finite measures and the statistics
//! used to certify distributional chaos at finite horizon.

pub mod analyze;
pub mod error;
pub mod measure;
pub mod models;
pub mod num;
pub mod symbolic;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
