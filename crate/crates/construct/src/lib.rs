//! Scrambled-set constructions by exact tracing schedules.

pub mod backward;
pub mod family;
pub mod generic;
pub mod level_set;
pub mod polynomial;
pub mod recurrence;
pub mod schedule;
pub mod seed;
pub mod trace;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
