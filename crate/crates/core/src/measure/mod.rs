//! Finitely described measures, the pinned weak* metric, chains and dense
//! sequences on convex sets.

pub mod chain;
pub mod finite;
pub mod weak;

pub use chain::{chain_between, chain_on_segment, DenseSequence, MeasureChain, Segment};
pub use finite::{periodic_convergence, periodic_stream, FiniteMeasure, PeriodicConvergence};
pub use weak::{pinned_depth, pinned_words, weak_star_distance, WeakStar};
