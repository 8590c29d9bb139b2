pub mod beta;
pub mod model;
pub mod sft;
pub mod sofic;

pub use beta::{beta_expand, nested_beta_family, BetaModel, BetaValue};
pub use model::ShiftModel;
pub use sft::{PeriodicDecomposition, Primitivity, TransitionSystem};
pub use sofic::SoficModel;
