//! Finite-horizon statistics: closeness fractions (plain and α-weighted),
//! verdicts, densities of visit times, Birkhoff averages and recurrence
//! evidence.

pub mod alpha;
pub mod density;
pub mod pair;
pub mod profile;
pub mod sums;
pub mod verdict;

pub use density::{densities, densities_stream, dyadic_grid, DensityProfile, DEFAULT_WINDOW_FLOOR};
pub use alpha::{AlphaCertificate, AlphaFunction, AlphaRule};
pub use profile::{birkhoff_average, birkhoff_oscillation, recurrence_profile, visit_stream, BirkhoffReport, Oscillation, RecurrenceProfile, RecurrenceQuery, VisitEvidence};
pub use pair::{closeness_window, disagreement_stream, phi_prefix, Pair};
pub use sums::{phi_alpha_prefix, AlphaCount, CumulativeSums, Kernel};
pub use verdict::{dc1_verdict, default_t_grid, ChaosReport, CheckRow, Checkpoint, ImplicationRow, Verdict, VerdictQuery};
