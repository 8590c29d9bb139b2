//! Alphabets, words, block-structured symbol streams, the two shift metrics
//! and cylinder observables.

pub mod count;
pub mod metric;
pub mod observable;
pub mod stream;
pub mod word;

pub use count::{count_occurrences, occurrence_stream, window_counts, WindowTracker};
pub use metric::{distance, m_epsilon, Distance, ShiftMetric};
pub use observable::{CylinderObservable, Observable};
pub use stream::{Piece, Side, SymbolStream};
pub use word::{Alphabet, Cycle, Symbol, Word};
