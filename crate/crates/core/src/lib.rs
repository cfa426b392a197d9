//! Learning spaces (antimatroids) over a finite domain of concepts.
//!
//! A space can be given by a Hasse diagram (its states are the lower sets),
//! by learning sequences (its states are unions of prefixes) or by an
//! explicit list of states. All three implement [`LearningSpace`].

pub mod adaptation;
pub mod assessment;
pub mod base_dimension;
pub mod error;
pub mod family;
pub mod fibers;
pub mod fixtures;
pub mod formats;
pub mod generate;
pub mod matching;
pub mod parallel;
pub mod quasi_ordinal;
pub mod semilattice;
pub mod sequence_space;
pub mod space;
pub mod space_any;
pub mod state;

pub use error::{Error, Result};
pub use family::{Fringes, SetFamily};
pub use quasi_ordinal::{HasseDiagram, PartialOrder};
pub use sequence_space::{MexVector, SequenceSpace};
pub use space::{collect_family, count_states, visit_states, LearningSpace, Traversal};
pub use space_any::AnySpace;
pub use state::{Domain, SharedDomain, State};
