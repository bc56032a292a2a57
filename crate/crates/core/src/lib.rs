//! Lattice points in the bodies `|u1|^(mk) + (|u2|^k + |u3|^k)^m <= x^(mk)`
//! and in their Lamé-disc slices: exact counts, the flat-point main terms,
//! Vaaler's approximation of the sawtooth, the truncated Hardy identity for
//! Lamé discs and the discrepancy analysis built on them.

pub mod analysis;
pub mod cli;
pub mod compensated;
pub mod error;
pub mod exact;
pub mod hardy;
pub mod lattice_count;
pub mod output;
pub mod quad;
pub mod special_fn;
pub mod vaaler;

pub use error::{Error, Result};
pub use lattice_count::{BodyParams, CountMethod, CountResult, ScalarPolicy};
pub use special_fn::SeriesConfig;
