//! Exact symbolic verification of quantum Dolbeault complexes, braided
//! planes, Chern connections and line-bundle valued metrics.
//!
//! All arithmetic is exact over the field `Q(i)(s)` with `s = q^(1/2)`.

pub mod braided;
pub mod connection;
pub mod expr;
pub mod group;
pub mod groupdolbeault;
pub mod linalg;
pub mod ncalg;
pub mod orebundle;
pub mod qdolbeault;
pub mod report;
pub mod scalar;
pub mod suites;

pub use scalar::{Scalar, ScalarError};
