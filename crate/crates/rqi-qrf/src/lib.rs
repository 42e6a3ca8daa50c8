//! Quantum reference frames for U(1) and SU(2).
//!
//! Finite-dimensional representations, Haar quadrature, frame states, the
//! G-twirl, relational encoding and recovery, the relational measurement
//! instrument, the change of frame with its decoherence maps, closed-form
//! overlaps and balanced homodyne detection statistics.

pub mod bhd;
pub mod channel;
pub mod frame;
pub mod group;
pub mod overlap;
pub mod relational;
pub mod rep;

pub use num_complex::Complex64 as C64;

pub use channel::CPMap;
pub use frame::{FrameKind, FrameState};
pub use group::{Group, GroupElement, HaarGrid};
pub use rep::RepSpace;

#[derive(Debug, thiserror::Error)]
pub enum QrfError {
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state is not G-invariant (residual {0:.3e})")]
    NotInvariant(f64),
    #[error("projector family is not maximum-likelihood (twirl residual {0:.3e})")]
    NonMLProjectors(f64),
    #[error("unsupported state kind: {0}")]
    UnsupportedStateKind(&'static str),
    #[error("group elements or spaces belong to different groups")]
    GroupMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
