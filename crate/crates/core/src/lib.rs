//! Decision procedures, certificates and constructive witnesses for exact and
//! weak simultaneous diagonalization of real symmetric matrix sets.
//!
//! The hierarchy covered: SDO and SD (one orthogonal / unit-determinant
//! congruence diagonalizes every member), TWSD and TWSD-B (a sequence of
//! unit-determinant congruences drives the off-diagonal parts to zero, with
//! bounded diagonals for the -B variant), DWSD (limits of SD sets) and the
//! projective D-SDO factorizations.

pub mod canon;
pub mod classify;
pub mod config;
pub mod dsdo;
pub mod error;
pub mod generators;
pub mod io;
pub mod jordan;
pub mod linalg;
pub mod matcore;
pub mod qcqp;
pub mod sequences;
pub mod verdict;

pub use config::Config;
pub use error::{Error, Result};
pub use linalg::Mat;
pub use matcore::SymMatrixSet;
pub use verdict::Verdict;
