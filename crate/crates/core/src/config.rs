//! Numerical thresholds shared by every decision procedure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and search budgets.
///
/// Relative thresholds are multiplied by a scale chosen at the call site
/// (a Frobenius norm, a spectral radius, ...); the doc on each field says which.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Symmetry check, relative to `‖A‖_F`.
    pub sym: f64,
    /// Singularity threshold on the reciprocal condition number `σ_min/σ_max`.
    pub det: f64,
    /// Definiteness margin on `λ_min`, relative to the pencil norm.
    pub pd: f64,
    /// Eigenvalue clustering radius, relative to `‖M‖_F`.
    pub eig: f64,
    /// Rank threshold on singular values of normalized matrix powers.
    pub rank: f64,
    /// Commutator vanishing threshold, relative to `max‖Aᵢ‖²·‖S⁻¹‖²`.
    pub comm: f64,
    /// Off-diagonal threshold for "is diagonal", relative to the matrix norm.
    pub diag: f64,
    /// Canonical-form residual, relative to `‖P‖²·max(‖A‖,‖B‖)`.
    pub canon: f64,
    /// Jordan reconstruction residual `‖T⁻¹MT − J‖_F / ‖M‖_F`.
    pub jordan: f64,
    /// Factorization residual, relative to `Σ‖Aᵢ‖_F`.
    pub fact: f64,
    /// Seed for every pseudorandom search.
    pub seed: u64,
    /// Number of random pencils tried for sets with more than two matrices.
    pub n_pencil: usize,
    /// Angle grid size for the two-matrix definite pencil scan.
    pub n_theta: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            sym: 1e-9,
            det: 1e-10,
            pd: 1e-9,
            eig: 1e-6,
            rank: 1e-9,
            comm: 1e-8,
            diag: 1e-9,
            canon: 1e-7,
            jordan: 1e-7,
            fact: 1e-10,
            seed: 0x5EED_D1A6,
            n_pencil: 256,
            n_theta: 720,
        }
    }
}

/// Names accepted by [`Config::set`].
pub const TOLERANCE_NAMES: &[&str] = &[
    "sym", "det", "pd", "eig", "rank", "comm", "diag", "canon", "jordan", "fact", "seed",
    "n_pencil", "n_theta",
];

impl Config {
    /// Sets one field by name from its textual value.
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let bad = || Error::Domain(format!("invalid value {value:?} for tolerance {name:?}"));
        let real = || -> Result<f64> {
            let v: f64 = value.trim().parse().map_err(|_| bad())?;
            if v.is_finite() && v >= 0.0 {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        match name.to_ascii_lowercase().replace('-', "_").as_str() {
            "sym" => self.sym = real()?,
            "det" => self.det = real()?,
            "pd" => self.pd = real()?,
            "eig" => self.eig = real()?,
            "rank" => self.rank = real()?,
            "comm" => self.comm = real()?,
            "diag" => self.diag = real()?,
            "canon" => self.canon = real()?,
            "jordan" => self.jordan = real()?,
            "fact" => self.fact = real()?,
            "seed" => self.seed = value.trim().parse().map_err(|_| bad())?,
            "n_pencil" => self.n_pencil = value.trim().parse().map_err(|_| bad())?,
            "n_theta" => self.n_theta = value.trim().parse().map_err(|_| bad())?,
            _ => return Err(Error::Domain(format!("unknown tolerance {name:?}"))),
        }
        Ok(())
    }
}
