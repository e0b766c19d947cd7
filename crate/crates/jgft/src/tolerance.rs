//! Tolerance settings for numeric rank decisions, eigenvalue clustering, and
//! decomposition self-checks.

use crate::error::{Error, Result};

/// All numeric decisions in the crate are controlled by these three knobs.
///
/// * `rank_tol` — relative singular-value threshold: singular values below
///   `rank_tol * sigma_max` count as zero.
/// * `eig_cluster_tol` — eigenvalue clustering radius, scaled internally by
///   `max(1, spectral radius)`; numerically split copies of a repeated
///   eigenvalue within this distance are merged.
/// * `verify_tol` — residual tolerance for self-checks such as
///   `‖A - VJV⁻¹‖₁` and the chain recursion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    pub rank_tol: f64,
    pub eig_cluster_tol: f64,
    pub verify_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            eig_cluster_tol: 1e-8,
            verify_tol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    /// Validate that every tolerance is strictly positive and finite.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("eig_cluster_tol", self.eig_cluster_tol),
            ("verify_tol", self.verify_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::BadTolerance(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_rank_tol(mut self, v: f64) -> Self {
        self.rank_tol = v;
        self
    }

    pub fn with_eig_cluster_tol(mut self, v: f64) -> Self {
        self.eig_cluster_tol = v;
        self
    }

    pub fn with_verify_tol(mut self, v: f64) -> Self {
        self.verify_tol = v;
        self
    }
}
