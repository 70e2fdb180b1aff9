use serde::{Deserialize, Serialize};

use super::mu_d;
use crate::error::{Error, Result};
use crate::matrix::{
    coherence, column_normalize, dot, restricted_fit, DesignMatrix, LsConfig, SupportSet,
};

/// Projected norms and inner products of normalized columns, with the
/// coherence bounds they are expected to satisfy.
///
/// With `P` the projector onto the columns in the detected set:
/// - `proj_norm_sq = ||(I - P) x_i||^2` lies in `[1 - mu_d, 1]`;
/// - `|cross_inner| = |<x_k, (I - P) x_i>|` is at most `mu + mu_d`;
/// - `double_proj_norm_sq = ||(I - P)(I - P_k) x_i||^2` is at least
///   `1 - mu^2 - mu_d (1 + mu)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDiagnostics {
    pub mu: f64,
    pub mu_d: f64,
    pub proj_norm_sq: f64,
    pub cross_inner: f64,
    pub double_proj_norm_sq: f64,
    pub norm_lower: f64,
    pub norm_upper: f64,
    pub cross_bound: f64,
    pub double_lower: f64,
}

impl ProjectionDiagnostics {
    /// Smallest margin over the four inequalities; negative means violated.
    pub fn min_slack(&self) -> f64 {
        [
            self.proj_norm_sq - self.norm_lower,
            self.norm_upper - self.proj_norm_sq,
            self.cross_bound - self.cross_inner.abs(),
            self.double_proj_norm_sq - self.double_lower,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.min_slack() >= slack
    }
}

pub fn projection_bounds_check(
    x: &DesignMatrix,
    detected: &SupportSet,
    i: usize,
    k: usize,
) -> Result<ProjectionDiagnostics> {
    let d = x.cols();
    for idx in [i, k] {
        if idx >= d {
            return Err(Error::IndexOutOfRange { index: idx, dim: d });
        }
        if detected.contains(idx) {
            return Err(Error::InvalidConfig(format!(
                "index {idx} lies in the detected set"
            )));
        }
    }
    if i == k {
        return Err(Error::InvalidConfig("i and k must differ".into()));
    }
    let mu = coherence(x)?;
    let (xn, _) = column_normalize(x)?;
    let cfg = LsConfig::default();
    let xi = xn.col(i);
    let xk = xn.col(k);

    let pi = restricted_fit(&xn, xi, detected, &cfg)?.residual;
    let c = dot(xk, xi);
    let w: Vec<f64> = xi.iter().zip(xk).map(|(a, b)| a - c * b).collect();
    let pw = restricted_fit(&xn, &w, detected, &cfg)?.residual;

    let md = mu_d(detected.len(), mu);
    Ok(ProjectionDiagnostics {
        mu,
        mu_d: md,
        proj_norm_sq: dot(&pi, &pi),
        cross_inner: dot(xk, &pi),
        double_proj_norm_sq: dot(&pw, &pw),
        norm_lower: 1.0 - md,
        norm_upper: 1.0,
        cross_bound: mu + md,
        double_lower: 1.0 - mu * mu - md * (1.0 + mu).powi(2),
    })
}
