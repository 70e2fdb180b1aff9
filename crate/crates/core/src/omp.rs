//! Single-machine orthogonal matching pursuit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, restricted_fit, DesignMatrix, LsConfig, RegressionShard, SupportSet};

/// Indices chosen by an OMP run, with the winning normalized correlation of each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmpTrace {
    pub chosen: SupportSet,
    pub correlations: Vec<f64>,
}

/// Index of the column most correlated with `residual`, skipping columns in `mask`.
///
/// Correlations are `|<x_i, r>| / ||x_i||`. Ties go to the smallest index.
pub(crate) fn best_column(x: &DesignMatrix, residual: &[f64], mask: &[bool]) -> (usize, f64) {
    let norms = x.column_norms();
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for j in 0..x.cols() {
        if mask[j] {
            continue;
        }
        let c = dot(x.col(j), residual).abs() / norms[j];
        if c > best.1 {
            best = (j, c);
        }
    }
    best
}

/// One greedy step: fit on `support`, then pick the column best aligned with the residual.
///
/// The residual is orthogonal to every column already in `support`, so those
/// columns have zero correlation in exact arithmetic; the scan skips them so
/// that rounding noise cannot re-select one.
pub fn omp_step(shard: &RegressionShard, support: &SupportSet) -> Result<(usize, f64)> {
    omp_step_with(shard, support, &LsConfig::default())
}

pub fn omp_step_with(
    shard: &RegressionShard,
    support: &SupportSet,
    cfg: &LsConfig,
) -> Result<(usize, f64)> {
    let x = shard.design();
    let d = x.cols();
    if support.len() >= d {
        return Err(Error::FullSupport(d));
    }
    let fit = restricted_fit(x, shard.response(), support, cfg)?;
    Ok(best_column(x, &fit.residual, &support.mask(d)))
}

/// Runs `steps` OMP iterations from an empty support.
pub fn run_omp(shard: &RegressionShard, steps: usize) -> Result<OmpTrace> {
    let max = shard.samples().min(shard.dim());
    if steps > max {
        return Err(Error::TooManySteps { steps, max });
    }
    let mut chosen = SupportSet::new();
    let mut correlations = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (j, c) = omp_step(shard, &chosen)?;
        chosen.insert(j)?;
        correlations.push(c);
    }
    Ok(OmpTrace {
        chosen,
        correlations,
    })
}

/// Stacks every shard into one `(sum n) x d` problem.
pub fn stack_shards(shards: &[RegressionShard]) -> Result<RegressionShard> {
    let first = shards.first().ok_or(Error::EmptyList)?;
    let d = first.dim();
    if let Some(s) = shards.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: s.dim(),
        });
    }
    let designs: Vec<&DesignMatrix> = shards.iter().map(|s| s.design()).collect();
    let design = DesignMatrix::vstack(&designs)?;
    let response: Vec<f64> = shards
        .iter()
        .flat_map(|s| s.response().iter().copied())
        .collect();
    RegressionShard::new(design, response, 0)
}

/// OMP on the column-stacked data of all machines.
pub fn centralized_omp(shards: &[RegressionShard], k: usize) -> Result<SupportSet> {
    let stacked = stack_shards(shards)?;
    Ok(run_omp(&stacked, k)?.chosen)
}
