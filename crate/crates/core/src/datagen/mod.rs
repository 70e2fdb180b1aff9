//! Synthetic problems: Gaussian designs with Toeplitz covariance
//! `Sigma_ij = alpha^|i-j|`, a fixed sparse coefficient pattern, and noisy
//! responses `y = X theta + sigma xi`.

mod rng;

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use rng::{mix64, NormalStream, Purpose, StreamKey};

use crate::error::{Error, Result};
use crate::matrix::{DesignMatrix, RegressionShard, SparseVector, SupportSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefPattern {
    /// `theta_min * (1, -2, 3)`; requires `K = 3`.
    Paper,
    /// `theta_min * values`; requires `values.len() == K`.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub machines: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default)]
    pub alpha: f64,
    pub sigma: f64,
    pub theta_min: f64,
    #[serde(default = "default_pattern")]
    pub pattern: CoefPattern,
    /// Support indices; defaults to `0..K`.
    #[serde(default)]
    pub support: Option<Vec<usize>>,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_pattern() -> CoefPattern {
    CoefPattern::Paper
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.d < 2 {
            return bad(format!("d must be at least 2, got {}", self.d));
        }
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if self.machines < 1 {
            return bad("M must be at least 1".into());
        }
        if self.k < 1 || self.k > self.d {
            return bad(format!("K must lie in [1, d], got {}", self.k));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1), got {}", self.alpha));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return bad(format!("sigma must be non-negative, got {}", self.sigma));
        }
        if !(self.theta_min > 0.0) || !self.theta_min.is_finite() {
            return bad(format!("theta_min must be positive, got {}", self.theta_min));
        }
        if let Some(s) = &self.support {
            if s.len() != self.k {
                return bad(format!("support has {} entries, K = {}", s.len(), self.k));
            }
            SupportSet::from_indices(s.iter().copied())?.check_bounds(self.d)?;
        }
        Ok(())
    }

    pub fn support_set(&self) -> Result<SupportSet> {
        match &self.support {
            Some(s) => SupportSet::from_indices(s.iter().copied()),
            None => SupportSet::from_indices(0..self.k),
        }
    }
}

/// Cholesky factor of the Toeplitz covariance `Sigma_ij = alpha^|i-j|`.
///
/// For this covariance the factor has the closed form `L[i][0] = alpha^i`,
/// `L[i][j] = alpha^(i-j) sqrt(1 - alpha^2)` for `1 <= j <= i`, so `L z` is the
/// stationary AR(1) recursion and costs `O(d)` per row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceFactor {
    d: usize,
    alpha: f64,
}

impl CovarianceFactor {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_identity(&self) -> bool {
        self.alpha == 0.0
    }

    /// Writes `L z` into `out`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        if self.is_identity() {
            out.copy_from_slice(z);
            return;
        }
        let c = (1.0 - self.alpha * self.alpha).sqrt();
        out[0] = z[0];
        for i in 1..self.d {
            out[i] = self.alpha * out[i - 1] + c * z[i];
        }
    }

    /// Dense row-major lower-triangular factor.
    pub fn to_dense(&self) -> Vec<f64> {
        let d = self.d;
        let c = (1.0 - self.alpha * self.alpha).sqrt();
        let mut l = vec![0.0; d * d];
        for i in 0..d {
            l[i * d] = self.alpha.powi(i as i32);
            for j in 1..=i {
                l[i * d + j] = self.alpha.powi((i - j) as i32) * c;
            }
        }
        l
    }
}

pub fn toeplitz_covariance(d: usize, alpha: f64) -> Result<CovarianceFactor> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in [0, 1), got {alpha}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidConfig("d must be positive".into()));
    }
    Ok(CovarianceFactor { d, alpha })
}

/// Draws `n` independent rows from `N(0, L L^T)`, row by row from `stream`.
pub fn sample_design(
    n: usize,
    factor: &CovarianceFactor,
    stream: &mut NormalStream,
) -> Result<DesignMatrix> {
    let d = factor.dim();
    let mut data = vec![0.0; n * d];
    let mut z = vec![0.0; d];
    let mut row = vec![0.0; d];
    for i in 0..n {
        stream.fill_normal(&mut z);
        factor.apply(&z, &mut row);
        for (j, &v) in row.iter().enumerate() {
            data[j * n + i] = v;
        }
    }
    DesignMatrix::from_col_major(n, d, data)
}

pub fn make_sparse_theta(cfg: &GenConfig) -> Result<SparseVector> {
    if !(cfg.theta_min > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "theta_min must be positive, got {}",
            cfg.theta_min
        )));
    }
    let base: Vec<f64> = match &cfg.pattern {
        CoefPattern::Paper => {
            if cfg.k != 3 {
                return Err(Error::PatternMismatch(format!(
                    "the (1, -2, 3) pattern needs K = 3, got K = {}",
                    cfg.k
                )));
            }
            vec![1.0, -2.0, 3.0]
        }
        CoefPattern::Custom(v) => {
            if v.len() != cfg.k {
                return Err(Error::PatternMismatch(format!(
                    "{} custom values for K = {}",
                    v.len(),
                    cfg.k
                )));
            }
            v.clone()
        }
    };
    let values = base.iter().map(|b| b * cfg.theta_min).collect();
    SparseVector::new(cfg.d, cfg.support_set()?, values)
}

/// `X theta + sigma xi` with `xi` drawn from `stream`. The `n` noise draws are
/// consumed even when `sigma = 0`.
pub fn sample_responses(
    x: &DesignMatrix,
    theta: &SparseVector,
    sigma: f64,
    stream: &mut NormalStream,
) -> Result<Vec<f64>> {
    let mut y = x.apply_sparse(theta)?;
    for v in &mut y {
        *v += sigma * stream.normal();
    }
    Ok(y)
}

/// Draws `n` noise values for one machine.
pub fn sample_noise(n: usize, stream: &mut NormalStream) -> Vec<f64> {
    let mut xi = vec![0.0; n];
    stream.fill_normal(&mut xi);
    xi
}

/// Design and response of `machine` in `trial`, from derived streams.
pub fn generate_shard(
    cfg: &GenConfig,
    trial: u64,
    machine: usize,
    theta: &SparseVector,
) -> Result<RegressionShard> {
    let factor = toeplitz_covariance(cfg.d, cfg.alpha)?;
    let m = machine as u64;
    let mut ds = StreamKey::new(cfg.master_seed, trial, m, Purpose::Design).stream();
    let x = sample_design(cfg.n, &factor, &mut ds)?;
    let mut ns = StreamKey::new(cfg.master_seed, trial, m, Purpose::Noise).stream();
    let y = sample_responses(&x, theta, cfg.sigma, &mut ns)?;
    RegressionShard::new(x, y, machine)
}

pub const SHARD_MAGIC: &[u8; 4] = b"DOMP";
pub const SHARD_VERSION: u16 = 1;

/// Writes a shard as `[magic][version u16][n u32][d u32][seed u64]`, then `X`
/// row-major and `y`, all little-endian `f64`.
pub fn write_shard<W: Write>(w: &mut W, shard: &RegressionShard, seed: u64) -> std::io::Result<()> {
    let n = u32::try_from(shard.samples()).map_err(std::io::Error::other)?;
    let d = u32::try_from(shard.dim()).map_err(std::io::Error::other)?;
    w.write_all(SHARD_MAGIC)?;
    w.write_all(&SHARD_VERSION.to_le_bytes())?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&d.to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    for v in shard.design().to_row_major() {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in shard.response() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_shard_file(path: &Path, shard: &RegressionShard, seed: u64) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_shard(&mut w, shard, seed)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a shard written by [`write_shard`]; returns it with the header seed.
pub fn read_shard<R: Read>(r: &mut R) -> Result<(RegressionShard, u64)> {
    let bad = |m: &str| Error::InvalidConfig(format!("shard file: {m}"));
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)
        .map_err(|e| Error::io("<shard>", e))?;
    if buf.len() < 22 || &buf[..4] != SHARD_MAGIC {
        return Err(bad("bad magic or short header"));
    }
    let version = u16::from_le_bytes([buf[4], buf[5]]);
    if version != SHARD_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(buf[6..10].try_into().expect("4 bytes")) as usize;
    let d = u32::from_le_bytes(buf[10..14].try_into().expect("4 bytes")) as usize;
    let seed = u64::from_le_bytes(buf[14..22].try_into().expect("8 bytes"));
    let body = &buf[22..];
    if body.len() != 8 * (n * d + n) {
        return Err(bad("payload length does not match header"));
    }
    let vals: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let x = DesignMatrix::from_row_major(n, d, &vals[..n * d])?;
    let shard = RegressionShard::new(x, vals[n * d..].to_vec(), 0)?;
    Ok((shard, seed))
}
