//! Monte Carlo success-probability sweeps.
//!
//! Within a trial the designs and noise draws do not depend on `theta_min`, so
//! every grid point of a trial reuses them (common random numbers). Trials are
//! independent jobs run on the rayon pool; results are collected in trial
//! order and aggregated with integer sums, so the output does not depend on
//! scheduling.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{
    make_sparse_theta, sample_design, sample_noise, toeplitz_covariance, GenConfig, Purpose,
    StreamKey,
};
use crate::error::{Error, Result};
use crate::matrix::{max_coherence, DesignMatrix, RegressionShard, SparseVector, SupportSet};
use crate::omp::{centralized_omp, run_omp};
use crate::protocol::{dc_omp, dj_omp, djf_omp, ds_omp};
use crate::theory::{rho_m, snr_r, TheoryParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    /// OMP on machine 0 alone.
    SingleOmp,
    /// OMP on all `M` shards stacked.
    Centralized,
    Ds { l: usize },
    Dj,
    Djf { per_round: usize },
    Dc,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::SingleOmp => write!(f, "single"),
            Algorithm::Centralized => write!(f, "centralized"),
            Algorithm::Ds { l } => write!(f, "ds:{l}"),
            Algorithm::Dj => write!(f, "dj"),
            Algorithm::Djf { per_round } => write!(f, "djf:{per_round}"),
            Algorithm::Dc => write!(f, "dc"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// Accepts `single`, `centralized`, `ds:L`, `dj`, `djf:P` and `dc`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown algorithm '{s}'"));
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<usize> {
            a.ok_or_else(bad)?.trim().parse().map_err(|_| bad())
        };
        match (name.trim().to_ascii_lowercase().as_str(), arg) {
            ("single", None) => Ok(Algorithm::SingleOmp),
            ("centralized", None) => Ok(Algorithm::Centralized),
            ("ds", a) => Ok(Algorithm::Ds { l: num(a)? }),
            ("dj", None) => Ok(Algorithm::Dj),
            ("djf", a) => Ok(Algorithm::Djf { per_round: num(a)? }),
            ("dc", None) => Ok(Algorithm::Dc),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.to_string()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorPolicy {
    #[default]
    Abort,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub theta_min_grid: Vec<f64>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Draw the designs once (trial 0) and reuse them in every trial.
    #[serde(default)]
    pub fixed_design: bool,
    #[serde(default)]
    pub on_error: ErrorPolicy,
    /// Check per-machine SNR against `r` each trial when max-MIP holds.
    #[serde(default)]
    pub check_snr: bool,
}

impl ExperimentConfig {
    pub fn validate(&self, gen: &GenConfig) -> Result<()> {
        gen.validate()?;
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.theta_min_grid.is_empty() {
            return bad("theta_min_grid is empty".into());
        }
        if self.theta_min_grid.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return bad("theta_min_grid entries must be positive".into());
        }
        if self.theta_min_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("theta_min_grid must be strictly increasing".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms requested".into());
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return bad("algorithm listed twice".into());
        }
        let steps = gen.n.min(gen.d);
        for a in &self.algorithms {
            match *a {
                Algorithm::Ds { l } if l < gen.k || l > steps => {
                    return bad(format!("{a}: L must lie in [K, min(n, d)] = [{}, {steps}]", gen.k))
                }
                Algorithm::Djf { per_round: 0 } => return bad(format!("{a}: per_round must be positive")),
                _ => {}
            }
        }
        if gen.k > steps {
            return bad(format!("K = {} exceeds min(n, d) = {steps}", gen.k));
        }
        Ok(())
    }

    /// Shards generated per trial: `M`, or the DJF pool `K * per_round` if larger.
    pub fn shards_needed(&self, gen: &GenConfig) -> usize {
        self.algorithms
            .iter()
            .filter_map(|a| match a {
                Algorithm::Djf { per_round } => Some(gen.k * per_round),
                _ => None,
            })
            .fold(gen.machines, usize::max)
    }
}

/// Outcome of one algorithm on one problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub estimate: SupportSet,
    pub bits: u64,
    pub rounds: usize,
    pub machines_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub algorithm: Algorithm,
    pub success: bool,
    pub bits: u64,
}

/// Runs `algo` on `shards`; `shards[..M]` are the ordinary machines and any
/// extra shards form the tail of the DJF pool.
pub fn run_algorithm(
    algo: Algorithm,
    shards: &[RegressionShard],
    machines: usize,
    k: usize,
    fusion_seed: u64,
) -> Result<AlgorithmRun> {
    if shards.len() < machines {
        return Err(Error::InsufficientMachines {
            needed: machines,
            have: shards.len(),
        });
    }
    let base = &shards[..machines];
    let proto = |r: crate::protocol::ProtocolResult| AlgorithmRun {
        algorithm: algo,
        bits: r.ledger.total(),
        estimate: r.estimate,
        rounds: r.rounds,
        machines_used: r.machines_used,
    };
    Ok(match algo {
        Algorithm::SingleOmp => AlgorithmRun {
            algorithm: algo,
            estimate: run_omp(&shards[0], k)?.chosen,
            bits: 0,
            rounds: 0,
            machines_used: 1,
        },
        Algorithm::Centralized => AlgorithmRun {
            algorithm: algo,
            estimate: centralized_omp(base, k)?,
            bits: 0,
            rounds: 0,
            machines_used: machines,
        },
        Algorithm::Ds { l } => proto(ds_omp(base, l, k)?),
        Algorithm::Dj => proto(dj_omp(base, k)?),
        Algorithm::Djf { per_round } => proto(djf_omp(shards, k, per_round)?),
        Algorithm::Dc => proto(dc_omp(base, k, fusion_seed)?),
    })
}

/// Designs and noise of one trial; independent of `theta_min`.
struct TrialData {
    designs: Vec<DesignMatrix>,
    noise: Vec<Vec<f64>>,
    fusion_seed: u64,
}

fn draw_trial(gen: &GenConfig, shards: usize, trial: u64, fixed_design: bool) -> Result<TrialData> {
    let factor = toeplitz_covariance(gen.d, gen.alpha)?;
    let design_trial = if fixed_design { 0 } else { trial };
    let mut designs = Vec::with_capacity(shards);
    let mut noise = Vec::with_capacity(shards);
    for m in 0..shards as u64 {
        let mut ds = StreamKey::new(gen.master_seed, design_trial, m, Purpose::Design).stream();
        designs.push(sample_design(gen.n, &factor, &mut ds)?);
        let mut ns = StreamKey::new(gen.master_seed, trial, m, Purpose::Noise).stream();
        noise.push(sample_noise(gen.n, &mut ns));
    }
    let fusion_seed = StreamKey::new(gen.master_seed, trial, 0, Purpose::Fusion).seed64();
    Ok(TrialData {
        designs,
        noise,
        fusion_seed,
    })
}

fn build_shards(data: &TrialData, theta: &SparseVector, sigma: f64) -> Result<Vec<RegressionShard>> {
    data.designs
        .iter()
        .zip(&data.noise)
        .enumerate()
        .map(|(m, (x, xi))| {
            let mut y = x.apply_sparse(theta)?;
            for (v, e) in y.iter_mut().zip(xi) {
                *v += sigma * e;
            }
            RegressionShard::new(x.clone(), y, m)
        })
        .collect()
}

/// Asserts that every machine's SNR parameter is at least `r`, where `r` is
/// computed from the smallest column-scaled coefficient over all machines.
/// Skipped (returns `Ok(false)`) when the designs violate max-MIP.
pub fn check_rho_dominates_r(
    shards: &[RegressionShard],
    theta: &SparseVector,
    sigma: f64,
) -> Result<bool> {
    let designs: Vec<&DesignMatrix> = shards.iter().map(|s| s.design()).collect();
    let mu = max_coherence(&designs)?;
    let k = theta.support().len();
    if mu * (2 * k - 1) as f64 >= 1.0 {
        return Ok(false);
    }
    let scaled_min = shards
        .iter()
        .flat_map(|s| {
            let norms = s.design().column_norms();
            theta
                .support()
                .iter()
                .zip(theta.values())
                .map(|(&j, &v)| norms[j] * v.abs())
                .collect::<Vec<_>>()
        })
        .fold(f64::INFINITY, f64::min);
    let first = &shards[0];
    let p = TheoryParams {
        d: first.dim(),
        k,
        n: first.samples(),
        sigma,
        mu_max: mu,
        theta_min_scaled: scaled_min,
        epsilon: 0.5,
    };
    let r = snr_r(&p)?;
    for s in shards {
        let rho = rho_m(s, theta, &SupportSet::new(), &p)?;
        if rho < r * (1.0 - 1e-12) {
            return Err(Error::RhoBelowR(s.machine_id()));
        }
    }
    Ok(true)
}

fn theta_at(gen: &GenConfig, theta_min: f64) -> Result<SparseVector> {
    let mut g = gen.clone();
    g.theta_min = theta_min;
    make_sparse_theta(&g)
}

fn evaluate(
    gen: &GenConfig,
    exp: &ExperimentConfig,
    data: &TrialData,
    theta_min: f64,
) -> Result<Vec<Result<TrialOutcome>>> {
    let theta = theta_at(gen, theta_min)?;
    let shards = build_shards(data, &theta, gen.sigma)?;
    if exp.check_snr {
        check_rho_dominates_r(&shards[..gen.machines], &theta, gen.sigma)?;
    }
    Ok(exp
        .algorithms
        .iter()
        .map(|&a| {
            let run = run_algorithm(a, &shards, gen.machines, gen.k, data.fusion_seed)?;
            Ok(TrialOutcome {
                algorithm: a,
                success: run.estimate.same_elements(theta.support()),
                bits: run.bits,
            })
        })
        .collect())
}

/// Every requested algorithm on trial `trial` at one `theta_min`.
pub fn run_trial(
    gen: &GenConfig,
    exp: &ExperimentConfig,
    theta_min: f64,
    trial: u64,
) -> Result<Vec<TrialOutcome>> {
    exp.validate(gen)?;
    let data = draw_trial(gen, exp.shards_needed(gen), trial, exp.fixed_design)?;
    evaluate(gen, exp, &data, theta_min)?.into_iter().collect()
}

/// One problem instance at `gen.theta_min`, trial 0, for a single algorithm.
pub fn simulate(gen: &GenConfig, algo: Algorithm) -> Result<(AlgorithmRun, SupportSet)> {
    let exp = ExperimentConfig {
        theta_min_grid: vec![gen.theta_min],
        trials: 1,
        algorithms: vec![algo],
        output: None,
        fixed_design: false,
        on_error: ErrorPolicy::Abort,
        check_snr: false,
    };
    exp.validate(gen)?;
    let data = draw_trial(gen, exp.shards_needed(gen), 0, false)?;
    let theta = theta_at(gen, gen.theta_min)?;
    let shards = build_shards(&data, &theta, gen.sigma)?;
    let run = run_algorithm(algo, &shards, gen.machines, gen.k, data.fusion_seed)?;
    Ok((run, theta.support().clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub algorithm: Algorithm,
    pub theta_min: f64,
    pub alpha: f64,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub machines: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub sigma: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub algorithm: Option<Algorithm>,
    pub theta_min: f64,
    pub trial: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub points: Vec<CurvePoint>,
    pub errors: Vec<TrialError>,
}

/// Per trial: one entry per grid point, either a setup error or one result per algorithm.
type TrialGrid = std::result::Result<Vec<std::result::Result<Vec<Result<TrialOutcome>>, Error>>, Error>;

/// Aggregates `trials` trials at every grid point for every algorithm.
///
/// Under [`ErrorPolicy::Abort`] the first error (in trial order) is returned;
/// under [`ErrorPolicy::Skip`] failed trials count as failures and are listed
/// in the report. `trials` in each point is always the number attempted.
pub fn sweep(gen: &GenConfig, exp: &ExperimentConfig) -> Result<SweepReport> {
    exp.validate(gen)?;
    let shards = exp.shards_needed(gen);
    let per_trial: Vec<TrialGrid> = (0..exp.trials as u64)
        .into_par_iter()
        .map(|t| {
            let data = draw_trial(gen, shards, t, exp.fixed_design)?;
            Ok(exp
                .theta_min_grid
                .iter()
                .map(|&tm| evaluate(gen, exp, &data, tm))
                .collect())
        })
        .collect();

    let grid = &exp.theta_min_grid;
    let algos = &exp.algorithms;
    let mut successes = vec![vec![0usize; algos.len()]; grid.len()];
    let mut bits = vec![vec![0u128; algos.len()]; grid.len()];
    let mut counted = vec![vec![0usize; algos.len()]; grid.len()];
    let mut errors = Vec::new();
    let mut record = |alg: Option<Algorithm>, tm: f64, t: u64, e: Error| -> Result<()> {
        if exp.on_error == ErrorPolicy::Abort {
            return Err(e);
        }
        errors.push(TrialError {
            algorithm: alg,
            theta_min: tm,
            trial: t,
            message: e.to_string(),
        });
        Ok(())
    };
    for (t, res) in per_trial.into_iter().enumerate() {
        let t = t as u64;
        let rows = match res {
            Ok(rows) => rows,
            Err(e) => {
                record(None, grid[0], t, e)?;
                continue;
            }
        };
        for (g, row) in rows.into_iter().enumerate() {
            let outcomes = match row {
                Ok(o) => o,
                Err(e) => {
                    record(None, grid[g], t, e)?;
                    continue;
                }
            };
            for (a, out) in outcomes.into_iter().enumerate() {
                match out {
                    Ok(o) => {
                        successes[g][a] += o.success as usize;
                        bits[g][a] += o.bits as u128;
                        counted[g][a] += 1;
                    }
                    Err(e) => record(Some(algos[a]), grid[g], t, e)?,
                }
            }
        }
    }

    let mut points = Vec::with_capacity(grid.len() * algos.len());
    for (g, &tm) in grid.iter().enumerate() {
        for (a, &alg) in algos.iter().enumerate() {
            let s = successes[g][a];
            let c = counted[g][a];
            points.push(CurvePoint {
                algorithm: alg,
                theta_min: tm,
                alpha: gen.alpha,
                d: gen.d,
                n: gen.n,
                machines: gen.machines,
                k: gen.k,
                sigma: gen.sigma,
                trials: exp.trials,
                successes: s,
                success_rate: s as f64 / exp.trials as f64,
                mean_bits: if c == 0 { 0.0 } else { bits[g][a] as f64 / c as f64 },
            });
        }
    }
    Ok(SweepReport { points, errors })
}

/// Formats like C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let s = format!("{:.*}", (16 - exp) as usize, x);
        strip_zeros(&s).to_string()
    } else {
        let m = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "algorithm",
    "theta_min",
    "alpha",
    "d",
    "n",
    "M",
    "K",
    "sigma",
    "trials",
    "successes",
    "success_rate",
    "mean_bits",
];

pub fn write_csv_to<W: std::io::Write>(points: &[CurvePoint], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for p in points {
        out.write_record([
            p.algorithm.to_string(),
            format_g17(p.theta_min),
            format_g17(p.alpha),
            p.d.to_string(),
            p.n.to_string(),
            p.machines.to_string(),
            p.k.to_string(),
            format_g17(p.sigma),
            p.trials.to_string(),
            p.successes.to_string(),
            format_g17(p.success_rate),
            format_g17(p.mean_bits),
        ])?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_csv(points: &[CurvePoint], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(points, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<CurvePoint>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        k => Error::InvalidConfig(format!("{}: {k:?}", path.display())),
    })?;
    let parse_f = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::InvalidConfig(format!("bad number '{s}'")))
    };
    let parse_u = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::InvalidConfig(format!("bad integer '{s}'")))
    };
    let mut points = Vec::new();
    for rec in rdr.records() {
        let r = rec?;
        if r.len() != CSV_HEADER.len() {
            return Err(Error::InvalidConfig(format!("row has {} fields", r.len())));
        }
        points.push(CurvePoint {
            algorithm: r[0].parse()?,
            theta_min: parse_f(&r[1])?,
            alpha: parse_f(&r[2])?,
            d: parse_u(&r[3])?,
            n: parse_u(&r[4])?,
            machines: parse_u(&r[5])?,
            k: parse_u(&r[6])?,
            sigma: parse_f(&r[7])?,
            trials: parse_u(&r[8])?,
            successes: parse_u(&r[9])?,
            success_rate: parse_f(&r[10])?,
            mean_bits: parse_f(&r[11])?,
        });
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub master_seed: u64,
    pub gen: GenConfig,
    pub experiment: ExperimentConfig,
    pub csv: PathBuf,
    pub errors: Vec<TrialError>,
}

pub fn version_string() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

/// `results.csv` -> `results.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

pub fn write_manifest(
    gen: &GenConfig,
    exp: &ExperimentConfig,
    report: &SweepReport,
    csv: &Path,
) -> Result<PathBuf> {
    let m = RunManifest {
        version: version_string(),
        master_seed: gen.master_seed,
        gen: gen.clone(),
        experiment: exp.clone(),
        csv: csv.to_path_buf(),
        errors: report.errors.clone(),
    };
    let path = manifest_path(csv);
    let text = serde_json::to_string_pretty(&m)?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::CoefPattern;

    #[test]
    fn algorithm_names_roundtrip() {
        for a in [
            Algorithm::SingleOmp,
            Algorithm::Centralized,
            Algorithm::Ds { l: 6 },
            Algorithm::Dj,
            Algorithm::Djf { per_round: 20 },
            Algorithm::Dc,
        ] {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert!("ds".parse::<Algorithm>().is_err());
        assert!("omp".parse::<Algorithm>().is_err());
        assert!("dj:3".parse::<Algorithm>().is_err());
    }

    #[test]
    fn g17_matches_c() {
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(240.0), "240");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(-2.5), "-2.5");
    }

    fn gen() -> GenConfig {
        GenConfig {
            d: 30,
            n: 25,
            machines: 4,
            k: 3,
            alpha: 0.0,
            sigma: 0.0,
            theta_min: 1.0,
            pattern: CoefPattern::Paper,
            support: None,
            master_seed: 3,
        }
    }

    #[test]
    fn shards_needed_covers_djf_pool() {
        let mut e = ExperimentConfig {
            theta_min_grid: vec![1.0],
            trials: 1,
            algorithms: vec![Algorithm::Dj],
            output: None,
            fixed_design: false,
            on_error: ErrorPolicy::Abort,
            check_snr: false,
        };
        assert_eq!(e.shards_needed(&gen()), 4);
        e.algorithms.push(Algorithm::Djf { per_round: 4 });
        assert_eq!(e.shards_needed(&gen()), 12);
    }

    #[test]
    fn validation() {
        let mut e = ExperimentConfig {
            theta_min_grid: vec![1.0, 1.0],
            trials: 1,
            algorithms: vec![Algorithm::Dj],
            output: None,
            fixed_design: false,
            on_error: ErrorPolicy::Abort,
            check_snr: false,
        };
        assert!(e.validate(&gen()).is_err());
        e.theta_min_grid = vec![1.0, 2.0];
        assert!(e.validate(&gen()).is_ok());
        e.algorithms = vec![Algorithm::Ds { l: 2 }];
        assert!(e.validate(&gen()).is_err());
        e.algorithms = vec![Algorithm::Dj, Algorithm::Dj];
        assert!(e.validate(&gen()).is_err());
        e.algorithms = vec![];
        assert!(e.validate(&gen()).is_err());
        e.algorithms = vec![Algorithm::Dj];
        e.trials = 0;
        assert!(e.validate(&gen()).is_err());
    }
}
