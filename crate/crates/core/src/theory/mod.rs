//! Closed-form recovery theory for the joint protocols.
//!
//! Every `log d` here is a natural logarithm; the ledger's `ceil(log2 d)`
//! bits per index is a separate convention (see [`crate::protocol`]).
//!
//! Quantities for sparsity `K` and worst-machine coherence `mu`:
//! - `theta_crit = sigma sqrt(2 ln d) / (1 - (2K-1) mu)` and the SNR `r`;
//! - `nu_a`, `nu_b`, the projection shrinkage factors;
//! - `F(d, K, mu, r)`, a lower bound on the probability that one machine
//!   votes for an undetected support index, and `M_c = ceil(8 ln d / F)`;
//! - `Q0`, `Q1`, `Q2`, whose `min(Q1, Q2)^2` is the SNR threshold above which
//!   the fresh-machine protocol recovers the support.

mod normal;
mod projection;

use serde::{Deserialize, Serialize};

pub use normal::{gordon_bounds, log_phi_c, phi_c, tail_lemma_check};
pub use projection::{projection_bounds_check, ProjectionDiagnostics};

use crate::error::{Error, Result};
use crate::matrix::{RegressionShard, SparseVector, SupportSet};
use crate::protocol::bits_per_index;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryParams {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    pub sigma: f64,
    pub mu_max: f64,
    /// Lower bound on the column-scaled nonzero coefficients.
    pub theta_min_scaled: f64,
    pub epsilon: f64,
}

impl TheoryParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.d < 2 {
            return bad("d must be at least 2");
        }
        if self.k < 1 {
            return bad("K must be at least 1");
        }
        if !(self.sigma > 0.0) {
            return bad("sigma must be positive");
        }
        if !(0.0..1.0).contains(&self.mu_max) {
            return bad("mu_max must lie in [0, 1)");
        }
        if !(self.theta_min_scaled > 0.0) {
            return bad("theta_min_scaled must be positive");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Limits applied when turning probabilities into machine counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConfig {
    /// Machine counts above this are reported as infeasible.
    pub machine_cap: f64,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        Self { machine_cap: 1e12 }
    }
}

fn ln_d(d: f64) -> f64 {
    libm::log(d)
}

fn check_mip(mu: f64, k: usize) -> Result<()> {
    let s = (2 * k - 1) as f64 * mu;
    if s < 1.0 {
        Ok(())
    } else {
        Err(Error::MipViolated(s))
    }
}

pub fn theta_crit(mu: f64, _n: usize, d: f64, k: usize, sigma: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidConfig("K must be at least 1".into()));
    }
    check_mip(mu, k)?;
    Ok(sigma * (2.0 * ln_d(d)).sqrt() / (1.0 - (2 * k - 1) as f64 * mu))
}

/// `(theta_min_scaled / theta_crit)^2` at the worst machine's coherence.
pub fn snr_r(p: &TheoryParams) -> Result<f64> {
    let tc = theta_crit(p.mu_max, p.n, p.d as f64, p.k, p.sigma)?;
    Ok((p.theta_min_scaled / tc).powi(2))
}

/// Per-machine SNR of the strongest support entry not yet detected.
pub fn rho_m(
    shard: &RegressionShard,
    theta: &SparseVector,
    detected: &SupportSet,
    p: &TheoryParams,
) -> Result<f64> {
    let norms = shard.design().column_norms();
    let strongest = theta
        .support()
        .iter()
        .zip(theta.values())
        .filter(|(k, _)| !detected.contains(**k))
        .map(|(&k, &v)| norms[k] * v.abs())
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
        .ok_or(Error::EmptyResidualSupport)?;
    let tc = theta_crit(p.mu_max, p.n, p.d as f64, p.k, p.sigma)?;
    Ok((strongest / tc).powi(2))
}

pub fn nu_a(k: usize, mu: f64) -> f64 {
    let km1 = k as f64 - 1.0;
    1.0 - km1 * mu * mu / (1.0 - (k as f64 - 2.0) * mu)
}

pub fn nu_b(k: usize, mu: f64) -> f64 {
    let km1 = k as f64 - 1.0;
    1.0 - mu * mu - km1 * mu * mu * (1.0 + mu).powi(2) / (1.0 - (k as f64 - 2.0) * mu)
}

/// Worst-case projection coherence after `K - 1` detected indices.
pub fn mu_d_max(k: usize, mu: f64) -> f64 {
    mu_d(k.saturating_sub(1), mu)
}

/// Projection coherence after `detected` indices.
pub fn mu_d(detected: usize, mu: f64) -> f64 {
    let kd = detected as f64;
    kd * mu * mu / (1.0 - (kd - 1.0) * mu)
}

/// `1 - sqrt(nu_b / (pi ln d)) d^(1 - 1/nu_b)`, the first factor of `F`.
fn leading_factor(d: f64, k: usize, mu: f64) -> Result<f64> {
    let nb = nu_b(k, mu);
    if !(nb > 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "nu_b = {nb} is not positive"
        )));
    }
    let l = ln_d(d);
    let v = 1.0 - (nb / (std::f64::consts::PI * l)).sqrt() * libm::exp((1.0 - 1.0 / nb) * l);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::DegenerateDimension(v))
    }
}

fn leading_factor_k1(d: f64, mu: f64) -> Result<f64> {
    let l = ln_d(d);
    let one_m = 1.0 - mu * mu;
    let v = 1.0
        - one_m.sqrt() / (std::f64::consts::PI * l).sqrt()
            * libm::exp(-(mu * mu / one_m) * l);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::DegenerateDimension(v))
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("SNR r must be positive, got {r}")))
    }
}

fn tail_argument(d: f64, k: usize, mu: f64, r: f64) -> f64 {
    (1.0 - r.sqrt()) / (nu_a(k, mu).sqrt() * (1.0 - mu)) * (2.0 * ln_d(d)).sqrt()
}

/// Lower bound on the probability that one machine votes for an undetected support index.
pub fn f_prob(d: f64, k: usize, mu: f64, r: f64) -> Result<f64> {
    check_mip(mu, k)?;
    check_r(r)?;
    Ok(leading_factor(d, k, mu)? * phi_c(tail_argument(d, k, mu, r)))
}

/// `ln F`, finite even when `F` underflows.
pub fn log_f_prob(d: f64, k: usize, mu: f64, r: f64) -> Result<f64> {
    check_mip(mu, k)?;
    check_r(r)?;
    Ok(libm::log(leading_factor(d, k, mu)?) + log_phi_c(tail_argument(d, k, mu, r)))
}

/// The sparsity-one form of [`f_prob`], written out separately.
pub fn f_prob_k1(d: f64, mu: f64, r: f64) -> Result<f64> {
    check_mip(mu, 1)?;
    check_r(r)?;
    let arg = (1.0 - r.sqrt()) / (1.0 - mu) * (2.0 * ln_d(d)).sqrt();
    Ok(leading_factor_k1(d, mu)? * phi_c(arg))
}

/// `ln(8 ln d / F)`, without any cap.
pub fn log_machines_needed(d: f64, k: usize, mu: f64, r: f64) -> Result<f64> {
    Ok(libm::log(8.0 * ln_d(d)) - log_f_prob(d, k, mu, r)?)
}

/// `M_c = ceil(8 ln d / F)`.
pub fn machines_needed(d: f64, k: usize, mu: f64, r: f64) -> Result<u64> {
    machines_needed_with(d, k, mu, r, &TheoryConfig::default())
}

pub fn machines_needed_with(
    d: f64,
    k: usize,
    mu: f64,
    r: f64,
    cfg: &TheoryConfig,
) -> Result<u64> {
    let log_value = log_machines_needed(d, k, mu, r)?;
    if log_value > libm::log(cfg.machine_cap) {
        return Err(Error::Infeasible { log_value });
    }
    let f = f_prob(d, k, mu, r)?;
    Ok(ceil_ratio(8.0 * ln_d(d), f))
}

/// Machine count from an externally supplied `F`, e.g. for oracle injection.
pub fn machines_from_f(d: f64, f: f64) -> Result<u64> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::InvalidConfig(format!("F must lie in (0, 1], got {f}")));
    }
    Ok(ceil_ratio(8.0 * ln_d(d), f))
}

fn ceil_ratio(num: f64, den: f64) -> u64 {
    (num / den).ceil() as u64
}

/// Interval `(lower, 1)` that `epsilon` must lie in. `K = 1` uses
/// `sqrt(mu) / (1 + sqrt(mu))`, larger `K` the looser `sqrt(2 mu) / (1 + sqrt(2 mu))`.
pub fn epsilon_bounds(mu: f64, k: usize) -> (f64, f64) {
    let s = if k <= 1 { mu.sqrt() } else { (2.0 * mu).sqrt() };
    (s / (1.0 + s), 1.0)
}

/// The sharper, `K`-dependent lower bound `sqrt(mu + 1 - nu_a) / (1 + ...)`.
pub fn epsilon_lower_bound_tight(mu: f64, k: usize) -> f64 {
    let s = (mu + 1.0 - nu_a(k, mu)).sqrt();
    s / (1.0 + s)
}

/// Output of [`q_quantities`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QQuantities {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub nu_a: f64,
    pub nu_b: f64,
    pub mu_d_max: f64,
}

impl QQuantities {
    /// `min(Q1, Q2)^2`, the SNR threshold.
    pub fn snr_threshold(&self) -> f64 {
        self.q1.min(self.q2).powi(2)
    }
}

/// The hypothesis on `mu` under which the `Q` quantities are defined.
pub fn coherence_hypothesis(mu: f64, k: usize) -> std::result::Result<(), String> {
    if k <= 1 {
        if mu < 0.5 {
            Ok(())
        } else {
            Err(format!("mu_max < 1/2 fails (mu_max = {mu})"))
        }
    } else {
        let kf = k as f64;
        let lhs = (4.0 * kf - 1.0) * mu - 2.0 * kf * mu * mu;
        if lhs < 1.0 {
            Ok(())
        } else {
            Err(format!("(4K-1)mu - 2K mu^2 < 1 fails (value {lhs})"))
        }
    }
}

pub fn q0(d: f64, k: usize, mu: f64) -> Result<f64> {
    let lead = leading_factor(d, k, mu)?;
    Ok((libm::log(44.0 * std::f64::consts::SQRT_2 * k as f64) - libm::log(lead)) / ln_d(d))
}

pub fn q1(d: f64, k: usize, mu: f64, epsilon: f64) -> Result<f64> {
    let q0 = q0(d, k, mu)?;
    let sa = nu_a(k, mu).sqrt();
    let kf = k as f64;
    let num = 1.0 - (1.0 - mu) * sa * ((1.0 - epsilon) * (1.0 - mu).sqrt() - q0.sqrt());
    let den = 1.0 - 2.0 * mu * kf * sa * (1.0 - mu) / (1.0 - (2.0 * kf - 1.0) * mu);
    Ok(num / den)
}

pub fn q2(d: f64, k: usize, mu: f64) -> Result<f64> {
    let q0 = q0(d, k, mu)?;
    let sa = nu_a(k, mu).sqrt();
    let s = (2.0 + 4.0 * mu).sqrt();
    Ok(s * (1.0 + sa * (1.0 - mu) * q0.sqrt()) / (sa * (1.0 - mu) + s))
}

pub fn q0_k1(d: f64, mu: f64) -> Result<f64> {
    let lead = leading_factor_k1(d, mu)?;
    Ok((libm::log(44.0 * std::f64::consts::SQRT_2) - libm::log(lead)) / ln_d(d))
}

pub fn q1_k1(d: f64, mu: f64, epsilon: f64) -> Result<f64> {
    let q0 = q0_k1(d, mu)?;
    Ok((1.0 - (1.0 - mu) * ((1.0 - epsilon) * (1.0 - mu).sqrt() - q0.sqrt())) / (1.0 - 2.0 * mu))
}

/// The sparsity-one `Q2`. It uses `sqrt(2 + 2 mu)`, tighter than the
/// `sqrt(2 + 4 mu)` of the general form, so [`q2`] at `K = 1` is not equal to it
/// unless `mu = 0`.
pub fn q2_k1(d: f64, mu: f64) -> Result<f64> {
    let q0 = q0_k1(d, mu)?;
    let s = (2.0 + 2.0 * mu).sqrt();
    Ok(s * (1.0 + (1.0 - mu) * q0.sqrt()) / (1.0 - mu + s))
}

/// Evaluates `Q0, Q1, Q2, nu_a, nu_b` and `mu_d_max`; `K = 1` uses the dedicated forms.
pub fn q_quantities(d: f64, k: usize, mu: f64, epsilon: f64) -> Result<QQuantities> {
    if k == 0 {
        return Err(Error::InvalidConfig("K must be at least 1".into()));
    }
    coherence_hypothesis(mu, k).map_err(Error::HypothesisViolated)?;
    if k == 1 {
        Ok(QQuantities {
            q0: q0_k1(d, mu)?,
            q1: q1_k1(d, mu, epsilon)?,
            q2: q2_k1(d, mu)?,
            nu_a: 1.0,
            nu_b: 1.0 - mu * mu,
            mu_d_max: 0.0,
        })
    } else {
        Ok(QQuantities {
            q0: q0(d, k, mu)?,
            q1: q1(d, k, mu, epsilon)?,
            q2: q2(d, k, mu)?,
            nu_a: nu_a(k, mu),
            nu_b: nu_b(k, mu),
            mu_d_max: mu_d_max(k, mu),
        })
    }
}

/// Vote threshold `tau_c = sum_m F(rho_m) / (M_c F(r)) * 4 ln d` over `M_c` machines.
///
/// The general-`K` `F` is paired with the general-`K` `M_c`.
pub fn threshold_tc(rhos: &[f64], d: f64, k: usize, mu: f64, r: f64) -> Result<f64> {
    let mc = machines_needed(d, k, mu, r)?;
    if rhos.len() as u64 != mc {
        return Err(Error::DimensionMismatch {
            expected: mc as usize,
            got: rhos.len(),
        });
    }
    if let Some(m) = rhos.iter().position(|&rho| !(rho >= r)) {
        return Err(Error::RhoBelowR(m));
    }
    let fr = f_prob(d, k, mu, r)?;
    // summing ratios keeps the all-equal case exact
    let mut sum = 0.0;
    for &rho in rhos {
        sum += f_prob(d, k, mu, rho)? / fr;
    }
    let floor = 4.0 * ln_d(d);
    let tc = sum / mc as f64 * floor;
    assert!(
        tc >= floor * (1.0 - 1e-12),
        "tau_c = {tc} below 4 ln d = {floor}"
    );
    Ok(tc)
}

/// Verdicts and derived quantities for one parameter tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub params: TheoryParams,
    pub machines_available: u64,
    pub theta_crit: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    /// `M_c`, or `None` when undefined or infeasible.
    pub m_tilde: Option<u64>,
    pub log_m_tilde: Option<f64>,
    pub q0: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub nu_a: f64,
    pub nu_b: f64,
    pub mu_d_max: f64,
    pub eps_lower_bound: f64,
    pub snr_threshold: Option<f64>,
    /// `mu_max < 1/(2K-1)`.
    pub max_mip_ok: bool,
    /// The theorem's coherence hypothesis (`mu_max < 1/2` for `K = 1`).
    pub coherence_ok: bool,
    pub eps_ok: bool,
    pub snr_ok: bool,
    /// `M_c` for `K = 1`, `K^2 M_c` otherwise.
    pub machines_needed: Option<u64>,
    pub machines_ok: bool,
    /// Machines contacted per round: `M_c` for `K = 1`, `K M_c` otherwise.
    pub machines_per_round: Option<u64>,
    pub comm_bits_predicted: Option<u64>,
    pub all_ok: bool,
    pub notes: Vec<String>,
}

/// Evaluates every hypothesis of the recovery guarantee. Violations are
/// reported in the verdict fields and notes, never raised.
pub fn check_theorem(p: &TheoryParams, machines_available: u64) -> TheoryReport {
    check_theorem_with(p, machines_available, &TheoryConfig::default())
}

pub fn check_theorem_with(
    p: &TheoryParams,
    machines_available: u64,
    cfg: &TheoryConfig,
) -> TheoryReport {
    let mut notes = Vec::new();
    if let Err(e) = p.validate() {
        notes.push(e.to_string());
    }
    let k = p.k.max(1);
    let mu = p.mu_max;
    let mut note = |r: &Result<f64>, what: &str| {
        if let Err(e) = r {
            notes.push(format!("{what}: {e}"));
        }
    };

    let theta_crit_v = theta_crit(mu, p.n, p.d as f64, k, p.sigma);
    note(&theta_crit_v, "theta_crit");
    let r = snr_r(p);
    let f = r.as_ref().map_err(clone_err).and_then(|&r| f_prob(p.d as f64, k, mu, r));
    note(&f, "F");
    let log_mc = r
        .as_ref()
        .map_err(clone_err)
        .and_then(|&r| log_machines_needed(p.d as f64, k, mu, r));
    let mc = match (&r, &log_mc) {
        (Ok(r), Ok(_)) => match machines_needed_with(p.d as f64, k, mu, *r, cfg) {
            Ok(m) => Some(m),
            Err(e) => {
                notes.push(format!("M_c: {e}"));
                None
            }
        },
        _ => None,
    };

    let qs = q_quantities(p.d as f64, k, mu, p.epsilon);
    if let Err(e) = &qs {
        notes.push(format!("Q: {e}"));
    }
    let qs = qs.ok();

    let max_mip_ok = ((2 * k - 1) as f64) * mu < 1.0;
    let coherence_ok = coherence_hypothesis(mu, k).is_ok();
    let (eps_lo, eps_hi) = epsilon_bounds(mu, k);
    let eps_ok = p.epsilon > eps_lo && p.epsilon < eps_hi;
    let snr_threshold = qs.map(|q| q.snr_threshold());
    let snr_ok = match (&r, snr_threshold) {
        (Ok(r), Some(t)) => *r > t,
        _ => false,
    };

    let kk = k as u64;
    let machines_needed = mc.and_then(|m| if k == 1 { Some(m) } else { m.checked_mul(kk * kk) });
    let machines_per_round = mc.and_then(|m| m.checked_mul(kk));
    let machines_ok = machines_needed.is_some_and(|m| machines_available >= m);
    // sum_{t=1..K} t * per_round * ceil(log2 d)
    let comm_bits_predicted = machines_per_round.and_then(|pr| {
        (kk * (kk + 1) / 2)
            .checked_mul(pr)?
            .checked_mul(bits_per_index(p.d))
    });
    notes.push(
        "recovery also requires d large enough relative to epsilon; no explicit threshold is checked"
            .into(),
    );

    let all_ok = notes.len() == 1 && max_mip_ok && coherence_ok && eps_ok && snr_ok && machines_ok;
    TheoryReport {
        params: *p,
        machines_available,
        theta_crit: theta_crit_v.ok(),
        r: r.ok(),
        f: f.ok(),
        m_tilde: mc,
        log_m_tilde: log_mc.ok(),
        q0: qs.map(|q| q.q0),
        q1: qs.map(|q| q.q1),
        q2: qs.map(|q| q.q2),
        nu_a: if k == 1 { 1.0 } else { nu_a(k, mu) },
        nu_b: if k == 1 { 1.0 - mu * mu } else { nu_b(k, mu) },
        mu_d_max: mu_d_max(k, mu),
        eps_lower_bound: eps_lo,
        snr_threshold,
        max_mip_ok,
        coherence_ok,
        eps_ok,
        snr_ok,
        machines_needed,
        machines_ok,
        machines_per_round,
        comm_bits_predicted,
        all_ok,
        notes,
    }
}

fn clone_err(e: &Error) -> Error {
    Error::HypothesisViolated(e.to_string())
}

impl TheoryReport {
    /// Human-readable aligned listing.
    pub fn to_text(&self) -> String {
        fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "n/a".to_string(), |x| x.to_string())
        }
        fn verdict(ok: bool) -> &'static str {
            if ok {
                "PASS"
            } else {
                "FAIL"
            }
        }
        let p = &self.params;
        let rows: Vec<(&str, String)> = vec![
            ("d", p.d.to_string()),
            ("K", p.k.to_string()),
            ("n", p.n.to_string()),
            ("sigma", p.sigma.to_string()),
            ("mu_max", p.mu_max.to_string()),
            ("theta_min_scaled", p.theta_min_scaled.to_string()),
            ("epsilon", p.epsilon.to_string()),
            ("machines_available", self.machines_available.to_string()),
            ("theta_crit", opt(&self.theta_crit)),
            ("r", opt(&self.r)),
            ("F", opt(&self.f)),
            ("M_c", opt(&self.m_tilde)),
            ("log M_c", opt(&self.log_m_tilde)),
            ("Q0", opt(&self.q0)),
            ("Q1", opt(&self.q1)),
            ("Q2", opt(&self.q2)),
            ("nu_a", self.nu_a.to_string()),
            ("nu_b", self.nu_b.to_string()),
            ("mu_d_max", self.mu_d_max.to_string()),
            ("epsilon lower bound", self.eps_lower_bound.to_string()),
            ("SNR threshold", opt(&self.snr_threshold)),
            ("machines needed", opt(&self.machines_needed)),
            ("machines per round", opt(&self.machines_per_round)),
            ("predicted bits", opt(&self.comm_bits_predicted)),
            ("max-MIP", verdict(self.max_mip_ok).into()),
            ("coherence hypothesis", verdict(self.coherence_ok).into()),
            ("epsilon interval", verdict(self.eps_ok).into()),
            ("SNR condition", verdict(self.snr_ok).into()),
            ("machine budget", verdict(self.machines_ok).into()),
            ("overall", verdict(self.all_ok).into()),
        ];
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}
