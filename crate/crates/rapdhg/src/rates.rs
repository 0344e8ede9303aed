//! Closed-form linear-rate certificates.
//!
//! Every certificate is a per-iteration contraction factor in `(0, 1]`
//! applied to the *squared* V-distance to the saddle set. Functions validate
//! their own output range and refuse to emit factors above one or at or
//! below zero rather than clamping.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..1.0).contains(&v) {
        return Err(Error::invalid(format!("{name} = {v} must lie in [0, 1)")));
    }
    Ok(())
}

fn check_factor(name: &str, f: f64) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::CertificateRange(format!("{name} produced factor {f}")));
    }
    Ok(f)
}

/// Averagedness constant: `T` is `1/(1+lambda)`-averaged with
/// `lambda = 1 - a_f - (a_g - (1-g) a_f)/2 - sqrt((1-a_f)^2 g + ((1-g) a_f - a_g)^2 / 4)`.
pub fn averaging_lambda(gamma: f64, alpha_f: f64, alpha_g: f64) -> Result<f64> {
    check_unit_interval("gamma", gamma)?;
    check_unit_interval("alpha_f", alpha_f)?;
    check_unit_interval("alpha_g", alpha_g)?;
    let lambda = 1.0 - alpha_f - (alpha_g - (1.0 - gamma) * alpha_f) / 2.0
        - ((1.0 - alpha_f).powi(2) * gamma
            + ((1.0 - gamma) * alpha_f - alpha_g).powi(2) / 4.0)
            .sqrt();
    if lambda <= 0.0 {
        return Err(Error::InvalidSteps(format!(
            "step sizes violate averagedness (lambda = {lambda})"
        )));
    }
    Ok(lambda)
}

/// `a_2 = max((2 a_f - 1)/(1 - a_f), (2 a_g - 1 + g)/(1 - a_g - g)) >= -1`.
pub fn a2_const(alpha_f: f64, alpha_g: f64, gamma: f64) -> Result<f64> {
    if 1.0 - alpha_f <= 0.0 {
        return Err(Error::invalid("a2 needs alpha_f < 1"));
    }
    if 1.0 - alpha_g - gamma <= 0.0 {
        return Err(Error::invalid("a2 needs alpha_g + gamma < 1"));
    }
    let first = (2.0 * alpha_f - 1.0) / (1.0 - alpha_f);
    let second = (2.0 * alpha_g - 1.0 + gamma) / (1.0 - alpha_g - gamma);
    Ok(first.max(second))
}

/// Contraction on squared V-distance under a strongly convex-concave
/// Lagrangian with modulus `mu` in the V-norm.
pub fn rate_strconv(mu: f64, lambda: f64, a2: f64) -> Result<f64> {
    if mu < 0.0 || !(lambda > 0.0) {
        return Err(Error::invalid("rate_strconv needs mu >= 0 and lambda > 0"));
    }
    if 2.0 + a2 <= 0.0 {
        return Err(Error::invalid("rate_strconv needs 2 + a2 > 0"));
    }
    let rho = mu / ((2.0 + a2) * (1.0 + mu / lambda));
    check_factor("rate_strconv", 1.0 / (1.0 + rho))
}

/// Contraction for a strongly convex objective under affine equality
/// constraints: `eta = min(mu_f tau, sigma tau s_min^2 / (tau L + 1/lambda))`.
pub fn rate_strconv_affine(
    mu_f: f64,
    l_total: f64,
    sigma_min: f64,
    tau: f64,
    sigma: f64,
    lambda: f64,
    a2: f64,
) -> Result<f64> {
    if !(mu_f > 0.0) {
        return Err(Error::invalid("rate_strconv_affine needs mu_f > 0"));
    }
    if sigma_min < 0.0 || l_total < 0.0 || !(tau > 0.0) || !(sigma > 0.0) || !(lambda > 0.0) {
        return Err(Error::invalid("rate_strconv_affine inputs out of range"));
    }
    if 2.0 + a2 <= 0.0 {
        return Err(Error::invalid("rate_strconv_affine needs 2 + a2 > 0"));
    }
    let eta = (mu_f * tau).min(sigma * tau * sigma_min * sigma_min / (tau * l_total + 1.0 / lambda));
    let rho = eta / ((2.0 + a2) * (1.0 + eta / lambda));
    check_factor("rate_strconv_affine", 1.0 / (1.0 + rho))
}

/// Contraction under metric subregularity of the generalized gradient with
/// constant `eta` in the V-norm.
pub fn rate_msr(eta: f64, lambda: f64, alpha_f: f64, alpha_g: f64) -> Result<f64> {
    if eta < 0.0 || !(lambda > 0.0) {
        return Err(Error::invalid("rate_msr needs eta >= 0 and lambda > 0"));
    }
    let denom = 3f64.sqrt() * eta + 2.0 + 2.0 * 3f64.sqrt() * alpha_f.max(alpha_g);
    let factor = 1.0 - eta * eta * lambda / (denom * denom);
    check_factor("rate_msr", factor)
}

/// Contraction under a quadratic error bound of the smoothed gap with
/// constant `eta` at smoothing `beta` (infinite components allowed):
/// `Lambda = lambda / max((1+a2) lambda + 1/b_x, (2+a2) lambda + 1/b_y)`.
pub fn rate_qebsm(eta: f64, lambda: f64, a2: f64, beta_x: f64, beta_y: f64) -> Result<f64> {
    if eta < 0.0 || !(lambda > 0.0) {
        return Err(Error::invalid("rate_qebsm needs eta >= 0 and lambda > 0"));
    }
    if !(beta_x > 0.0) || !(beta_y > 0.0) {
        return Err(Error::invalid("rate_qebsm needs positive smoothing weights"));
    }
    let cap = ((1.0 + a2) * lambda + 1.0 / beta_x).max((2.0 + a2) * lambda + 1.0 / beta_y);
    let big_lambda = lambda / cap;
    if !(big_lambda > 0.0 && big_lambda <= 1.0) {
        return Err(Error::CertificateRange(format!(
            "rate_qebsm Lambda = {big_lambda} outside (0, 1]"
        )));
    }
    let rho = big_lambda * eta / (1.0 + eta / lambda);
    check_factor("rate_qebsm", 1.0 / (1.0 + rho))
}

/// Restart period `K = ceil(max(2/beta, 2 (2 + max(0, a2)) / eta))` and the
/// implied per-inner-iteration rate `2^(-1/K)` on squared V-distance.
pub fn restart_period(beta: f64, eta: f64, a2: f64) -> Result<(usize, f64)> {
    if !(beta > 0.0) || !(eta > 0.0) {
        return Err(Error::invalid("restart_period needs beta > 0 and eta > 0"));
    }
    let a2p = a2.max(0.0);
    let k = (2.0 / beta).max(2.0 * (2.0 + a2p) / eta).ceil();
    if !k.is_finite() || k < 1.0 {
        return Err(Error::invalid("restart period not representable"));
    }
    let k = k as usize;
    Ok((k, 0.5f64.powf(1.0 / k as f64)))
}

// ---------------------------------------------------------------------------
// Slow-fast composite certificate
// ---------------------------------------------------------------------------

/// Inputs of the slow-fast contraction analysis, stated for a strongly convex
/// proximal block under an affine equality constraint (`mu_g* = +inf`,
/// smooth dual part absent, hence `a_2 = -1`). `eta_x`, `eta_y` are the two
/// component constants of the smoothed-gap error bound; `lambda` plays the
/// role of the averagedness constant.
#[derive(Debug, Clone)]
pub struct SlowFastInputs {
    pub mu_f: f64,
    pub eta_x: f64,
    pub eta_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
    pub gamma: f64,
    pub tau: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub c_grid: Vec<f64>,
}

/// Which branch of the case analysis produced a factor at one grid value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlowFastCase {
    SmallCurvature,
    Mixed,
    LargeCurvature,
    Inapplicable,
}

#[derive(Debug, Clone)]
pub struct SlowFastReport {
    pub best_rho: f64,
    pub best_c: f64,
    /// `(C, case, factor)` for every grid value.
    pub cases: Vec<(f64, SlowFastCase, Option<f64>)>,
}

/// Default grid: 64 logarithmically spaced values in `(1e-4, 1 - sqrt(eta_x))`.
pub fn default_c_grid(eta_x: f64) -> Vec<f64> {
    let hi = (1.0 - eta_x.sqrt()).max(2e-4) * 0.999;
    let lo = 1e-4;
    let n = 64;
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Evaluate the three-case slow-fast contraction over the supplied grid and
/// return the best factor with its witness constants.
pub fn rate_slowfast(inputs: &SlowFastInputs) -> Result<SlowFastReport> {
    let SlowFastInputs {
        mu_f,
        eta_x,
        eta_y,
        beta_x,
        beta_y,
        gamma,
        tau,
        sigma: _,
        lambda,
        ref c_grid,
    } = *inputs;
    if !(eta_x > 0.0 && eta_x < 1.0) {
        return Err(Error::invalid("slow-fast needs eta_x in (0, 1)"));
    }
    if !(eta_y > 0.0) || !(lambda > 0.0) || !(tau > 0.0) || !(gamma > 0.0) || mu_f < 0.0 {
        return Err(Error::invalid("slow-fast inputs out of range"));
    }
    let alpha2 = eta_x.sqrt();
    if 1.0 / beta_x < 1.0 / beta_y + alpha2 - eta_x - 1e-15 {
        return Err(Error::CertificateRange(
            "slow-fast certificate inapplicable: 1/beta_x < 1/beta_y + sqrt(eta_x) - eta_x".into(),
        ));
    }
    // mu_g* = +inf specialization; a_2 = -1 throughout.
    let alpha1 = if mu_f > 0.0 {
        2.0 * mu_f * inputs.sigma * tau / (2.0 * mu_f * inputs.sigma * tau + lambda)
    } else {
        0.0
    };
    let drift = 2.0 * mu_f * tau * (1.0 - alpha1);

    let mut cases = Vec::with_capacity(c_grid.len());
    let mut best: Option<(f64, f64)> = None;
    for &c in c_grid {
        if !(c > 0.0) || c > 1.0 - alpha2 {
            cases.push((c, SlowFastCase::Inapplicable, None));
            continue;
        }
        let lam3 = (1.0 - alpha2 - c) * eta_x / (2.0 * gamma * (1.0 - alpha2));
        let entry = if drift <= c * eta_x {
            let lam4 = 1.0 / (beta_x * lambda) - 1.0;
            branch_factor(c, eta_x, eta_y, 0.0, lam4, SlowFastCase::SmallCurvature)
        } else {
            let lam1_num = -1.0 / beta_y + lam3 - c * eta_x / alpha2 + 1.0 / beta_x;
            let lhs = (1.0 / beta_x - lambda) / (drift - c * eta_x);
            let rhs = lam1_num / drift;
            if lhs > rhs {
                let lam1 = lam1_num / drift;
                let lam4 = (1.0 / beta_x - lam1 * (drift - c * eta_x)) / lambda - 1.0;
                branch_factor(c, eta_x, eta_y, lam1, lam4, SlowFastCase::Mixed)
            } else {
                let lam1 = (1.0 / beta_x - lambda) / (drift - c * eta_x);
                branch_factor(c, eta_x, eta_y, lam1, 0.0, SlowFastCase::LargeCurvature)
            }
        };
        if let (_, _, Some(rho)) = entry {
            if best.map_or(true, |(b, _)| rho < b) {
                best = Some((rho, c));
            }
        }
        cases.push(entry);
    }
    let (best_rho, best_c) = best.ok_or_else(|| {
        Error::CertificateRange("slow-fast grid produced no admissible factor".into())
    })?;
    Ok(SlowFastReport { best_rho, best_c, cases })
}

fn branch_factor(
    c: f64,
    eta_x: f64,
    eta_y: f64,
    lam1: f64,
    lam4: f64,
    case: SlowFastCase,
) -> (f64, SlowFastCase, Option<f64>) {
    if lam1 < 0.0 || lam4 < 0.0 || !lam1.is_finite() || !lam4.is_finite() {
        return (c, SlowFastCase::Inapplicable, None);
    }
    let rho = (1.0 / (1.0 + c * eta_x / (1.0 + lam4))).max(1.0 / (1.0 + eta_y / (1.0 + lam4)));
    if rho > 0.0 && rho < 1.0 {
        (c, case, Some(rho))
    } else {
        (c, SlowFastCase::Inapplicable, None)
    }
}

// ---------------------------------------------------------------------------
// Toy-problem regularity constants
// ---------------------------------------------------------------------------

/// Smoothed-gap error-bound constant of the 1-D constrained quadratic:
/// `eta = min(mu tau + sigma tau a^2 / beta_y, sigma tau a^2 / (beta_x + mu tau))`.
pub fn toy_qeb_eta(mu: f64, a: f64, tau: f64, sigma: f64, beta_x: f64, beta_y: f64) -> f64 {
    let coupling = sigma * tau * a * a;
    (mu * tau + coupling / beta_y).min(coupling / (beta_x + mu * tau))
}

/// Metric-subregularity constant of the same problem:
/// `(sqrt(mu^2 tau^2 + 4 sigma tau a^2) - mu tau) / 2`.
pub fn toy_msr_eta(mu: f64, a: f64, tau: f64, sigma: f64) -> f64 {
    ((mu * mu * tau * tau + 4.0 * sigma * tau * a * a).sqrt() - mu * tau) / 2.0
}

// ---------------------------------------------------------------------------
// Aggregate certificate
// ---------------------------------------------------------------------------

/// Everything the certificate builder may consume.
#[derive(Debug, Clone, Default)]
pub struct RateInputs {
    pub gamma: f64,
    pub alpha_f: f64,
    pub alpha_g: f64,
    pub tau: f64,
    pub sigma: f64,
    /// Strong convex-concavity modulus in the V-norm.
    pub mu: Option<f64>,
    pub mu_f: Option<f64>,
    /// `L_f + L_f'`: Lipschitz constant of the full objective gradient.
    pub l_total: Option<f64>,
    pub sigma_min: Option<f64>,
    /// Metric-subregularity constant in the V-norm.
    pub eta_msr: Option<f64>,
    /// Smoothed-gap error-bound constant with its smoothing weights.
    pub eta_qeb: Option<(f64, f64, f64)>,
}

/// `lambda`, `a_2` and the contraction factors of every assumption the
/// inputs enable.
#[derive(Debug, Clone)]
pub struct RateCertificate {
    pub lambda: f64,
    pub a2: f64,
    pub factors: BTreeMap<String, f64>,
}

impl RateCertificate {
    pub fn build(inputs: &RateInputs) -> Result<Self> {
        let lambda = averaging_lambda(inputs.gamma, inputs.alpha_f, inputs.alpha_g)?;
        let a2 = a2_const(inputs.alpha_f, inputs.alpha_g, inputs.gamma)?;
        let mut factors: BTreeMap<String, f64> = BTreeMap::new();
        if let Some(mu) = inputs.mu {
            if mu > 0.0 {
                factors.insert("strongly_convex".into(), rate_strconv(mu, lambda, a2)?);
            }
        }
        if let (Some(mu_f), Some(l_total), Some(s_min)) =
            (inputs.mu_f, inputs.l_total, inputs.sigma_min)
        {
            if mu_f > 0.0 {
                factors.insert(
                    "strongly_convex_affine".into(),
                    rate_strconv_affine(mu_f, l_total, s_min, inputs.tau, inputs.sigma, lambda, a2)?,
                );
            }
        }
        if let Some(eta) = inputs.eta_msr {
            factors.insert(
                "metric_subregularity".into(),
                rate_msr(eta, lambda, inputs.alpha_f, inputs.alpha_g)?,
            );
        }
        if let Some((eta, bx, by)) = inputs.eta_qeb {
            factors.insert("smoothed_gap_qeb".into(), rate_qebsm(eta, lambda, a2, bx, by)?);
        }
        for (name, f) in &factors {
            check_factor(name, *f)?;
        }
        Ok(RateCertificate { lambda, a2, factors })
    }
}
