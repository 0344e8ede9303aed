//! Independent ground truth.
//!
//! The 1-D constrained quadratic (`min mu/2 x^2 s.t. a x = b`) is solvable in
//! closed form: its PDHG iteration is an affine map whose spectral radius
//! gives the exact asymptotic rate every certificate is judged against. On
//! top of it this module provides the empirical regularity-constant
//! estimators, the closed-form smoothed gap of a linear program (an
//! independent cross-check of the generic evaluator), asymptotic-rate fitting
//! from distance logs, and cached high-precision reference solutions.

use crate::error::{Error, Result};
use crate::functions::{ProxFn, SmoothFn, FEASIBILITY_TOL};
use crate::gap::{self, SmoothParams};
use crate::linalg::{dot, v_dist, DenseMat, LinOp, PrimalDualPoint, VNormParams};
use crate::problems::{LpDescription, ProblemMeta, SaddleProblem};
use crate::solver::{
    run_adaptive, AdaptiveOptions, PdhgEngine, RunOptions, StepSizes, StoppingRule,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Guard below which iterates are considered to sit on the solution and are
/// skipped by the ratio estimators.
const DIST_GUARD: f64 = 1e-9;

// ---------------------------------------------------------------------------
// The 1-D constrained quadratic
// ---------------------------------------------------------------------------

/// `min_x mu/2 x^2  s.t.  a x = b`, with fixed steps `(tau, sigma)`.
#[derive(Debug, Clone, Copy)]
pub struct ToyProblem {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub sigma: f64,
}

impl ToyProblem {
    pub fn new(mu: f64, a: f64, b: f64, tau: f64, sigma: f64) -> Result<Self> {
        if mu < 0.0 || !(tau > 0.0) || !(sigma > 0.0) {
            return Err(Error::invalid("toy problem needs mu >= 0 and positive steps"));
        }
        if a == 0.0 && (mu == 0.0 || b != 0.0) {
            return Err(Error::invalid("decoupled toy problem needs mu > 0 and b = 0"));
        }
        if sigma * tau * a * a >= 1.0 {
            return Err(Error::invalid("toy problem needs sigma tau a^2 < 1"));
        }
        Ok(ToyProblem { mu, a, b, tau, sigma })
    }

    /// Iteration matrix `R` of the gradient-form PDHG recursion
    /// `z_{k+1} - z* = R (z_k - z*)`.
    pub fn iteration_matrix(&self) -> [[f64; 2]; 2] {
        let g = self.sigma * self.tau * self.a * self.a;
        let d = 1.0 - self.tau * self.mu;
        [
            [(1.0 - g) * d, -self.tau * self.a * (1.0 - g)],
            [self.sigma * self.a * d, 1.0 - g],
        ]
    }

    /// The unique saddle point.
    pub fn saddle_point(&self) -> PrimalDualPoint {
        if self.a == 0.0 {
            return PrimalDualPoint::new(vec![0.0], vec![0.0]);
        }
        let x = self.b / self.a;
        let y = -self.mu * x / self.a;
        PrimalDualPoint::new(vec![x], vec![y])
    }

    /// Quadratic handled by a gradient step (`f2`), constraint by the dual
    /// prox. This is the form whose iteration matrix is [`Self::iteration_matrix`].
    pub fn build_gradient_form(&self) -> SaddleProblem {
        SaddleProblem {
            f: ProxFn::LinearNonneg { cost: vec![0.0], nonneg: vec![] },
            f2: if self.mu > 0.0 {
                Some(SmoothFn::HalfSquaredNorm { scale: self.mu })
            } else {
                None
            },
            gstar: ProxFn::LinearNonneg { cost: vec![self.b], nonneg: vec![] },
            g2star: None,
            a: LinOp::dense(DenseMat::new(1, 1, vec![self.a]).expect("1x1")),
            meta: ProblemMeta {
                name: "toy-grad".into(),
                mu_f: Some(self.mu),
                mu_gstar: None,
                sigma_min: Some(self.a.abs()),
            },
        }
    }

    /// Quadratic handled by its prox; this form has no smooth block, so the
    /// smoothed-gap machinery (and with it the adaptive solver) applies.
    pub fn build_prox_form(&self) -> SaddleProblem {
        let f = if self.mu > 0.0 {
            ProxFn::SquaredL2 { weight: self.mu / 2.0 }
        } else {
            ProxFn::LinearNonneg { cost: vec![0.0], nonneg: vec![] }
        };
        SaddleProblem {
            f,
            f2: None,
            gstar: ProxFn::LinearNonneg { cost: vec![self.b], nonneg: vec![] },
            g2star: None,
            a: LinOp::dense(DenseMat::new(1, 1, vec![self.a]).expect("1x1")),
            meta: ProblemMeta {
                name: "toy-prox".into(),
                mu_f: Some(self.mu),
                mu_gstar: None,
                sigma_min: Some(self.a.abs()),
            },
        }
    }
}

/// Exact asymptotic contraction of the gradient-form recursion: the largest
/// eigenvalue modulus of `R` among eigenvalues different from one, by the
/// quadratic formula (complex pairs allowed).
pub fn toy_exact_rate(p: &ToyProblem) -> f64 {
    let r = p.iteration_matrix();
    let tr = r[0][0] + r[1][1];
    let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        // complex conjugate pair: |lambda|^2 = det
        return det.sqrt();
    }
    let roots = [(tr + disc.sqrt()) / 2.0, (tr - disc.sqrt()) / 2.0];
    roots
        .iter()
        .filter(|r| (r.abs() - 1.0).abs() > 1e-12)
        .map(|r| r.abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Asymptotic-rate fitting
// ---------------------------------------------------------------------------

/// Least-squares slope of `log dist` over the trailing `tail` fraction of the
/// iterations, discarding the pre-asymptotic head; returns the per-iteration
/// contraction `exp(slope)`.
pub fn fit_asymptotic_rate(dists: &[f64], tail: f64) -> Result<f64> {
    if !(0.0 < tail && tail <= 1.0) {
        return Err(Error::invalid("tail fraction must lie in (0, 1]"));
    }
    let start = ((dists.len() as f64) * (1.0 - tail)) as usize;
    let pts: Vec<(f64, f64)> = dists
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, &d)| d.is_finite() && d > 1e-290)
        .map(|(k, &d)| (k as f64, d.ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::invalid(
            "not enough usable distances in the fitting window",
        ));
    }
    let n = pts.len() as f64;
    let mean_k = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_l = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, l) in &pts {
        num += (k - mean_k) * (l - mean_l);
        den += (k - mean_k) * (k - mean_k);
    }
    if den == 0.0 {
        return Err(Error::invalid("degenerate fitting window"));
    }
    Ok((num / den).exp())
}

// ---------------------------------------------------------------------------
// Empirical regularity-constant estimators
// ---------------------------------------------------------------------------

/// `min_k G_beta(z_k; z*) / (0.5 dist_V(z_k, Z*)^2)` over the supplied
/// iterates, skipping iterates closer than the 0/0 guard.
pub fn estimate_qeb(
    iterates: &[PrimalDualPoint],
    z_star: &PrimalDualPoint,
    beta: &SmoothParams,
    problem: &SaddleProblem,
    steps: &VNormParams,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for z in iterates {
        let d = v_dist(z, z_star, steps);
        if d < DIST_GUARD {
            continue;
        }
        let g = gap::smoothed_gap(problem, z, z_star, beta, steps)?.value;
        if g.is_finite() {
            best = best.min(g / (0.5 * d * d));
        }
    }
    if !best.is_finite() {
        return Err(Error::invalid(
            "no admissible iterate for the error-bound estimate",
        ));
    }
    Ok(best)
}

/// `min_k ||z_k - T(z_k)||_V / dist_V(z_k, Z*)` - the computable fixed-point
/// surrogate of the subregularity constant.
pub fn estimate_msr(
    iterates: &[PrimalDualPoint],
    z_star: &PrimalDualPoint,
    problem: &SaddleProblem,
    steps: StepSizes,
) -> Result<f64> {
    let vp = steps.v_norm_params();
    let mut engine = PdhgEngine::new(problem, steps)?;
    let mut best = f64::INFINITY;
    for z in iterates {
        let d = v_dist(z, z_star, &vp);
        if d < DIST_GUARD {
            continue;
        }
        let (z_next, _) = engine.step(z)?;
        best = best.min(v_dist(z, &z_next, &vp) / d);
    }
    if !best.is_finite() {
        return Err(Error::invalid(
            "no admissible iterate for the subregularity estimate",
        ));
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Closed-form LP smoothed gap
// ---------------------------------------------------------------------------

/// Term-by-term closed form of `G_beta(z; z*)` for a linear program with
/// scalar smoothing `beta`, used as an independent oracle against the generic
/// prox-based evaluator.
pub fn lp_gap_closed_form(
    lp: &LpDescription,
    z: &PrimalDualPoint,
    z_star: &PrimalDualPoint,
    beta: f64,
    steps: &VNormParams,
) -> Result<f64> {
    lp.validate()?;
    if !(beta > 0.0) {
        return Err(Error::invalid("closed-form LP gap needs scalar beta > 0"));
    }
    let (tau, sigma) = (steps.tau(), steps.sigma());
    let (m, n) = (lp.a.rows(), lp.a.cols());
    if z.x.len() != n || z.y.len() != m {
        return Err(Error::DimensionMismatch { expected: n + m, got: z.x.len() + z.y.len() });
    }

    // indicator blocks at the evaluation point
    if lp.nonneg_cols.iter().any(|&i| z.x[i] < -FEASIBILITY_TOL)
        || lp.ineq_rows.iter().any(|&j| z.y[j] < -FEASIBILITY_TOL)
    {
        return Ok(f64::INFINITY);
    }

    let mut value = dot(&lp.c, &z.x) + dot(&lp.b, &z.y);

    // residual r = A x - b, dual slack w = c + A' y
    let mut r = vec![0.0; m];
    lp.a.apply(&z.x, &mut r);
    for j in 0..m {
        r[j] -= lp.b[j];
    }
    let mut w = vec![0.0; n];
    lp.a.apply_transpose(&z.y, &mut w);
    for i in 0..n {
        w[i] += lp.c[i];
    }

    // primal-side supremum blocks
    for &j in &lp.eq_rows {
        value += r[j] * z_star.y[j] + sigma / (2.0 * beta) * r[j] * r[j];
    }
    for &j in &lp.ineq_rows {
        let up = (z_star.y[j] + sigma / beta * r[j]).max(0.0);
        value += beta / (2.0 * sigma) * (up * up - z_star.y[j] * z_star.y[j]);
    }

    // dual-side supremum blocks
    for &i in &lp.free_cols {
        value += -w[i] * z_star.x[i] + tau / (2.0 * beta) * w[i] * w[i];
    }
    for &i in &lp.nonneg_cols {
        let up = (z_star.x[i] - tau / beta * w[i]).max(0.0);
        value += beta / (2.0 * tau) * (up * up - z_star.x[i] * z_star.x[i]);
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// Reference solutions
// ---------------------------------------------------------------------------

/// Default target residual of [`reference_solve`].
pub const REFERENCE_TOL: f64 = 1e-12;
const REFERENCE_MAX_ITERS: usize = 1_000_000;

#[derive(Serialize, Deserialize)]
struct ReferenceCacheFile {
    problem_hash: String,
    tau: f64,
    sigma: f64,
    tol: f64,
    iterations: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// FNV-1a content hash of the problem data and solve parameters, keying the
/// reference-solution cache.
pub fn problem_fingerprint(problem: &SaddleProblem, steps: StepSizes, tol: f64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    };
    eat(problem.meta.name.as_bytes());
    let (n, m) = problem.dims();
    eat(&n.to_le_bytes());
    eat(&m.to_le_bytes());
    let mut eat_f = |v: f64| {
        for &b in v.to_le_bytes().iter() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
    };
    // probe the operator and the function blocks through their action on a
    // fixed set of vectors; cheap and representation-independent
    let mut probe = vec![0.0; n];
    for i in 0..n {
        probe[i] = ((i * 2654435761) % 1000) as f64 / 997.0 - 0.5;
    }
    for v in problem.a.apply_vec(&probe) {
        eat_f(v);
    }
    if let Ok(p) = problem.f.prox(&probe, 0.7) {
        for v in p {
            eat_f(v);
        }
    }
    let mut probe_y = vec![0.0; m];
    for j in 0..m {
        probe_y[j] = ((j * 40503) % 1000) as f64 / 991.0 - 0.5;
    }
    if let Ok(p) = problem.gstar.prox(&probe_y, 0.3) {
        for v in p {
            eat_f(v);
        }
    }
    eat_f(steps.tau);
    eat_f(steps.sigma);
    eat_f(tol);
    h
}

/// High-precision saddle point via the adaptive solver, cached per problem
/// fingerprint when a cache directory is supplied.
pub fn reference_solve(
    problem: &SaddleProblem,
    steps: StepSizes,
    tol: f64,
    cache_dir: Option<&Path>,
) -> Result<PrimalDualPoint> {
    if !(tol > 0.0) {
        return Err(Error::invalid("reference tolerance must be positive"));
    }
    let hash = format!("{:016x}", problem_fingerprint(problem, steps, tol));
    if let Some(dir) = cache_dir {
        let path = dir.join(format!("ref-{hash}.json"));
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(cached) = serde_json::from_str::<ReferenceCacheFile>(&text) {
                if cached.problem_hash == hash
                    && cached.tau == steps.tau
                    && cached.sigma == steps.sigma
                    && cached.tol == tol
                {
                    return Ok(PrimalDualPoint::new(cached.x, cached.y));
                }
            }
        }
    }

    let (n, m) = problem.dims();
    let out = run_adaptive(
        problem,
        &PrimalDualPoint::zeros(n, m),
        steps,
        1.0,
        &StoppingRule::kkt(REFERENCE_MAX_ITERS, tol),
        &RunOptions::default(),
        &AdaptiveOptions::default(),
    )?;
    if !out.converged {
        let vp = steps.v_norm_params();
        let (z_next, _) = PdhgEngine::new(problem, steps)?.step(&out.z)?;
        return Err(Error::NotConverged {
            iterations: out.iterations,
            residual: v_dist(&out.z, &z_next, &vp),
        });
    }
    if let Some(dir) = cache_dir {
        std::fs::create_dir_all(dir)?;
        let file = ReferenceCacheFile {
            problem_hash: hash.clone(),
            tau: steps.tau,
            sigma: steps.sigma,
            tol,
            iterations: out.iterations,
            x: out.z.x.clone(),
            y: out.z.y.clone(),
        };
        std::fs::write(dir.join(format!("ref-{hash}.json")), serde_json::to_string(&file)?)?;
    }
    Ok(out.z)
}
