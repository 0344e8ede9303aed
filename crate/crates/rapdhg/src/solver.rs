//! The PDHG fixed-point operator and its solve drivers.
//!
//! One application of the operator `T` reads
//!
//! ```text
//! x_bar = prox_{tau f}(x - tau grad f2(x) - tau A' y)
//! y_bar = prox_{sigma g*}(y - sigma grad g2*(y) + sigma A x_bar)
//! x+    = x_bar - tau A' (y_bar - y)
//! y+    = y_bar
//! ```
//!
//! Four drivers are built on it: the plain fixed-point iteration, the
//! averaged variant returning the mean of the shadow iterates, fixed-period
//! restarting of that average, and an adaptive restart that monitors the
//! self-centered smoothed gap and restarts when it has halved.

use crate::error::{Error, Result};
use crate::gap::{self, SmoothParams};
use crate::linalg::{v_dist, PrimalDualPoint, VNormParams};
use crate::problems::SaddleProblem;

// ---------------------------------------------------------------------------
// Step sizes
// ---------------------------------------------------------------------------

/// Primal/dual steps together with the derived contraction constants
/// `gamma = sigma tau ||A||^2`, `alpha_f = tau L_f / 2`,
/// `alpha_g = sigma L_g* / 2`. Construction enforces all three strictly
/// below one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizes {
    pub tau: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub alpha_f: f64,
    pub alpha_g: f64,
}

impl StepSizes {
    pub fn new(tau: f64, sigma: f64, a_norm: f64, l_f: f64, l_gstar: f64) -> Result<Self> {
        if !(tau > 0.0) || !(sigma > 0.0) {
            return Err(Error::InvalidSteps(format!(
                "steps must be positive, got tau={tau}, sigma={sigma}"
            )));
        }
        let gamma = sigma * tau * a_norm * a_norm;
        let alpha_f = tau * l_f / 2.0;
        let alpha_g = sigma * l_gstar / 2.0;
        if gamma >= 1.0 {
            return Err(Error::InvalidSteps(format!("gamma = {gamma} must be < 1")));
        }
        if alpha_f >= 1.0 {
            return Err(Error::InvalidSteps(format!("alpha_f = {alpha_f} must be < 1")));
        }
        if alpha_g >= 1.0 {
            return Err(Error::InvalidSteps(format!("alpha_g = {alpha_g} must be < 1")));
        }
        Ok(StepSizes { tau, sigma, gamma, alpha_f, alpha_g })
    }

    pub fn for_problem(p: &SaddleProblem, tau: f64, sigma: f64) -> Result<Self> {
        StepSizes::new(tau, sigma, p.a.norm_bound(), p.l_f(), p.l_gstar())
    }

    pub fn v_norm_params(&self) -> VNormParams {
        VNormParams::new(self.tau, self.sigma).expect("validated at construction")
    }
}

/// Step-size selection strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepStrategy {
    /// `tau = sigma = sqrt(0.9) / ||A||`, reduced if a smooth block would
    /// push `alpha_f` or `alpha_g` to one.
    Balanced,
    /// `tau = sqrt(mu_g*/mu_f)/||A||`, `sigma = sqrt(mu_f/mu_g*)/||A||`,
    /// both shrunk by `sqrt(0.999)` to keep `gamma` strictly below one.
    StronglyConvex { mu_f: f64, mu_gstar: f64 },
}

/// Target for the balanced strategy.
const BALANCED_GAMMA: f64 = 0.9;
/// Shrink factor applied to the strongly-convex steps, whose raw product
/// sits exactly on the `gamma = 1` boundary.
const STRONGLY_CONVEX_SHRINK: f64 = 0.999;

pub fn default_steps(
    a_norm: f64,
    l_f: f64,
    l_gstar: f64,
    strategy: StepStrategy,
) -> Result<StepSizes> {
    if !(a_norm > 0.0) {
        return Err(Error::InvalidSteps("operator norm must be positive".into()));
    }
    match strategy {
        StepStrategy::Balanced => {
            let mut tau = BALANCED_GAMMA.sqrt() / a_norm;
            if l_f > 0.0 {
                tau = tau.min(1.9 / l_f);
            }
            let mut sigma = BALANCED_GAMMA / (tau * a_norm * a_norm);
            if l_gstar > 0.0 {
                sigma = sigma.min(1.9 / l_gstar);
            }
            StepSizes::new(tau, sigma, a_norm, l_f, l_gstar)
        }
        StepStrategy::StronglyConvex { mu_f, mu_gstar } => {
            if !(mu_f > 0.0) || !(mu_gstar > 0.0) {
                return Err(Error::InvalidSteps(
                    "strongly-convex strategy needs mu_f > 0 and mu_g* > 0".into(),
                ));
            }
            let s = STRONGLY_CONVEX_SHRINK.sqrt();
            let tau = (mu_gstar / mu_f).sqrt() / a_norm * s;
            let sigma = (mu_f / mu_gstar).sqrt() / a_norm * s;
            StepSizes::new(tau, sigma, a_norm, l_f, l_gstar)
        }
    }
}

/// Convenience wrapper reading the constants off the problem.
pub fn steps_for_problem(p: &SaddleProblem, strategy: StepStrategy) -> Result<StepSizes> {
    default_steps(p.a.norm_bound(), p.l_f(), p.l_gstar(), strategy)
}

// ---------------------------------------------------------------------------
// The operator
// ---------------------------------------------------------------------------

/// Reusable buffers for repeated applications of `T` on one problem.
pub struct PdhgEngine<'a> {
    problem: &'a SaddleProblem,
    steps: StepSizes,
    arg_x: Vec<f64>,
    arg_y: Vec<f64>,
    grad: Vec<f64>,
    coupled: Vec<f64>,
}

impl<'a> PdhgEngine<'a> {
    pub fn new(problem: &'a SaddleProblem, steps: StepSizes) -> Result<Self> {
        problem.validate()?;
        let (n, m) = problem.dims();
        Ok(PdhgEngine {
            problem,
            steps,
            arg_x: vec![0.0; n],
            arg_y: vec![0.0; m],
            grad: vec![0.0; n.max(m)],
            coupled: vec![0.0; n.max(m)],
        })
    }

    pub fn steps(&self) -> StepSizes {
        self.steps
    }

    /// One application of `T`; returns `(z_next, z_bar)`.
    pub fn step(&mut self, z: &PrimalDualPoint) -> Result<(PrimalDualPoint, PrimalDualPoint)> {
        let p = self.problem;
        let (n, m) = p.dims();
        let (tau, sigma) = (self.steps.tau, self.steps.sigma);

        // x_bar = prox_{tau f}(x - tau grad f2(x) - tau A' y)
        p.a.adjoint(&z.y, &mut self.coupled[..n]);
        if let Some(f2) = &p.f2 {
            f2.grad(&z.x, &mut self.grad[..n]);
            for i in 0..n {
                self.arg_x[i] = z.x[i] - tau * (self.grad[i] + self.coupled[i]);
            }
        } else {
            for i in 0..n {
                self.arg_x[i] = z.x[i] - tau * self.coupled[i];
            }
        }
        let x_bar = p.f.prox(&self.arg_x, tau)?;

        // y_bar = prox_{sigma g*}(y - sigma grad g2*(y) + sigma A x_bar)
        p.a.apply(&x_bar, &mut self.coupled[..m]);
        if let Some(g2) = &p.g2star {
            g2.grad(&z.y, &mut self.grad[..m]);
            for i in 0..m {
                self.arg_y[i] = z.y[i] - sigma * (self.grad[i] - self.coupled[i]);
            }
        } else {
            for i in 0..m {
                self.arg_y[i] = z.y[i] + sigma * self.coupled[i];
            }
        }
        let y_bar = p.gstar.prox(&self.arg_y, sigma)?;

        // x+ = x_bar - tau A'(y_bar - y)
        for i in 0..m {
            self.arg_y[i] = y_bar[i] - z.y[i];
        }
        p.a.adjoint(&self.arg_y, &mut self.coupled[..n]);
        let mut x_next = x_bar.clone();
        for i in 0..n {
            x_next[i] -= tau * self.coupled[i];
        }

        let z_bar = PrimalDualPoint::new(x_bar, y_bar.clone());
        let z_next = PrimalDualPoint::new(x_next, y_bar);
        Ok((z_next, z_bar))
    }
}

/// One PDHG step; returns `(z_next, z_bar)`.
pub fn pdhg_step(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    steps: StepSizes,
) -> Result<(PrimalDualPoint, PrimalDualPoint)> {
    PdhgEngine::new(problem, steps)?.step(z)
}

// ---------------------------------------------------------------------------
// Stopping rules, logging, outcomes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopCriterion {
    /// Run until the iteration budget is exhausted.
    MaxItersOnly,
    /// Stop when `||z - T(z)||_V <= tol`.
    KktResidual { tol: f64 },
    /// Stop when the self-centered smoothed gap with `beta = (0, delta)`
    /// drops to `tol`, `delta` being the current dual KKT residual.
    SelfCenteredGap { tol: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct StoppingRule {
    pub max_iters: usize,
    pub criterion: StopCriterion,
    /// Criterion evaluation cadence in iterations.
    pub check_every: usize,
}

impl StoppingRule {
    pub fn max_iters(max_iters: usize) -> Self {
        StoppingRule { max_iters, criterion: StopCriterion::MaxItersOnly, check_every: 1 }
    }

    pub fn kkt(max_iters: usize, tol: f64) -> Self {
        StoppingRule { max_iters, criterion: StopCriterion::KktResidual { tol }, check_every: 1 }
    }

    pub fn self_gap(max_iters: usize, tol: f64) -> Self {
        StoppingRule { max_iters, criterion: StopCriterion::SelfCenteredGap { tol }, check_every: 1 }
    }
}

/// Per-iteration measurement record.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub iter: usize,
    /// `||z_k - z*||_V` when a reference solution was supplied.
    pub dist_v: Option<f64>,
    /// Self-centered smoothed gap sample, when the driver evaluated one.
    pub self_gap: Option<f64>,
    pub kkt_primal: f64,
    pub kkt_dual: f64,
    pub restart: bool,
}

/// Iterate log; iteration indices are strictly increasing.
#[derive(Debug, Clone, Default)]
pub struct IterateLog {
    pub records: Vec<LogRecord>,
}

impl IterateLog {
    fn push(&mut self, rec: LogRecord) {
        if let Some(last) = self.records.last() {
            assert!(rec.iter > last.iter, "log iterations must strictly increase");
        }
        self.records.push(rec);
    }
}

/// What a driver hands back.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub z: PrimalDualPoint,
    /// Number of operator applications performed.
    pub iterations: usize,
    /// Whether the stopping criterion fired within the budget.
    pub converged: bool,
    pub log: IterateLog,
    /// State iterates `z_1, z_2, ...` when `keep_iterates` was requested.
    pub iterates: Vec<PrimalDualPoint>,
}

/// Driver knobs shared by all solve loops.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Reference solution for distance logging.
    pub reference: Option<PrimalDualPoint>,
    /// Log every this many iterations (0 disables per-iteration logging).
    pub log_every: usize,
    /// Retain every state iterate in the outcome.
    pub keep_iterates: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { reference: None, log_every: 0, keep_iterates: false }
    }
}

struct Logger<'a> {
    opts: &'a RunOptions,
    vp: VNormParams,
    log: IterateLog,
    iterates: Vec<PrimalDualPoint>,
}

impl<'a> Logger<'a> {
    fn new(opts: &'a RunOptions, vp: VNormParams) -> Self {
        Logger { opts, vp, log: IterateLog::default(), iterates: Vec::new() }
    }

    fn due(&self, iter: usize) -> bool {
        self.opts.log_every > 0 && iter % self.opts.log_every == 0
    }

    /// Record iterate `z` at iteration `iter`; `engine` is used to measure
    /// the KKT residual fresh.
    fn record(
        &mut self,
        engine: &mut PdhgEngine,
        z: &PrimalDualPoint,
        iter: usize,
        self_gap: Option<f64>,
        restart: bool,
    ) -> Result<()> {
        let (z_next, _) = engine.step(z)?;
        let tau = self.vp.tau();
        let sigma = self.vp.sigma();
        let kkt_primal = (crate::linalg::dist2(&z.x, &z_next.x) / tau).sqrt();
        let kkt_dual = (crate::linalg::dist2(&z.y, &z_next.y) / sigma).sqrt();
        let dist_v = self.opts.reference.as_ref().map(|r| v_dist(z, r, &self.vp));
        self.log.push(LogRecord { iter, dist_v, self_gap, kkt_primal, kkt_dual, restart });
        Ok(())
    }

    fn keep(&mut self, z: &PrimalDualPoint) {
        if self.opts.keep_iterates {
            self.iterates.push(z.clone());
        }
    }
}

fn check_self_gap_supported(problem: &SaddleProblem) -> Result<()> {
    gap::check_available(problem, true)
}

// ---------------------------------------------------------------------------
// Plain PDHG
// ---------------------------------------------------------------------------

pub fn run_pdhg(
    problem: &SaddleProblem,
    z0: &PrimalDualPoint,
    steps: StepSizes,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<SolveOutcome> {
    if let StopCriterion::SelfCenteredGap { .. } = stop.criterion {
        check_self_gap_supported(problem)?;
    }
    let mut engine = PdhgEngine::new(problem, steps)?;
    let vp = steps.v_norm_params();
    let mut logger = Logger::new(opts, vp);
    let mut z = z0.clone();
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=stop.max_iters {
        let (z_next, _) = engine.step(&z)?;
        iterations = k;
        let residual = v_dist(&z, &z_next, &vp);
        let fired = if k % stop.check_every.max(1) == 0 {
            stop_fired(problem, stop, &z, &z_next, residual, &vp)?
        } else {
            false
        };
        z = z_next;
        logger.keep(&z);
        if logger.due(k) {
            logger.record(&mut engine, &z, k, None, false)?;
        }
        if fired {
            converged = true;
            break;
        }
    }
    Ok(SolveOutcome { z, iterations, converged, log: logger.log, iterates: logger.iterates })
}

/// Evaluate the stopping criterion given the step just taken. The step
/// residual `||z - T(z)||_V` certifies the pre-step point.
fn stop_fired(
    problem: &SaddleProblem,
    stop: &StoppingRule,
    z: &PrimalDualPoint,
    z_next: &PrimalDualPoint,
    residual: f64,
    vp: &VNormParams,
) -> Result<bool> {
    match stop.criterion {
        StopCriterion::MaxItersOnly => Ok(false),
        StopCriterion::KktResidual { tol } => Ok(residual <= tol),
        StopCriterion::SelfCenteredGap { tol } => {
            if residual == 0.0 {
                return Ok(true);
            }
            let delta = (crate::linalg::dist2(&z.y, &z_next.y) / vp.sigma()).sqrt();
            let beta = SmoothParams::new(0.0, delta)?;
            let report = gap::self_centered_gap(problem, z_next, &beta, vp)?;
            Ok(report.value <= tol)
        }
    }
}

// ---------------------------------------------------------------------------
// Averaged PDHG
// ---------------------------------------------------------------------------

/// Run `k` steps from `z0` and return the mean of the shadow iterates.
pub fn run_apdhg(
    problem: &SaddleProblem,
    z0: &PrimalDualPoint,
    steps: StepSizes,
    k: usize,
) -> Result<PrimalDualPoint> {
    if k == 0 {
        return Err(Error::invalid("averaging window must be at least 1"));
    }
    let mut engine = PdhgEngine::new(problem, steps)?;
    let (n, m) = problem.dims();
    let mut z = z0.clone();
    let mut sum = PrimalDualPoint::zeros(n, m);
    for _ in 0..k {
        let (z_next, z_bar) = engine.step(&z)?;
        for i in 0..n {
            sum.x[i] += z_bar.x[i];
        }
        for i in 0..m {
            sum.y[i] += z_bar.y[i];
        }
        z = z_next;
    }
    let kf = k as f64;
    Ok(PrimalDualPoint::new(
        sum.x.iter().map(|v| v / kf).collect(),
        sum.y.iter().map(|v| v / kf).collect(),
    ))
}

// ---------------------------------------------------------------------------
// Restarted averaged PDHG
// ---------------------------------------------------------------------------

/// `z_{s+1} = APDHG(z_s, k)` for `epochs` epochs. One log record per epoch.
/// `stop.max_iters` caps the *total* inner iteration count; a KKT criterion
/// is checked on the epoch points.
pub fn run_rapdhg(
    problem: &SaddleProblem,
    z0: &PrimalDualPoint,
    steps: StepSizes,
    k: usize,
    epochs: usize,
    stop: &StoppingRule,
    opts: &RunOptions,
) -> Result<SolveOutcome> {
    if k == 0 {
        return Err(Error::invalid("restart period must be at least 1"));
    }
    let mut engine = PdhgEngine::new(problem, steps)?;
    let vp = steps.v_norm_params();
    let mut logger = Logger::new(opts, vp);
    let mut z = z0.clone();
    let mut converged = false;
    let mut total = 0usize;

    for _ in 0..epochs {
        if total + k > stop.max_iters {
            break;
        }
        z = run_apdhg(problem, &z, steps, k)?;
        total += k;
        logger.keep(&z);
        if opts.log_every > 0 {
            logger.record(&mut engine, &z, total, None, true)?;
        }
        if let StopCriterion::KktResidual { tol } = stop.criterion {
            let (z_next, _) = engine.step(&z)?;
            if v_dist(&z, &z_next, &vp) <= tol {
                converged = true;
                break;
            }
        }
    }
    Ok(SolveOutcome { z, iterations: total, converged, log: logger.log, iterates: logger.iterates })
}

// ---------------------------------------------------------------------------
// Adaptive restart
// ---------------------------------------------------------------------------

/// How the candidate smoothing parameter evolves at a restart check.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BetaRule {
    /// `beta' = min(1/(k-s+1), 2 beta_s)`: the stored weight may double.
    #[default]
    Double,
    /// `beta' = min(1/(k-s+1), beta_s/2)`: the stored weight only shrinks.
    Halve,
}

#[derive(Debug, Clone)]
pub struct AdaptiveOptions {
    pub beta_rule: BetaRule,
    /// Evaluate the two candidate gaps every this many iterations.
    pub gap_check_every: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions { beta_rule: BetaRule::Double, gap_check_every: 1 }
    }
}

/// Restart bookkeeping: the state iterate, the latest shadow iterate, the
/// running average since the last restart, and the restart reference gap.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub z: PrimalDualPoint,
    pub z_bar: PrimalDualPoint,
    sum_bar: PrimalDualPoint,
    /// Shadow iterates accumulated since the last restart (`k - s + 1` in
    /// terms of iteration indices).
    pub count_since_restart: usize,
    pub k_global: usize,
    pub beta_s: f64,
    pub gap_at_restart: f64,
}

impl SolverState {
    fn new(z0: PrimalDualPoint, beta0: f64, gap0: f64) -> Self {
        let (n, m) = z0.dims();
        SolverState {
            z_bar: z0.clone(),
            z: z0,
            sum_bar: PrimalDualPoint::zeros(n, m),
            count_since_restart: 0,
            k_global: 0,
            beta_s: beta0,
            gap_at_restart: gap0,
        }
    }

    fn absorb(&mut self, z_next: PrimalDualPoint, z_bar: PrimalDualPoint) {
        for i in 0..self.sum_bar.x.len() {
            self.sum_bar.x[i] += z_bar.x[i];
        }
        for i in 0..self.sum_bar.y.len() {
            self.sum_bar.y[i] += z_bar.y[i];
        }
        self.count_since_restart += 1;
        self.k_global += 1;
        self.z = z_next;
        self.z_bar = z_bar;
    }

    /// Arithmetic mean of the shadow iterates since the last restart.
    pub fn z_tilde(&self) -> PrimalDualPoint {
        let c = self.count_since_restart.max(1) as f64;
        PrimalDualPoint::new(
            self.sum_bar.x.iter().map(|v| v / c).collect(),
            self.sum_bar.y.iter().map(|v| v / c).collect(),
        )
    }

    fn reset_average(&mut self) {
        self.sum_bar.x.fill(0.0);
        self.sum_bar.y.fill(0.0);
        self.count_since_restart = 0;
    }
}

/// Adaptive restart: track the self-centered smoothed gap of both the running
/// average and the latest shadow iterate; restart - adopting the better of
/// the two candidates - when the gap has halved since the last restart, or
/// grown a hundredfold.
pub fn run_adaptive(
    problem: &SaddleProblem,
    z0: &PrimalDualPoint,
    steps: StepSizes,
    beta0: f64,
    stop: &StoppingRule,
    opts: &RunOptions,
    adapt: &AdaptiveOptions,
) -> Result<SolveOutcome> {
    if !(beta0 > 0.0) {
        return Err(Error::invalid("beta0 must be positive"));
    }
    check_self_gap_supported(problem)?;

    let mut engine = PdhgEngine::new(problem, steps)?;
    let vp = steps.v_norm_params();
    let mut logger = Logger::new(opts, vp);

    let gap0 = gap::self_centered_gap(problem, z0, &SmoothParams::scalar(beta0)?, &vp)?.value;
    let mut state = SolverState::new(z0.clone(), beta0, gap0);
    let mut converged = false;

    for k in 1..=stop.max_iters {
        let (z_next, z_bar) = engine.step(&state.z)?;
        let residual = v_dist(&state.z, &z_next, &vp);
        let dual_res = (crate::linalg::dist2(&state.z.y, &z_next.y) / vp.sigma()).sqrt();
        state.absorb(z_next, z_bar);

        let mut fired = false;
        if k % stop.check_every.max(1) == 0 {
            fired = match stop.criterion {
                StopCriterion::MaxItersOnly => false,
                StopCriterion::KktResidual { tol } => residual <= tol,
                StopCriterion::SelfCenteredGap { tol } => {
                    if residual == 0.0 {
                        true
                    } else {
                        let beta = SmoothParams::new(0.0, dual_res)?;
                        gap::self_centered_gap(problem, &state.z, &beta, &vp)?.value <= tol
                    }
                }
            };
        }

        let mut restarted = false;
        let mut gap_sample = None;
        // A restart is never triggered on the first iteration after a restart.
        if !fired
            && state.count_since_restart >= 2
            && state.count_since_restart % adapt.gap_check_every.max(1) == 0
        {
            let beta_prime = match adapt.beta_rule {
                BetaRule::Double => (1.0 / state.count_since_restart as f64).min(2.0 * state.beta_s),
                BetaRule::Halve => (1.0 / state.count_since_restart as f64).min(state.beta_s / 2.0),
            };
            let bp = SmoothParams::scalar(beta_prime)?;
            let z_tilde = state.z_tilde();
            let gap_tilde = gap::self_centered_gap(problem, &z_tilde, &bp, &vp)?.value;
            let gap_bar = gap::self_centered_gap(problem, &state.z_bar, &bp, &vp)?.value;
            let gap_curr = gap_tilde.min(gap_bar);
            gap_sample = Some(gap_curr);
            if gap_curr <= 0.5 * state.gap_at_restart || state.gap_at_restart <= 0.01 * gap_curr {
                if gap_tilde <= gap_bar {
                    state.z = z_tilde;
                    state.gap_at_restart = gap_tilde;
                } else {
                    // keep the current iterate; its reference gap is evaluated
                    // fresh at the stored beta
                    state.gap_at_restart =
                        gap::self_centered_gap(problem, &state.z, &bp, &vp)?.value;
                }
                state.beta_s = beta_prime;
                state.reset_average();
                restarted = true;
            }
        }

        logger.keep(&state.z);
        if logger.due(k) || (restarted && opts.log_every > 0) {
            logger.record(&mut engine, &state.z, k, gap_sample, restarted)?;
        }
        if fired {
            converged = true;
            return Ok(SolveOutcome {
                z: state.z,
                iterations: k,
                converged,
                log: logger.log,
                iterates: logger.iterates,
            });
        }
    }
    let iterations = state.k_global;
    Ok(SolveOutcome {
        z: state.z,
        iterations,
        converged,
        log: logger.log,
        iterates: logger.iterates,
    })
}
