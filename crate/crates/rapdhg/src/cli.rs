//! Batch front end: experiment configs in, convergence logs and rate tables
//! out.
//!
//! One JSON config file describes one experiment (problem, solver variant,
//! step strategy, stopping rule, output). Identical config and seed produce
//! byte-identical output files. Plots are not rendered here; the CSV/JSON
//! files are the contract and any external plotter can consume them.

use crate::error::{Error, Result};
use crate::gap::SmoothParams;
use crate::linalg::{v_dist, PrimalDualPoint};
use crate::oracles::{
    self, estimate_msr, estimate_qeb, reference_solve, toy_exact_rate, ToyProblem,
};
use crate::problems::{self, fixtures, SaddleProblem};
use crate::rates::{
    self, a2_const, averaging_lambda, default_c_grid, rate_msr, rate_qebsm, rate_slowfast,
    rate_strconv_affine, restart_period, SlowFastInputs,
};
use crate::solver::{
    run_adaptive, run_apdhg, run_pdhg, run_rapdhg, AdaptiveOptions, BetaRule, IterateLog,
    RunOptions, SolveOutcome, StepSizes, StepStrategy, StopCriterion, StoppingRule,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

// ---------------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub steps: StepsSpec,
    #[serde(default)]
    pub stop: StopSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_log_every")]
    pub log_every: usize,
    #[serde(default)]
    pub reference: ReferenceSpec,
    #[serde(default)]
    pub qeb: QebSpec,
    #[serde(default)]
    pub rates: RatesSpec,
}

fn default_log_every() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Lp { path: String },
    Toy { mu: f64, a: f64, b: f64 },
    RidgeSynthetic { rows: usize, cols: usize, c_reg: f64, scale: f64 },
    Svm { path: String, #[serde(default = "default_true")] normalize: bool },
    Tvl1 { path: String, lambda: f64 },
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub variant: Variant,
    /// Restart period (rapdhg) or averaging window (apdhg).
    pub k: Option<usize>,
    pub epochs: Option<usize>,
    /// Initial smoothing weight (adaptive).
    pub beta0: Option<f64>,
    #[serde(default)]
    pub beta_rule: BetaRuleSpec,
    /// Restart-check cadence in iterations (adaptive; 1 checks every
    /// iteration).
    #[serde(default = "default_log_every")]
    pub gap_check_every: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            variant: Variant::default(),
            k: None,
            epochs: None,
            beta0: None,
            beta_rule: BetaRuleSpec::default(),
            gap_check_every: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Pdhg,
    Apdhg,
    Rapdhg,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BetaRuleSpec {
    #[default]
    Double,
    Halve,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepsSpec {
    Balanced,
    StronglyConvex,
    Fixed { tau: f64, sigma: f64 },
}

impl Default for StepsSpec {
    fn default() -> Self {
        StepsSpec::Balanced
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopSpec {
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub criterion: CriterionSpec,
}

fn default_max_iters() -> usize {
    100_000
}

fn default_tol() -> f64 {
    1e-9
}

impl Default for StopSpec {
    fn default() -> Self {
        StopSpec { max_iters: default_max_iters(), tol: default_tol(), criterion: CriterionSpec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CriterionSpec {
    #[default]
    SelfGap,
    Kkt,
    None,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_ref_tol")]
    pub tol: f64,
}

fn default_ref_tol() -> f64 {
    oracles::REFERENCE_TOL
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        ReferenceSpec { enabled: false, tol: default_ref_tol() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QebSpec {
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_qeb_iters")]
    pub iters: usize,
    /// Restrict the estimator to iterates within this V-distance of the
    /// reference solution (the error bound is a regional property).
    pub region_radius: Option<f64>,
}

fn default_betas() -> Vec<f64> {
    vec![1.0, 0.1, 0.01, 0.001]
}

fn default_qeb_iters() -> usize {
    30_000
}

impl Default for QebSpec {
    fn default() -> Self {
        QebSpec { betas: default_betas(), iters: default_qeb_iters(), region_radius: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSpec {
    #[serde(default = "default_mu_grid")]
    pub mu_grid: Vec<f64>,
    #[serde(default = "default_toy_a")]
    pub a: f64,
    #[serde(default = "default_one")]
    pub tau: f64,
    #[serde(default = "default_one")]
    pub sigma: f64,
}

fn default_mu_grid() -> Vec<f64> {
    vec![0.0, 0.01, 0.1, 1.0]
}

fn default_toy_a() -> f64 {
    0.03
}

fn default_one() -> f64 {
    1.0
}

impl Default for RatesSpec {
    fn default() -> Self {
        RatesSpec {
            mu_grid: default_mu_grid(),
            a: default_toy_a(),
            tau: 1.0,
            sigma: 1.0,
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if let Some(s) = overrides.seed {
        cfg.seed = s;
    }
    if let Some(m) = overrides.max_iters {
        cfg.stop.max_iters = m;
    }
    if let Some(t) = overrides.tol {
        cfg.stop.tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        match self.solver.variant {
            Variant::Rapdhg if self.solver.k.is_none() => {
                Err(Error::Config("rapdhg requires solver.k".into()))
            }
            Variant::Apdhg if self.solver.k.is_none() => {
                Err(Error::Config("apdhg requires solver.k".into()))
            }
            Variant::Adaptive if self.solver.beta0.is_none() => {
                Err(Error::Config("adaptive requires solver.beta0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Build the problem, resolving data paths relative to `base_dir`.
    pub fn build_problem(&self, base_dir: &Path) -> Result<SaddleProblem> {
        match &self.problem {
            ProblemSpec::Lp { path } => {
                let lp = problems::read_lp_json(&base_dir.join(path))?;
                problems::build_lp(&lp)
            }
            ProblemSpec::Toy { mu, a, b } => {
                let (tau, sigma) = match self.steps {
                    StepsSpec::Fixed { tau, sigma } => (tau, sigma),
                    _ => (1.0, 1.0),
                };
                Ok(ToyProblem::new(*mu, *a, *b, tau, sigma)?.build_prox_form())
            }
            ProblemSpec::RidgeSynthetic { rows, cols, c_reg, scale } => {
                Ok(fixtures::synthetic_ridge(*rows, *cols, *c_reg, *scale, self.seed))
            }
            ProblemSpec::Svm { path, normalize } => {
                let (x, labels) = problems::read_libsvm(&base_dir.join(path))?;
                problems::build_svm(x, &labels, *normalize)
            }
            ProblemSpec::Tvl1 { path, lambda } => {
                let img = problems::read_pgm(&base_dir.join(path))?;
                problems::build_tvl1(&img, *lambda)
            }
        }
    }

    pub fn build_steps(&self, problem: &SaddleProblem) -> Result<StepSizes> {
        match self.steps {
            StepsSpec::Balanced => crate::solver::steps_for_problem(problem, StepStrategy::Balanced),
            StepsSpec::StronglyConvex => {
                let mu_f = problem.meta.mu_f.ok_or_else(|| {
                    Error::Config("strongly_convex steps need mu_f metadata".into())
                })?;
                let mu_gstar = problem.meta.mu_gstar.ok_or_else(|| {
                    Error::Config("strongly_convex steps need mu_g* metadata".into())
                })?;
                crate::solver::steps_for_problem(problem, StepStrategy::StronglyConvex { mu_f, mu_gstar })
            }
            StepsSpec::Fixed { tau, sigma } => StepSizes::for_problem(problem, tau, sigma),
        }
    }

    fn stopping_rule(&self) -> StoppingRule {
        let criterion = match self.stop.criterion {
            CriterionSpec::Kkt => StopCriterion::KktResidual { tol: self.stop.tol },
            CriterionSpec::SelfGap => StopCriterion::SelfCenteredGap { tol: self.stop.tol },
            CriterionSpec::None => StopCriterion::MaxItersOnly,
        };
        StoppingRule { max_iters: self.stop.max_iters, criterion, check_every: 1 }
    }
}

// ---------------------------------------------------------------------------
// CSV / number formatting
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal; scientific notation for extreme magnitudes.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a < 1e-4 || a >= 1e16 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn log_to_csv(log: &IterateLog) -> String {
    let mut out = String::from("iter,dist_v,self_gap,kkt_primal,kkt_dual,restart\n");
    for r in &log.records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.iter,
            r.dist_v.map(fmt_f64).unwrap_or_default(),
            r.self_gap.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.kkt_primal),
            fmt_f64(r.kkt_dual),
            r.restart,
        ));
    }
    out
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(path, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn refcache_dir(out: Option<&Path>) -> Option<PathBuf> {
    out.map(|p| p.parent().unwrap_or(Path::new(".")).join("refcache"))
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn resolve_reference(
    cfg: &ExperimentConfig,
    problem: &SaddleProblem,
    steps: StepSizes,
    cache: Option<&Path>,
) -> Result<Option<PrimalDualPoint>> {
    if !cfg.reference.enabled {
        return Ok(None);
    }
    Ok(Some(reference_solve(problem, steps, cfg.reference.tol, cache)?))
}

fn dispatch(
    cfg: &ExperimentConfig,
    problem: &SaddleProblem,
    steps: StepSizes,
    opts: &RunOptions,
) -> Result<SolveOutcome> {
    let stop = cfg.stopping_rule();
    let (n, m) = problem.dims();
    let z0 = PrimalDualPoint::zeros(n, m);
    match cfg.solver.variant {
        Variant::Pdhg => run_pdhg(problem, &z0, steps, &stop, opts),
        Variant::Apdhg => {
            let k = cfg.solver.k.expect("validated");
            let z = run_apdhg(problem, &z0, steps, k)?;
            let mut log = IterateLog::default();
            let (pr, dr) = crate::gap::kkt_residual(problem, &z, steps)?;
            log.records.push(crate::solver::LogRecord {
                iter: k,
                dist_v: opts.reference.as_ref().map(|r| v_dist(&z, r, &steps.v_norm_params())),
                self_gap: None,
                kkt_primal: pr,
                kkt_dual: dr,
                restart: false,
            });
            Ok(SolveOutcome { z, iterations: k, converged: false, log, iterates: Vec::new() })
        }
        Variant::Rapdhg => {
            let k = cfg.solver.k.expect("validated");
            let epochs = cfg.solver.epochs.unwrap_or(cfg.stop.max_iters / k.max(1));
            run_rapdhg(problem, &z0, steps, k, epochs, &stop, opts)
        }
        Variant::Adaptive => {
            let beta0 = cfg.solver.beta0.expect("validated");
            let adapt = AdaptiveOptions {
                beta_rule: match cfg.solver.beta_rule {
                    BetaRuleSpec::Double => BetaRule::Double,
                    BetaRuleSpec::Halve => BetaRule::Halve,
                },
                gap_check_every: cfg.solver.gap_check_every,
            };
            run_adaptive(problem, &z0, steps, beta0, &stop, opts, &adapt)
        }
    }
}

/// Run the configured solve and write the CSV log. Exit status: 0 on
/// convergence, 2 on budget exhaustion.
pub fn cmd_solve(config_path: &Path, out: Option<&Path>, overrides: &Overrides) -> Result<i32> {
    let cfg = load_config(config_path, overrides)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let problem = cfg.build_problem(base)?;
    let steps = cfg.build_steps(&problem)?;
    let cache = refcache_dir(out);
    let reference = resolve_reference(&cfg, &problem, steps, cache.as_deref())?;
    let opts = RunOptions { reference, log_every: cfg.log_every, keep_iterates: false };
    let outcome = dispatch(&cfg, &problem, steps, &opts)?;
    write_output(out, &log_to_csv(&outcome.log))?;
    Ok(if outcome.converged { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// rates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub mu: f64,
    /// Exact asymptotic contraction of the iterates (distance per step).
    pub true_rate: f64,
    /// Certificates: contraction factors on the squared V-distance;
    /// `null` marks an assumption that does not apply at this `mu`.
    pub msr: Option<f64>,
    pub strconv_affine: Option<f64>,
    pub qebsm: Option<f64>,
    pub qebsm_beta: Option<(f64, f64)>,
    pub slowfast: Option<f64>,
    pub slowfast_c: Option<f64>,
}

/// Cap applied to the primal error-bound component before the slow-fast
/// analysis (a quadratic error bound may always be weakened; the analysis
/// needs the constant strictly below one).
const SLOWFAST_ETA_X_CAP: f64 = 0.95;

/// Certificate table for the 1-D constrained quadratic over a grid of
/// curvatures: the data behind the rate-comparison figures.
pub fn toy_rate_table(a: f64, tau: f64, sigma: f64, mu_grid: &[f64]) -> Result<Vec<RateRow>> {
    let beta_grid: Vec<f64> = geometric_grid(1e-4, 1e4, 81);
    let mut rows = Vec::with_capacity(mu_grid.len());
    for &mu in mu_grid {
        let toy = ToyProblem::new(mu, a, 0.0, tau, sigma)?;
        let gamma = sigma * tau * a * a;
        let alpha_f = tau * mu / 2.0;
        let true_rate = toy_exact_rate(&toy);

        // gradient-form constants
        let lambda = averaging_lambda(gamma, alpha_f, 0.0)?;
        let a2 = a2_const(alpha_f, 0.0, gamma)?;
        let msr = rate_msr(rates::toy_msr_eta(mu, a, tau, sigma), lambda, alpha_f, 0.0).ok();
        let strconv_affine = if mu > 0.0 {
            rate_strconv_affine(mu, mu, a.abs(), tau, sigma, lambda, a2).ok()
        } else {
            None
        };

        let mut qebsm: Option<(f64, (f64, f64))> = None;
        for &bx in &beta_grid {
            for &by in &beta_grid {
                let eta = rates::toy_qeb_eta(mu, a, tau, sigma, bx, by);
                if let Ok(f) = rate_qebsm(eta, lambda, a2, bx, by) {
                    if qebsm.map_or(true, |(best, _)| f < best) {
                        qebsm = Some((f, (bx, by)));
                    }
                }
            }
        }

        // slow-fast treats the quadratic as a proximal block
        let lambda_prox = averaging_lambda(gamma, 0.0, 0.0)?;
        let mut slowfast: Option<(f64, f64)> = None;
        for &by in &beta_grid {
            let eta_x = (mu * tau + sigma * tau * a * a / by).min(SLOWFAST_ETA_X_CAP);
            let inv_bx_base = 1.0 / by + eta_x.sqrt() - eta_x;
            for mult in [1.0, 2.0, 10.0, 100.0] {
                let beta_x = 1.0 / (inv_bx_base * mult);
                let eta_y = sigma * tau * a * a / (beta_x + mu * tau);
                let inputs = SlowFastInputs {
                    mu_f: mu,
                    eta_x,
                    eta_y,
                    beta_x,
                    beta_y: by,
                    gamma,
                    tau,
                    sigma,
                    lambda: lambda_prox,
                    c_grid: default_c_grid(eta_x),
                };
                if let Ok(report) = rate_slowfast(&inputs) {
                    if slowfast.map_or(true, |(best, _)| report.best_rho < best) {
                        slowfast = Some((report.best_rho, report.best_c));
                    }
                }
            }
        }

        rows.push(RateRow {
            mu,
            true_rate,
            msr,
            strconv_affine,
            qebsm: qebsm.map(|(f, _)| f),
            qebsm_beta: qebsm.map(|(_, b)| b),
            slowfast: slowfast.map(|(f, _)| f),
            slowfast_c: slowfast.map(|(_, c)| c),
        });
    }
    Ok(rows)
}

pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64))
        .collect()
}

/// Emit the per-curvature rate table as JSON.
pub fn cmd_rates(config_path: &Path, out: Option<&Path>, overrides: &Overrides) -> Result<i32> {
    let cfg = load_config(config_path, overrides)?;
    let r = &cfg.rates;
    let rows = toy_rate_table(r.a, r.tau, r.sigma, &r.mu_grid)?;
    let mut text = serde_json::to_string_pretty(&rows)?;
    text.push('\n');
    write_output(out, &text)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// estimate-qeb
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct QebRow {
    pub beta: f64,
    pub eta_hat: f64,
    /// Restart period implied by this row.
    pub restart_k: usize,
    /// Per-inner-iteration rate implied by the restart period.
    pub epoch_rate: f64,
}

/// Error-bound estimates over a PDHG trajectory, one row per requested
/// smoothing weight, plus the subregularity estimate.
#[derive(Debug, Clone, Serialize)]
pub struct QebTable {
    pub rows: Vec<QebRow>,
    pub eta_msr_hat: f64,
}

pub fn estimate_qeb_table(
    problem: &SaddleProblem,
    steps: StepSizes,
    z_star: &PrimalDualPoint,
    betas: &[f64],
    iters: usize,
    region_radius: Option<f64>,
) -> Result<QebTable> {
    let vp = steps.v_norm_params();
    let (n, m) = problem.dims();
    let out = run_pdhg(
        problem,
        &PrimalDualPoint::zeros(n, m),
        steps,
        &StoppingRule::max_iters(iters),
        &RunOptions { keep_iterates: true, ..Default::default() },
    )?;
    let admissible: Vec<PrimalDualPoint> = match region_radius {
        Some(r) => out
            .iterates
            .iter()
            .filter(|z| v_dist(z, z_star, &vp) <= r)
            .cloned()
            .collect(),
        None => out.iterates.clone(),
    };
    if admissible.is_empty() {
        return Err(Error::invalid("no iterates inside the estimation region"));
    }
    let a2 = a2_const(steps.alpha_f, steps.alpha_g, steps.gamma)?;
    let mut rows = Vec::with_capacity(betas.len());
    for &beta in betas {
        let eta_hat = estimate_qeb(&admissible, z_star, &SmoothParams::scalar(beta)?, problem, &vp)?;
        let (restart_k, epoch_rate) = restart_period(beta, eta_hat, a2)?;
        rows.push(QebRow { beta, eta_hat, restart_k, epoch_rate });
    }
    let eta_msr_hat = estimate_msr(&admissible, z_star, problem, steps)?;
    Ok(QebTable { rows, eta_msr_hat })
}

/// Estimate the error-bound constants of the configured problem and emit the
/// table as JSON. Exit status 2 when the reference solve does not converge.
pub fn cmd_estimate_qeb(config_path: &Path, out: Option<&Path>, overrides: &Overrides) -> Result<i32> {
    let cfg = load_config(config_path, overrides)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let problem = cfg.build_problem(base)?;
    let steps = cfg.build_steps(&problem)?;
    let cache = refcache_dir(out);
    let z_star = match reference_solve(&problem, steps, cfg.reference.tol, cache.as_deref()) {
        Ok(z) => z,
        Err(Error::NotConverged { .. }) => return Ok(2),
        Err(e) => return Err(e),
    };
    let table = estimate_qeb_table(
        &problem,
        steps,
        &z_star,
        &cfg.qeb.betas,
        cfg.qeb.iters,
        cfg.qeb.region_radius,
    )?;
    let mut text = serde_json::to_string_pretty(&table)?;
    text.push('\n');
    write_output(out, &text)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

/// Compare the solver variants on one problem; one CSV row per variant.
pub fn cmd_bench(config_path: &Path, out: Option<&Path>, overrides: &Overrides) -> Result<i32> {
    let cfg = load_config(config_path, overrides)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let problem = cfg.build_problem(base)?;
    let steps = cfg.build_steps(&problem)?;
    let stop = StoppingRule {
        max_iters: cfg.stop.max_iters,
        criterion: StopCriterion::KktResidual { tol: cfg.stop.tol },
        check_every: 1,
    };
    let (n, m) = problem.dims();
    let z0 = PrimalDualPoint::zeros(n, m);
    let opts = RunOptions::default();

    let mut csv = String::from("variant,iterations,converged,kkt_residual\n");
    let mut push_row = |name: &str, outcome: &SolveOutcome| -> Result<()> {
        let (pr, dr) = crate::gap::kkt_residual(&problem, &outcome.z, steps)?;
        let res = (pr * pr + dr * dr).sqrt();
        csv.push_str(&format!(
            "{name},{},{},{}\n",
            outcome.iterations,
            outcome.converged,
            fmt_f64(res)
        ));
        Ok(())
    };

    let pdhg = run_pdhg(&problem, &z0, steps, &stop, &opts)?;
    push_row("pdhg", &pdhg)?;
    if let Some(k) = cfg.solver.k {
        let epochs = cfg.solver.epochs.unwrap_or(cfg.stop.max_iters / k.max(1));
        let rapdhg = run_rapdhg(&problem, &z0, steps, k, epochs, &stop, &opts)?;
        push_row("rapdhg", &rapdhg)?;
    }
    if crate::gap::check_available(&problem, false).is_ok() {
        let adaptive = run_adaptive(
            &problem,
            &z0,
            steps,
            cfg.solver.beta0.unwrap_or(1.0),
            &stop,
            &opts,
            &AdaptiveOptions::default(),
        )?;
        push_row("adaptive", &adaptive)?;
    }
    write_output(out, &csv)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// Argument parsing and entry point
// ---------------------------------------------------------------------------

const USAGE: &str = "usage: rapdhg <solve|rates|estimate-qeb|bench> --config PATH \
[--out PATH] [--seed N] [--max-iters N] [--tol X]";

/// Parse arguments and run; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    match run_inner(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run_inner(args: &[String]) -> Result<i32> {
    let cmd = args.first().ok_or_else(|| Error::Config(USAGE.into()))?;
    let mut config: Option<PathBuf> = None;
    let mut out: Option<PathBuf> = None;
    let mut overrides = Overrides::default();
    let mut i = 1;
    while i < args.len() {
        let flag = &args[i];
        let value = args
            .get(i + 1)
            .ok_or_else(|| Error::Config(format!("flag {flag} needs a value")))?;
        match flag.as_str() {
            "--config" => config = Some(PathBuf::from(value)),
            "--out" => out = Some(PathBuf::from(value)),
            "--seed" => {
                overrides.seed =
                    Some(value.parse().map_err(|_| Error::Config("bad --seed".into()))?)
            }
            "--max-iters" => {
                overrides.max_iters =
                    Some(value.parse().map_err(|_| Error::Config("bad --max-iters".into()))?)
            }
            "--tol" => {
                overrides.tol = Some(value.parse().map_err(|_| Error::Config("bad --tol".into()))?)
            }
            other => return Err(Error::Config(format!("unknown flag {other}\n{USAGE}"))),
        }
        i += 2;
    }
    let config = config.ok_or_else(|| Error::Config(format!("--config is required\n{USAGE}")))?;
    match cmd.as_str() {
        "solve" => cmd_solve(&config, out.as_deref(), &overrides),
        "rates" => cmd_rates(&config, out.as_deref(), &overrides),
        "estimate-qeb" => cmd_estimate_qeb(&config, out.as_deref(), &overrides),
        "bench" => cmd_bench(&config, out.as_deref(), &overrides),
        other => Err(Error::Config(format!("unknown command {other}\n{USAGE}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_requires_variant_fields() {
        let text = r#"{"problem": {"kind": "toy", "mu": 0.0, "a": 0.03, "b": 0.0},
                       "solver": {"variant": "rapdhg"}}"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert!(cfg.validate().is_err());
        let text = r#"{"problem": {"kind": "toy", "mu": 0.0, "a": 0.03, "b": 0.0},
                       "solver": {"variant": "adaptive", "beta0": 1.0}}"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn unknown_variant_is_rejected() {
        let text = r#"{"problem": {"kind": "toy", "mu": 0.0, "a": 0.03, "b": 0.0},
                       "solver": {"variant": "turbo"}}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }

    #[test]
    fn fmt_f64_is_round_trippable() {
        for &v in &[0.0, 1.5, -2.25e-7, 3.3e17, 0.99954990, 1e-300] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn rate_table_orders_certificates() {
        let rows = toy_rate_table(0.03, 1.0, 1.0, &[0.0]).unwrap();
        let row = &rows[0];
        assert!(row.strconv_affine.is_none());
        let q = row.qebsm.unwrap();
        assert!(q < 1.0);
        assert!(q >= row.true_rate * row.true_rate - 1e-9);
    }
}
