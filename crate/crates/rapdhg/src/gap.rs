//! Optimality measures.
//!
//! The smoothed gap tethers the two inner suprema of the duality gap to a
//! center with quadratic penalties weighted by `beta = (beta_x, beta_y)`:
//!
//! ```text
//! G_beta(z; zc) = sup_{x', y'} L(x, y') - L(x', y)
//!                 - beta_x/(2 tau) ||x' - xc||^2 - beta_y/(2 sigma) ||y' - yc||^2
//! ```
//!
//! A zero component leaves the corresponding supremum unsmoothed (evaluated
//! through the convex conjugate, possibly `+inf`); an infinite component
//! freezes the block at the center. The self-centered variant `G_beta(z; z)`
//! is a computable optimality measure: nonnegative everywhere and zero
//! exactly on the saddle set.

use crate::error::{Error, Result};
use crate::linalg::{dist2, dot, v_dist, PrimalDualPoint, VNormParams};
use crate::problems::SaddleProblem;
use crate::solver::{pdhg_step, StepSizes};

/// Smoothing weights, each in `[0, +inf]`. `f64::INFINITY` is the
/// distinguished unsmoothed-at-center value; arithmetic never forms `0 * inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothParams {
    beta_x: f64,
    beta_y: f64,
}

impl SmoothParams {
    pub fn new(beta_x: f64, beta_y: f64) -> Result<Self> {
        for b in [beta_x, beta_y] {
            if b.is_nan() || b < 0.0 {
                return Err(Error::invalid(format!("smoothing weight {b} not in [0, +inf]")));
            }
        }
        Ok(SmoothParams { beta_x, beta_y })
    }

    /// Equal weights on both blocks.
    pub fn scalar(beta: f64) -> Result<Self> {
        SmoothParams::new(beta, beta)
    }

    pub fn beta_x(&self) -> f64 {
        self.beta_x
    }

    pub fn beta_y(&self) -> f64 {
        self.beta_y
    }
}

/// Value of a gap evaluation together with the inner maximizers, when the
/// smoothed inner problems produce them.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub value: f64,
    pub maximizer_primal: Option<Vec<f64>>,
    pub maximizer_dual: Option<Vec<f64>>,
}

/// Extended-real sum; `+inf + (-inf)` is indeterminate and rejected.
fn ext_add(a: f64, b: f64) -> Result<f64> {
    if (a == f64::INFINITY && b == f64::NEG_INFINITY)
        || (a == f64::NEG_INFINITY && b == f64::INFINITY)
    {
        return Err(Error::invalid("indeterminate inf - inf in gap evaluation"));
    }
    Ok(a + b)
}

/// The gap evaluator requires both smooth blocks to be absent; with
/// `needs_conjugates`, the unsmoothed (`beta = 0`) route must be available
/// too.
pub fn check_available(problem: &SaddleProblem, needs_conjugates: bool) -> Result<()> {
    if problem.f2.is_some() || problem.g2star.is_some() {
        return Err(Error::unavailable(
            "smoothed gap",
            "problem has smooth blocks f2/g2*; fold them into the prox blocks first",
        ));
    }
    if needs_conjugates {
        let (n, m) = problem.dims();
        if problem.f.conjugate_eval(&vec![0.0; n]).is_none() {
            return Err(Error::unavailable(
                "smoothed gap",
                "closed-form conjugate of f missing from the catalog",
            ));
        }
        if problem.gstar.conjugate_eval(&vec![0.0; m]).is_none() {
            return Err(Error::unavailable(
                "smoothed gap",
                "closed-form conjugate of g* missing from the catalog",
            ));
        }
    }
    Ok(())
}

/// `G_beta(z; center)`.
pub fn smoothed_gap(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    center: &PrimalDualPoint,
    beta: &SmoothParams,
    steps: &VNormParams,
) -> Result<GapReport> {
    check_available(problem, beta.beta_x == 0.0 || beta.beta_y == 0.0)?;
    let (tau, sigma) = (steps.tau(), steps.sigma());
    let ax = problem.a.apply_vec(&z.x);
    let aty = problem.a.adjoint_vec(&z.y);

    let f_at_z = problem.f.eval(&z.x)?;
    let g_at_z = problem.gstar.eval(&z.y)?;

    // sup_{y'} <Ax, y'> - g*(y') - beta_y/(2 sigma) ||y' - yc||^2
    let (val_y, y_hat) = if beta.beta_y == f64::INFINITY {
        let v = ext_add(dot(&ax, &center.y), -problem.gstar.eval(&center.y)?)?;
        (v, Some(center.y.clone()))
    } else if beta.beta_y == 0.0 {
        let v = problem
            .gstar
            .conjugate_eval(&ax)
            .ok_or_else(|| Error::unavailable("smoothed gap", "conjugate of g* missing"))?;
        (v, None)
    } else {
        let t = sigma / beta.beta_y;
        let arg: Vec<f64> = center.y.iter().zip(&ax).map(|(&yc, &a)| yc + t * a).collect();
        let y_hat = problem.gstar.prox(&arg, t)?;
        let v = dot(&ax, &y_hat)
            - problem.gstar.eval(&y_hat)?
            - beta.beta_y / (2.0 * sigma) * dist2(&y_hat, &center.y);
        (v, Some(y_hat))
    };

    // sup_{x'} -f(x') - <x', A'y> - beta_x/(2 tau) ||x' - xc||^2
    let (val_x, x_hat) = if beta.beta_x == f64::INFINITY {
        let v = ext_add(-problem.f.eval(&center.x)?, -dot(&center.x, &aty))?;
        (v, Some(center.x.clone()))
    } else if beta.beta_x == 0.0 {
        let neg_aty: Vec<f64> = aty.iter().map(|&a| -a).collect();
        let v = problem
            .f
            .conjugate_eval(&neg_aty)
            .ok_or_else(|| Error::unavailable("smoothed gap", "conjugate of f missing"))?;
        (v, None)
    } else {
        let t = tau / beta.beta_x;
        let arg: Vec<f64> = center.x.iter().zip(&aty).map(|(&xc, &a)| xc - t * a).collect();
        let x_hat = problem.f.prox(&arg, t)?;
        let v = -problem.f.eval(&x_hat)?
            - dot(&x_hat, &aty)
            - beta.beta_x / (2.0 * tau) * dist2(&x_hat, &center.x);
        (v, Some(x_hat))
    };

    let value = ext_add(ext_add(f_at_z, val_y)?, ext_add(g_at_z, val_x)?)?;
    Ok(GapReport {
        value,
        maximizer_primal: x_hat,
        maximizer_dual: y_hat,
    })
}

/// `G_beta(z; z)` - the self-centered smoothed gap, a computable optimality
/// measure (nonnegative, zero exactly on the saddle set).
pub fn self_centered_gap(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    beta: &SmoothParams,
    steps: &VNormParams,
) -> Result<GapReport> {
    smoothed_gap(problem, z, z, beta, steps)
}

/// `(primal, dual)` components of `||z - T(z)||_V`; both vanish exactly at
/// saddle points.
pub fn kkt_residual(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    steps: StepSizes,
) -> Result<(f64, f64)> {
    let (z_next, _) = pdhg_step(problem, z, steps)?;
    let primal = (dist2(&z.x, &z_next.x) / steps.tau).sqrt();
    let dual = (dist2(&z.y, &z_next.y) / steps.sigma).sqrt();
    Ok((primal, dual))
}

/// `max_{(x,y) in test_points} L(x_eval, y) - L(x, y_eval)`; `+inf` when the
/// evaluated point is infeasible for an indicator block.
pub fn restricted_gap(
    problem: &SaddleProblem,
    z: &PrimalDualPoint,
    test_points: &[PrimalDualPoint],
) -> Result<f64> {
    if test_points.is_empty() {
        return Err(Error::invalid("restricted gap needs a nonempty test set"));
    }
    let mut best = f64::NEG_INFINITY;
    for p in test_points {
        let upper = problem.lagrangian(&PrimalDualPoint::new(z.x.clone(), p.y.clone()))?;
        let lower = problem.lagrangian(&PrimalDualPoint::new(p.x.clone(), z.y.clone()))?;
        if upper == f64::NEG_INFINITY || lower == f64::INFINITY {
            return Err(Error::invalid(
                "restricted gap test point violates an indicator block",
            ));
        }
        let gap = ext_add(upper, -lower)?;
        best = best.max(gap);
    }
    Ok(best)
}

/// Squared V-distance surrogate used by the regularity-constant estimators:
/// `||z - reference||_V`.
pub fn dist_to_reference(
    z: &PrimalDualPoint,
    reference: &PrimalDualPoint,
    steps: &VNormParams,
) -> f64 {
    v_dist(z, reference, steps)
}
