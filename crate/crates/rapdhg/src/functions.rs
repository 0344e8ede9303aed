//! Catalog of proximable and smooth convex building blocks.
//!
//! Each [`ProxFn`] entry provides an exact closed-form proximal map together
//! with its function value (extended-real: indicators return `+inf` outside
//! their set, with an absolute membership tolerance of
//! [`FEASIBILITY_TOL`] so that floating-point projections self-report
//! feasible), its strong-convexity modulus, and - where it exists in closed
//! form - the value of its convex conjugate. The conjugate is what makes the
//! unsmoothed (`beta = 0`) block of the smoothed gap computable.

use crate::error::{Error, Result};
use crate::linalg::dot;

/// Absolute tolerance for indicator membership tests.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// A convex function with an exact proximal operator.
#[derive(Debug, Clone)]
pub enum ProxFn {
    /// `weight * ||v||_1`
    L1 { weight: f64 },
    /// `weight * ||v - center||_1`
    ShiftedL1 { weight: f64, center: Vec<f64> },
    /// `weight * ||v||^2` (strong convexity `2 * weight`)
    SquaredL2 { weight: f64 },
    /// `quad * ||v||^2 + <linear, v>`
    QuadraticLinear { quad: f64, linear: Vec<f64> },
    /// `<cost, v> + indicator(v_i >= 0 for i in nonneg)`
    LinearNonneg { cost: Vec<f64>, nonneg: Vec<usize> },
    /// `indicator({point})`
    PointIndicator { point: Vec<f64> },
    /// `indicator(lower <= v <= upper)` componentwise
    BoxIndicator { lower: Vec<f64>, upper: Vec<f64> },
    /// Indicator of `||v_g||_2 <= 1` for consecutive groups of `group_size`
    /// components; the convex conjugate of the group norm `||.||_{2,1}`.
    GroupBall { group_size: usize },
    /// `sum_i v_i + indicator(-1 <= v_i <= 0)`, the conjugate of
    /// `sum_i max(0, 1 - u_i)`.
    HingeConjugate,
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    // Ties |v| == t map to zero.
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

impl ProxFn {
    /// Dimension constraint, if the entry pins one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ProxFn::ShiftedL1 { center, .. } => Some(center.len()),
            ProxFn::QuadraticLinear { linear, .. } => Some(linear.len()),
            ProxFn::LinearNonneg { cost, .. } => Some(cost.len()),
            ProxFn::PointIndicator { point } => Some(point.len()),
            ProxFn::BoxIndicator { lower, .. } => Some(lower.len()),
            _ => None,
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if let Some(d) = self.dim() {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        if let ProxFn::GroupBall { group_size } = self {
            if *group_size == 0 || v.len() % group_size != 0 {
                return Err(Error::invalid("vector length not a multiple of group size"));
            }
        }
        Ok(())
    }

    /// Strong-convexity modulus; `+inf` for the indicator of a point.
    pub fn mu(&self) -> f64 {
        match self {
            ProxFn::SquaredL2 { weight } => 2.0 * weight,
            ProxFn::QuadraticLinear { quad, .. } => 2.0 * quad,
            ProxFn::PointIndicator { .. } => f64::INFINITY,
            _ => 0.0,
        }
    }

    /// Function value, `+inf` outside the domain.
    pub fn eval(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        Ok(match self {
            ProxFn::L1 { weight } => weight * v.iter().map(|a| a.abs()).sum::<f64>(),
            ProxFn::ShiftedL1 { weight, center } => {
                weight * v.iter().zip(center).map(|(a, c)| (a - c).abs()).sum::<f64>()
            }
            ProxFn::SquaredL2 { weight } => weight * dot(v, v),
            ProxFn::QuadraticLinear { quad, linear } => quad * dot(v, v) + dot(linear, v),
            ProxFn::LinearNonneg { cost, nonneg } => {
                if nonneg.iter().any(|&i| v[i] < -FEASIBILITY_TOL) {
                    f64::INFINITY
                } else {
                    dot(cost, v)
                }
            }
            ProxFn::PointIndicator { point } => {
                let feasible = v
                    .iter()
                    .zip(point)
                    .all(|(a, p)| (a - p).abs() <= FEASIBILITY_TOL);
                if feasible {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxFn::BoxIndicator { lower, upper } => {
                let feasible = v.iter().enumerate().all(|(i, &a)| {
                    a >= lower[i] - FEASIBILITY_TOL && a <= upper[i] + FEASIBILITY_TOL
                });
                if feasible {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxFn::GroupBall { group_size } => {
                let ok = v.chunks_exact(*group_size).all(|g| {
                    dot(g, g).sqrt() <= 1.0 + FEASIBILITY_TOL
                });
                if ok {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxFn::HingeConjugate => {
                let ok = v
                    .iter()
                    .all(|&a| a >= -1.0 - FEASIBILITY_TOL && a <= FEASIBILITY_TOL);
                if ok {
                    v.iter().sum()
                } else {
                    f64::INFINITY
                }
            }
        })
    }

    /// `argmin_p  self(p) + ||p - v||^2 / (2 t)`, exact for every entry.
    pub fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        if !(t > 0.0) {
            return Err(Error::invalid(format!("prox step must be positive, got {t}")));
        }
        self.check_dim(v)?;
        Ok(match self {
            ProxFn::L1 { weight } => {
                let tw = t * weight;
                v.iter().map(|&a| soft_threshold(a, tw)).collect()
            }
            ProxFn::ShiftedL1 { weight, center } => {
                let tw = t * weight;
                v.iter()
                    .zip(center)
                    .map(|(&a, &c)| c + soft_threshold(a - c, tw))
                    .collect()
            }
            ProxFn::SquaredL2 { weight } => {
                let s = 1.0 / (1.0 + 2.0 * t * weight);
                v.iter().map(|&a| s * a).collect()
            }
            ProxFn::QuadraticLinear { quad, linear } => {
                let s = 1.0 / (1.0 + 2.0 * t * quad);
                v.iter().zip(linear).map(|(&a, &l)| s * (a - t * l)).collect()
            }
            ProxFn::LinearNonneg { cost, nonneg } => {
                let mut p: Vec<f64> = v.iter().zip(cost).map(|(&a, &c)| a - t * c).collect();
                for &i in nonneg {
                    if p[i] < 0.0 {
                        p[i] = 0.0;
                    }
                }
                p
            }
            ProxFn::PointIndicator { point } => point.clone(),
            ProxFn::BoxIndicator { lower, upper } => v
                .iter()
                .enumerate()
                .map(|(i, &a)| a.max(lower[i]).min(upper[i]))
                .collect(),
            ProxFn::GroupBall { group_size } => {
                let mut p = Vec::with_capacity(v.len());
                for g in v.chunks_exact(*group_size) {
                    let n = dot(g, g).sqrt();
                    // The projection at the origin is the origin.
                    let s = if n > 1.0 { 1.0 / n } else { 1.0 };
                    p.extend(g.iter().map(|&a| s * a));
                }
                p
            }
            ProxFn::HingeConjugate => v.iter().map(|&a| (a - t).clamp(-1.0, 0.0)).collect(),
        })
    }

    /// Closed-form value of the convex conjugate `self*(w)`, when available.
    /// `None` means the catalog does not provide it; the unsmoothed gap block
    /// is then reported unavailable rather than approximated.
    pub fn conjugate_eval(&self, w: &[f64]) -> Option<f64> {
        if self.check_dim(w).is_err() {
            return None;
        }
        match self {
            ProxFn::L1 { weight } => {
                let ok = w.iter().all(|&a| a.abs() <= weight + FEASIBILITY_TOL);
                Some(if ok { 0.0 } else { f64::INFINITY })
            }
            ProxFn::ShiftedL1 { weight, center } => {
                let ok = w.iter().all(|&a| a.abs() <= weight + FEASIBILITY_TOL);
                Some(if ok { dot(w, center) } else { f64::INFINITY })
            }
            ProxFn::SquaredL2 { weight } => {
                if *weight == 0.0 {
                    // zero function: conjugate is the indicator of the origin
                    let ok = w.iter().all(|&a| a.abs() <= FEASIBILITY_TOL);
                    Some(if ok { 0.0 } else { f64::INFINITY })
                } else {
                    Some(dot(w, w) / (4.0 * weight))
                }
            }
            ProxFn::QuadraticLinear { quad, linear } => {
                if *quad == 0.0 {
                    // linear function: conjugate is the indicator of {linear}
                    let ok = w
                        .iter()
                        .zip(linear)
                        .all(|(&a, &l)| (a - l).abs() <= FEASIBILITY_TOL);
                    Some(if ok { 0.0 } else { f64::INFINITY })
                } else {
                    let d2: f64 = w.iter().zip(linear).map(|(a, l)| (a - l) * (a - l)).sum();
                    Some(d2 / (4.0 * quad))
                }
            }
            ProxFn::LinearNonneg { cost, nonneg } => {
                let mut free_ok = true;
                let mut shifted: Vec<f64> = w.iter().zip(cost).map(|(a, c)| a - c).collect();
                for &i in nonneg {
                    if shifted[i] > FEASIBILITY_TOL {
                        free_ok = false;
                    }
                    shifted[i] = 0.0;
                }
                let ok = free_ok && shifted.iter().all(|&a| a.abs() <= FEASIBILITY_TOL);
                Some(if ok { 0.0 } else { f64::INFINITY })
            }
            ProxFn::PointIndicator { point } => Some(dot(w, point)),
            ProxFn::BoxIndicator { lower, upper } => Some(
                w.iter()
                    .enumerate()
                    .map(|(i, &a)| (a * lower[i]).max(a * upper[i]))
                    .sum(),
            ),
            ProxFn::GroupBall { group_size } => Some(
                w.chunks_exact(*group_size)
                    .map(|g| dot(g, g).sqrt())
                    .sum(),
            ),
            ProxFn::HingeConjugate => Some(w.iter().map(|&a| (1.0 - a).max(0.0)).sum()),
        }
    }
}

/// `prox` of the convex conjugate via the Moreau decomposition:
/// `prox_{t f*}(v) = v - t * prox_{f/t}(v/t)`.
pub fn prox_conjugate_via_moreau(f: &ProxFn, v: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("prox step must be positive, got {t}")));
    }
    let scaled: Vec<f64> = v.iter().map(|&a| a / t).collect();
    let p = f.prox(&scaled, 1.0 / t)?;
    Ok(v.iter().zip(&p).map(|(&a, &pi)| a - t * pi).collect())
}

/// A differentiable convex function with Lipschitz gradient.
#[derive(Debug, Clone)]
pub enum SmoothFn {
    /// `(scale / 2) * ||v||^2`; gradient `scale * v`, Lipschitz `scale`.
    HalfSquaredNorm { scale: f64 },
}

impl SmoothFn {
    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            SmoothFn::HalfSquaredNorm { scale } => 0.5 * scale * dot(v, v),
        }
    }

    pub fn grad(&self, v: &[f64], out: &mut [f64]) {
        match self {
            SmoothFn::HalfSquaredNorm { scale } => {
                for (o, &a) in out.iter_mut().zip(v) {
                    *o = scale * a;
                }
            }
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            SmoothFn::HalfSquaredNorm { scale } => *scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist2, nrm2};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rand_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()
    }

    fn catalog(n: usize, rng: &mut StdRng) -> Vec<ProxFn> {
        vec![
            ProxFn::L1 { weight: 1.3 },
            ProxFn::ShiftedL1 {
                weight: 1.9,
                center: rand_vec(rng, n),
            },
            ProxFn::SquaredL2 { weight: 50.0 },
            ProxFn::QuadraticLinear {
                quad: 0.5,
                linear: rand_vec(rng, n),
            },
            ProxFn::LinearNonneg {
                cost: rand_vec(rng, n),
                nonneg: vec![0, 2],
            },
            ProxFn::PointIndicator {
                point: rand_vec(rng, n),
            },
            ProxFn::BoxIndicator {
                lower: vec![-1.0; n],
                upper: vec![0.5; n],
            },
            ProxFn::GroupBall { group_size: 2 },
            ProxFn::HingeConjugate,
        ]
    }

    #[test]
    fn soft_threshold_example() {
        let f = ProxFn::L1 { weight: 1.0 };
        let p = f.prox(&[2.0], 1.0).unwrap();
        assert_eq!(p, vec![1.0]);
        // tie maps to zero
        let p = f.prox(&[1.0, -1.0], 1.0).unwrap();
        assert_eq!(p, vec![0.0, 0.0]);
    }

    #[test]
    fn point_indicator_prox_is_constant() {
        let f = ProxFn::PointIndicator {
            point: vec![0.3, -0.7],
        };
        let p = f.prox(&[100.0, -100.0], 17.0).unwrap();
        assert_eq!(p, vec![0.3, -0.7]);
    }

    #[test]
    fn squared_l2_prox_matches_grid_minimization() {
        // c ||.||^2 with c = 50, v = 1, t = 0.01 -> v / (1 + 2 t c) = 0.5.
        let f = ProxFn::SquaredL2 { weight: 50.0 };
        let p = f.prox(&[1.0], 0.01).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15);
        // Scalar grid search oracle.
        let obj = |w: f64| 50.0 * w * w + (w - 1.0) * (w - 1.0) / (2.0 * 0.01);
        let mut best = (f64::INFINITY, 0.0);
        let mut w = -2.0;
        while w <= 2.0 {
            if obj(w) < best.0 {
                best = (obj(w), w);
            }
            w += 1e-5;
        }
        assert!((best.1 - p[0]).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_step_and_dims() {
        let f = ProxFn::L1 { weight: 1.0 };
        assert!(f.prox(&[1.0], 0.0).is_err());
        assert!(f.prox(&[1.0], -1.0).is_err());
        let g = ProxFn::PointIndicator { point: vec![0.0; 3] };
        assert!(g.prox(&[1.0], 1.0).is_err());
    }

    #[test]
    fn moreau_examples() {
        // conjugate of ||.||_1 is the indicator of the unit box.
        let f = ProxFn::L1 { weight: 1.0 };
        let p = prox_conjugate_via_moreau(&f, &[0.5], 1.0).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15);
        let p = prox_conjugate_via_moreau(&f, &[3.0], 1.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15);
        // conjugate of indicator({0}) is the zero function; prox is identity.
        let g = ProxFn::PointIndicator { point: vec![0.0, 0.0] };
        let p = prox_conjugate_via_moreau(&g, &[1.5, -2.0], 0.7).unwrap();
        assert!((p[0] - 1.5).abs() < 1e-15 && (p[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn moreau_round_trip() {
        // prox_{t f*}(v) = v - t prox_{f/t}(v/t), hence
        // t * prox_{f/t}(v/t) + prox_{t f*}(v) reconstructs v.
        let mut rng = StdRng::seed_from_u64(21);
        for f in catalog(4, &mut rng) {
            for _ in 0..20 {
                let v = rand_vec(&mut rng, 4);
                let t = rng.gen_range(0.05..5.0);
                let q = prox_conjugate_via_moreau(&f, &v, t).unwrap();
                let scaled: Vec<f64> = v.iter().map(|&a| a / t).collect();
                let inner = f.prox(&scaled, 1.0 / t).unwrap();
                for i in 0..v.len() {
                    assert!((t * inner[i] + q[i] - v[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn prox_outputs_lie_in_domain() {
        let mut rng = StdRng::seed_from_u64(5);
        for f in catalog(4, &mut rng) {
            for _ in 0..50 {
                let v = rand_vec(&mut rng, 4);
                let t = rng.gen_range(0.01..10.0);
                let p = f.prox(&v, t).unwrap();
                assert!(
                    f.eval(&p).unwrap().is_finite(),
                    "prox output infeasible for {f:?}"
                );
            }
        }
    }

    #[test]
    fn prox_contraction_inequality_per_entry() {
        // (1 + 2 t mu) ||p - p'||^2 <= ||v - v'||^2 - ||p - v - p' + v'||^2
        let mut rng = StdRng::seed_from_u64(9);
        for f in catalog(6, &mut rng) {
            let mu = match f.mu() {
                m if m.is_infinite() => continue, // excluded: would produce inf * 0
                m => m,
            };
            for _ in 0..100 {
                let v = rand_vec(&mut rng, 6);
                let v2 = rand_vec(&mut rng, 6);
                let t = rng.gen_range(0.05..2.0);
                let p = f.prox(&v, t).unwrap();
                let p2 = f.prox(&v2, t).unwrap();
                let lhs = (1.0 + 2.0 * t * mu) * dist2(&p, &p2);
                let cross: f64 = (0..6)
                    .map(|i| {
                        let d = p[i] - v[i] - p2[i] + v2[i];
                        d * d
                    })
                    .sum();
                let rhs = dist2(&v, &v2) - cross;
                assert!(lhs <= rhs + 1e-10, "entry {f:?}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn prox_optimality_inequality_against_probes() {
        // f(p) + ||p-v||^2/(2t) <= f(w) + ||w-v||^2/(2t) - (1 + t mu)/(2t) ||p-w||^2
        let mut rng = StdRng::seed_from_u64(33);
        for f in catalog(4, &mut rng) {
            let mu = match f.mu() {
                m if m.is_infinite() => 0.0, // inequality still holds with mu = 0
                m => m,
            };
            for _ in 0..50 {
                let v = rand_vec(&mut rng, 4);
                let t = rng.gen_range(0.1..2.0);
                let p = f.prox(&v, t).unwrap();
                let fp = f.eval(&p).unwrap();
                for _ in 0..10 {
                    // probe points: prox outputs of nearby inputs are feasible
                    let w = f.prox(&rand_vec(&mut rng, 4), t).unwrap();
                    let fw = f.eval(&w).unwrap();
                    if !fw.is_finite() {
                        continue;
                    }
                    let lhs = fp + dist2(&p, &v) / (2.0 * t);
                    let rhs =
                        fw + dist2(&w, &v) / (2.0 * t) - (1.0 + t * mu) / (2.0 * t) * dist2(&p, &w);
                    assert!(lhs <= rhs + 1e-10, "entry {f:?}");
                }
            }
        }
    }

    #[test]
    fn firm_nonexpansiveness() {
        let mut rng = StdRng::seed_from_u64(17);
        for f in catalog(4, &mut rng) {
            for _ in 0..50 {
                let v = rand_vec(&mut rng, 4);
                let v2 = rand_vec(&mut rng, 4);
                let t = rng.gen_range(0.05..5.0);
                let p = f.prox(&v, t).unwrap();
                let p2 = f.prox(&v2, t).unwrap();
                let dv: Vec<f64> = v.iter().zip(&v2).map(|(a, b)| a - b).collect();
                let dp: Vec<f64> = p.iter().zip(&p2).map(|(a, b)| a - b).collect();
                assert!(nrm2(&dp) <= nrm2(&dv) + 1e-12);
            }
        }
    }

    #[test]
    fn hinge_conjugate_prox_matches_grid_search() {
        // prox_{t g*}(v) = clamp(v - t, [-1, 0]); oracle by 1-D grid.
        let f = ProxFn::HingeConjugate;
        let p = f.prox(&[0.0], 1.0).unwrap();
        assert_eq!(p, vec![-1.0]);
        for &(v, t) in &[(0.3, 0.5), (-0.2, 0.1), (-3.0, 2.0), (1.5, 0.25)] {
            let p = f.prox(&[v], t).unwrap()[0];
            let obj = |s: f64| s * t + 0.5 * (s - v) * (s - v);
            let mut best = (f64::INFINITY, 0.0);
            let mut s = -1.0;
            while s <= 0.0 {
                if obj(s) < best.0 {
                    best = (obj(s), s);
                }
                s += 1e-6;
            }
            assert!((best.1 - p).abs() < 1e-5, "v={v} t={t}");
        }
    }

    #[test]
    fn group_ball_projection() {
        let f = ProxFn::GroupBall { group_size: 2 };
        // vector of norm 2 is rescaled to norm 1
        let p = f.prox(&[2.0, 0.0], 1.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1] == 0.0);
        // origin stays at the origin
        let p = f.prox(&[0.0, 0.0], 1.0).unwrap();
        assert_eq!(p, vec![0.0, 0.0]);
    }

    #[test]
    fn smooth_fn_gradient_properties() {
        let mut rng = StdRng::seed_from_u64(29);
        let f = SmoothFn::HalfSquaredNorm { scale: 2.5 };
        let l = f.lipschitz();
        for _ in 0..50 {
            let u = rand_vec(&mut rng, 5);
            let v = rand_vec(&mut rng, 5);
            let mut gu = vec![0.0; 5];
            let mut gv = vec![0.0; 5];
            f.grad(&u, &mut gu);
            f.grad(&v, &mut gv);
            let dg: Vec<f64> = gu.iter().zip(&gv).map(|(a, b)| a - b).collect();
            let du: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
            assert!(nrm2(&dg) <= l * nrm2(&du) + 1e-12);
            // convexity gradient inequality: f(v) >= f(u) + <grad f(u), v - u>
            let vmu: Vec<f64> = v.iter().zip(&u).map(|(a, b)| a - b).collect();
            assert!(f.eval(&v) >= f.eval(&u) + dot(&gu, &vmu) - 1e-12);
        }
    }
}
