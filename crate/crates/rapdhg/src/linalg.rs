//! Vectors, linear operators and the step-weighted norm.
//!
//! Every contraction statement in this crate is made in the weighted norm
//! `||z||_V = sqrt(||x||^2 / tau + ||y||^2 / sigma)` over primal-dual pairs
//! `z = (x, y)`; [`VNormParams`] carries the weights and [`v_norm`] evaluates
//! it. Linear operators come in three representations (dense, CSR, 2-D
//! forward-difference gradient) behind the single [`LinOp`] interface, each
//! carrying a cached upper bound on its spectral norm.

use crate::error::{Error, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

// ---------------------------------------------------------------------------
// Small vector helpers
// ---------------------------------------------------------------------------

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

pub fn nrm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `out = a - b`
pub fn sub(a: &[f64], b: &[f64], out: &mut [f64]) {
    for i in 0..a.len() {
        out[i] = a[i] - b[i];
    }
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

// ---------------------------------------------------------------------------
// Primal-dual points and the V-norm
// ---------------------------------------------------------------------------

/// A primal-dual pair `z = (x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PrimalDualPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        PrimalDualPoint { x, y }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        PrimalDualPoint {
            x: vec![0.0; n],
            y: vec![0.0; m],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }
}

/// Positive step weights `(tau, sigma)` defining the V-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VNormParams {
    tau: f64,
    sigma: f64,
}

impl VNormParams {
    pub fn new(tau: f64, sigma: f64) -> Result<Self> {
        if !(tau > 0.0) || !(sigma > 0.0) {
            return Err(Error::invalid(format!(
                "V-norm weights must be positive, got tau={tau}, sigma={sigma}"
            )));
        }
        Ok(VNormParams { tau, sigma })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// `||z||_V = sqrt(||x||^2 / tau + ||y||^2 / sigma)`.
pub fn v_norm(z: &PrimalDualPoint, p: &VNormParams) -> f64 {
    (dot(&z.x, &z.x) / p.tau + dot(&z.y, &z.y) / p.sigma).sqrt()
}

/// V-distance between two primal-dual points.
pub fn v_dist(a: &PrimalDualPoint, b: &PrimalDualPoint, p: &VNormParams) -> f64 {
    (dist2(&a.x, &b.x) / p.tau + dist2(&a.y, &b.y) / p.sigma).sqrt()
}

// ---------------------------------------------------------------------------
// Matrix storage
// ---------------------------------------------------------------------------

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMat {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(DenseMat { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::invalid("ragged rows in dense matrix"));
            }
            data.extend_from_slice(row);
        }
        DenseMat::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.rows {
            out[i] = dot(self.row(i), x);
        }
    }

    pub fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for i in 0..self.rows {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            let row = self.row(i);
            for j in 0..self.cols {
                out[j] += row[j] * yi;
            }
        }
    }

    fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Exact spectral norm via dense SVD. Intended for small matrices.
    pub fn op_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let sv = self.to_nalgebra().singular_values();
        sv.iter().cloned().fold(0.0, f64::max)
    }

    /// Smallest singular value via dense SVD. Intended for small matrices.
    pub fn sigma_min(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let sv = self.to_nalgebra().singular_values();
        sv.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMat {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMat {
    pub fn new(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != rows + 1 || indices.len() != values.len() {
            return Err(Error::invalid("inconsistent CSR arrays"));
        }
        if *indptr.last().unwrap_or(&0) != indices.len() {
            return Err(Error::invalid("CSR indptr does not cover all entries"));
        }
        if indices.iter().any(|&j| j >= cols) {
            return Err(Error::invalid("CSR column index out of range"));
        }
        Ok(CsrMat {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Build from per-row `(col, value)` lists.
    pub fn from_row_entries(rows: usize, cols: usize, entries: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in entries {
            for &(j, v) in row {
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMat::new(rows, cols, indptr, indices, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        self.indices[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&j, &v)| (j, v))
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.rows {
            let mut acc = 0.0;
            for (j, v) in self.row_entries(i) {
                acc += v * x[j];
            }
            out[i] = acc;
        }
    }

    pub fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for i in 0..self.rows {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            for (j, v) in self.row_entries(i) {
                out[j] += v * yi;
            }
        }
    }

    /// Squared Euclidean norm of column `j`.
    pub fn col_norm2(&self, j: usize) -> f64 {
        let mut acc = 0.0;
        for (jj, v) in self.indices.iter().zip(&self.values) {
            if *jj == j {
                acc += v * v;
            }
        }
        acc
    }

    /// Scale column `j` by `s`.
    pub fn scale_col(&mut self, j: usize, s: f64) {
        for (jj, v) in self.indices.iter().zip(self.values.iter_mut()) {
            if *jj == j {
                *v *= s;
            }
        }
    }

    pub fn to_dense(&self) -> DenseMat {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for (j, v) in self.row_entries(i) {
                data[i * self.cols + j] = v;
            }
        }
        DenseMat::new(self.rows, self.cols, data).expect("consistent dims")
    }
}

// ---------------------------------------------------------------------------
// 2-D forward-difference gradient
// ---------------------------------------------------------------------------

/// Forward differences with Neumann boundary: the last row/column differences
/// are zero. Input is a row-major `h x w` field, output stores the
/// `(horizontal, vertical)` pair per pixel, interleaved.
pub fn grad2d(image: &[f64], h: usize, w: usize, out: &mut [f64]) {
    debug_assert_eq!(image.len(), h * w);
    debug_assert_eq!(out.len(), 2 * h * w);
    for i in 0..h {
        for j in 0..w {
            let p = i * w + j;
            out[2 * p] = if j + 1 < w { image[p + 1] - image[p] } else { 0.0 };
            out[2 * p + 1] = if i + 1 < h { image[p + w] - image[p] } else { 0.0 };
        }
    }
}

/// Exact algebraic adjoint of [`grad2d`] (a negative divergence).
pub fn grad2d_adjoint(field: &[f64], h: usize, w: usize, out: &mut [f64]) {
    debug_assert_eq!(field.len(), 2 * h * w);
    debug_assert_eq!(out.len(), h * w);
    out.fill(0.0);
    for i in 0..h {
        for j in 0..w {
            let p = i * w + j;
            if j + 1 < w {
                let v = field[2 * p];
                out[p] -= v;
                out[p + 1] += v;
            }
            if i + 1 < h {
                let v = field[2 * p + 1];
                out[p] -= v;
                out[p + w] += v;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Linear operator
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum OpKind {
    Dense(DenseMat),
    Csr(CsrMat),
    /// 2-D gradient of an `h x w` image, `h*w -> 2*h*w`.
    Grad2d { h: usize, w: usize },
}

/// A linear operator `A: R^n -> R^m` with a cached spectral-norm upper bound.
#[derive(Debug, Clone)]
pub struct LinOp {
    kind: OpKind,
    norm_bound: f64,
}

/// Relative inflation applied to power-iteration estimates before they are
/// cached as `norm_bound`, so `gamma = sigma*tau*||A||^2 < 1` is enforced
/// conservatively.
pub const NORM_INFLATION: f64 = 1.01;

impl LinOp {
    /// Dense operator. The spectral norm is computed exactly by SVD for
    /// small matrices and estimated by inflated power iteration above
    /// a million entries.
    pub fn dense(mat: DenseMat) -> Self {
        if mat.rows() * mat.cols() <= 1_000_000 {
            let norm = mat.op_norm();
            LinOp {
                kind: OpKind::Dense(mat),
                norm_bound: norm,
            }
        } else {
            let mut op = LinOp {
                kind: OpKind::Dense(mat),
                norm_bound: 0.0,
            };
            let est = estimate_op_norm(&op, 1e-6, 1000);
            op.norm_bound = est.value * NORM_INFLATION;
            op
        }
    }

    /// Sparse operator; the norm bound comes from power iteration, inflated
    /// by [`NORM_INFLATION`].
    pub fn csr(mat: CsrMat) -> Self {
        let mut op = LinOp {
            kind: OpKind::Csr(mat),
            norm_bound: 0.0,
        };
        let est = estimate_op_norm(&op, 1e-6, 1000);
        op.norm_bound = est.value * NORM_INFLATION;
        op
    }

    /// 2-D gradient operator. `sqrt(8)` is a known tight bound on its norm.
    pub fn grad2d(h: usize, w: usize) -> Self {
        LinOp {
            kind: OpKind::Grad2d { h, w },
            norm_bound: 8f64.sqrt(),
        }
    }

    /// Override the cached norm bound (for operators whose norm is known).
    pub fn with_norm_bound(mut self, bound: f64) -> Self {
        self.norm_bound = bound;
        self
    }

    /// `(m, n)`: output and input dimensions.
    pub fn shape(&self) -> (usize, usize) {
        match &self.kind {
            OpKind::Dense(m) => (m.rows(), m.cols()),
            OpKind::Csr(m) => (m.rows(), m.cols()),
            OpKind::Grad2d { h, w } => (2 * h * w, h * w),
        }
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            OpKind::Dense(m) => m.apply(x, out),
            OpKind::Csr(m) => m.apply(x, out),
            OpKind::Grad2d { h, w } => grad2d(x, *h, *w, out),
        }
    }

    pub fn adjoint(&self, y: &[f64], out: &mut [f64]) {
        match &self.kind {
            OpKind::Dense(m) => m.apply_transpose(y, out),
            OpKind::Csr(m) => m.apply_transpose(y, out),
            OpKind::Grad2d { h, w } => grad2d_adjoint(y, *h, *w, out),
        }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.shape().0];
        self.apply(x, &mut out);
        out
    }

    pub fn adjoint_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.shape().1];
        self.adjoint(y, &mut out);
        out
    }

    pub fn as_dense(&self) -> Option<&DenseMat> {
        match &self.kind {
            OpKind::Dense(m) => Some(m),
            _ => None,
        }
    }
}

/// Outcome of [`estimate_op_norm`].
#[derive(Debug, Clone, Copy)]
pub struct OpNormEstimate {
    /// Estimated spectral norm (square root of the top Rayleigh quotient).
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const POWER_ITERATION_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Power iteration on `A^T A` from a deterministic seeded start. Returns the
/// best estimate with a convergence flag; unconverged estimates are still
/// usable as a best effort.
pub fn estimate_op_norm(a: &LinOp, tol: f64, max_iters: usize) -> OpNormEstimate {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return OpNormEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut rng = StdRng::seed_from_u64(POWER_ITERATION_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = nrm2(&v);
    if nv == 0.0 {
        v[0] = 1.0;
    } else {
        v.iter_mut().for_each(|e| *e /= nv);
    }
    let mut av = vec![0.0; m];
    let mut atav = vec![0.0; n];
    let mut rayleigh = 0.0f64;
    for it in 1..=max_iters.max(1) {
        a.apply(&v, &mut av);
        a.adjoint(&av, &mut atav);
        let new_rayleigh = dot(&v, &atav);
        if new_rayleigh <= 0.0 {
            // A v = 0 for this start vector: the operator is (numerically) zero
            // on its span; report what we have.
            return OpNormEstimate {
                value: new_rayleigh.max(0.0).sqrt(),
                iterations: it,
                converged: true,
            };
        }
        let rel_change = (new_rayleigh - rayleigh).abs() / new_rayleigh;
        rayleigh = new_rayleigh;
        if rel_change < tol {
            return OpNormEstimate {
                value: rayleigh.sqrt(),
                iterations: it,
                converged: true,
            };
        }
        let norm = nrm2(&atav);
        for i in 0..n {
            v[i] = atav[i] / norm;
        }
    }
    OpNormEstimate {
        value: rayleigh.max(0.0).sqrt(),
        iterations: max_iters,
        converged: false,
    }
}
