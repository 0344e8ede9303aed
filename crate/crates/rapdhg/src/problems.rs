//! Problem builders and data ingestion.
//!
//! A [`SaddleProblem`] holds the four function blocks and the coupling
//! operator of
//!
//! ```text
//! min_x f(x) + f2(x) + g(Ax)    with Lagrangian
//! L(x, y) = f(x) + f2(x) + <Ax, y> - g*(y) - g2*(y)
//! ```
//!
//! Builders translate the shipped problem families - generic LP, ridge
//! regression, sparse hinge-loss SVM with l1 penalty, TV-L1 denoising - into
//! this form. Readers cover the LIBSVM text format, plain/raw PGM images and
//! a JSON schema for LP data.

use crate::error::{Error, Result};
use crate::functions::{ProxFn, SmoothFn};
use crate::linalg::{dot, CsrMat, DenseMat, LinOp, PrimalDualPoint};
use serde::{Deserialize, Serialize};
use std::io::Read;
use std::path::Path;

/// Optional constants attached to a problem for step-size selection and rate
/// certificates.
#[derive(Debug, Clone, Default)]
pub struct ProblemMeta {
    pub name: String,
    pub mu_f: Option<f64>,
    pub mu_gstar: Option<f64>,
    pub sigma_min: Option<f64>,
}

/// The four-block saddle-point problem description.
#[derive(Debug, Clone)]
pub struct SaddleProblem {
    pub f: ProxFn,
    pub f2: Option<SmoothFn>,
    pub gstar: ProxFn,
    pub g2star: Option<SmoothFn>,
    pub a: LinOp,
    pub meta: ProblemMeta,
}

impl SaddleProblem {
    /// `(n, m)`: primal and dual dimensions.
    pub fn dims(&self) -> (usize, usize) {
        let (m, n) = self.a.shape();
        (n, m)
    }

    pub fn l_f(&self) -> f64 {
        self.f2.as_ref().map_or(0.0, |f| f.lipschitz())
    }

    pub fn l_gstar(&self) -> f64 {
        self.g2star.as_ref().map_or(0.0, |g| g.lipschitz())
    }

    /// Dimensional consistency between the operator and the function blocks.
    pub fn validate(&self) -> Result<()> {
        let (n, m) = self.dims();
        if let Some(d) = self.f.dim() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, got: d });
            }
        }
        if let Some(d) = self.gstar.dim() {
            if d != m {
                return Err(Error::DimensionMismatch { expected: m, got: d });
            }
        }
        Ok(())
    }

    /// Lagrangian value; `+inf` / `-inf` when an indicator block is violated
    /// on the primal / dual side.
    pub fn lagrangian(&self, z: &PrimalDualPoint) -> Result<f64> {
        let fx = self.f.eval(&z.x)?;
        let gy = self.gstar.eval(&z.y)?;
        if fx.is_infinite() && gy.is_infinite() {
            return Err(Error::invalid(
                "Lagrangian undefined: both indicator blocks violated",
            ));
        }
        if fx.is_infinite() {
            return Ok(f64::INFINITY);
        }
        if gy.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        let mut val = fx - gy;
        if let Some(f2) = &self.f2 {
            val += f2.eval(&z.x);
        }
        if let Some(g2) = &self.g2star {
            val -= g2.eval(&z.y);
        }
        let ax = self.a.apply_vec(&z.x);
        Ok(val + dot(&ax, &z.y))
    }
}

// ---------------------------------------------------------------------------
// LP
// ---------------------------------------------------------------------------

/// Data of the linear program
///
/// ```text
/// min  c'x   s.t.  A_E x = b_E,  A_I x <= b_I,  x_N >= 0  (x_F free)
/// ```
///
/// `eq_rows` / `ineq_rows` partition the row indices; `nonneg_cols` /
/// `free_cols` partition the column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LpDescription {
    pub a: DenseMat,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub eq_rows: Vec<usize>,
    pub ineq_rows: Vec<usize>,
    pub nonneg_cols: Vec<usize>,
    pub free_cols: Vec<usize>,
}

fn check_partition(first: &[usize], second: &[usize], total: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; total];
    for &i in first.iter().chain(second) {
        if i >= total {
            return Err(Error::invalid(format!("{what} index {i} out of range")));
        }
        if seen[i] {
            return Err(Error::invalid(format!("{what} index {i} appears twice")));
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::invalid(format!("{what} partition incomplete")));
    }
    Ok(())
}

impl LpDescription {
    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.a.rows(), self.a.cols());
        if self.b.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: self.b.len() });
        }
        if self.c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.c.len() });
        }
        check_partition(&self.eq_rows, &self.ineq_rows, m, "row")?;
        check_partition(&self.nonneg_cols, &self.free_cols, n, "column")?;
        Ok(())
    }
}

/// Saddle form of the LP: `f(x) = <c,x> + indicator(x_N >= 0)`,
/// `g*(y) = <b,y> + indicator(y_I >= 0)`.
pub fn build_lp(lp: &LpDescription) -> Result<SaddleProblem> {
    lp.validate()?;
    let f = ProxFn::LinearNonneg {
        cost: lp.c.clone(),
        nonneg: lp.nonneg_cols.clone(),
    };
    let gstar = ProxFn::LinearNonneg {
        cost: lp.b.clone(),
        nonneg: lp.ineq_rows.clone(),
    };
    let a = LinOp::dense(lp.a.clone());
    let sigma_min = small_sigma_min(&lp.a);
    Ok(SaddleProblem {
        f,
        f2: None,
        gstar,
        g2star: None,
        a,
        meta: ProblemMeta {
            name: "lp".into(),
            mu_f: None,
            mu_gstar: None,
            sigma_min,
        },
    })
}

/// Smallest singular values are ill-conditioned to estimate iteratively, so
/// the dense SVD route is only taken for small problems.
fn small_sigma_min(a: &DenseMat) -> Option<f64> {
    if a.rows() * a.cols() <= 1_000_000 {
        Some(a.sigma_min())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Ridge regression
// ---------------------------------------------------------------------------

/// `min_x 1/2 ||Ax - b||^2 + c_reg ||x||^2` in saddle form:
/// `f(x) = c_reg ||x||^2` (mu_f = 2 c_reg) and
/// `g*(y) = 1/2 ||y||^2 + <b, y>` (mu_g* = 1).
pub fn build_ridge(a: DenseMat, b: Vec<f64>, c_reg: f64) -> Result<SaddleProblem> {
    if !(c_reg > 0.0) {
        return Err(Error::invalid("ridge regularization weight must be positive"));
    }
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: b.len() });
    }
    let sigma_min = small_sigma_min(&a);
    Ok(SaddleProblem {
        f: ProxFn::SquaredL2 { weight: c_reg },
        f2: None,
        gstar: ProxFn::QuadraticLinear { quad: 0.5, linear: b },
        g2star: None,
        a: LinOp::dense(a),
        meta: ProblemMeta {
            name: "ridge".into(),
            mu_f: Some(2.0 * c_reg),
            mu_gstar: Some(1.0),
            sigma_min,
        },
    })
}

// ---------------------------------------------------------------------------
// Sparse SVM
// ---------------------------------------------------------------------------

/// `min_w sum_i max(0, 1 - y_i x_{i,:} w) + ||w||_1` in saddle form:
/// `f = ||.||_1`, row i of `A` is `y_i * x_{i,:}`, and `g*` is the separable
/// hinge conjugate. `normalize` rescales columns of the *label-scaled* matrix
/// to unit Euclidean norm.
pub fn build_svm(x: CsrMat, labels: &[f64], normalize: bool) -> Result<SaddleProblem> {
    if labels.len() != x.rows() {
        return Err(Error::DimensionMismatch { expected: x.rows(), got: labels.len() });
    }
    if labels.iter().any(|&l| l != 1.0 && l != -1.0) {
        return Err(Error::invalid("SVM labels must be +1 or -1"));
    }
    let rows = x.rows();
    let cols = x.cols();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::with_capacity(rows);
    for i in 0..rows {
        entries.push(x.row_entries(i).map(|(j, v)| (j, labels[i] * v)).collect());
    }
    let mut scaled = CsrMat::from_row_entries(rows, cols, &entries)?;
    if normalize {
        for j in 0..cols {
            let nj = scaled.col_norm2(j).sqrt();
            if nj > 0.0 {
                scaled.scale_col(j, 1.0 / nj);
            }
        }
    }
    Ok(SaddleProblem {
        f: ProxFn::L1 { weight: 1.0 },
        f2: None,
        gstar: ProxFn::HingeConjugate,
        g2star: None,
        a: LinOp::csr(scaled),
        meta: ProblemMeta {
            name: "svm".into(),
            ..Default::default()
        },
    })
}

// ---------------------------------------------------------------------------
// TV-L1
// ---------------------------------------------------------------------------

/// A row-major grayscale image with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

/// `min_x lam ||x - I||_1 + ||Dx||_{2,1}` with `D` the 2-D forward-difference
/// gradient: `f` is the shifted l1 term, `g*` the per-pixel unit-ball
/// indicator.
pub fn build_tvl1(image: &Image, lam: f64) -> Result<SaddleProblem> {
    if !(lam > 0.0) {
        return Err(Error::invalid("TV-L1 weight must be positive"));
    }
    if image.data.len() != image.h * image.w || image.data.is_empty() {
        return Err(Error::invalid("image dimensions inconsistent"));
    }
    Ok(SaddleProblem {
        f: ProxFn::ShiftedL1 {
            weight: lam,
            center: image.data.clone(),
        },
        f2: None,
        gstar: ProxFn::GroupBall { group_size: 2 },
        g2star: None,
        a: LinOp::grad2d(image.h, image.w),
        meta: ProblemMeta {
            name: "tvl1".into(),
            ..Default::default()
        },
    })
}

// ---------------------------------------------------------------------------
// Readers
// ---------------------------------------------------------------------------

/// Parse a LIBSVM file: one `label idx:val idx:val ...` line per sample,
/// 1-based indices mapped to 0-based columns.
pub fn read_libsvm(path: &Path) -> Result<(CsrMat, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    parse_libsvm(&text)
}

pub fn parse_libsvm(text: &str) -> Result<(CsrMat, Vec<f64>)> {
    let mut labels = Vec::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut cols = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line_id = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse { line: line_id, msg: "empty line".into() })?
            .parse()
            .map_err(|_| Error::Parse { line: line_id, msg: "bad label".into() })?;
        let mut row: Vec<(usize, f64)> = Vec::new();
        for tok in parts {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: line_id,
                msg: format!("expected idx:val, got {tok:?}"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
                line: line_id,
                msg: format!("bad feature index {idx_s:?}"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: line_id,
                    msg: "feature indices are 1-based".into(),
                });
            }
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                line: line_id,
                msg: format!("bad feature value {val_s:?}"),
            })?;
            row.push((idx - 1, val));
        }
        row.sort_by_key(|&(j, _)| j);
        for pair in row.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Parse {
                    line: line_id,
                    msg: format!("duplicate feature index {}", pair[0].0 + 1),
                });
            }
        }
        if let Some(&(j, _)) = row.last() {
            cols = cols.max(j + 1);
        }
        labels.push(label);
        entries.push(row);
    }
    let mat = CsrMat::from_row_entries(entries.len(), cols, &entries)?;
    Ok((mat, labels))
}

/// Read a plain (P2) or raw (P5) PGM image, scaling samples to `[0, 1]`.
pub fn read_pgm(path: &Path) -> Result<Image> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_pgm(&bytes)
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0usize;

    // Header tokens may be separated by whitespace and '#' comments.
    let next_token = |pos: &mut usize| -> Result<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::Parse { line: 0, msg: "unexpected end of PGM header".into() });
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };

    let magic = next_token(&mut pos)?;
    if magic != "P2" && magic != "P5" {
        return Err(Error::Parse { line: 1, msg: format!("not a PGM file (magic {magic:?})") });
    }
    let w: usize = next_token(&mut pos)?
        .parse()
        .map_err(|_| Error::Parse { line: 1, msg: "bad width".into() })?;
    let h: usize = next_token(&mut pos)?
        .parse()
        .map_err(|_| Error::Parse { line: 1, msg: "bad height".into() })?;
    let maxval: u32 = next_token(&mut pos)?
        .parse()
        .map_err(|_| Error::Parse { line: 1, msg: "bad maxval".into() })?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse { line: 1, msg: format!("maxval {maxval} out of range") });
    }
    let count = h * w;
    let mut data = Vec::with_capacity(count);
    if magic == "P2" {
        for _ in 0..count {
            let v: u32 = next_token(&mut pos)?
                .parse()
                .map_err(|_| Error::Parse { line: 0, msg: "bad pixel value".into() })?;
            data.push(v as f64 / maxval as f64);
        }
    } else {
        // single whitespace byte after maxval, then raw samples
        pos += 1;
        let bytes_per = if maxval < 256 { 1 } else { 2 };
        if bytes.len() < pos + count * bytes_per {
            return Err(Error::Parse { line: 0, msg: "truncated raw PGM data".into() });
        }
        for i in 0..count {
            let v = if bytes_per == 1 {
                bytes[pos + i] as u32
            } else {
                ((bytes[pos + 2 * i] as u32) << 8) | bytes[pos + 2 * i + 1] as u32
            };
            data.push(v as f64 / maxval as f64);
        }
    }
    Ok(Image { h, w, data })
}

// ---------------------------------------------------------------------------
// LP JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct LpJson {
    #[serde(rename = "A")]
    a: LpMatrixJson,
    b: Vec<f64>,
    c: Vec<f64>,
    #[serde(rename = "E")]
    eq_rows: Vec<usize>,
    #[serde(rename = "I")]
    ineq_rows: Vec<usize>,
    #[serde(rename = "N")]
    nonneg_cols: Vec<usize>,
    #[serde(rename = "F")]
    free_cols: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LpMatrixJson {
    Dense(Vec<Vec<f64>>),
    Coo {
        shape: (usize, usize),
        rows: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<f64>,
    },
}

pub fn read_lp_json(path: &Path) -> Result<LpDescription> {
    let text = std::fs::read_to_string(path)?;
    parse_lp_json(&text)
}

pub fn parse_lp_json(text: &str) -> Result<LpDescription> {
    let raw: LpJson = serde_json::from_str(text)?;
    let a = match raw.a {
        LpMatrixJson::Dense(rows) => DenseMat::from_rows(&rows)?,
        LpMatrixJson::Coo { shape, rows, cols, vals } => {
            if rows.len() != cols.len() || rows.len() != vals.len() {
                return Err(Error::invalid("COO triplet arrays must have equal length"));
            }
            let mut data = vec![0.0; shape.0 * shape.1];
            for ((&i, &j), &v) in rows.iter().zip(&cols).zip(&vals) {
                if i >= shape.0 || j >= shape.1 {
                    return Err(Error::invalid("COO index out of range"));
                }
                data[i * shape.1 + j] += v;
            }
            DenseMat::new(shape.0, shape.1, data)?
        }
    };
    let lp = LpDescription {
        a,
        b: raw.b,
        c: raw.c,
        eq_rows: raw.eq_rows,
        ineq_rows: raw.ineq_rows,
        nonneg_cols: raw.nonneg_cols,
        free_cols: raw.free_cols,
    };
    lp.validate()?;
    Ok(lp)
}

pub fn write_lp_json(lp: &LpDescription) -> Result<String> {
    lp.validate()?;
    let rows: Vec<Vec<f64>> = (0..lp.a.rows()).map(|i| lp.a.row(i).to_vec()).collect();
    let raw = LpJson {
        a: LpMatrixJson::Dense(rows),
        b: lp.b.clone(),
        c: lp.c.clone(),
        eq_rows: lp.eq_rows.clone(),
        ineq_rows: lp.ineq_rows.clone(),
        nonneg_cols: lp.nonneg_cols.clone(),
        free_cols: lp.free_cols.clone(),
    };
    Ok(serde_json::to_string_pretty(&raw)?)
}

// ---------------------------------------------------------------------------
// Shipped instances
// ---------------------------------------------------------------------------

/// Small benchmark instances shared by the experiment configs and the test
/// suite.
pub mod fixtures {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// A 4-variable / 3-constraint inequality-form LP with a unique
    /// primal-dual solution; the default target of the `estimate-qeb` and
    /// restart benchmarks.
    pub fn small_lp() -> LpDescription {
        LpDescription {
            a: DenseMat::from_rows(&[
                vec![2.0, 4.0, 6.0, 7.0],
                vec![1.0, 1.0, 2.0, 2.0],
                vec![1.0, 2.0, 3.0, 3.0],
            ])
            .unwrap(),
            b: vec![41.0, 17.0, 24.0],
            c: vec![-7.0, -9.0, -18.0, -17.0],
            eq_rows: vec![],
            ineq_rows: vec![0, 1, 2],
            nonneg_cols: vec![0, 1, 2, 3],
            free_cols: vec![],
        }
    }

    /// Seeded dense matrix with entries uniform in `[-scale, scale]`.
    pub fn synthetic_matrix(rows: usize, cols: usize, scale: f64, seed: u64) -> (DenseMat, Vec<f64>) {
        let mut rng = StdRng::seed_from_u64(seed);
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| rng.gen_range(-scale..scale))
            .collect();
        let rhs: Vec<f64> = (0..rows).map(|_| rng.gen_range(-scale..scale)).collect();
        (DenseMat::new(rows, cols, data).unwrap(), rhs)
    }

    /// Ridge instance on a seeded synthetic matrix.
    pub fn synthetic_ridge(rows: usize, cols: usize, c_reg: f64, scale: f64, seed: u64) -> SaddleProblem {
        let (a, b) = synthetic_matrix(rows, cols, scale, seed);
        build_ridge(a, b, c_reg).expect("valid ridge instance")
    }

    /// Pixels of [`noisy_blocks_image`] hit by impulse noise: dark pixels
    /// jump to white, bright ones to black.
    pub const IMPULSE_PIXELS: [usize; 10] = [5, 12, 22, 27, 33, 38, 44, 51, 57, 62];

    /// Two-level 8x8 image with ten impulse-noised pixels; TV-L1 keeps the
    /// block structure and removes the impulses. Same content as the shipped
    /// PGM fixture.
    pub fn noisy_blocks_image() -> Image {
        let (h, w) = (8, 8);
        let mut data = vec![0.2; h * w];
        for i in 2..6 {
            for j in 2..6 {
                data[i * w + j] = 0.8;
            }
        }
        for &p in &IMPULSE_PIXELS {
            data[p] = if data[p] > 0.5 { 0.0 } else { 1.0 };
        }
        Image { h, w, data }
    }

    /// Ten linearly separable samples in LIBSVM text form.
    pub fn tiny_svm_text() -> &'static str {
        "+1 1:1.2 2:0.7\n\
         +1 1:0.9 2:1.1 3:0.2\n\
         +1 1:1.5 3:-0.1\n\
         +1 1:0.8 2:0.9\n\
         +1 1:1.1 2:1.3 3:0.4\n\
         -1 1:-1.0 2:-0.6\n\
         -1 1:-1.3 2:-0.9 3:0.1\n\
         -1 1:-0.7 2:-1.2\n\
         -1 1:-1.1 2:-0.8 3:-0.3\n\
         -1 1:-0.9 2:-1.4\n"
    }

    /// The tiny SVM instance, built with column normalization.
    pub fn tiny_svm() -> SaddleProblem {
        let (x, labels) = parse_libsvm(tiny_svm_text()).expect("fixture parses");
        build_svm(x, &labels, true).expect("valid svm instance")
    }
}
