//! First-order primal-dual solver toolkit.
//!
//! Implements the primal-dual hybrid gradient (PDHG) fixed-point iteration
//! together with its averaged, restarted and adaptively restarted variants
//! for convex-concave saddle-point problems
//!
//! ```text
//! min_x f(x) + f2(x) + g(Ax)   <->   saddle points of
//! L(x, y) = f(x) + f2(x) + <Ax, y> - g*(y) - g2*(y)
//! ```
//!
//! alongside the machinery needed to *measure* convergence: smoothed duality
//! gaps, KKT residuals, closed-form linear-rate certificates, and empirical
//! estimators for the regularity constants that drive those certificates.
//!
//! Modules:
//! - [`linalg`]: vectors, linear operators, operator-norm estimation, the
//!   step-weighted norm used by every bound.
//! - [`functions`]: the catalog of proximable and smooth building blocks.
//! - [`problems`]: builders for the shipped problem families (LP, ridge,
//!   sparse SVM, TV-L1) and file readers.
//! - [`solver`]: the PDHG operator and the four solve drivers.
//! - [`gap`]: smoothed gap, self-centered gap, KKT residual, restricted gap.
//! - [`rates`]: closed-form contraction-factor certificates.
//! - [`oracles`]: independent ground truth (exact rates, constant
//!   estimators, closed-form LP gap, high-precision reference solutions).
//! - [`cli`]: batch front end used by the `rapdhg` binary.

pub mod cli;
pub mod error;
pub mod functions;
pub mod gap;
pub mod linalg;
pub mod oracles;
pub mod problems;
pub mod rates;
pub mod solver;

pub use error::{Error, Result};
