//! # lsi-certify
//!
//! Desk-scale numerical certification of log-Sobolev inequalities (LSI) for
//! weighted diffusions `L = Δ − ∇V·∇` on truncated 1-D and 2-D domains.
//!
//! The toolkit covers both directions of the equivalence between the LSI
//!
//! ```text
//! Ent(f²) ≤ C · E(f, f),    Ent(g) = μ(g log g) − μg · log μg
//! ```
//!
//! and the quadratic Lyapunov condition
//!
//! ```text
//! LW ≤ (−c·d²(x, x₀) + b) W,    W > 0, c > 0, b ≥ 0,
//! ```
//!
//! under a Bakry–Émery curvature lower bound `Hess V ≥ −K`:
//!
//! - [`potentials`]: the potential family `V`, its derivatives, curvature
//!   lower bounds, and the squared distance `d²(·, x₀)`.
//! - [`discretization`]: uniform grid, Gibbs measure `μ ∝ e^{−V}`, the
//!   μ-symmetric finite-volume generator, Dirichlet form, entropy, variance.
//! - [`spectral`]: dense eigendecomposition of `−L`, the spectral gap `λ_μ`,
//!   and the exact discrete heat flow `P_t = e^{tL}`.
//! - [`semigroup`]: pointwise Harnack, gradient-commutation, and
//!   curvature-weighted upper bounds for `P_t`.
//! - [`lyapunov`]: verification and fitting of Lyapunov certificates, and the
//!   transported inequality `μ(h²d²) ≤ c⁻¹E(h,h) + (b/c)μh²`.
//! - [`certify`]: the explicit constant chain turning a certificate into a
//!   certified LSI constant, the log-concave branch `C = 2/c`, and a
//!   gradient-ascent lower-bound oracle for the optimal constant.
//! - [`flow`]: heat-flow functionals (`Φ`, `Ψ`, `Θ₁`, `Θ₂`), their
//!   monotonicity, derivative identities, and the Rothaus inequality.
//! - [`converse`]: from an LSI constant back to a Lyapunov function by
//!   solving the Schrödinger problem `−Lu + φu = 1`.
//! - [`cli`] / [`config`]: the `lsi-certify` command-line front end.
//!
//! All operators are assembled so that μ-symmetry, zero row sums, and the
//! sign pattern of a Z-matrix hold exactly (up to roundoff), which is what
//! the discrete maximum principle in [`converse`] relies on.
//!
//! ## Quick start
//!
//! ```
//! use lsi_certify::certify::{certify, CertifyOptions};
//! use lsi_certify::discretization::GridSpec;
//! use lsi_certify::potentials::standard_gaussian;
//!
//! let potential = standard_gaussian();
//! let grid = GridSpec { dim: 1, radius: 8.0, points: 401 };
//! let report = certify(&potential, &grid, &CertifyOptions::default()).unwrap();
//! assert!((report.c_lsi - 2.0).abs() < 1e-6); // log-concave branch: C = 2/c
//! ```
//!
//! Runnable examples live under `examples/`, one per capability; see the
//! README for the CLI reference.

pub mod certify;
pub mod cli;
pub mod config;
pub mod converse;
pub mod discretization;
pub mod error;
pub mod flow;
pub mod lyapunov;
pub mod potentials;
pub mod report;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
