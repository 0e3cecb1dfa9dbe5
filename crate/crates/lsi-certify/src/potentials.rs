//! Potential families `V`, their derivatives, curvature lower bounds, and the
//! squared distance to the base point `x₀`.
//!
//! Every family keeps `e^{−V}` integrable on `ℝ^dim` (positive leading
//! coefficient, even degree), so `μ ∝ e^{−V}` is a probability measure after
//! normalization. Points are stored as `[f64; 2]`; in dimension 1 the second
//! coordinate is fixed to zero.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A point of the (at most two-dimensional) state space. In dimension 1 the
/// second coordinate is identically zero.
pub type Point = [f64; 2];

/// The supported closed-form families. The radial families are defined
/// through `s = |x|²`, which makes them valid in both dimensions.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `V(x) = scale · |x|² / 2`, `scale > 0`.
    Gaussian { scale: f64 },
    /// `V(x) = a4 |x|⁴ + a2 |x|²`, `a4 > 0` (two wells for `a2 < 0`).
    DoubleWell { a4: f64, a2: f64 },
    /// `V(x) = a4 |x|⁴`, `a4 > 0`.
    Quartic { a4: f64 },
    /// `V(x) = Σ_k coeffs[k] x^k` (dimension 1 only).
    Polynomial { coeffs: Vec<f64> },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian { .. } => "gaussian",
            Family::DoubleWell { .. } => "double_well",
            Family::Quartic { .. } => "quartic",
            Family::Polynomial { .. } => "polynomial",
        }
    }
}

/// A potential `V` together with the base point `x₀` of the Lyapunov
/// condition. Immutable after construction; evaluation is pure.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub family: Family,
    pub x0: Point,
    pub dim: usize,
}

/// Output of [`curvature_lower_bound`]: `kappa` is the infimum over the
/// truncated domain of the smallest Hessian eigenvalue of `V`, and
/// `k = max(−kappa, 0)` is the Bakry–Émery constant in `Hess V ≥ −K`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CurvatureBound {
    pub kappa: f64,
    pub k: f64,
    /// Whether the log-concave branch (`kappa > 0`, certified constant `2/kappa`) applies.
    pub log_concave: bool,
}

fn require(params: &BTreeMap<String, f64>, family: &str, key: &str) -> Result<f64> {
    params.get(key).copied().ok_or_else(|| Error::MissingParam {
        family: family.to_string(),
        key: key.to_string(),
    })
}

/// Builds a [`PotentialSpec`] from a family name, a coefficient map, and the
/// base point (whose length fixes the dimension).
///
/// Rejects unknown families and parameter sets for which `e^{−V}` fails to be
/// integrable: the leading coefficient must be positive and of even degree.
pub fn make_potential(
    family: &str,
    params: &BTreeMap<String, f64>,
    x0: &[f64],
) -> Result<PotentialSpec> {
    let dim = x0.len();
    if dim == 0 || dim > 2 {
        return Err(Error::InvalidParam(format!(
            "base point must have 1 or 2 coordinates, got {dim}"
        )));
    }
    let fam = match family {
        "gaussian" => {
            let scale = params.get("scale").copied().unwrap_or(1.0);
            if scale <= 0.0 {
                return Err(Error::NonIntegrable {
                    family: family.into(),
                    reason: format!("scale = {scale} must be positive"),
                });
            }
            Family::Gaussian { scale }
        }
        "double_well" => {
            let a4 = require(params, family, "a4")?;
            let a2 = require(params, family, "a2")?;
            if a4 <= 0.0 {
                return Err(Error::NonIntegrable {
                    family: family.into(),
                    reason: format!("leading coefficient a4 = {a4} must be positive"),
                });
            }
            Family::DoubleWell { a4, a2 }
        }
        "quartic" => {
            let a4 = require(params, family, "a4")?;
            if a4 <= 0.0 {
                return Err(Error::NonIntegrable {
                    family: family.into(),
                    reason: format!("leading coefficient a4 = {a4} must be positive"),
                });
            }
            Family::Quartic { a4 }
        }
        "polynomial" => {
            if dim != 1 {
                return Err(Error::InvalidParam(
                    "polynomial family is one-dimensional only".into(),
                ));
            }
            // Coefficients arrive as c0, c1, c2, ...; trailing zeros dropped.
            let mut coeffs = vec![0.0; 0];
            for (key, &value) in params {
                let Some(idx) = key.strip_prefix('c').and_then(|s| s.parse::<usize>().ok()) else {
                    return Err(Error::InvalidParam(format!(
                        "polynomial coefficients are named c0, c1, ...; got `{key}`"
                    )));
                };
                if coeffs.len() <= idx {
                    coeffs.resize(idx + 1, 0.0);
                }
                coeffs[idx] = value;
            }
            while coeffs.last() == Some(&0.0) {
                coeffs.pop();
            }
            let degree = coeffs.len().saturating_sub(1);
            let leading = coeffs.last().copied().unwrap_or(0.0);
            if degree < 2 || degree % 2 != 0 || leading <= 0.0 {
                return Err(Error::NonIntegrable {
                    family: family.into(),
                    reason: format!(
                        "leading term c{degree} = {leading} must be positive with even degree >= 2"
                    ),
                });
            }
            Family::Polynomial { coeffs }
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    let mut base = [0.0, 0.0];
    base[..dim].copy_from_slice(x0);
    Ok(PotentialSpec { family: fam, x0: base, dim })
}

impl PotentialSpec {
    /// `V(x)`.
    pub fn value(&self, x: Point) -> f64 {
        let s = x[0] * x[0] + x[1] * x[1];
        match &self.family {
            Family::Gaussian { scale } => 0.5 * scale * s,
            Family::DoubleWell { a4, a2 } => a4 * s * s + a2 * s,
            Family::Quartic { a4 } => a4 * s * s,
            Family::Polynomial { coeffs } => horner(coeffs, x[0]),
        }
    }

    /// `∇V(x)`.
    pub fn gradient(&self, x: Point) -> Point {
        let s = x[0] * x[0] + x[1] * x[1];
        match &self.family {
            Family::Gaussian { scale } => [scale * x[0], scale * x[1]],
            Family::DoubleWell { a4, a2 } => {
                let g1 = 2.0 * a4 * s + a2; // g'(s) for V = g(|x|²)
                [2.0 * g1 * x[0], 2.0 * g1 * x[1]]
            }
            Family::Quartic { a4 } => {
                let g1 = 2.0 * a4 * s;
                [2.0 * g1 * x[0], 2.0 * g1 * x[1]]
            }
            Family::Polynomial { coeffs } => [horner(&derivative(coeffs), x[0]), 0.0],
        }
    }

    /// `Hess V(x)` as a symmetric 2×2 matrix; in dimension 1 only the `[0][0]`
    /// entry is meaningful.
    pub fn hessian(&self, x: Point) -> [[f64; 2]; 2] {
        let s = x[0] * x[0] + x[1] * x[1];
        match &self.family {
            Family::Gaussian { scale } => [[*scale, 0.0], [0.0, *scale]],
            Family::DoubleWell { a4, a2 } => radial_hessian(2.0 * a4 * s + a2, 2.0 * a4, x),
            Family::Quartic { a4 } => radial_hessian(2.0 * a4 * s, 2.0 * a4, x),
            Family::Polynomial { coeffs } => {
                let d2 = derivative(&derivative(coeffs));
                [[horner(&d2, x[0]), 0.0], [0.0, 0.0]]
            }
        }
    }

    /// Smallest eigenvalue of `Hess V(x)` restricted to the active dimension.
    pub fn hessian_min_eigenvalue(&self, x: Point) -> f64 {
        let h = self.hessian(x);
        if self.dim == 1 {
            h[0][0]
        } else {
            let tr = h[0][0] + h[1][1];
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
            0.5 * tr - disc
        }
    }
}

/// Hessian of a radial potential `V = g(|x|²)`: `2g'(s) I + 4g''(s) x xᵀ`.
fn radial_hessian(g1: f64, g2: f64, x: Point) -> [[f64; 2]; 2] {
    [
        [2.0 * g1 + 4.0 * g2 * x[0] * x[0], 4.0 * g2 * x[0] * x[1]],
        [4.0 * g2 * x[0] * x[1], 2.0 * g1 + 4.0 * g2 * x[1] * x[1]],
    ]
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Euclidean squared distance `|x − x₀|²` to the base point of `p`.
pub fn squared_distance(p: &PotentialSpec, x: Point) -> f64 {
    let dx = x[0] - p.x0[0];
    let dy = x[1] - p.x0[1];
    dx * dx + dy * dy
}

/// Infimum over the truncated domain (`[−R, R]^dim`) of the smallest Hessian
/// eigenvalue of `V`, reported as `kappa`, plus `K = max(−kappa, 0)`.
///
/// For the radial families the infimum has a closed form: both eigenvalue
/// branches `2g'(s)` and `2g'(s) + 4g''(s)s` are affine increasing in
/// `s = |x|²` when `a4 ≥ 0`, so the minimum sits at `s = 0`. Custom
/// polynomials are minimized numerically on a dense sample with parabolic
/// refinement.
pub fn curvature_lower_bound(p: &PotentialSpec, domain_radius: f64) -> Result<CurvatureBound> {
    if domain_radius <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "domain radius must be positive, got {domain_radius}"
        )));
    }
    let kappa = match &p.family {
        Family::Gaussian { scale } => *scale,
        Family::DoubleWell { a2, .. } => 2.0 * a2,
        Family::Quartic { .. } => 0.0,
        Family::Polynomial { coeffs } => {
            let d2 = derivative(&derivative(coeffs));
            min_on_interval(&d2, -domain_radius, domain_radius)
        }
    };
    Ok(CurvatureBound {
        kappa,
        k: (-kappa).max(0.0),
        log_concave: kappa > 0.0,
    })
}

/// Minimum of a polynomial on `[a, b]`: dense sampling plus one parabolic
/// refinement step around the best sample.
fn min_on_interval(coeffs: &[f64], a: f64, b: f64) -> f64 {
    const SAMPLES: usize = 100_001;
    let h = (b - a) / (SAMPLES - 1) as f64;
    let mut best = f64::INFINITY;
    let mut best_x = a;
    for i in 0..SAMPLES {
        let x = a + i as f64 * h;
        let v = horner(coeffs, x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    // Parabolic fit through (x−h, x, x+h) when the minimizer is interior.
    if best_x > a && best_x < b {
        let vm = horner(coeffs, best_x - h);
        let vp = horner(coeffs, best_x + h);
        let denom = vm - 2.0 * best + vp;
        if denom > 0.0 {
            let x_star = best_x + 0.5 * h * (vm - vp) / denom;
            best = best.min(horner(coeffs, x_star.clamp(a, b)));
        }
    }
    best
}

/// `V(x) = x²/2` in dimension 1: the standard normal potential.
pub fn standard_gaussian() -> PotentialSpec {
    PotentialSpec {
        family: Family::Gaussian { scale: 1.0 },
        x0: [0.0, 0.0],
        dim: 1,
    }
}

/// `V(x) = x⁴/4 − x²/2` in dimension 1: symmetric wells at `x = ±1`.
pub fn symmetric_double_well() -> PotentialSpec {
    PotentialSpec {
        family: Family::DoubleWell { a4: 0.25, a2: -0.5 },
        x0: [0.0, 0.0],
        dim: 1,
    }
}

/// `V(x) = x⁴/4` in dimension 1: flat curvature at the origin.
pub fn pure_quartic() -> PotentialSpec {
    PotentialSpec {
        family: Family::Quartic { a4: 0.25 },
        x0: [0.0, 0.0],
        dim: 1,
    }
}
