//! Eigendecomposition of the generator, the spectral gap `λ_μ`, and the exact
//! discrete heat flow `P_t f = Σ_k e^{−ν_k t} ⟨f, φ_k⟩_μ φ_k`.
//!
//! The generator is symmetrized by `D = diag(√μ_i)`; in dimension 1 the
//! symmetrized operator is tridiagonal and solved with Sturm bisection plus
//! inverse iteration (orthogonalizing within eigenvalue clusters), otherwise a
//! dense symmetric eigensolver runs under a node budget. An implicit-Euler
//! stepper with step-doubling control backs `P_t` on grids too large for a
//! full decomposition; it is inverse-positive, so positivity of the flow is
//! preserved exactly.

use crate::discretization::Generator;
use crate::error::{Error, Result};

/// Default node budget for the dense eigendecomposition backend.
pub const DEFAULT_DENSE_BUDGET: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Backend {
    Dense,
    Iterative,
}

/// Eigenpairs of `−L`: ascending nonnegative eigenvalues and μ-orthonormal
/// modes. Mode 0 is the constant function `1` with eigenvalue exactly `0`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub modes: Vec<Vec<f64>>,
    pub backend: Backend,
    /// Normalized measure weights, kept for the μ-inner products of the flow.
    pub weights: Vec<f64>,
}

/// Full eigendecomposition of `−L` with the default dense budget.
pub fn decompose(gen: &Generator) -> Result<SpectralDecomposition> {
    decompose_with_budget(gen, DEFAULT_DENSE_BUDGET)
}

/// Full eigendecomposition of `−L`; fails if the node count exceeds `budget`.
pub fn decompose_with_budget(gen: &Generator, budget: usize) -> Result<SpectralDecomposition> {
    let n = gen.len();
    if n > budget {
        return Err(Error::DenseBudgetExceeded { nodes: n, budget });
    }
    let weights = gen.measure.weights.clone();

    let (eigenvalues, raw_modes) = if let Some((d, e)) = gen.sym_neg_tridiagonal() {
        let tnorm = tridiag::inf_norm(&d, &e);
        let vals = tridiag::eigenvalues(&d, &e);
        let vecs = tridiag::eigenvectors(&d, &e, &vals, tnorm)?;
        (vals, vecs)
    } else {
        let mat = gen.sym_neg_dense();
        let eig = nalgebra::linalg::SymmetricEigen::try_new(mat, f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigensolve("dense symmetric eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vecs: Vec<Vec<f64>> = order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect();
        (vals, vecs)
    };

    if eigenvalues[0] > 1e-10 {
        return Err(Error::Eigensolve(format!(
            "smallest eigenvalue {:.3e} of -L is not numerically zero",
            eigenvalues[0]
        )));
    }

    // Map ℓ²-orthonormal vectors w to μ-orthonormal modes φ_i = w_i/√μ_i, fix
    // a deterministic sign, and pin the ergodic mode to the exact constant.
    let mut modes = Vec::with_capacity(n);
    for (k, w) in raw_modes.into_iter().enumerate() {
        if k == 0 {
            modes.push(vec![1.0; n]);
            continue;
        }
        let mut phi: Vec<f64> = w
            .iter()
            .zip(&weights)
            .map(|(&wi, &mu)| wi / mu.sqrt())
            .collect();
        let mut idx = 0;
        let mut best = 0.0;
        for (i, &v) in w.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                idx = i;
            }
        }
        if w[idx] < 0.0 {
            for v in &mut phi {
                *v = -*v;
            }
        }
        modes.push(phi);
    }
    let mut eigenvalues = eigenvalues;
    eigenvalues[0] = 0.0;

    Ok(SpectralDecomposition { eigenvalues, modes, backend: Backend::Dense, weights })
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// μ-inner product against mode `k`.
    pub fn coefficient(&self, f: &[f64], k: usize) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .zip(&self.modes[k])
            .map(|((w, v), m)| w * v * m)
            .sum()
    }

    /// All expansion coefficients `⟨f, φ_k⟩_μ`.
    pub fn coefficients(&self, f: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|k| self.coefficient(f, k)).collect()
    }

    /// `P_t f` through the spectral representation; `t ≥ 0`.
    pub fn heat_apply(&self, f: &[f64], t: f64) -> Result<Vec<f64>> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        assert_eq!(f.len(), self.len());
        let n = self.len();
        let coeffs = self.coefficients(f);
        let mut out = vec![0.0; n];
        for k in 0..n {
            let factor = (-self.eigenvalues[k] * t).exp() * coeffs[k];
            if factor == 0.0 {
                continue;
            }
            let mode = &self.modes[k];
            for i in 0..n {
                out[i] += factor * mode[i];
            }
        }
        Ok(out)
    }
}

/// The spectral gap `λ_μ = ν₁`; errors out when it is numerically zero
/// (a disconnected generator, impossible with this stencil).
pub fn spectral_gap(dec: &SpectralDecomposition) -> Result<f64> {
    let nu1 = dec.eigenvalues[1];
    if nu1 <= 1e-10 {
        return Err(Error::ZeroSpectralGap(nu1));
    }
    Ok(nu1)
}

/// `P_t f` (free-function form of [`SpectralDecomposition::heat_apply`]).
pub fn heat_apply(dec: &SpectralDecomposition, f: &[f64], t: f64) -> Result<Vec<f64>> {
    dec.heat_apply(f, t)
}

/// Heat propagator abstraction: exact spectral flow, or an implicit-Euler
/// stepper for grids where a full decomposition is not affordable.
#[derive(Clone, Copy)]
pub enum HeatPropagator<'a> {
    Spectral(&'a SpectralDecomposition),
    ImplicitEuler { gen: &'a Generator, tol: f64 },
}

impl<'a> HeatPropagator<'a> {
    pub fn apply(&self, f: &[f64], t: f64) -> Result<Vec<f64>> {
        match self {
            HeatPropagator::Spectral(dec) => dec.heat_apply(f, t),
            HeatPropagator::ImplicitEuler { gen, tol } => implicit_euler_heat(gen, f, t, *tol),
        }
    }
}

/// `P_t f` by implicit Euler with step-doubling error control. Each step
/// solves `(I − δL)u = v`, i.e. `(I + δS)(Du) = Dv` for the SPD symmetrized
/// operator, so positivity and mass conservation carry over from the
/// M-matrix structure.
pub fn implicit_euler_heat(gen: &Generator, f: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(f.to_vec());
    }
    let (d, e) = gen
        .sym_neg_tridiagonal()
        .ok_or_else(|| Error::Eigensolve("implicit Euler stepper is one-dimensional".into()))?;
    let n = gen.len();
    let sqrt_mass: Vec<f64> = (0..n).map(|i| gen.mass(i).sqrt()).collect();
    let to_sym = |v: &[f64]| -> Vec<f64> { v.iter().zip(&sqrt_mass).map(|(x, s)| x * s).collect() };
    let from_sym =
        |v: &[f64]| -> Vec<f64> { v.iter().zip(&sqrt_mass).map(|(x, s)| x / s).collect() };

    let run = |steps: usize| -> Vec<f64> {
        let delta = t / steps as f64;
        let dd: Vec<f64> = d.iter().map(|&v| 1.0 + delta * v).collect();
        let ee: Vec<f64> = e.iter().map(|&v| delta * v).collect();
        let factor = tridiag::SpdFactor::new(&dd, &ee);
        let mut w = to_sym(f);
        for _ in 0..steps {
            w = factor.solve(&w);
        }
        from_sym(&w)
    };

    let mut steps = 16usize;
    let mut coarse = run(steps);
    let scale = f.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-30);
    for _ in 0..14 {
        steps *= 2;
        let fine = run(steps);
        let err = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        coarse = fine;
        // implicit Euler is first order: step doubling halves the error
        if err <= tol * scale {
            return Ok(coarse);
        }
    }
    Ok(coarse)
}

/// Symmetric tridiagonal spectral kernels: Sturm counts, bisection,
/// inverse iteration, and SPD solves.
pub(crate) mod tridiag {
    use crate::error::{Error, Result};

    /// Infinity norm of the tridiagonal matrix `(d, e)`.
    pub fn inf_norm(d: &[f64], e: &[f64]) -> f64 {
        let n = d.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
                let right = if i < n - 1 { e[i].abs() } else { 0.0 };
                d[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Number of eigenvalues strictly below `lambda` (Sturm/LDLᵀ pivot count).
    pub fn sturm_count(d: &[f64], e: &[f64], lambda: f64) -> usize {
        let n = d.len();
        let mut count = 0;
        let mut q = d[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let q_safe = if q.abs() < 1e-300 {
                if q >= 0.0 { 1e-300 } else { -1e-300 }
            } else {
                q
            };
            q = (d[i] - lambda) - e[i - 1] * e[i - 1] / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// All eigenvalues in ascending order by bisection on the Sturm count.
    pub fn eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
        let n = d.len();
        if n == 1 {
            return vec![d[0]];
        }
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..n {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = if i < n - 1 { e[i].abs() } else { 0.0 };
            lo = lo.min(d[i] - left - right);
            hi = hi.max(d[i] + left + right);
        }
        lo -= 1e-12 * (1.0 + hi.abs());
        hi += 1e-12 * (1.0 + hi.abs());

        (0..n)
            .map(|k| {
                let mut a = lo;
                let mut b = hi;
                for _ in 0..80 {
                    let mid = 0.5 * (a + b);
                    if (b - a) <= 2.0 * f64::EPSILON * mid.abs().max(1e-30) {
                        break;
                    }
                    if sturm_count(d, e, mid) <= k {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }

    /// LU factorization of `T − λI` with partial pivoting (three-band U),
    /// the solver behind inverse iteration.
    struct PivotFactor {
        u0: Vec<f64>,
        u1: Vec<f64>,
        u2: Vec<f64>,
        mult: Vec<f64>,
        swap: Vec<bool>,
    }

    impl PivotFactor {
        fn new(d: &[f64], e: &[f64], lambda: f64, tnorm: f64) -> Self {
            let n = d.len();
            let tiny = f64::EPSILON * tnorm.max(1.0);
            let mut u0: Vec<f64> = d.iter().map(|&v| v - lambda).collect();
            let mut u1 = vec![0.0; n];
            let mut u2 = vec![0.0; n];
            u1[..n - 1].copy_from_slice(e);
            let mut mult = vec![0.0; n.saturating_sub(1)];
            let mut swap = vec![false; n.saturating_sub(1)];
            for i in 0..n - 1 {
                let sub = e[i];
                if u0[i].abs() >= sub.abs() {
                    let pivot = if u0[i].abs() < tiny {
                        if u0[i] >= 0.0 { tiny } else { -tiny }
                    } else {
                        u0[i]
                    };
                    u0[i] = pivot;
                    let m = sub / pivot;
                    mult[i] = m;
                    u0[i + 1] -= m * u1[i];
                } else {
                    // swap rows i and i+1
                    swap[i] = true;
                    let (old_u0, old_u1) = (u0[i], u1[i]);
                    u0[i] = sub;
                    u1[i] = u0[i + 1];
                    u2[i] = if i + 1 < n - 1 { u1[i + 1] } else { 0.0 };
                    let m = old_u0 / sub;
                    mult[i] = m;
                    u0[i + 1] = old_u1 - m * u1[i];
                    if i + 1 < n - 1 {
                        u1[i + 1] = -m * u2[i];
                    }
                }
            }
            if u0[n - 1].abs() < tiny {
                u0[n - 1] = if u0[n - 1] >= 0.0 { tiny } else { -tiny };
            }
            PivotFactor { u0, u1, u2, mult, swap }
        }

        fn solve(&self, rhs: &[f64]) -> Vec<f64> {
            let n = self.u0.len();
            let mut x = rhs.to_vec();
            for i in 0..n - 1 {
                if self.swap[i] {
                    x.swap(i, i + 1);
                }
                x[i + 1] -= self.mult[i] * x[i];
            }
            x[n - 1] /= self.u0[n - 1];
            if n >= 2 {
                x[n - 2] = (x[n - 2] - self.u1[n - 2] * x[n - 1]) / self.u0[n - 2];
            }
            for i in (0..n.saturating_sub(2)).rev() {
                x[i] = (x[i] - self.u1[i] * x[i + 1] - self.u2[i] * x[i + 2]) / self.u0[i];
            }
            x
        }
    }

    fn norm2(v: &[f64]) -> f64 {
        v.iter().map(|&x| x * x).sum::<f64>().sqrt()
    }

    fn residual_inf(d: &[f64], e: &[f64], lambda: f64, w: &[f64]) -> f64 {
        let n = d.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut r = (d[i] - lambda) * w[i];
            if i > 0 {
                r += e[i - 1] * w[i - 1];
            }
            if i < n - 1 {
                r += e[i] * w[i + 1];
            }
            worst = worst.max(r.abs());
        }
        worst
    }

    /// Inverse iteration for every eigenvalue, with Gram–Schmidt inside
    /// eigenvalue clusters so near-degenerate modes stay orthogonal.
    pub fn eigenvectors(
        d: &[f64],
        e: &[f64],
        vals: &[f64],
        tnorm: f64,
    ) -> Result<Vec<Vec<f64>>> {
        let n = d.len();
        // Pairs closer than this get explicit Gram–Schmidt; anything farther
        // apart is orthogonal to ~eps·‖T‖/gap ≤ 4e-13 on its own.
        let cluster_gap = 2.5e-4 * tnorm.max(1.0);
        let sep = 10.0 * f64::EPSILON * tnorm.max(1.0);
        // Residual budget ties directly to mode orthogonality: cross-talk
        // between non-clustered modes is residual/gap ≤ 2·20·eps/2.5e-4 ≈ 4e-11.
        let res_tol = 20.0 * f64::EPSILON * tnorm.max(1.0);
        let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut shifted = vec![0.0; n];

        for k in 0..n {
            let mut lambda = vals[k];
            if k > 0 && lambda - shifted[k - 1] < sep {
                lambda = shifted[k - 1] + sep;
            }
            shifted[k] = lambda;
            let factor = PivotFactor::new(d, e, lambda, tnorm);

            // deterministic pseudo-random start
            let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ (k as u64).wrapping_mul(0x2545_f491_4f6c_dd1d);
            let mut w: Vec<f64> = (0..n)
                .map(|_| {
                    state = state
                        .wrapping_mul(6_364_136_223_846_793_005)
                        .wrapping_add(1_442_695_040_888_963_407);
                    ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
                })
                .collect();
            let nr = norm2(&w);
            w.iter_mut().for_each(|x| *x /= nr);

            let cluster_start = (0..k)
                .rev()
                .take_while(|&j| vals[k] - vals[j] <= cluster_gap)
                .last()
                .unwrap_or(k);

            let mut converged = false;
            for _ in 0..6 {
                w = factor.solve(&w);
                let nr = norm2(&w);
                if !nr.is_finite() || nr == 0.0 {
                    return Err(Error::Eigensolve(format!(
                        "inverse iteration blew up at eigenvalue index {k}"
                    )));
                }
                w.iter_mut().for_each(|x| *x /= nr);
                for j in cluster_start..k {
                    let proj: f64 = w.iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                    w.iter_mut().zip(&vecs[j]).for_each(|(a, b)| *a -= proj * b);
                }
                let nr = norm2(&w);
                if nr < 1e-2 {
                    // start vector lived almost entirely in the cluster span; reseed
                    state ^= 0xdead_beef_cafe_f00d;
                    for x in w.iter_mut() {
                        state = state
                            .wrapping_mul(6_364_136_223_846_793_005)
                            .wrapping_add(1_442_695_040_888_963_407);
                        *x = ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                    }
                    continue;
                }
                w.iter_mut().for_each(|x| *x /= nr);
                if residual_inf(d, e, vals[k], &w) <= res_tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Eigensolve(format!(
                    "inverse iteration failed to converge at eigenvalue index {k}"
                )));
            }
            vecs.push(w);
        }
        Ok(vecs)
    }

    /// LDLᵀ factorization of an SPD tridiagonal matrix (no pivoting needed).
    pub struct SpdFactor {
        dl: Vec<f64>,
        l: Vec<f64>,
    }

    impl SpdFactor {
        pub fn new(d: &[f64], e: &[f64]) -> Self {
            let n = d.len();
            let mut dl = vec![0.0; n];
            let mut l = vec![0.0; n.saturating_sub(1)];
            dl[0] = d[0];
            for i in 0..n - 1 {
                l[i] = e[i] / dl[i];
                dl[i + 1] = d[i + 1] - l[i] * e[i];
            }
            SpdFactor { dl, l }
        }

        /// Smallest pivot, a cheap positive-definiteness witness.
        pub fn min_pivot(&self) -> f64 {
            self.dl.iter().copied().fold(f64::INFINITY, f64::min)
        }

        pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
            let n = self.dl.len();
            let mut x = rhs.to_vec();
            for i in 0..n - 1 {
                x[i + 1] -= self.l[i] * x[i];
            }
            for i in 0..n {
                x[i] /= self.dl[i];
            }
            for i in (0..n - 1).rev() {
                x[i] -= self.l[i] * x[i + 1];
            }
            x
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_generator, build_grid, build_measure};
    use crate::potentials::{standard_gaussian, PotentialSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(points: usize) -> (crate::discretization::Grid, crate::discretization::WeightedMeasure, Generator, SpectralDecomposition)
    {
        let p = standard_gaussian();
        let g = build_grid(1, 8.0, points).unwrap();
        let m = build_measure(&p, &g).unwrap();
        let gen = build_generator(&p, &g, &m).unwrap();
        let dec = decompose(&gen).unwrap();
        (g, m, gen, dec)
    }

    #[test]
    fn ou_spectrum_first_modes() {
        let (_, _, _, dec) = setup(2001);
        assert!(dec.eigenvalues[0].abs() <= 1e-10);
        assert!((dec.eigenvalues[1] - 1.0).abs() < 1e-3, "nu1 = {}", dec.eigenvalues[1]);
        assert!((dec.eigenvalues[2] - 2.0).abs() < 5e-3, "nu2 = {}", dec.eigenvalues[2]);
        assert_eq!(spectral_gap(&dec).unwrap(), dec.eigenvalues[1]);
    }

    #[test]
    fn neumann_laplacian_gap() {
        // V = 0 on [−R, R]: ν₁ = (π/(2R))², here R = π/2 so ν₁ = 1.
        let flat = PotentialSpec {
            family: crate::potentials::Family::Gaussian { scale: 1e-300 },
            x0: [0.0, 0.0],
            dim: 1,
        };
        let r = std::f64::consts::FRAC_PI_2;
        let errs: Vec<f64> = [201usize, 401]
            .iter()
            .map(|&n| {
                let g = build_grid(1, r, n).unwrap();
                let m = build_measure(&flat, &g).unwrap();
                let gen = build_generator(&flat, &g, &m).unwrap();
                let dec = decompose(&gen).unwrap();
                (spectral_gap(&dec).unwrap() - 1.0).abs()
            })
            .collect();
        assert!(errs[0] < 2e-4, "coarse error {}", errs[0]);
        assert!(errs[1] < errs[0] / 3.5, "not O(h²): {errs:?}");
    }

    #[test]
    fn modes_mu_orthonormal() {
        let (_, m, _, dec) = setup(1001);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // adjacent pairs stress near-degenerate cluster handling; random pairs cover the rest
        let mut pairs: Vec<(usize, usize)> = (0..dec.len() - 1).map(|k| (k, k + 1)).collect();
        for _ in 0..500 {
            pairs.push((rng.random_range(0..dec.len()), rng.random_range(0..dec.len())));
        }
        for (k, l) in pairs {
            let ip = m.inner(&dec.modes[k], &dec.modes[l]);
            let expected = if k == l { 1.0 } else { 0.0 };
            assert!(
                (ip - expected).abs() <= 1e-10,
                "<phi_{k}, phi_{l}>_mu = {ip}"
            );
        }
    }

    #[test]
    fn ergodic_mode_is_constant() {
        let (_, _, _, dec) = setup(501);
        assert_eq!(dec.eigenvalues[0], 0.0);
        assert!(dec.modes[0].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn heat_flow_basics() {
        let (g, m, _, dec) = setup(1001);
        let ones = vec![1.0; g.len()];
        let pt1 = dec.heat_apply(&ones, 3.7).unwrap();
        assert!(pt1.iter().all(|&v| (v - 1.0).abs() <= 1e-12));

        // P_0 f = f in L²(μ); pointwise only on the bulk, where the modes are
        // O(1) (they blow up like e^{x²/4} at the rim).
        let x: Vec<f64> = g.nodes().map(|p| p[0]).collect();
        let p0 = dec.heat_apply(&x, 0.0).unwrap();
        let diff: Vec<f64> = p0.iter().zip(&x).map(|(a, b)| a - b).collect();
        assert!(m.inner(&diff, &diff).sqrt() <= 1e-10);
        for (i, p) in g.nodes().enumerate() {
            if p[0].abs() <= 4.0 {
                assert!((p0[i] - x[i]).abs() <= 1e-8);
            }
        }

        // OU: P_t x = e^{−t} x on the bulk
        let pt = dec.heat_apply(&x, 1.0).unwrap();
        let decay = (-1.0f64).exp();
        for (i, p) in g.nodes().enumerate() {
            if p[0].abs() <= 4.0 {
                assert!(
                    (pt[i] - decay * p[0]).abs() < 1e-3,
                    "P_1 x at {}: {} vs {}",
                    p[0],
                    pt[i],
                    decay * p[0]
                );
            }
        }

        // mass conservation and the ergodic limit
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f: Vec<f64> = (0..g.len()).map(|_| rng.random_range(0.0..2.0)).collect();
        let mean = m.mean(&f);
        let pt = dec.heat_apply(&f, 2.3).unwrap();
        assert!((m.mean(&pt) - mean).abs() <= 1e-10);
        assert!(pt.iter().all(|&v| v >= -1e-10), "positivity violated");
        let plimit = dec.heat_apply(&f, 50.0).unwrap();
        assert!(plimit.iter().all(|&v| (v - mean).abs() <= 1e-10), "ergodic limit missed");

        assert!(matches!(dec.heat_apply(&f, -0.5), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn semigroup_property() {
        let (g, m, _, dec) = setup(401);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let f: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s = rng.random_range(0.0..5.0);
            let t = rng.random_range(0.0..5.0);
            let two_step = dec.heat_apply(&dec.heat_apply(&f, s).unwrap(), t).unwrap();
            let one_step = dec.heat_apply(&f, s + t).unwrap();
            let diff: Vec<f64> = two_step.iter().zip(&one_step).map(|(a, b)| a - b).collect();
            let err = m.inner(&diff, &diff).sqrt();
            assert!(err <= 1e-10, "semigroup property broken: |diff|_mu = {err:.3e}");
        }
    }

    #[test]
    fn contraction_energy_entropy_monotone() {
        use crate::discretization::{dirichlet_energy, entropy};
        let p = crate::potentials::symmetric_double_well();
        let g = build_grid(1, 6.0, 601).unwrap();
        let m = build_measure(&p, &g).unwrap();
        let gen = build_generator(&p, &g, &m).unwrap();
        let dec = decompose(&gen).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f: Vec<f64> = g
            .nodes()
            .map(|pt| (0.4 * (pt[0] * 1.3).sin() + 0.2 * (pt[0] * 0.7).cos() + rng.random_range(-0.05..0.05)).exp())
            .collect();
        let mean = m.mean(&f);
        let times = [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
        let mut prev_l2 = f64::INFINITY;
        let mut prev_energy = f64::INFINITY;
        let mut prev_ent_sq = f64::INFINITY;
        let mut prev_ent_f2 = f64::INFINITY;
        let f2: Vec<f64> = f.iter().map(|v| v * v).collect();
        for &t in &times {
            let pt = dec.heat_apply(&f, t).unwrap();
            let ptf2 = dec.heat_apply(&f2, t).unwrap();
            let diff: Vec<f64> = pt.iter().map(|v| v - mean).collect();
            let l2 = m.inner(&diff, &diff);
            let energy = dirichlet_energy(&gen, &pt);
            let ptsq: Vec<f64> = pt.iter().map(|v| v * v).collect();
            let ent_sq = entropy(&m, &ptsq).unwrap();
            let ptf2c: Vec<f64> = ptf2.iter().map(|v| v.max(0.0)).collect();
            let ent_f2 = entropy(&m, &ptf2c).unwrap();
            let slack = 1e-10;
            assert!(l2 <= prev_l2 + slack, "L2 contraction failed at t={t}");
            assert!(energy <= prev_energy + slack, "energy monotonicity failed at t={t}");
            assert!(ent_sq <= prev_ent_sq + slack, "Ent((P_t f)^2) grew at t={t}");
            assert!(ent_f2 <= prev_ent_f2 + slack, "Ent(P_t f^2) grew at t={t}");
            prev_l2 = l2;
            prev_energy = energy;
            prev_ent_sq = ent_sq;
            prev_ent_f2 = ent_f2;
        }
    }

    #[test]
    fn deep_double_well_gap_small_positive() {
        // V = x⁴ − 3x²: wells at ±√1.5 with barrier height 2.25, so the
        // tunneling gap is small but strictly positive.
        let p = PotentialSpec {
            family: crate::potentials::Family::DoubleWell { a4: 1.0, a2: -3.0 },
            x0: [0.0, 0.0],
            dim: 1,
        };
        let gaps: Vec<f64> = [601usize, 1201]
            .iter()
            .map(|&n| {
                let g = build_grid(1, 4.0, n).unwrap();
                let m = build_measure(&p, &g).unwrap();
                let gen = build_generator(&p, &g, &m).unwrap();
                spectral_gap(&decompose(&gen).unwrap()).unwrap()
            })
            .collect();
        assert!(gaps[1] > 1e-8 && gaps[1] < 0.5, "gap = {}", gaps[1]);
        assert!((gaps[0] - gaps[1]).abs() / gaps[1] < 1e-2, "resolutions disagree: {gaps:?}");
    }

    #[test]
    fn dense_backend_two_dimensional() {
        let p = PotentialSpec { dim: 2, ..standard_gaussian() };
        let g = build_grid(2, 4.0, 21).unwrap();
        let m = build_measure(&p, &g).unwrap();
        let gen = build_generator(&p, &g, &m).unwrap();
        let dec = decompose(&gen).unwrap();
        assert!(dec.eigenvalues[0].abs() <= 1e-10);
        // product OU: ν₁ = ν₂ = 1 (degenerate pair), coarse grid tolerance
        assert!((dec.eigenvalues[1] - 1.0).abs() < 5e-2, "nu1 = {}", dec.eigenvalues[1]);
        assert!((dec.eigenvalues[2] - 1.0).abs() < 5e-2, "nu2 = {}", dec.eigenvalues[2]);

        for (k, l) in [(0usize, 1usize), (1, 2), (2, 3), (5, 9)] {
            let ip = m.inner(&dec.modes[k], &dec.modes[l]);
            assert!(ip.abs() <= 1e-10, "2-D orthonormality: <{k},{l}> = {ip}");
        }
        let ip = m.inner(&dec.modes[1], &dec.modes[1]);
        assert!((ip - 1.0).abs() <= 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let two = dec.heat_apply(&dec.heat_apply(&f, 0.4).unwrap(), 0.8).unwrap();
        let one = dec.heat_apply(&f, 1.2).unwrap();
        for (a, b) in two.iter().zip(&one) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn dense_budget_guard() {
        let p = PotentialSpec { dim: 2, ..standard_gaussian() };
        let g = build_grid(2, 4.0, 70).unwrap();
        let m = build_measure(&p, &g).unwrap();
        let gen = build_generator(&p, &g, &m).unwrap();
        assert!(matches!(
            decompose(&gen),
            Err(Error::DenseBudgetExceeded { nodes: 4900, budget: 4096 })
        ));
    }

    #[test]
    fn implicit_euler_matches_spectral() {
        let (g, _, gen, dec) = setup(201);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let f: Vec<f64> = (0..g.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        let exact = dec.heat_apply(&f, 0.7).unwrap();
        let stepped = implicit_euler_heat(&gen, &f, 0.7, 1e-7).unwrap();
        for (a, b) in exact.iter().zip(&stepped) {
            assert!((a - b).abs() < 1e-5, "stepper vs spectral: {a} vs {b}");
        }
        let prop = HeatPropagator::ImplicitEuler { gen: &gen, tol: 1e-7 };
        let via_prop = prop.apply(&f, 0.7).unwrap();
        assert_eq!(via_prop, stepped);
    }
}
