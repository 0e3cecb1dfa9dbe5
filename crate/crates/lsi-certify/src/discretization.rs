//! Uniform grid, normalized Gibbs measure, and the discrete generator
//! `L = Δ − ∇V·∇`, assembled so that μ-symmetry is exact.
//!
//! The stencil is a vertex-centered finite volume: conductance of the edge
//! between neighbouring nodes `i ∼ j` is `e^{−V(midpoint)} · area / h`, and
//!
//! ```text
//! (Lf)_i = (1/(e^{−V_i} vol_i)) Σ_{j∼i} cond_ij (f_j − f_i).
//! ```
//!
//! Cells at the domain boundary are halved (quarter cells at 2-D corners), the
//! trapezoidal treatment of a reflecting boundary. With those volumes the
//! identity `E(f, g) = −⟨f, Lg⟩_μ` holds exactly by construction, `L1 = 0`
//! exactly, off-diagonal entries are nonnegative, and `−L` symmetrizes to a
//! Z-matrix with nonnegative diagonal. Potentials are shifted by `min V`
//! before exponentiating, so only the ratio `e^{−V}/Z` ever matters.

use crate::error::{Error, Result};
use crate::potentials::{Point, PotentialSpec};

/// Grid configuration: dimension, truncation radius, points per axis.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct GridSpec {
    pub dim: usize,
    pub radius: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        build_grid(self.dim, self.radius, self.points)
    }
}

/// Uniform tensor grid on `[−R, R]^dim` with `N` points per axis,
/// `h = 2R/(N−1)`; axis endpoints sit exactly on `±R`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub dim: usize,
    pub radius: f64,
    pub points_per_axis: usize,
    pub spacing: f64,
    axis: Vec<f64>,
}

impl Grid {
    /// Total node count `N^dim`.
    pub fn len(&self) -> usize {
        self.axis.len().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of node `i` (second coordinate zero in dimension 1).
    /// Ordering: the x index varies fastest.
    pub fn node(&self, i: usize) -> Point {
        let n = self.points_per_axis;
        match self.dim {
            1 => [self.axis[i], 0.0],
            _ => [self.axis[i % n], self.axis[i / n]],
        }
    }

    /// Per-axis indices of node `i`.
    fn indices(&self, i: usize) -> (usize, usize) {
        let n = self.points_per_axis;
        match self.dim {
            1 => (i, 0),
            _ => (i % n, i / n),
        }
    }

    /// Whether node `i` touches the domain boundary.
    pub fn is_boundary(&self, i: usize) -> bool {
        let n = self.points_per_axis;
        let (ix, iy) = self.indices(i);
        ix == 0 || ix == n - 1 || (self.dim == 2 && (iy == 0 || iy == n - 1))
    }

    /// Finite-volume cell of node `i`: `h^dim`, halved per boundary axis.
    pub fn cell_volume(&self, i: usize) -> f64 {
        let n = self.points_per_axis;
        let (ix, iy) = self.indices(i);
        let mut vol = self.spacing.powi(self.dim as i32);
        if ix == 0 || ix == n - 1 {
            vol *= 0.5;
        }
        if self.dim == 2 && (iy == 0 || iy == n - 1) {
            vol *= 0.5;
        }
        vol
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }
}

/// Builds the uniform grid; `radius > 0` and `points ≥ 3` required.
pub fn build_grid(dim: usize, radius: f64, points: usize) -> Result<Grid> {
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidGrid(format!("radius must be positive, got {radius}")));
    }
    if points < 3 {
        return Err(Error::InvalidGrid(format!("need at least 3 points per axis, got {points}")));
    }
    let spacing = 2.0 * radius / (points - 1) as f64;
    // radius·(2i − (N−1))/(N−1): exactly antisymmetric in floating point, so
    // symmetric potentials produce exactly symmetric weights.
    let denom = (points - 1) as f64;
    let mut axis: Vec<f64> = (0..points)
        .map(|i| radius * ((2 * i) as f64 - denom) / denom)
        .collect();
    axis[0] = -radius;
    axis[points - 1] = radius;
    Ok(Grid { dim, radius, points_per_axis: points, spacing, axis })
}

/// Normalized node weights of `μ ∝ e^{−V}` (they sum to one exactly up to
/// roundoff), plus the raw normalization in shifted units and the boundary
/// tail indicator used to judge the truncation radius.
#[derive(Debug, Clone)]
pub struct WeightedMeasure {
    pub weights: Vec<f64>,
    /// `Σ_i e^{−(V_i − min V)} vol_i` — the normalization before the `e^{−min V}` factor.
    pub z_shifted: f64,
    /// `min_i V(x_i)`, the shift applied before exponentiating.
    pub v_shift: f64,
    /// `max_boundary e^{−V} / max_all e^{−V}`; small values mean the
    /// reflecting truncation is harmless.
    pub tail_ratio: f64,
}

impl WeightedMeasure {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `μ(f) = Σ μ_i f_i`.
    pub fn mean(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// `⟨f, g⟩_μ`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights.iter().zip(f).zip(g).map(|((w, a), b)| w * a * b).sum()
    }
}

/// Builds the normalized measure `μ_i ∝ e^{−V(x_i)} vol_i` on the grid.
///
/// Fails if a weight underflows to zero (truncation radius too large for the
/// potential); the fix is to shrink `grid.radius`.
pub fn build_measure(p: &PotentialSpec, g: &Grid) -> Result<WeightedMeasure> {
    if p.dim != g.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, got: g.dim });
    }
    let n = g.len();
    let values: Vec<f64> = (0..n).map(|i| p.value(g.node(i))).collect();
    let v_shift = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights = vec![0.0; n];
    let mut z = 0.0;
    let mut max_hat = 0.0f64;
    let mut max_boundary_hat = 0.0f64;
    for i in 0..n {
        let hat = (-(values[i] - v_shift)).exp();
        if hat == 0.0 {
            return Err(Error::Overflow(format!(
                "e^{{-V}} underflows at node {i} (V - min V = {:.1}); reduce grid.radius",
                values[i] - v_shift
            )));
        }
        max_hat = max_hat.max(hat);
        if g.is_boundary(i) {
            max_boundary_hat = max_boundary_hat.max(hat);
        }
        let w = hat * g.cell_volume(i);
        weights[i] = w;
        z += w;
    }
    for w in &mut weights {
        *w /= z;
    }
    Ok(WeightedMeasure {
        weights,
        z_shifted: z,
        v_shift,
        tail_ratio: max_boundary_hat / max_hat,
    })
}

/// One finite-volume edge `a ∼ b` with conductance `e^{−V(mid)}·area/h`
/// (in shifted units).
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub cond: f64,
}

/// The discrete generator, symmetric in `L²(μ)` by construction.
#[derive(Debug, Clone)]
pub struct Generator {
    pub grid: Grid,
    pub measure: WeightedMeasure,
    /// Unnormalized node masses `e^{−(V_i − min V)} vol_i`; `μ_i = mass_i / z_shifted`.
    mass: Vec<f64>,
    edges: Vec<Edge>,
    /// Diagonal of `L` (nonpositive): `L_ii = −Σ_j cond_ij / mass_i`.
    diag: Vec<f64>,
}

/// Assembles the finite-volume stencil for `L = Δ − ∇V·∇` with reflecting
/// (zero-flux) boundary: boundary nodes simply have no outward edges.
pub fn build_generator(p: &PotentialSpec, g: &Grid, m: &WeightedMeasure) -> Result<Generator> {
    if m.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: g.len(), got: m.len() });
    }
    let n = g.len();
    let npa = g.points_per_axis;
    let h = g.spacing;
    let mass: Vec<f64> = (0..n)
        .map(|i| (-(p.value(g.node(i)) - m.v_shift)).exp() * g.cell_volume(i))
        .collect();

    let mut edges = Vec::with_capacity(g.dim * n);
    let mut push_edge = |a: usize, b: usize, area: f64| {
        let pa = g.node(a);
        let pb = g.node(b);
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        let cond = (-(p.value(mid) - m.v_shift)).exp() * area / h;
        edges.push(Edge { a, b, cond });
    };

    match g.dim {
        1 => {
            for i in 0..n - 1 {
                push_edge(i, i + 1, 1.0);
            }
        }
        _ => {
            for iy in 0..npa {
                let row_area = if iy == 0 || iy == npa - 1 { 0.5 * h } else { h };
                for ix in 0..npa - 1 {
                    push_edge(iy * npa + ix, iy * npa + ix + 1, row_area);
                }
            }
            for ix in 0..npa {
                let col_area = if ix == 0 || ix == npa - 1 { 0.5 * h } else { h };
                for iy in 0..npa - 1 {
                    push_edge(iy * npa + ix, (iy + 1) * npa + ix, col_area);
                }
            }
        }
    }

    let mut diag = vec![0.0; n];
    for e in &edges {
        diag[e.a] -= e.cond / mass[e.a];
        diag[e.b] -= e.cond / mass[e.b];
    }

    Ok(Generator { grid: g.clone(), measure: m.clone(), mass, edges, diag })
}

impl Generator {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Unnormalized node mass `e^{−(V_i − min V)} vol_i`.
    pub fn mass(&self, i: usize) -> f64 {
        self.mass[i]
    }

    /// `(Lf)_i = (1/mass_i) Σ_{j∼i} cond_ij (f_j − f_i)` — row sums vanish
    /// identically and off-diagonal entries are nonnegative.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.len(), "grid function has wrong length");
        let mut out = vec![0.0; f.len()];
        for e in &self.edges {
            let df = f[e.b] - f[e.a];
            out[e.a] += e.cond * df;
            out[e.b] -= e.cond * df;
        }
        for (i, v) in out.iter_mut().enumerate() {
            *v /= self.mass[i];
        }
        out
    }

    /// Symmetrized `−L` as a tridiagonal pair `(diag, offdiag)` in dimension 1:
    /// `S = D(−L)D⁻¹` with `D = diag(√mass)`.
    pub fn sym_neg_tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.grid.dim != 1 {
            return None;
        }
        let n = self.len();
        let d: Vec<f64> = self.diag.iter().map(|&v| -v).collect();
        let mut e = vec![0.0; n - 1];
        for edge in &self.edges {
            let (a, b) = (edge.a.min(edge.b), edge.a.max(edge.b));
            debug_assert_eq!(b, a + 1);
            e[a] = -edge.cond / (self.mass[a] * self.mass[b]).sqrt();
        }
        Some((d, e))
    }

    /// Symmetrized `−L` as a dense matrix (any dimension).
    pub fn sym_neg_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.len();
        let mut mat = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            mat[(i, i)] = -self.diag[i];
        }
        for e in &self.edges {
            let v = -e.cond / (self.mass[e.a] * self.mass[e.b]).sqrt();
            mat[(e.a, e.b)] = v;
            mat[(e.b, e.a)] = v;
        }
        mat
    }

    /// Upper bound for `‖L‖_∞` (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        self.diag.iter().map(|d| 2.0 * d.abs()).fold(0.0, f64::max)
    }
}

/// Dirichlet form `E(f, g) = Σ_edges cond·(f_b − f_a)(g_b − g_a) / Z`, sharing
/// the stencil's edge conductances so that `E(f, g) = −⟨f, Lg⟩_μ` exactly.
pub fn dirichlet_form(gen: &Generator, f: &[f64], g: &[f64]) -> f64 {
    assert_eq!(f.len(), gen.len());
    assert_eq!(g.len(), gen.len());
    let mut acc = 0.0;
    for e in gen.edges() {
        acc += e.cond * (f[e.b] - f[e.a]) * (g[e.b] - g[e.a]);
    }
    acc / gen.measure.z_shifted
}

/// `E(f, f)`, always nonnegative (a sum of squares).
pub fn dirichlet_energy(gen: &Generator, f: &[f64]) -> f64 {
    dirichlet_form(gen, f, f)
}

/// Entropy `Ent(g) = μ(g log g) − μg · log μg` for `g ≥ 0`, with `0·log 0 = 0`.
///
/// Computed through the equivalent kernel `Σ μ_i [g_i log(g_i/ḡ) − g_i + ḡ]`
/// whose terms are pointwise nonnegative, so the result is nonnegative in
/// floating point as well.
pub fn entropy(m: &WeightedMeasure, g: &[f64]) -> Result<f64> {
    assert_eq!(g.len(), m.len());
    for (i, &v) in g.iter().enumerate() {
        if v < 0.0 {
            return Err(Error::NegativeEntry { op: "entropy", index: i, value: v });
        }
    }
    let gbar = m.mean(g);
    if gbar == 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for (&w, &v) in m.weights.iter().zip(g) {
        let term = if v == 0.0 { gbar } else { v * (v / gbar).ln() - v + gbar };
        acc += w * term;
    }
    Ok(acc)
}

/// `Var_μ(f) = μ(f²) − (μf)²`, evaluated as `μ((f − μf)²)` so it stays
/// nonnegative.
pub fn variance(m: &WeightedMeasure, f: &[f64]) -> f64 {
    let mean = m.mean(f);
    m.weights
        .iter()
        .zip(f)
        .map(|(w, v)| {
            let d = v - mean;
            w * d * d
        })
        .sum()
}
