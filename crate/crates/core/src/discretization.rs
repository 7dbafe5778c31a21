//! Two-panel summation-by-parts discretization.
//!
//! The domain `[a, b]` is split at the interface into panel⁻ = `[a, l]` and
//! panel⁺ = `[l, b]`. Both panels carry a node at `l`, so the one-sided
//! traces at `l⁻` and `l⁺` are independent unknowns. Each panel uses the
//! second-order diagonal-norm SBP operator `D = H⁻¹ Q` with
//! `H D + Dᵀ H = diag(−1, 0, …, 0, 1)`.
//!
//! Global node numbering runs over panel⁻ then panel⁺; a state stores the
//! two channels of node `g` at `2g` and `2g + 1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{p1, BlockDiag, Mat2};
use crate::model::{DomainSpec, MaterialPair, Side};
use crate::scalar::{count, lit, to_f64, Real};

/// Minimum number of nodes per panel.
pub const MIN_PANEL_NODES: usize = 4;

/// Second-order diagonal-norm SBP first-derivative operator on a uniform
/// panel.
#[derive(Debug, Clone, PartialEq)]
pub struct SbpOperator<T> {
    d: DMatrix<T>,
    norm: DVector<T>,
    spacing: T,
}

impl<T: Real> SbpOperator<T> {
    pub fn new(n: usize, spacing: T) -> Self {
        let half = lit::<T>(0.5);
        let mut norm = DVector::from_element(n, spacing);
        norm[0] = spacing * half;
        norm[n - 1] = spacing * half;

        let mut d = DMatrix::zeros(n, n);
        let inv_h = T::one() / spacing;
        d[(0, 0)] = -inv_h;
        d[(0, 1)] = inv_h;
        for i in 1..n - 1 {
            d[(i, i - 1)] = -half * inv_h;
            d[(i, i + 1)] = half * inv_h;
        }
        d[(n - 1, n - 2)] = -inv_h;
        d[(n - 1, n - 1)] = inv_h;
        Self { d, norm, spacing }
    }

    pub fn len(&self) -> usize {
        self.norm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norm.is_empty()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.d
    }

    /// Diagonal of the norm matrix H (quadrature weights).
    pub fn norm(&self) -> &DVector<T> {
        &self.norm
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Boundary matrix B = diag(−1, 0, …, 0, 1).
    pub fn boundary(&self) -> DMatrix<T> {
        let n = self.len();
        let mut b = DMatrix::zeros(n, n);
        b[(0, 0)] = -T::one();
        b[(n - 1, n - 1)] = T::one();
        b
    }

    /// max |H D + Dᵀ H − B|.
    pub fn identity_residual(&self) -> T {
        let hd = DMatrix::from_diagonal(&self.norm) * &self.d;
        (&hd + hd.transpose() - self.boundary()).amax()
    }

    /// D x using the three-point stencil.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        let inv_h = T::one() / self.spacing;
        let half = lit::<T>(0.5);
        let mut out = vec![T::zero(); n];
        out[0] = (x[1] - x[0]) * inv_h;
        for i in 1..n - 1 {
            out[i] = (x[i + 1] - x[i - 1]) * half * inv_h;
        }
        out[n - 1] = (x[n - 1] - x[n - 2]) * inv_h;
        out
    }
}

/// Uniform nodes of one panel with its SBP operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel<T> {
    pub nodes: Vec<T>,
    pub op: SbpOperator<T>,
}

impl<T: Real> Panel<T> {
    fn uniform(from: T, to: T, n: usize) -> Self {
        let h = (to - from) / count::<T>(n - 1);
        let mut nodes: Vec<T> = (0..n).map(|i| from + h * count::<T>(i)).collect();
        nodes[n - 1] = to;
        Self { nodes, op: SbpOperator::new(n, h) }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> T {
        self.op.spacing()
    }
}

/// Two panels `[a, l]` and `[l, b]` with a duplicated node at `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelGrid<T> {
    pub a: T,
    pub b: T,
    pub l: T,
    pub minus: Panel<T>,
    pub plus: Panel<T>,
}

/// Global node indices of the four traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceNodes {
    pub a: usize,
    pub l_minus: usize,
    pub l_plus: usize,
    pub b: usize,
}

/// Builds the two-panel grid for interface position `l`.
pub fn build_grid<T: Real>(dom: &DomainSpec<T>, l: T, n_minus: usize, n_plus: usize) -> Result<PanelGrid<T>> {
    if n_minus < MIN_PANEL_NODES || n_plus < MIN_PANEL_NODES {
        return Err(Error::Grid(format!(
            "each panel needs at least {MIN_PANEL_NODES} nodes, got {n_minus} and {n_plus}"
        )));
    }
    if !(dom.a < l && l < dom.b) {
        return Err(Error::Grid(format!("interface {l} not inside ({}, {})", dom.a, dom.b)));
    }
    let h_minus = (l - dom.a) / count::<T>(n_minus - 1);
    let h_plus = (dom.b - l) / count::<T>(n_plus - 1);
    let four = lit::<T>(4.0);
    if l - dom.a < four * h_plus || dom.b - l < four * h_minus {
        return Err(Error::Grid(format!(
            "degenerate panel: lengths {} and {} against spacings {h_plus} and {h_minus}",
            l - dom.a,
            dom.b - l
        )));
    }
    Ok(PanelGrid {
        a: dom.a,
        b: dom.b,
        l,
        minus: Panel::uniform(dom.a, l, n_minus),
        plus: Panel::uniform(l, dom.b, n_plus),
    })
}

/// Background lattice `zᵢ = a + (b − a) i / N` shared by grids whose interface
/// sits on a lattice node. Such grids have bitwise identical node positions,
/// which makes them comparable in one common space.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T> {
    pub dom: DomainSpec<T>,
    pub nodes: Vec<T>,
}

impl<T: Real> Lattice<T> {
    pub fn new(dom: DomainSpec<T>, n_cells: usize) -> Result<Self> {
        if n_cells < 2 * MIN_PANEL_NODES {
            return Err(Error::Grid(format!("lattice needs at least {} cells", 2 * MIN_PANEL_NODES)));
        }
        let nodes = (0..=n_cells)
            .map(|i| dom.a + (dom.b - dom.a) * count::<T>(i) / count::<T>(n_cells))
            .collect();
        Ok(Self { dom, nodes })
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn spacing(&self) -> T {
        (self.dom.b - self.dom.a) / count::<T>(self.n_cells())
    }

    /// Admissible interface node indices: both panels get at least four cells.
    pub fn admissible(&self) -> std::ops::RangeInclusive<usize> {
        MIN_PANEL_NODES..=self.n_cells() - MIN_PANEL_NODES
    }

    /// Nearest admissible lattice node to `l`.
    pub fn snap(&self, l: T) -> usize {
        let r = to_f64((l - self.dom.a) / self.spacing()).round().max(0.0) as usize;
        r.clamp(*self.admissible().start(), *self.admissible().end())
    }

    /// Two-panel grid with its interface on lattice node `j`.
    pub fn grid(&self, j: usize) -> Result<PanelGrid<T>> {
        if !self.admissible().contains(&j) {
            return Err(Error::Grid(format!("interface node {j} outside {:?}", self.admissible())));
        }
        let h = self.spacing();
        let panel = |nodes: &[T]| Panel { nodes: nodes.to_vec(), op: SbpOperator::new(nodes.len(), h) };
        Ok(PanelGrid {
            a: self.dom.a,
            b: self.dom.b,
            l: self.nodes[j],
            minus: panel(&self.nodes[..=j]),
            plus: panel(&self.nodes[j..]),
        })
    }
}

/// Grid with about `n_total` nodes split between the panels in proportion to
/// their lengths, so both panels get comparable spacings.
pub fn build_grid_balanced<T: Real>(dom: &DomainSpec<T>, l: T, n_total: usize) -> Result<PanelGrid<T>> {
    let frac = to_f64((l - dom.a) / dom.length());
    let n_minus = ((frac * n_total as f64).round() as usize).max(MIN_PANEL_NODES);
    let n_plus = n_total.saturating_sub(n_minus).max(MIN_PANEL_NODES);
    build_grid(dom, l, n_minus, n_plus)
}

impl<T: Real> PanelGrid<T> {
    pub fn n_minus(&self) -> usize {
        self.minus.len()
    }

    pub fn n_plus(&self) -> usize {
        self.plus.len()
    }

    /// Total number of nodes, counting the interface twice.
    pub fn n_nodes(&self) -> usize {
        self.n_minus() + self.n_plus()
    }

    /// Length of a state vector.
    pub fn dim(&self) -> usize {
        2 * self.n_nodes()
    }

    pub fn traces(&self) -> TraceNodes {
        let nm = self.n_minus();
        TraceNodes { a: 0, l_minus: nm - 1, l_plus: nm, b: self.n_nodes() - 1 }
    }

    /// Panel a global node belongs to.
    pub fn side_of(&self, g: usize) -> Side {
        if g < self.n_minus() {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    pub fn z(&self, g: usize) -> T {
        let nm = self.n_minus();
        if g < nm {
            self.minus.nodes[g]
        } else {
            self.plus.nodes[g - nm]
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n_nodes()).map(|g| self.z(g)).collect()
    }

    /// Quadrature weight of a global node.
    pub fn weight(&self, g: usize) -> T {
        let nm = self.n_minus();
        if g < nm {
            self.minus.op.norm()[g]
        } else {
            self.plus.op.norm()[g - nm]
        }
    }

    pub fn weights(&self) -> Vec<T> {
        (0..self.n_nodes()).map(|g| self.weight(g)).collect()
    }

    /// Largest node spacing.
    pub fn max_spacing(&self) -> T {
        self.minus.spacing().max(self.plus.spacing())
    }

    pub fn min_spacing(&self) -> T {
        self.minus.spacing().min(self.plus.spacing())
    }

    fn split<'a>(&self, x: &'a [T]) -> (&'a [T], &'a [T]) {
        x.split_at(self.n_minus())
    }

    /// Q_l at every node: Q⁻ on panel⁻ (including the l⁻ copy), Q⁺ on panel⁺.
    pub fn q_l_field(&self, mat: &MaterialPair<T>) -> BlockDiag<T> {
        BlockDiag::new((0..self.n_nodes()).map(|g| mat.eval(self.side_of(g), self.z(g))).collect())
    }

    /// Q₀ at every node: Q⁻ for z < 0, Q⁺ for z > 0. At z = 0 an interface
    /// copy keeps its panel's side and an interior node takes the mean of the
    /// two one-sided values (the trapezoid weight straddles both sides).
    pub fn q_ref_field(&self, mat: &MaterialPair<T>) -> BlockDiag<T> {
        let tr = self.traces();
        BlockDiag::new(
            (0..self.n_nodes())
                .map(|g| {
                    let z = self.z(g);
                    if z < T::zero() {
                        mat.eval(Side::Minus, z)
                    } else if z > T::zero() {
                        mat.eval(Side::Plus, z)
                    } else if g == tr.l_minus || g == tr.l_plus {
                        mat.eval(self.side_of(g), z)
                    } else {
                        (mat.eval(Side::Minus, z) + mat.eval(Side::Plus, z)) * lit::<T>(0.5)
                    }
                })
                .collect(),
        )
    }

    /// Mass matrix ½ wᵢ Q(zᵢ) of the weighted inner product for a nodal field.
    pub fn mass(&self, field: &BlockDiag<T>) -> BlockDiag<T> {
        let half = lit::<T>(0.5);
        BlockDiag::new(
            field
                .blocks
                .iter()
                .enumerate()
                .map(|(g, q)| q * (half * self.weight(g)))
                .collect(),
        )
    }

    /// Dense matrix of the discrete J, acting on co-energy states.
    pub fn j_matrix(&self) -> DMatrix<T> {
        let n = self.dim();
        let mut j = DMatrix::zeros(n, n);
        for (offset, panel) in [(0, &self.minus), (self.n_minus(), &self.plus)] {
            let d = panel.op.matrix();
            for r in 0..panel.len() {
                for c in 0..panel.len() {
                    let v = d[(r, c)];
                    if v != T::zero() {
                        // (J w)_1 = −D w_2, (J w)_2 = −D w_1
                        j[(2 * (offset + r), 2 * (offset + c) + 1)] = -v;
                        j[(2 * (offset + r) + 1, 2 * (offset + c))] = -v;
                    }
                }
            }
        }
        j
    }

    /// Discrete L² pairing Σ wᵢ xᵢ yᵢ of scalar fields.
    pub fn l2_pairing(&self, x: &[T], y: &[T]) -> T {
        (0..self.n_nodes()).fold(T::zero(), |acc, g| acc + self.weight(g) * x[g] * y[g])
    }
}

/// Nodal state: an ℝ² value per node of both panels.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    pub values: DVector<T>,
}

impl<T: Real> StateVector<T> {
    pub fn zeros(grid: &PanelGrid<T>) -> Self {
        Self { values: DVector::zeros(grid.dim()) }
    }

    pub fn from_vector(values: DVector<T>) -> Self {
        Self { values }
    }

    /// Samples `f(z, side)` at every node.
    pub fn from_fn(grid: &PanelGrid<T>, f: impl Fn(T, Side) -> [T; 2]) -> Self {
        let mut values = DVector::zeros(grid.dim());
        for g in 0..grid.n_nodes() {
            let v = f(grid.z(g), grid.side_of(g));
            values[2 * g] = v[0];
            values[2 * g + 1] = v[1];
        }
        Self { values }
    }

    /// Builds a state from two scalar channels.
    pub fn from_channels(x1: &[T], x2: &[T]) -> Self {
        let mut values = DVector::zeros(2 * x1.len());
        for (g, (&u, &v)) in x1.iter().zip(x2).enumerate() {
            values[2 * g] = u;
            values[2 * g + 1] = v;
        }
        Self { values }
    }

    pub fn n_nodes(&self) -> usize {
        self.values.len() / 2
    }

    /// Channel 0 or 1 as a scalar field.
    pub fn channel(&self, c: usize) -> Vec<T> {
        (0..self.n_nodes()).map(|g| self.values[2 * g + c]).collect()
    }

    pub fn node(&self, g: usize) -> nalgebra::Vector2<T> {
        nalgebra::Vector2::new(self.values[2 * g], self.values[2 * g + 1])
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Nodal multiplication by a field of 2×2 matrices.
    pub fn mul_field(&self, field: &BlockDiag<T>) -> Self {
        Self { values: field.mul_vec(&self.values) }
    }
}

/// d_l x = −D x per panel, for x in the single-trace space.
pub fn apply_dl<T: Real>(grid: &PanelGrid<T>, x: &[T]) -> Vec<T> {
    let (xm, xp) = grid.split(x);
    grid.minus.op.apply(xm).into_iter().chain(grid.plus.op.apply(xp)).map(|v| -v).collect()
}

/// d_l* y = +D y per panel; y may jump at the interface.
pub fn apply_dl_star<T: Real>(grid: &PanelGrid<T>, y: &[T]) -> Vec<T> {
    let (ym, yp) = grid.split(y);
    grid.minus.op.apply(ym).into_iter().chain(grid.plus.op.apply(yp)).collect()
}

/// J w = (d_l w₂, −d_l* w₁); equals P₁ d/dz on each panel.
pub fn apply_j<T: Real>(grid: &PanelGrid<T>, w: &StateVector<T>) -> StateVector<T> {
    let c1 = apply_dl(grid, &w.channel(1));
    let c2: Vec<T> = apply_dl_star(grid, &w.channel(0)).into_iter().map(|v| -v).collect();
    StateVector::from_channels(&c1, &c2)
}

/// ½ Σᵢ wᵢ yᵢᵀ Q(zᵢ) xᵢ.
pub fn weighted_inner<T: Real>(
    grid: &PanelGrid<T>,
    q: &BlockDiag<T>,
    x: &StateVector<T>,
    y: &StateVector<T>,
) -> T {
    grid.mass(q).bilinear(&y.values, &x.values)
}

fn check_jump<T: Real>(left: T, right: T, tol: T) -> Result<()> {
    let jump = (right - left).abs();
    if jump > tol {
        return Err(Error::Trace { jump: to_f64(jump), tol: to_f64(tol) });
    }
    Ok(())
}

/// ⟨d_l x, y⟩ + [x y]ₐᵇ − x(l)(y(l⁺) − y(l⁻)) − ⟨x, d_l* y⟩ in the discrete
/// L² pairing. Vanishes up to round-off by the SBP identity.
///
/// `x` must be continuous at the interface within `tol`.
pub fn adjoint_residual<T: Real>(grid: &PanelGrid<T>, x: &[T], y: &[T], tol: T) -> Result<T> {
    let tr = grid.traces();
    check_jump(x[tr.l_minus], x[tr.l_plus], tol)?;
    let lhs = grid.l2_pairing(&apply_dl(grid, x), y);
    let rhs = grid.l2_pairing(x, &apply_dl_star(grid, y));
    let boundary = x[tr.b] * y[tr.b] - x[tr.a] * y[tr.a];
    let interface = x[tr.l_minus] * (y[tr.l_plus] - y[tr.l_minus]);
    Ok(lhs + boundary - interface - rhs)
}

/// ⟨J u, v⟩ + ⟨u, J v⟩ − [uᵀ P₁ v]ₐᵇ − u₂(l)[v₁(l⁺) − v₁(l⁻)] − v₂(l)[u₁(l⁺) − u₁(l⁻)]
/// for co-energy states u = Q x, v = Q y.
///
/// Channel 2 of both states must be continuous at the interface within `tol`.
pub fn skew_residual<T: Real>(grid: &PanelGrid<T>, u: &StateVector<T>, v: &StateVector<T>, tol: T) -> Result<T> {
    let tr = grid.traces();
    check_jump(u.values[2 * tr.l_minus + 1], u.values[2 * tr.l_plus + 1], tol)?;
    check_jump(v.values[2 * tr.l_minus + 1], v.values[2 * tr.l_plus + 1], tol)?;
    let pairing = |p: &StateVector<T>, q: &StateVector<T>| {
        (0..grid.n_nodes()).fold(T::zero(), |acc, g| acc + grid.weight(g) * p.node(g).dot(&q.node(g)))
    };
    let lhs = pairing(&apply_j(grid, u), v) + pairing(u, &apply_j(grid, v));
    let p = p1::<T>();
    let form = |g: usize| u.node(g).dot(&(p * v.node(g)));
    let boundary = form(tr.b) - form(tr.a);
    let (u1m, u1p, u2) = (u.values[2 * tr.l_minus], u.values[2 * tr.l_plus], u.values[2 * tr.l_minus + 1]);
    let (v1m, v1p, v2) = (v.values[2 * tr.l_minus], v.values[2 * tr.l_plus], v.values[2 * tr.l_minus + 1]);
    Ok(lhs - boundary - u2 * (v1p - v1m) - v2 * (u1p - u1m))
}

/// Nodal field of constant matrices, handy for tests and examples.
pub fn constant_field<T: Real>(grid: &PanelGrid<T>, q: Mat2<T>) -> BlockDiag<T> {
    BlockDiag::new(vec![q; grid.n_nodes()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> PanelGrid<f64> {
        let dom = DomainSpec::new(-1.0, 1.0, 0.0).unwrap();
        build_grid(&dom, 0.0, n, n).unwrap()
    }

    #[test]
    fn uniform_nodes_and_trapezoid_weights() {
        let g = grid(5);
        assert_eq!(g.minus.nodes, vec![-1.0, -0.75, -0.5, -0.25, 0.0]);
        let w: Vec<f64> = g.minus.op.norm().iter().copied().collect();
        assert_eq!(w, vec![0.125, 0.25, 0.25, 0.25, 0.125]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_grids_rejected() {
        let dom = DomainSpec::new(-1.0, 1.0, 0.0).unwrap();
        assert!(build_grid(&dom, -1.0, 5, 5).is_err());
        assert!(build_grid(&dom, 0.0, 3, 5).is_err());
        // panel⁻ of length 0.05 against panel⁺ spacing 1.95/4
        assert!(build_grid(&dom, -0.95, 5, 5).is_err());
    }

    #[test]
    fn sbp_identity_holds_for_all_sizes() {
        for n in 4..=64 {
            let op = SbpOperator::new(n, 0.37 / (n - 1) as f64);
            assert!(op.identity_residual() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn dl_on_constants_and_linears() {
        let g = grid(9);
        let ones = vec![1.0; g.n_nodes()];
        assert!(apply_dl(&g, &ones).iter().all(|v| v.abs() < 1e-14));
        let z = g.nodes();
        assert!(apply_dl(&g, &z).iter().all(|v| (v + 1.0).abs() < 1e-13));
        assert!(apply_dl_star(&g, &z).iter().all(|v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn dl_on_quadratic_is_second_order_inside() {
        let errs: Vec<f64> = [17, 33, 65]
            .iter()
            .map(|&n| {
                let g = grid(n);
                let z = g.nodes();
                let z2: Vec<f64> = z.iter().map(|v| v * v).collect();
                let d = apply_dl(&g, &z2);
                (1..n - 1).map(|i| (d[i] + 2.0 * z[i]).abs()).fold(0.0, f64::max)
            })
            .collect();
        // central differences are exact on quadratics
        assert!(errs.iter().all(|e| *e < 1e-12), "{errs:?}");
    }

    #[test]
    fn dl_star_ignores_step_at_interface() {
        let g = grid(7);
        let step: Vec<f64> = (0..g.n_nodes()).map(|i| if g.side_of(i) == Side::Plus { 1.0 } else { 0.0 }).collect();
        assert!(apply_dl_star(&g, &step).iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn j_on_linear_channels() {
        let g = grid(9);
        let w = StateVector::from_fn(&g, |z, _| [z, 0.0]);
        let jw = apply_j(&g, &w);
        assert!(jw.channel(0).iter().all(|v| v.abs() < 1e-14));
        assert!(jw.channel(1).iter().all(|v| (v + 1.0).abs() < 1e-13));
        let w = StateVector::from_fn(&g, |z, _| [0.0, z]);
        let jw = apply_j(&g, &w);
        assert!(jw.channel(0).iter().all(|v| (v + 1.0).abs() < 1e-13));
        // dense J agrees with the stencil version
        let dense = g.j_matrix() * &w.values;
        assert!((dense - jw.values).amax() < 1e-13);
    }

    #[test]
    fn weighted_inner_factor_half_and_bilinearity() {
        let g = grid(9);
        let total: f64 = g.weights().iter().sum();
        let x = StateVector::from_fn(&g, |_, _| [1.0 / total.sqrt(), 0.0]);
        let id = constant_field(&g, Mat2::identity());
        assert!((weighted_inner(&g, &id, &x, &x) - 0.5).abs() < 1e-14);
        let two = constant_field(&g, Mat2::identity() * 2.0);
        assert!((weighted_inner(&g, &two, &x, &x) - 1.0).abs() < 1e-14);
        let y = StateVector::from_fn(&g, |_, _| [0.0, 1.0]);
        assert_eq!(weighted_inner(&g, &id, &x, &y), 0.0);
    }

    #[test]
    fn adjoint_identity_for_linears() {
        let g = grid(9);
        let x = g.nodes();
        let y = vec![1.0; g.n_nodes()];
        assert!(adjoint_residual(&g, &x, &y, 1e-12).unwrap().abs() < 1e-14);
        let zero = vec![0.0; g.n_nodes()];
        assert_eq!(adjoint_residual(&g, &zero, &y, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn skew_identity_for_constants_and_compact_support() {
        let g = grid(11);
        let u = StateVector::from_fn(&g, |_, _| [1.5, -0.5]);
        let v = StateVector::from_fn(&g, |_, _| [0.25, 2.0]);
        assert!(skew_residual(&g, &u, &v, 1e-12).unwrap().abs() < 1e-13);

        let bump = StateVector::from_fn(&g, |z, _| {
            let s = ((z + 0.5) * 4.0).clamp(-1.0, 1.0);
            let b = (1.0 - s * s).powi(2);
            [b, 0.3 * b]
        });
        let jb = apply_j(&g, &bump);
        let pair: f64 = (0..g.n_nodes()).map(|i| g.weight(i) * jb.node(i).dot(&bump.node(i))).sum();
        assert!(pair.abs() < 1e-13);
    }

    #[test]
    fn skew_rejects_channel_two_jump() {
        let g = grid(7);
        let tr = g.traces();
        let mut u = StateVector::from_fn(&g, |_, _| [1.0, 1.0]);
        u.values[2 * tr.l_plus + 1] += 1e-6;
        let v = u.clone();
        assert!(matches!(skew_residual(&g, &u, &v, 1e-9), Err(Error::Trace { .. })));
    }

    #[test]
    fn f32_sbp_identity() {
        let op = SbpOperator::<f32>::new(16, 0.1);
        assert!(op.identity_residual() < 1e-6);
    }
}
