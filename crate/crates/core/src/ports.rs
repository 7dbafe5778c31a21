//! Boundary and interface port variables, the structural assumptions on
//! materials (A1) and boundary/interface conditions (A2), and the projector
//! onto states satisfying the domain conditions.

use nalgebra::{DMatrix, DVector, SMatrix, Vector2};

use crate::discretization::{PanelGrid, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{orthogonal_complement, p1, sym2_eigenvalues, BlockDiag, Mat2};
use crate::model::{refine_extremum, MaterialPair, Side};
use crate::scalar::{lit, to_f64, Real};

/// Boundary condition matrix W_B (2×4, acting on `[f∂; e∂]`) and interface
/// gain r in `f_I = r e_I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec<T: Real> {
    pub w_b: SMatrix<T, 2, 4>,
    pub r: T,
}

impl<T: Real> BoundarySpec<T> {
    /// W_B from its 8 entries in row-major order.
    pub fn new(w_b: [T; 8], r: T) -> Result<Self> {
        if w_b.iter().any(|v| !v.is_finite()) || !r.is_finite() {
            return Err(Error::Parameter("boundary matrix and gain must be finite".into()));
        }
        Ok(Self { w_b: SMatrix::from_row_slice(&w_b), r })
    }

    /// W_B = [I 0]: f∂ = 0, a lossless boundary.
    pub fn conservative() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self::new([o, z, z, z, z, o, z, z], z).unwrap()
    }

    /// W_B = (1/√2)[I I]: f∂ + e∂ = 0, so ⟨e∂, f∂⟩ = −|f∂|².
    pub fn dissipative() -> Self {
        let s = T::one() / lit::<T>(2.0).sqrt();
        let z = T::zero();
        Self::new([s, z, s, z, z, s, z, s], z).unwrap()
    }

    /// Σ = [[0, I], [I, 0]].
    pub fn sigma() -> SMatrix<T, 4, 4> {
        let mut s = SMatrix::<T, 4, 4>::zeros();
        for i in 0..2 {
            s[(i, i + 2)] = T::one();
            s[(i + 2, i)] = T::one();
        }
        s
    }

    /// W_B Σ W_Bᵀ.
    pub fn power_form(&self) -> Mat2<T> {
        self.w_b * Self::sigma() * self.w_b.transpose()
    }
}

/// Port variables of a co-energy state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortVariables<T: Real> {
    pub f_boundary: Vector2<T>,
    pub e_boundary: Vector2<T>,
    pub f_interface: T,
    pub e_interface: T,
}

/// (f∂, e∂) from the co-energy traces at a and b.
pub fn boundary_ports<T: Real>(u_a: Vector2<T>, u_b: Vector2<T>) -> (Vector2<T>, Vector2<T>) {
    let s = T::one() / lit::<T>(2.0).sqrt();
    ((p1::<T>() * (u_b - u_a)) * s, (u_b + u_a) * s)
}

/// (f_I, e_I) from the one-sided co-energy traces at l. Channel 2 must agree
/// on both sides within `tol`.
pub fn interface_ports<T: Real>(u_lminus: Vector2<T>, u_lplus: Vector2<T>, tol: T) -> Result<(T, T)> {
    let jump = (u_lplus[1] - u_lminus[1]).abs();
    if jump > tol {
        return Err(Error::Trace { jump: to_f64(jump), tol: to_f64(tol) });
    }
    Ok((u_lplus[1], -(u_lplus[0] - u_lminus[0])))
}

/// Default continuity tolerance 1e-9 · m · ‖x‖∞.
pub fn trace_tolerance<T: Real>(m: T, x: &StateVector<T>) -> T {
    lit::<T>(1e-9) * m * x.values.amax()
}

/// Port variables of a co-energy state `u = Q_l x` on a grid.
pub fn port_variables<T: Real>(grid: &PanelGrid<T>, u: &StateVector<T>, tol: T) -> Result<PortVariables<T>> {
    let tr = grid.traces();
    let (f_boundary, e_boundary) = boundary_ports(u.node(tr.a), u.node(tr.b));
    let (f_interface, e_interface) = interface_ports(u.node(tr.l_minus), u.node(tr.l_plus), tol)?;
    Ok(PortVariables { f_boundary, e_boundary, f_interface, e_interface })
}

/// ⟨e∂, f∂⟩ − e_I f_I, the rate of change of the Hamiltonian.
pub fn power_balance_terms<T: Real>(p: &PortVariables<T>) -> T {
    p.e_boundary.dot(&p.f_boundary) - p.e_interface * p.f_interface
}

/// Trace side of the skew-symmetry identity minus its port form:
/// `[uᵀP₁v]ₐᵇ + u₂(l)[v₁] + v₂(l)[u₁]` against
/// `⟨e∂ᵥ, f∂ᵤ⟩ + ⟨e∂ᵤ, f∂ᵥ⟩ − f_Iᵤ e_Iᵥ − f_Iᵥ e_Iᵤ`.
pub fn pairing_residual<T: Real>(grid: &PanelGrid<T>, u: &StateVector<T>, v: &StateVector<T>, tol: T) -> Result<T> {
    let tr = grid.traces();
    let p = p1::<T>();
    let traces = u.node(tr.b).dot(&(p * v.node(tr.b))) - u.node(tr.a).dot(&(p * v.node(tr.a)))
        + u.values[2 * tr.l_plus + 1] * (v.values[2 * tr.l_plus] - v.values[2 * tr.l_minus])
        + v.values[2 * tr.l_plus + 1] * (u.values[2 * tr.l_plus] - u.values[2 * tr.l_minus]);
    let pu = port_variables(grid, u, tol)?;
    let pv = port_variables(grid, v, tol)?;
    let ports = pv.e_boundary.dot(&pu.f_boundary) + pu.e_boundary.dot(&pv.f_boundary)
        - pu.f_interface * pv.e_interface
        - pv.f_interface * pu.e_interface;
    Ok(traces - ports)
}

/// Energy-density jump e_l = −ℋ⁻(l) + ℋ⁺(l) with ℋ± = ½ xᵀ Q± x at l±.
pub fn energy_density_jump<T: Real>(grid: &PanelGrid<T>, mat: &MaterialPair<T>, x: &StateVector<T>) -> T {
    let tr = grid.traces();
    let half = lit::<T>(0.5);
    let density = |g: usize, side: Side| {
        let xi = x.node(g);
        xi.dot(&(mat.eval(side, grid.l) * xi)) * half
    };
    density(tr.l_plus, Side::Plus) - density(tr.l_minus, Side::Minus)
}

/// Outcome of the material ratio assumption check.
#[derive(Debug, Clone, PartialEq)]
pub struct A1Report<T> {
    pub pass: bool,
    pub diagonal: bool,
    /// q₁₁⁺/q₁₁⁻ at z = 0.
    pub ratio_at_zero: T,
    /// sup_z |q₁₁⁺/q₁₁⁻ − q₂₂⁺/q₂₂⁻|.
    pub ratio_mismatch: T,
    pub mismatch_z: T,
}

/// Checks that Q± are diagonal, q₁₁⁺/q₁₁⁻(0) = 1, and that the two diagonal
/// ratios agree everywhere.
pub fn check_a1<T: Real>(mat: &MaterialPair<T>, nsamples: usize, tol: T) -> A1Report<T> {
    let ratio = |i: usize, z: T| mat.eval(Side::Plus, z)[(i, i)] / mat.eval(Side::Minus, z)[(i, i)];
    let ratio_at_zero = ratio(0, T::zero());
    let zs = mat.sample_points(nsamples);
    let (mismatch_z, ratio_mismatch) = refine_extremum(&zs, |z| (ratio(0, z) - ratio(1, z)).abs());
    let diagonal = mat.is_diagonal();
    let pass = diagonal && (ratio_at_zero - T::one()).abs() <= tol && ratio_mismatch <= tol;
    A1Report { pass, diagonal, ratio_at_zero, ratio_mismatch, mismatch_z }
}

/// Outcome of the boundary/interface condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct A2Report<T> {
    pub pass: bool,
    pub r_zero: bool,
    pub rank: usize,
    pub singular_values: [T; 2],
    /// Eigenvalues (min, max) of W_B Σ W_Bᵀ.
    pub eigenvalues: (T, T),
}

/// Checks r = 0, rank W_B = 2 and W_B Σ W_Bᵀ ⪰ 0.
pub fn check_a2<T: Real>(bc: &BoundarySpec<T>) -> A2Report<T> {
    let sv = bc.w_b.singular_values();
    let (s0, s1) = (sv[0].max(sv[1]), sv[0].min(sv[1]));
    let floor = lit::<T>(1e-10) * s0;
    let rank = [s0, s1].iter().filter(|s| **s > floor && **s > T::zero()).count();
    let eigenvalues = sym2_eigenvalues(&bc.power_form());
    let r_zero = bc.r == T::zero();
    let pass = r_zero && rank == 2 && eigenvalues.0 >= lit::<T>(-1e-12);
    A2Report { pass, r_zero, rank, singular_values: [s0, s1], eigenvalues }
}

/// Inner product in which the constraint projector is orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionNorm {
    /// Q₀-weighted, the norm of the stability estimate.
    Reference,
    /// Q_l-weighted, the energy norm of the frozen generator.
    Energy,
}

/// Constraint rows acting on x: `W_B [f∂; e∂] = 0`, channel-2 continuity of
/// Q_l x at l, and `f_I − r e_I = 0`.
pub fn constraint_rows<T: Real>(grid: &PanelGrid<T>, mat: &MaterialPair<T>, bc: &BoundarySpec<T>) -> DMatrix<T> {
    let n = grid.dim();
    let tr = grid.traces();
    let q_l = grid.q_l_field(mat);
    let mut c = DMatrix::zeros(4, n);
    let s = T::one() / lit::<T>(2.0).sqrt();
    let p = p1::<T>();

    // [f∂; e∂] = T_ab [u_a; u_b] with u = Q x at the boundary nodes.
    let mut t = SMatrix::<T, 4, 4>::zeros();
    t.fixed_view_mut::<2, 2>(0, 0).copy_from(&(-p * s));
    t.fixed_view_mut::<2, 2>(0, 2).copy_from(&(p * s));
    t.fixed_view_mut::<2, 2>(2, 0).copy_from(&(Mat2::identity() * s));
    t.fixed_view_mut::<2, 2>(2, 2).copy_from(&(Mat2::identity() * s));
    let wt = bc.w_b * t;
    let wa = wt.fixed_view::<2, 2>(0, 0) * q_l.blocks[tr.a];
    let wb = wt.fixed_view::<2, 2>(0, 2) * q_l.blocks[tr.b];
    c.view_mut((0, 2 * tr.a), (2, 2)).copy_from(&wa);
    c.view_mut((0, 2 * tr.b), (2, 2)).copy_from(&wb);

    let qm = q_l.blocks[tr.l_minus];
    let qp = q_l.blocks[tr.l_plus];
    // (Q x)₂(l⁺) − (Q x)₂(l⁻)
    for j in 0..2 {
        c[(2, 2 * tr.l_plus + j)] = qp[(1, j)];
        c[(2, 2 * tr.l_minus + j)] = -qm[(1, j)];
    }
    // (Q x)₂(l⁺) + r [(Q x)₁(l⁺) − (Q x)₁(l⁻)]
    for j in 0..2 {
        c[(3, 2 * tr.l_plus + j)] = qp[(1, j)] + bc.r * qp[(0, j)];
        c[(3, 2 * tr.l_minus + j)] = -bc.r * qm[(0, j)];
    }
    c
}

/// Projector onto `{x : C x = 0}`, orthogonal in the inner product `xᵀ W y`.
///
/// Stored in low-rank form `P = I − W⁻¹Cᵀ (C W⁻¹ Cᵀ)⁻¹ C`.
#[derive(Debug, Clone)]
pub struct ConstraintProjector<T: Real> {
    c: DMatrix<T>,
    mass: BlockDiag<T>,
    winv_ct: DMatrix<T>,
    gram_inv: DMatrix<T>,
    pub norm: ProjectionNorm,
}

/// Relative eigenvalue floor of the constraint Gram matrix.
pub const RANK_FLOOR: f64 = 1e-12;

/// Builds the projector for the frozen interface position of `grid`.
pub fn constraint_projector<T: Real>(
    grid: &PanelGrid<T>,
    mat: &MaterialPair<T>,
    bc: &BoundarySpec<T>,
    norm: ProjectionNorm,
) -> Result<ConstraintProjector<T>> {
    let field = match norm {
        ProjectionNorm::Reference => grid.q_ref_field(mat),
        ProjectionNorm::Energy => grid.q_l_field(mat),
    };
    ConstraintProjector::new(constraint_rows(grid, mat, bc), grid.mass(&field), norm)
}

impl<T: Real> ConstraintProjector<T> {
    pub fn new(mut c: DMatrix<T>, mass: BlockDiag<T>, norm: ProjectionNorm) -> Result<Self> {
        for mut row in c.row_iter_mut() {
            let nrm = row.norm();
            if nrm > T::zero() {
                row /= nrm;
            }
        }
        let winv = mass.inverse().ok_or(Error::RankDeficient { condition: f64::INFINITY })?;
        let winv_ct = winv.mul_left(&c.transpose());
        let gram = &c * &winv_ct;
        // the Gram matrix is positive semidefinite, so singular values are its eigenvalues
        let eig = gram.clone().singular_values_unordered();
        let (lo, hi) = eig.iter().fold((T::max_value().unwrap(), T::zero()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if !(lo > lit::<T>(RANK_FLOOR) * hi) {
            return Err(Error::RankDeficient { condition: if lo > T::zero() { to_f64(hi / lo) } else { f64::INFINITY } });
        }
        let gram_inv = gram.try_inverse().ok_or(Error::RankDeficient { condition: to_f64(hi / lo) })?;
        Ok(Self { c, mass, winv_ct, gram_inv, norm })
    }

    pub fn dim(&self) -> usize {
        self.c.ncols()
    }

    pub fn n_constraints(&self) -> usize {
        self.c.nrows()
    }

    /// Row-normalized constraint matrix.
    pub fn rows(&self) -> &DMatrix<T> {
        &self.c
    }

    pub fn mass(&self) -> &BlockDiag<T> {
        &self.mass
    }

    /// W⁻¹Cᵀ, the directions along which the projector removes violations.
    pub fn winv_ct(&self) -> &DMatrix<T> {
        &self.winv_ct
    }

    pub fn apply(&self, x: &DVector<T>) -> DVector<T> {
        let coeff = &self.gram_inv * (&self.c * x);
        x - &self.winv_ct * coeff
    }

    /// C x, the constraint violation of a state.
    pub fn residual(&self, x: &DVector<T>) -> DVector<T> {
        &self.c * x
    }

    pub fn matrix(&self) -> DMatrix<T> {
        DMatrix::identity(self.dim(), self.dim()) - &self.winv_ct * &self.gram_inv * &self.c
    }

    /// Basis V of the constrained subspace, orthonormal in the projector's
    /// inner product: `Vᵀ W V = I`, `C V = 0`.
    pub fn basis(&self) -> DMatrix<T> {
        let l = self.mass.cholesky().expect("mass blocks are positive definite");
        let linv_t = l.inverse().expect("Cholesky factor is invertible").transpose();
        // y = Lᵀx turns the weighted space Euclidean; C x = (C L⁻ᵀ) y.
        let c_tilde = linv_t.mul_right(&self.c);
        let u = orthogonal_complement(&c_tilde.transpose());
        linv_t.mul_left(&u)
    }
}
