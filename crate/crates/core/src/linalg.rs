//! Small dense helpers: closed-form 2×2 symmetric eigenvalues and definite
//! pencils, block-diagonal mass matrices, spectral norms.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::scalar::{lit, Real};

pub type Mat2<T> = Matrix2<T>;

/// The coupling matrix [[0, −1], [−1, 0]].
pub fn p1<T: Real>() -> Mat2<T> {
    Mat2::new(T::zero(), -T::one(), -T::one(), T::zero())
}

pub fn sym<T: Real>(m: &Mat2<T>) -> Mat2<T> {
    (m + m.transpose()) * lit::<T>(0.5)
}

/// Eigenvalues `(min, max)` of a symmetric 2×2 matrix.
pub fn sym2_eigenvalues<T: Real>(m: &Mat2<T>) -> (T, T) {
    let half = lit::<T>(0.5);
    let mean = (m[(0, 0)] + m[(1, 1)]) * half;
    let diff = (m[(0, 0)] - m[(1, 1)]) * half;
    let off = (m[(0, 1)] + m[(1, 0)]) * half;
    let rad = (diff * diff + off * off).sqrt();
    (mean - rad, mean + rad)
}

/// Largest λ with `det(S − λQ) = 0` for symmetric S and SPD Q.
///
/// Reduces to the symmetric matrix `L⁻¹ S L⁻ᵀ` with `Q = L Lᵀ`.
pub fn pencil_max<T: Real>(s: &Mat2<T>, q: &Mat2<T>) -> T {
    let l11 = q[(0, 0)].sqrt();
    let l21 = q[(1, 0)] / l11;
    let l22 = (q[(1, 1)] - l21 * l21).sqrt();
    // L⁻¹ for lower triangular [[l11, 0], [l21, l22]]
    let inv = Mat2::new(T::one() / l11, T::zero(), -l21 / (l11 * l22), T::one() / l22);
    let reduced = inv * sym(s) * inv.transpose();
    sym2_eigenvalues(&reduced).1
}

/// Block-diagonal matrix with 2×2 blocks, stored per node.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiag<T> {
    pub blocks: Vec<Mat2<T>>,
}

impl<T: Real> BlockDiag<T> {
    pub fn new(blocks: Vec<Mat2<T>>) -> Self {
        Self { blocks }
    }

    pub fn dim(&self) -> usize {
        2 * self.blocks.len()
    }

    pub fn mul_vec(&self, x: &DVector<T>) -> DVector<T> {
        let mut out = DVector::zeros(x.len());
        for (i, b) in self.blocks.iter().enumerate() {
            let (u, v) = (x[2 * i], x[2 * i + 1]);
            out[2 * i] = b[(0, 0)] * u + b[(0, 1)] * v;
            out[2 * i + 1] = b[(1, 0)] * u + b[(1, 1)] * v;
        }
        out
    }

    /// `x ᵀ B y`.
    pub fn bilinear(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        x.dot(&self.mul_vec(y))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.blocks
            .iter()
            .map(|b| b.try_inverse())
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    /// Lower Cholesky factor per block.
    pub fn cholesky(&self) -> Option<Self> {
        self.blocks
            .iter()
            .map(|b| b.cholesky().map(|c| c.l()))
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.blocks.iter().map(|b| b.transpose()).collect())
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, b) in self.blocks.iter().enumerate() {
            m.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(b);
        }
        m
    }

    /// `B · M` for a dense M with `dim()` rows.
    pub fn mul_left(&self, m: &DMatrix<T>) -> DMatrix<T> {
        let mut out = m.clone();
        for (i, b) in self.blocks.iter().enumerate() {
            let rows = m.rows(2 * i, 2);
            out.rows_mut(2 * i, 2).copy_from(&(b * rows));
        }
        out
    }

    /// `M · B` for a dense M with `dim()` columns.
    pub fn mul_right(&self, m: &DMatrix<T>) -> DMatrix<T> {
        let mut out = m.clone();
        for (i, b) in self.blocks.iter().enumerate() {
            let cols = m.columns(2 * i, 2);
            out.columns_mut(2 * i, 2).copy_from(&(cols * b));
        }
        out
    }
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &DMatrix<T>) -> T {
    if m.nrows() == 0 || m.ncols() == 0 {
        return T::zero();
    }
    m.clone()
        .singular_values_unordered()
        .iter()
        .fold(T::zero(), |acc, &s| acc.max(s))
}

/// Largest eigenvalue of the symmetric part.
///
/// nalgebra's symmetric QR iteration can return NaN on larger generator
/// matrices, so the symmetric part is shifted by its Gershgorin radius c to
/// make it positive semidefinite, where eigenvalues and singular values
/// coincide: λ_max(S) = σ_max(S + cI) − c.
pub fn max_sym_eigenvalue<T: Real>(m: &DMatrix<T>) -> T {
    if m.nrows() == 0 {
        return T::min_value().unwrap();
    }
    let mut s = (m + m.transpose()) * lit::<T>(0.5);
    let c = s.row_iter().fold(T::zero(), |acc, r| acc.max(r.iter().fold(T::zero(), |a, v| a + v.abs())));
    for i in 0..s.nrows() {
        s[(i, i)] += c;
    }
    spectral_norm(&s) - c
}

/// Orthonormal basis of the orthogonal complement of the column span of `c`
/// (`n × k`, full column rank assumed).
pub fn orthogonal_complement<T: Real>(c: &DMatrix<T>) -> DMatrix<T> {
    let (n, k) = c.shape();
    let qr = c.clone().qr();
    let mut qt = DMatrix::<T>::identity(n, n);
    qr.q_tr_mul(&mut qt);
    qt.transpose().columns(k, n - k).into_owned()
}
