use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Highest polynomial degree allowed in a piece.
pub const MAX_DEGREE: usize = 5;

/// Junction tolerance for value and slope continuity, relative to
/// `max(1, |value|)`.
pub const JUNCTION_TOL: f64 = 1e-10;

/// Polynomial in powers of `t = (z - origin) / scale`.
///
/// Coefficients are stored lowest order first. Local coordinates keep steep
/// narrow ramps well conditioned.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
    origin: T,
    scale: T,
}

impl<T: Real> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self::with_origin(coeffs, T::zero())
    }

    pub fn with_origin(coeffs: Vec<T>, origin: T) -> Self {
        Self::local(coeffs, origin, T::one())
    }

    /// Polynomial in `(z - origin) / scale`.
    pub fn local(coeffs: Vec<T>, origin: T, scale: T) -> Self {
        let coeffs = if coeffs.is_empty() { vec![T::zero()] } else { coeffs };
        Self { coeffs, origin, scale }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn origin(&self) -> T {
        self.origin
    }

    /// Degree ignoring trailing zero coefficients.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != T::zero()).unwrap_or(0)
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn eval(&self, z: T) -> T {
        let s = (z - self.origin) / self.scale;
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * s + c)
    }

    pub fn derivative(&self, z: T) -> T {
        let s = (z - self.origin) / self.scale;
        let mut acc = T::zero();
        for (k, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * s + c * T::from_usize(k).unwrap();
        }
        acc / self.scale
    }

    /// `p(z) * factor + shift`, same origin.
    pub fn affine(&self, factor: T, shift: T) -> Self {
        let mut coeffs: Vec<T> = self.coeffs.iter().map(|&c| c * factor).collect();
        coeffs[0] += shift;
        Self { coeffs, origin: self.origin, scale: self.scale }
    }
}

/// One polynomial piece on `[from, to]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<T> {
    pub from: T,
    pub to: T,
    pub poly: Polynomial<T>,
}

impl<T: Real> Piece<T> {
    pub fn new(from: T, to: T, poly: Polynomial<T>) -> Self {
        Self { from, to, poly }
    }
}

/// C¹ piecewise polynomial on `[a, b]`.
///
/// Pieces are contiguous and ordered; value and first derivative match at
/// every junction to [`JUNCTION_TOL`]. Derivatives are analytic.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial<T> {
    pieces: Vec<Piece<T>>,
}

/// Scalar coefficient field q(z), used for the entries of the material
/// matrices. Positivity is enforced where the field is used as a diagonal
/// entry (see `MaterialPair`).
pub type CoefficientProfile<T> = PiecewisePolynomial<T>;

impl<T: Real> PiecewisePolynomial<T> {
    pub fn new(pieces: Vec<Piece<T>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Profile("no pieces".into()));
        }
        for (i, p) in pieces.iter().enumerate() {
            if !(p.from < p.to) {
                return Err(Error::Profile(format!(
                    "piece {i} has empty interval [{}, {}]",
                    p.from, p.to
                )));
            }
            if p.poly.degree() > MAX_DEGREE {
                return Err(Error::Profile(format!(
                    "piece {i} has degree {} > {MAX_DEGREE}",
                    p.poly.degree()
                )));
            }
            if p.poly.coeffs().iter().any(|c| !c.is_finite()) {
                return Err(Error::Profile(format!("piece {i} has non-finite coefficients")));
            }
        }
        let span = pieces.last().unwrap().to - pieces[0].from;
        let tol = lit::<T>(JUNCTION_TOL);
        for (i, w) in pieces.windows(2).enumerate() {
            let (left, right) = (&w[0], &w[1]);
            if (right.from - left.to).abs() > lit::<T>(1e-12) * span {
                return Err(Error::Profile(format!(
                    "pieces {i} and {} do not meet: {} vs {}",
                    i + 1,
                    left.to,
                    right.from
                )));
            }
            let z = left.to;
            let (vl, vr) = (left.poly.eval(z), right.poly.eval(z));
            let (dl, dr) = (left.poly.derivative(z), right.poly.derivative(z));
            let scale_v = T::one().max(vl.abs());
            let scale_d = T::one().max(dl.abs());
            if (vl - vr).abs() > tol * scale_v || (dl - dr).abs() > tol * scale_d {
                return Err(Error::Profile(format!(
                    "not C1 at z = {z}: value jump {}, slope jump {}",
                    vr - vl,
                    dr - dl
                )));
            }
        }
        Ok(Self { pieces })
    }

    pub fn constant(a: T, b: T, c: T) -> Result<Self> {
        Self::new(vec![Piece::new(a, b, Polynomial::constant(c))])
    }

    /// Single polynomial in powers of z on `[a, b]`.
    pub fn polynomial(a: T, b: T, coeffs: Vec<T>) -> Result<Self> {
        Self::new(vec![Piece::new(a, b, Polynomial::new(coeffs))])
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn start(&self) -> T {
        self.pieces[0].from
    }

    pub fn end(&self) -> T {
        self.pieces.last().unwrap().to
    }

    /// Interior junctions.
    pub fn breakpoints(&self) -> Vec<T> {
        self.pieces.iter().skip(1).map(|p| p.from).collect()
    }

    pub fn contains(&self, z: T) -> bool {
        z >= self.start() && z <= self.end()
    }

    fn piece_at(&self, z: T) -> &Piece<T> {
        let idx = self.pieces.partition_point(|p| p.to < z);
        &self.pieces[idx.min(self.pieces.len() - 1)]
    }

    /// Value at z; outside `[a, b]` the end pieces are extrapolated.
    pub fn eval(&self, z: T) -> T {
        self.piece_at(z).poly.eval(z)
    }

    pub fn derivative(&self, z: T) -> T {
        self.piece_at(z).poly.derivative(z)
    }

    pub fn checked_eval(&self, z: T) -> Result<T> {
        if !self.contains(z) {
            return Err(Error::Domain {
                z: to_f64(z),
                a: to_f64(self.start()),
                b: to_f64(self.end()),
            });
        }
        Ok(self.eval(z))
    }

    /// Largest value and slope mismatch over all junctions.
    pub fn junction_residual(&self) -> (T, T) {
        self.pieces.windows(2).fold((T::zero(), T::zero()), |(rv, rd), w| {
            let z = w[0].to;
            (
                rv.max((w[0].poly.eval(z) - w[1].poly.eval(z)).abs()),
                rd.max((w[0].poly.derivative(z) - w[1].poly.derivative(z)).abs()),
            )
        })
    }

    /// `q(z) * factor + shift`.
    pub fn affine(&self, factor: T, shift: T) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece::new(p.from, p.to, p.poly.affine(factor, shift)))
                .collect(),
        }
    }
}

/// Quintic smoothstep 6t⁵ − 15t⁴ + 10t³ with `t = (z - z0) / width`. Rises
/// from 0 to 1 with zero slope and curvature at both ends.
pub fn smoothstep<T: Real>(z0: T, width: T) -> Polynomial<T> {
    let c = |v: f64| lit::<T>(v);
    Polynomial::local(vec![c(0.0), c(0.0), c(0.0), c(10.0), c(-15.0), c(6.0)], z0, width)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_profile_value() {
        let q = CoefficientProfile::polynomial(-1.0, 1.0, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(q.eval(0.5), 1.25);
        assert_eq!(q.derivative(0.5), 1.0);
    }

    #[test]
    fn rejects_gap_and_jump() {
        let gap = PiecewisePolynomial::new(vec![
            Piece::new(0.0, 1.0, Polynomial::constant(1.0)),
            Piece::new(1.5, 2.0, Polynomial::constant(1.0)),
        ]);
        assert!(matches!(gap, Err(Error::Profile(_))));

        let kink = PiecewisePolynomial::new(vec![
            Piece::new(0.0, 1.0, Polynomial::new(vec![0.0, 1.0])),
            Piece::new(1.0, 2.0, Polynomial::constant(1.0)),
        ]);
        assert!(matches!(kink, Err(Error::Profile(_))));
    }

    #[test]
    fn rejects_high_degree() {
        let p = PiecewisePolynomial::polynomial(0.0, 1.0, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(p, Err(Error::Profile(_))));
    }

    #[test]
    fn smoothstep_is_c1_with_constants() {
        let ramp = smoothstep(0.2_f64, 0.1);
        let q = PiecewisePolynomial::new(vec![
            Piece::new(0.0, 0.2, Polynomial::constant(0.0)),
            Piece::new(0.2, 0.3, ramp),
            Piece::new(0.3, 1.0, Polynomial::constant(1.0)),
        ])
        .unwrap();
        let (rv, rd) = q.junction_residual();
        assert!(rv < 1e-12 && rd < 1e-9);
        assert!((q.eval(0.25) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn checked_eval_outside_domain() {
        let q = CoefficientProfile::constant(-1.0, 1.0, 2.0).unwrap();
        assert!(matches!(q.checked_eval(1.5), Err(Error::Domain { .. })));
    }
}
