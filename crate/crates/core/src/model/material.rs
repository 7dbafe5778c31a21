use crate::error::{Error, Result};
use crate::linalg::{sym2_eigenvalues, Mat2};
use crate::model::interface::color;
use crate::model::profile::CoefficientProfile;
use crate::scalar::{count, lit, to_f64, Real};

/// Default number of z samples for coercivity and pencil suprema.
pub const DEFAULT_SAMPLES: usize = 4096;

/// Relative floor below which the smallest eigenvalue counts as zero.
pub const COERCIVITY_FLOOR: f64 = 1e-10;

/// Which subsystem a coefficient field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

/// Entries of one 2×2 symmetric material field.
#[derive(Debug, Clone, PartialEq)]
pub struct SideProfiles<T> {
    pub q11: CoefficientProfile<T>,
    pub q22: CoefficientProfile<T>,
    /// Off-diagonal entry, absent for diagonal materials.
    pub q12: Option<CoefficientProfile<T>>,
}

impl<T: Real> SideProfiles<T> {
    pub fn diagonal(q11: CoefficientProfile<T>, q22: CoefficientProfile<T>) -> Self {
        Self { q11, q22, q12: None }
    }

    fn eval(&self, z: T) -> Mat2<T> {
        let off = self.q12.as_ref().map_or(T::zero(), |p| p.eval(z));
        Mat2::new(self.q11.eval(z), off, off, self.q22.eval(z))
    }

    fn derivative(&self, z: T) -> Mat2<T> {
        let off = self.q12.as_ref().map_or(T::zero(), |p| p.derivative(z));
        Mat2::new(self.q11.derivative(z), off, off, self.q22.derivative(z))
    }

    fn profiles(&self) -> impl Iterator<Item = &CoefficientProfile<T>> {
        [&self.q11, &self.q22].into_iter().chain(self.q12.as_ref())
    }
}

/// The pair (Q⁻, Q⁺) of coercive symmetric 2×2 fields on `[a, b]` with
/// coercivity bounds `m I ⪯ Q± ⪯ M I`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialPair<T> {
    minus: SideProfiles<T>,
    plus: SideProfiles<T>,
    a: T,
    b: T,
    m: T,
    big_m: T,
}

/// Value of Q_l at a point: one matrix away from the interface, both one-sided
/// values at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QlValue<T> {
    Single(Mat2<T>),
    Interface { minus: Mat2<T>, plus: Mat2<T> },
}

impl<T: Real> MaterialPair<T> {
    /// Diagonal materials.
    pub fn diagonal(
        qminus11: CoefficientProfile<T>,
        qminus22: CoefficientProfile<T>,
        qplus11: CoefficientProfile<T>,
        qplus22: CoefficientProfile<T>,
    ) -> Result<Self> {
        Self::new(
            SideProfiles::diagonal(qminus11, qminus22),
            SideProfiles::diagonal(qplus11, qplus22),
        )
    }

    /// Constant diagonal materials on `[a, b]`.
    pub fn constant(a: T, b: T, minus: [T; 2], plus: [T; 2]) -> Result<Self> {
        let c = |v| CoefficientProfile::constant(a, b, v);
        Self::diagonal(c(minus[0])?, c(minus[1])?, c(plus[0])?, c(plus[1])?)
    }

    pub fn new(minus: SideProfiles<T>, plus: SideProfiles<T>) -> Result<Self> {
        Self::with_samples(minus, plus, DEFAULT_SAMPLES)
    }

    pub fn with_samples(minus: SideProfiles<T>, plus: SideProfiles<T>, nsamples: usize) -> Result<Self> {
        let a = minus.q11.start();
        let b = minus.q11.end();
        let tol = lit::<T>(1e-12) * (b - a);
        for p in minus.profiles().chain(plus.profiles()) {
            if (p.start() - a).abs() > tol || (p.end() - b).abs() > tol {
                return Err(Error::Profile(format!(
                    "profile spans [{}, {}] but the domain is [{a}, {b}]",
                    p.start(),
                    p.end()
                )));
            }
        }
        let mut pair = Self { minus, plus, a, b, m: T::one(), big_m: T::one() };
        let (m, big_m) = pair.coercivity_bounds(nsamples)?;
        pair.m = m;
        pair.big_m = big_m;
        Ok(pair)
    }

    pub fn side(&self, side: Side) -> &SideProfiles<T> {
        match side {
            Side::Minus => &self.minus,
            Side::Plus => &self.plus,
        }
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    /// Lower coercivity bound m.
    pub fn m(&self) -> T {
        self.m
    }

    /// Upper coercivity bound M.
    pub fn big_m(&self) -> T {
        self.big_m
    }

    pub fn is_diagonal(&self) -> bool {
        self.minus.q12.is_none() && self.plus.q12.is_none()
    }

    /// Q^side(z).
    pub fn eval_material(&self, side: Side, z: T) -> Result<Mat2<T>> {
        if z < self.a || z > self.b {
            return Err(Error::Domain { z: to_f64(z), a: to_f64(self.a), b: to_f64(self.b) });
        }
        Ok(self.eval(side, z))
    }

    /// Q^side(z) without the domain check.
    pub fn eval(&self, side: Side, z: T) -> Mat2<T> {
        self.side(side).eval(z)
    }

    /// d/dz Q^side(z), analytic.
    pub fn derivative(&self, side: Side, z: T) -> Mat2<T> {
        self.side(side).derivative(z)
    }

    /// Q_l(z) = c⁻(z) Q⁻(z) + c⁺(z) Q⁺(z); both one-sided values at z = l.
    pub fn eval_q_l(&self, l: T, z: T) -> QlValue<T> {
        let (cm, cp) = color(l, z);
        if cm == T::zero() && cp == T::zero() {
            QlValue::Interface { minus: self.eval(Side::Minus, z), plus: self.eval(Side::Plus, z) }
        } else {
            QlValue::Single(self.eval(Side::Minus, z) * cm + self.eval(Side::Plus, z) * cp)
        }
    }

    /// Sample points: uniform lattice plus every profile junction.
    pub fn sample_points(&self, nsamples: usize) -> Vec<T> {
        let n = nsamples.max(2);
        let mut zs: Vec<T> = (0..n)
            .map(|i| self.a + (self.b - self.a) * count::<T>(i) / count::<T>(n - 1))
            .collect();
        for p in self.minus.profiles().chain(self.plus.profiles()) {
            zs.extend(p.breakpoints());
        }
        zs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        zs.dedup();
        zs
    }

    /// (m, M): extreme eigenvalues of Q± over a sampling lattice, refined by
    /// golden-section search around the sampled extremes.
    pub fn coercivity_bounds(&self, nsamples: usize) -> Result<(T, T)> {
        if nsamples < 2 {
            return Err(Error::Parameter("coercivity sampling needs at least 2 points".into()));
        }
        let zs = self.sample_points(nsamples);
        let mut lo = (T::max_value().unwrap(), self.a);
        let mut hi = (T::min_value().unwrap(), self.a);
        for side in [Side::Minus, Side::Plus] {
            let lmin = |z: T| sym2_eigenvalues(&self.eval(side, z)).0;
            let lmax = |z: T| sym2_eigenvalues(&self.eval(side, z)).1;
            let (zmin, vmin) = refine_extremum(&zs, |z| -lmin(z));
            let (zmax, vmax) = refine_extremum(&zs, lmax);
            if -vmin < lo.0 {
                lo = (-vmin, zmin);
            }
            if vmax > hi.0 {
                hi = (vmax, zmax);
            }
        }
        // a field dipping to zero between samples refines to round-off level
        if !(lo.0 > lit::<T>(COERCIVITY_FLOOR) * hi.0.max(T::one())) {
            return Err(Error::Coercivity { min_eigenvalue: to_f64(lo.0), z: to_f64(lo.1) });
        }
        Ok((lo.0, hi.0))
    }
}

/// Maximum of `f` over the sorted lattice `zs`, refined by golden-section
/// search in the two cells adjacent to the best sample. Returns (argmax, max).
pub fn refine_extremum<T: Real>(zs: &[T], f: impl Fn(T) -> T) -> (T, T) {
    let (mut best_i, mut best) = (0, f(zs[0]));
    for (i, &z) in zs.iter().enumerate().skip(1) {
        let v = f(z);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut arg = zs[best_i];
    let lo = zs[best_i.saturating_sub(1)];
    let hi = zs[(best_i + 1).min(zs.len() - 1)];
    for (x0, x1) in [(lo, zs[best_i]), (zs[best_i], hi)] {
        if x1 > x0 {
            let (z, v) = golden_max(x0, x1, &f);
            if v > best {
                best = v;
                arg = z;
            }
        }
    }
    (arg, best)
}

fn golden_max<T: Real>(mut lo: T, mut hi: T, f: &impl Fn(T) -> T) -> (T, T) {
    let g = lit::<T>(0.618_033_988_749_894_8);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn const_pair(minus: [f64; 2], plus: [f64; 2]) -> MaterialPair<f64> {
        MaterialPair::constant(-1.0, 1.0, minus, plus).unwrap()
    }

    #[test]
    fn identity_material() {
        let mat = const_pair([1.0, 1.0], [1.0, 1.0]);
        assert_eq!(mat.eval_material(Side::Minus, 0.7).unwrap(), Mat2::identity());
        assert_eq!((mat.m(), mat.big_m()), (1.0, 1.0));
    }

    #[test]
    fn constant_profile_and_domain_error() {
        let mat = const_pair([2.0, 4.0], [1.0, 1.0]);
        assert_eq!(mat.eval_material(Side::Minus, 0.3).unwrap(), Mat2::new(2.0, 0.0, 0.0, 4.0));
        assert!(matches!(mat.eval_material(Side::Minus, 1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn cubic_entry() {
        let q = CoefficientProfile::polynomial(-1.0, 1.0, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let one = CoefficientProfile::constant(-1.0, 1.0, 1.0).unwrap();
        let mat = MaterialPair::diagonal(q, one.clone(), one.clone(), one).unwrap();
        assert_eq!(mat.eval_material(Side::Minus, 0.5).unwrap()[(0, 0)], 1.25);
    }

    #[test]
    fn q_l_selects_one_side() {
        let mat = const_pair([1.0, 1.0], [2.0, 2.0]);
        assert_eq!(mat.eval_q_l(0.0, -0.1), QlValue::Single(Mat2::identity()));
        assert_eq!(mat.eval_q_l(0.0, 0.1), QlValue::Single(Mat2::identity() * 2.0));
        assert!(matches!(mat.eval_q_l(0.0, 0.0), QlValue::Interface { .. }));

        let mat = const_pair([2.0, 4.0], [1.0, 2.0]);
        assert_eq!(mat.eval_q_l(-1.0, -0.5), QlValue::Single(Mat2::new(1.0, 0.0, 0.0, 2.0)));
    }

    #[test]
    fn coercivity_of_constant_pairs() {
        let mat = const_pair([1.0, 2.0], [2.0, 4.0]);
        assert_eq!(mat.coercivity_bounds(16).unwrap(), (1.0, 4.0));
    }

    #[test]
    fn coercivity_detects_dip_to_zero() {
        // 0.5 z² vanishes at z = 0, between lattice points when nsamples is even
        let dip = CoefficientProfile::polynomial(-1.0, 1.0, vec![0.0, 0.0, 0.5]).unwrap();
        let one = CoefficientProfile::constant(-1.0, 1.0, 1.0).unwrap();
        let err = MaterialPair::diagonal(dip, one.clone(), one.clone(), one);
        assert!(matches!(err, Err(Error::Coercivity { .. })));
    }

    #[test]
    fn refinement_finds_off_lattice_minimum() {
        // minimum of 1 + (z - 0.123)² is 1 at z = 0.123, off an 8-point lattice
        let q = CoefficientProfile::polynomial(-1.0, 1.0, vec![1.0 + 0.123 * 0.123, -0.246, 1.0]).unwrap();
        let one = CoefficientProfile::constant(-1.0, 1.0, 2.0).unwrap();
        let mat = MaterialPair::diagonal(q, one.clone(), one.clone(), one).unwrap();
        let (m, _): (f64, f64) = mat.coercivity_bounds(8).unwrap();
        assert!((m - 1.0).abs() < 1e-12, "{m}");
    }
}
