//! Materials violating the ratio assumption and bounded-norm state families
//! probing the quadratic form ⟨A x, x⟩_{Q₀} at interface position l = −1 on
//! `[−2, 2]`.
//!
//! Q⁻ = diag(q̃₁, q̃₂) and Q⁺ = diag(r̃₁, r̃₂) with q̃₁ = r̃₁ = r̃₂ = √ε and
//! q̃₂ r̃₁ = ε + β, β a C¹ mollified indicator of `[ξ₁, ξ₂]`. For states
//! supported in `[−3/4, −1/4]` the form reduces to
//! `∫ xᵀ Q⁻ P₁ (Q⁺ x)' dz = −∫ β x₂ x₁' dz` after the ε part integrates to
//! zero.
//!
//! Two families are provided. The spike family (x₂ a fixed plateau at −1,
//! x₁ a spike of height k and width ∝ 1/k²) keeps ‖x‖ bounded, but
//! integrating by parts gives `|−∫ β x₂ x₁'| = |∫ (β x₂)' x₁| ≤ ‖(β x₂)'‖ ‖x₁‖`,
//! so its form values stay bounded and in fact decay like 1/k. The
//! oscillating family `x = a φ (cos κz, sin κz)` gives
//! `−∫ β x₂ x₁' ≈ (κ/2) a² ∫ β φ²`, which grows linearly in κ.

use crate::error::{Error, Result};
use crate::model::{smoothstep, CoefficientProfile, MaterialPair, Piece, PiecewisePolynomial, Polynomial, Side};
use crate::quadrature::{composite_rule, CompositeRule};
use crate::scalar::{count, lit, to_f64, Real};

/// Domain of the construction.
pub const DOMAIN: (f64, f64) = (-2.0, 2.0);
/// Frozen interface position.
pub const INTERFACE: f64 = -1.0;
/// Support window of every state.
pub const WINDOW: (f64, f64) = (-0.75, -0.25);
/// Minimum quadrature points across a spike.
pub const MIN_SPIKE_POINTS: usize = 32;
/// Gauss–Legendre order per panel.
pub const QUAD_ORDER: usize = 12;
/// ∫₀¹ S(t)² dt for the quintic smoothstep S.
pub const SMOOTHSTEP_SQ_INTEGRAL: f64 = 181.0 / 462.0;

/// Which bounded-norm state family to sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Spike,
    Oscillating,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Spike => "spike",
            Family::Oscillating => "oscillating",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spike" => Ok(Family::Spike),
            "oscillating" => Ok(Family::Oscillating),
            other => Err(Error::Parameter(format!("unknown family {other:?}, expected spike or oscillating"))),
        }
    }
}

/// Parameters of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleSpec<T> {
    pub eps: T,
    pub xi1: T,
    pub xi2: T,
    pub sigma: T,
    pub ks: Vec<usize>,
    pub family: Family,
    /// Total quadrature points over the window.
    pub nquad: usize,
}

impl Default for CounterexampleSpec<f64> {
    fn default() -> Self {
        Self::standard(0.1, -0.7, -0.55)
    }
}

impl<T: Real> CounterexampleSpec<T> {
    /// Spike family with σ = (ξ₂ − ξ₁)/16 and k ∈ {1, 2, 4, 8, 16, 32}.
    pub fn standard(eps: T, xi1: T, xi2: T) -> Self {
        Self {
            eps,
            xi1,
            xi2,
            sigma: (xi2 - xi1) / lit::<T>(16.0),
            ks: vec![1, 2, 4, 8, 16, 32],
            family: Family::Spike,
            nquad: 4096,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.eps > T::zero()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.xi1 < self.xi2) {
            return bad(format!("need xi1 < xi2, got {} and {}", self.xi1, self.xi2));
        }
        if !(self.xi1 > lit::<T>(-0.75) && self.xi2 < lit::<T>(-0.5)) {
            return bad(format!("[{}, {}] must lie inside (-3/4, -1/2)", self.xi1, self.xi2));
        }
        if !(self.sigma > T::zero() && self.sigma * lit::<T>(4.0) < self.xi2 - self.xi1) {
            return bad(format!("need 0 < sigma < (xi2 - xi1)/4, got {}", self.sigma));
        }
        if self.ks.is_empty() || self.ks[0] == 0 || self.ks.windows(2).any(|w| w[0] >= w[1]) {
            return bad("k list must be nonempty, positive and strictly increasing".into());
        }
        if self.nquad < 1024 {
            return bad(format!("nquad must be at least 1024, got {}", self.nquad));
        }
        Ok(())
    }

    /// Ramp width of the x₂ plateau: as narrow as the window allows, capped
    /// at a sixth of the plateau.
    pub fn ramp(&self) -> T {
        let room_left = self.xi1 - lit::<T>(WINDOW.0);
        let room_right = lit::<T>(WINDOW.1) - self.xi2;
        ((self.xi2 - self.xi1) / lit::<T>(6.0)).min(room_left).min(room_right)
    }

    /// Spike width constant c in w = c/k², chosen so ‖x₁‖₂ ≤ 2/3 and the
    /// rising flank fits in `[ξ₁, ξ₂]`.
    pub fn spike_constant(&self) -> T {
        let c = lit::<T>(4.0 / (18.0 * SMOOTHSTEP_SQ_INTEGRAL));
        c.min(self.xi2 - self.xi1)
    }
}

fn domain<T: Real>() -> (T, T) {
    (lit::<T>(DOMAIN.0), lit::<T>(DOMAIN.1))
}

fn zero_piece<T: Real>(from: T, to: T) -> Piece<T> {
    Piece::new(from, to, Polynomial::constant(T::zero()))
}

/// 0 outside `[lo − r, hi + r]`, `height` on `[lo, hi]`, smoothstep ramps of
/// width r in between.
fn plateau<T: Real>(lo: T, hi: T, r: T, height: T) -> Result<PiecewisePolynomial<T>> {
    let (a, b) = domain::<T>();
    let mut pieces = vec![zero_piece(a, lo - r), Piece::new(lo - r, lo, smoothstep(lo - r, r).affine(height, T::zero()))];
    if hi > lo {
        pieces.push(Piece::new(lo, hi, Polynomial::constant(height)));
    }
    pieces.push(Piece::new(hi, hi + r, smoothstep(hi, r).affine(-height, height)));
    pieces.push(zero_piece(hi + r, b));
    PiecewisePolynomial::new(pieces)
}

/// β: C¹ mollified indicator of `[ξ₁, ξ₂]` with transitions of half-width σ.
pub fn mollified_indicator<T: Real>(spec: &CounterexampleSpec<T>) -> Result<PiecewisePolynomial<T>> {
    let two = lit::<T>(2.0);
    plateau(spec.xi1 + spec.sigma, spec.xi2 - spec.sigma, two * spec.sigma, T::one())
}

/// Materials with q̃₁ r̃₂ = ε and q̃₂ r̃₁ = ε + β.
pub fn build_materials<T: Real>(spec: &CounterexampleSpec<T>) -> Result<MaterialPair<T>> {
    spec.validate()?;
    let (a, b) = domain::<T>();
    let root = spec.eps.sqrt();
    let c = CoefficientProfile::constant(a, b, root)?;
    let q2 = mollified_indicator(spec)?.affine(T::one() / root, root);
    MaterialPair::diagonal(c.clone(), q2, c.clone(), c)
}

/// A smooth state x = (x₁, x₂) supported in the window.
#[derive(Debug, Clone, PartialEq)]
pub enum TestState<T> {
    Piecewise { x1: PiecewisePolynomial<T>, x2: PiecewisePolynomial<T>, spike: Option<(T, T)> },
    Oscillating { window: PiecewisePolynomial<T>, amplitude: T, wavenumber: T, origin: T },
}

impl<T: Real> TestState<T> {
    pub fn eval(&self, z: T) -> [T; 2] {
        match self {
            TestState::Piecewise { x1, x2, .. } => [x1.eval(z), x2.eval(z)],
            TestState::Oscillating { window, amplitude, wavenumber, origin } => {
                let (s, c) = (*wavenumber * (z - *origin)).sin_cos();
                let phi = window.eval(z) * *amplitude;
                [phi * c, phi * s]
            }
        }
    }

    pub fn derivative(&self, z: T) -> [T; 2] {
        match self {
            TestState::Piecewise { x1, x2, .. } => [x1.derivative(z), x2.derivative(z)],
            TestState::Oscillating { window, amplitude, wavenumber, origin } => {
                let (s, c) = (*wavenumber * (z - *origin)).sin_cos();
                let phi = window.eval(z) * *amplitude;
                let dphi = window.derivative(z) * *amplitude;
                [dphi * c - phi * *wavenumber * s, dphi * s + phi * *wavenumber * c]
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            TestState::Piecewise { x1, x2, .. } => x1.breakpoints().into_iter().chain(x2.breakpoints()).collect(),
            TestState::Oscillating { window, .. } => window.breakpoints(),
        }
    }

    /// Support of the x₁ spike, if any.
    pub fn spike(&self) -> Option<(T, T)> {
        match self {
            TestState::Piecewise { spike, .. } => *spike,
            TestState::Oscillating { .. } => None,
        }
    }
}

/// The k-th member of the spec's family.
pub fn build_xk<T: Real>(spec: &CounterexampleSpec<T>, k: usize) -> Result<TestState<T>> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let r = spec.ramp();
    let kk = count::<T>(k);
    match spec.family {
        Family::Spike => {
            let x2 = plateau(spec.xi1, spec.xi2, r, -T::one())?;
            // rising flank on [ξ₂ − w, ξ₂], falling flank on [ξ₂, ξ₂ + w]
            let w = spec.spike_constant() / (kk * kk);
            let (a, b) = domain::<T>();
            let mut pieces = vec![
                zero_piece(a, spec.xi2 - w),
                Piece::new(spec.xi2 - w, spec.xi2, smoothstep(spec.xi2 - w, w).affine(kk, T::zero())),
                Piece::new(spec.xi2, spec.xi2 + w, smoothstep(spec.xi2, w).affine(-kk, kk)),
                zero_piece(spec.xi2 + w, b),
            ];
            pieces.retain(|p| p.to > p.from);
            let x1 = PiecewisePolynomial::new(pieces)?;
            Ok(TestState::Piecewise { x1, x2, spike: Some((spec.xi2 - w, spec.xi2 + w)) })
        }
        Family::Oscillating => {
            let window = plateau(spec.xi1, spec.xi2, r, T::one())?;
            let norm = window_norm(&window, spec)?;
            Ok(TestState::Oscillating {
                window,
                amplitude: lit::<T>(0.9) / norm,
                wavenumber: T::two_pi() * kk / (spec.xi2 - spec.xi1),
                origin: spec.xi1,
            })
        }
    }
}

fn window_rule<T: Real>(spec: &CounterexampleSpec<T>, extra: &[T]) -> Result<CompositeRule<T>> {
    let (lo, hi) = (lit::<T>(WINDOW.0), lit::<T>(WINDOW.1));
    let mut breaks: Vec<T> = vec![lo, hi];
    breaks.extend(extra.iter().copied().filter(|&z| z > lo && z < hi));
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let tiny = lit::<T>(1e-14);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= tiny);
    composite_rule(&breaks, QUAD_ORDER, spec.nquad, 4)
}

fn window_norm<T: Real>(window: &PiecewisePolynomial<T>, spec: &CounterexampleSpec<T>) -> Result<T> {
    let rule = window_rule(spec, &window.breakpoints())?;
    Ok(rule.integrate(|z| window.eval(z) * window.eval(z)).sqrt())
}

/// Quadrature value of `∫ xᵀ Q⁻ P₁ (Q⁺ x)' dz` over the window with its split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormValue<T> {
    pub value: T,
    /// ∫ xᵀ Q⁻ P₁ Q⁺' x.
    pub deriv_term: T,
    /// ∫ xᵀ Q⁻ P₁ Q⁺ x'.
    pub xprime_term: T,
    /// ‖x‖₂ over the window.
    pub x_norm: T,
    pub x1_norm: T,
    pub x2_norm: T,
    /// ‖x‖²_{Q₀} = ½ ∫ xᵀ Q⁻ x.
    pub q0_norm_sq: T,
    pub points: usize,
}

pub fn quadratic_form<T: Real>(
    mat: &MaterialPair<T>,
    x: &TestState<T>,
    spec: &CounterexampleSpec<T>,
) -> Result<FormValue<T>> {
    let mut extra = x.breakpoints();
    for side in [Side::Minus, Side::Plus] {
        let s = mat.side(side);
        extra.extend(s.q11.breakpoints());
        extra.extend(s.q22.breakpoints());
    }
    let rule = window_rule(spec, &extra)?;
    if let Some((lo, hi)) = x.spike() {
        let pts = rule.points_in(lo, hi);
        if pts < MIN_SPIKE_POINTS {
            return Err(Error::Resolution(format!(
                "spike [{lo}, {hi}] holds {pts} quadrature points, need {MIN_SPIKE_POINTS}"
            )));
        }
    }
    let p = crate::linalg::p1::<T>();
    let half = lit::<T>(0.5);
    let [deriv_term, xprime_term, n1, n2, q0] = rule.integrate_many(|z| {
        let [u1, u2] = x.eval(z);
        let [d1, d2] = x.derivative(z);
        let xv = nalgebra::Vector2::new(u1, u2);
        let dv = nalgebra::Vector2::new(d1, d2);
        let qm = mat.eval(Side::Minus, z);
        let left = (qm * p).transpose() * xv;
        [
            left.dot(&(mat.derivative(Side::Plus, z) * xv)),
            left.dot(&(mat.eval(Side::Plus, z) * dv)),
            u1 * u1,
            u2 * u2,
            xv.dot(&(qm * xv)) * half,
        ]
    });
    Ok(FormValue {
        value: deriv_term + xprime_term,
        deriv_term,
        xprime_term,
        x_norm: (n1 + n2).sqrt(),
        x1_norm: n1.sqrt(),
        x2_norm: n2.sqrt(),
        q0_norm_sq: q0,
        points: rule.len(),
    })
}

/// One row of the divergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub k: usize,
    pub form: FormValue<T>,
}

/// Divergence table with its least-squares fit of value against k.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceSweep<T> {
    pub rows: Vec<SweepRow<T>>,
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub strictly_increasing: bool,
    /// value(k_last) / value(k_first).
    pub growth_ratio: T,
    /// ‖β − χ_[ξ₁,ξ₂]‖₂, the size of the smoothing correction.
    pub eta_norm: T,
}

/// Least-squares line through (x, y): (slope, intercept, R²).
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    let n = count::<T>(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = ys.iter().fold(T::zero(), |a, &v| a + v) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > T::zero() { sxy * sxy / (sxx * syy) } else { T::one() };
    (slope, my - slope * mx, r2)
}

pub fn divergence_sweep<T: Real>(spec: &CounterexampleSpec<T>) -> Result<DivergenceSweep<T>> {
    let mat = build_materials(spec)?;
    let rows = spec
        .ks
        .iter()
        .map(|&k| Ok(SweepRow { k, form: quadratic_form(&mat, &build_xk(spec, k)?, spec)? }))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<T> = rows.iter().map(|r| count::<T>(r.k)).collect();
    let ys: Vec<T> = rows.iter().map(|r| r.form.value).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    let strictly_increasing = ys.windows(2).all(|w| w[1] > w[0]);
    let growth_ratio = ys[ys.len() - 1] / ys[0];
    Ok(DivergenceSweep { rows, slope, intercept, r_squared, strictly_increasing, growth_ratio, eta_norm: eta_norm(spec)? })
}

/// ‖β − χ‖₂ over the two transition zones.
pub fn eta_norm<T: Real>(spec: &CounterexampleSpec<T>) -> Result<T> {
    let beta = mollified_indicator(spec)?;
    let s = spec.sigma;
    let mut total = T::zero();
    for c in [spec.xi1, spec.xi2] {
        let rule = composite_rule(&[c - s, c, c + s], QUAD_ORDER, 256, 2)?;
        let inside = |z: T| if z >= spec.xi1 && z <= spec.xi2 { T::one() } else { T::zero() };
        total += rule.integrate(|z| (beta.eval(z) - inside(z)).powi(2));
    }
    Ok(total.sqrt())
}

/// ‖(β x₂)'‖₂ ‖x₁‖₂, an upper bound for |form value| of a piecewise state
/// with constant Q⁺ (the bound the spike family cannot escape).
pub fn integration_by_parts_bound<T: Real>(spec: &CounterexampleSpec<T>, x: &TestState<T>) -> Result<T> {
    let beta = mollified_indicator(spec)?;
    let mut extra = x.breakpoints();
    extra.extend(beta.breakpoints());
    let rule = window_rule(spec, &extra)?;
    let [g, n1] = rule.integrate_many(|z| {
        let [u1, u2] = x.eval(z);
        let [_, d2] = x.derivative(z);
        let d = beta.derivative(z) * u2 + beta.eval(z) * d2;
        [d * d, u1 * u1]
    });
    Ok(g.sqrt() * n1.sqrt())
}

/// Exact discrete Rayleigh maxima of the frozen generator at l = −1 for the
/// given node totals, with a lossless boundary.
pub fn discrete_rayleigh_growth<T: Real>(spec: &CounterexampleSpec<T>, totals: &[usize]) -> Result<Vec<(usize, T)>> {
    let mat = build_materials(spec)?;
    let (a, b) = domain::<T>();
    let dom = crate::model::DomainSpec::new(a, b, lit::<T>(INTERFACE))?;
    let bc = crate::ports::BoundarySpec::conservative();
    totals
        .iter()
        .map(|&n| {
            let grid = crate::discretization::build_grid_balanced(&dom, lit::<T>(INTERFACE), n)?;
            let gen = crate::stability::RestrictedGenerator::certified(&grid, &mat, &bc)?;
            Ok((n, gen.max_rayleigh()))
        })
        .collect()
}

/// f64 convenience for reports.
pub fn describe<T: Real>(spec: &CounterexampleSpec<T>) -> String {
    format!(
        "eps={} xi1={} xi2={} sigma={} family={} nquad={}",
        to_f64(spec.eps),
        to_f64(spec.xi1),
        to_f64(spec.xi2),
        to_f64(spec.sigma),
        spec.family.name(),
        spec.nquad
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ports::check_a1;
    use crate::stability::omega_bound;

    fn spec() -> CounterexampleSpec<f64> {
        CounterexampleSpec::default()
    }

    #[test]
    fn smoothstep_square_integral() {
        let rule = composite_rule(&[0.0, 1.0], 8, 8, 1).unwrap();
        let s = smoothstep(0.0f64, 1.0);
        let v = rule.integrate(|t| s.eval(t).powi(2));
        assert!((v - SMOOTHSTEP_SQ_INTEGRAL).abs() < 1e-14);
    }

    #[test]
    fn material_values() {
        let sp = spec();
        let mat = build_materials(&sp).unwrap();
        let root = 0.1f64.sqrt();
        let q2 = |z: f64| mat.eval(Side::Minus, z)[(1, 1)];
        assert!((q2(-0.3) - root).abs() < 1e-15);
        assert!((q2(-0.72) - root).abs() < 1e-15);
        assert!((q2(-0.62) - 1.1 / root).abs() < 1e-14);
        assert!((mat.eval(Side::Plus, -0.62) - nalgebra::Matrix2::identity() * root).amax() < 1e-15);
        assert!(!check_a1(&mat, 2048, 1e-10).pass);
        assert!(matches!(omega_bound(&mat, 1024), Err(Error::CertificateRefused(_))));
        let mut bad = sp.clone();
        bad.eps = 0.0;
        assert!(build_materials(&bad).is_err());
    }

    #[test]
    fn spike_states_have_bounded_norm_and_endpoint_gap() {
        let sp = spec();
        let mat = build_materials(&sp).unwrap();
        let mut x1_norms = Vec::new();
        for &k in &sp.ks {
            let x = build_xk(&sp, k).unwrap();
            let [a0, b0] = x.eval(-0.75);
            let [a1, b1] = x.eval(-0.25);
            assert!(a0.abs() < 1e-12 && b0.abs() < 1e-12 && a1.abs() < 1e-12 && b1.abs() < 1e-12);
            let gap = x.eval(sp.xi2)[0] - x.eval(sp.xi1)[0];
            assert!((gap - k as f64).abs() < 1e-9 * k as f64, "k = {k}: gap {gap}");
            let f = quadratic_form(&mat, &x, &sp).unwrap();
            assert!(f.x_norm <= 1.0 + 1e-8);
            assert!(f.x1_norm <= 2.0 / 3.0 + 1e-8);
            x1_norms.push(f.x1_norm);
        }
        for w in x1_norms.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn trivial_forms_vanish() {
        let sp = spec();
        let id = MaterialPair::constant(-2.0, 2.0, [1.0, 1.0], [1.0, 1.0]).unwrap();
        let x = build_xk(&sp, 4).unwrap();
        assert!(quadratic_form(&id, &x, &sp).unwrap().value.abs() < 1e-10);

        let mat = build_materials(&sp).unwrap();
        let TestState::Piecewise { x1, .. } = build_xk(&sp, 4).unwrap() else { unreachable!() };
        let zero = PiecewisePolynomial::constant(-2.0, 2.0, 0.0).unwrap();
        let x = TestState::Piecewise { x1, x2: zero, spike: None };
        assert_eq!(quadratic_form(&mat, &x, &sp).unwrap().value, 0.0);
    }

    #[test]
    fn spike_values_obey_integration_by_parts_bound() {
        let sp = spec();
        let sweep = divergence_sweep(&sp).unwrap();
        for row in &sweep.rows {
            let x = build_xk(&sp, row.k).unwrap();
            let bound = integration_by_parts_bound(&sp, &x).unwrap();
            assert!(row.form.value.abs() <= bound * (1.0 + 1e-9), "k = {}", row.k);
            assert_eq!(row.form.deriv_term, 0.0);
        }
        assert!(sweep.eta_norm > 0.0 && sweep.eta_norm < 0.1);
    }

    #[test]
    fn oscillating_family_grows_linearly() {
        let mut sp = spec();
        sp.family = Family::Oscillating;
        let sweep = divergence_sweep(&sp).unwrap();
        assert!(sweep.strictly_increasing);
        assert!(sweep.slope > 0.0 && sweep.r_squared >= 0.99);
        assert!(sweep.growth_ratio >= 16.0);
        assert!(sweep.rows.iter().all(|r| r.form.x_norm <= 1.0 + 1e-8));
    }

    #[test]
    fn unresolved_spike_is_an_error() {
        let mut sp = spec();
        sp.ks = vec![1, 2];
        let x = build_xk(&sp, 2).unwrap();
        // shrink the spike far below the quadrature resolution
        let TestState::Piecewise { x1, x2, .. } = x else { unreachable!() };
        let x = TestState::Piecewise { x1, x2, spike: Some((-0.6, -0.6 + 1e-12)) };
        let mat = build_materials(&sp).unwrap();
        assert!(matches!(quadratic_form(&mat, &x, &sp), Err(Error::Resolution(_))));
    }

    #[test]
    fn discrete_generator_is_not_uniformly_bounded() {
        let v = discrete_rayleigh_growth(&spec(), &[64, 128, 256]).unwrap();
        assert!(v[1].1 > v[0].1 && v[2].1 > v[1].1, "{v:?}");
    }
}
