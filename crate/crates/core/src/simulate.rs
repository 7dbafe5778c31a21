//! Time integration of ẋ = A(t) x with a prescribed interface path.
//!
//! Each step freezes the generator at one interface position, transfers the
//! state onto the grid for that position, and solves the constrained step
//! in saddle-point form
//!
//! ```text
//! [ I − θ dt JQ   dt W⁻¹Cᵀ ] [x′]   [ x + (1 − θ) dt JQ x ]
//! [ C             0        ] [μ ] = [ 0                   ]
//! ```
//!
//! with W the energy mass matrix, so that `x′ − x = dt P JQ (θx′ + (1 − θ)x)`
//! with P the W-orthogonal constraint projector. θ = ½ is implicit midpoint,
//! θ = 1 backward Euler.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discretization::{build_grid, PanelGrid, StateVector};
use crate::error::{Error, Result};
use crate::linalg::BlockDiag;
use crate::model::{DomainSpec, InterfacePath, MaterialPair};
use crate::ports::{
    check_a1, check_a2, constraint_projector, energy_density_jump, port_variables, trace_tolerance, BoundarySpec,
    ConstraintProjector, ProjectionNorm,
};
use crate::scalar::{count, lit, to_f64, Real};
use crate::stability::{omega_bound, A1_TOL};

/// Time discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ImplicitMidpoint,
    BackwardEuler,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ImplicitMidpoint => "implicit-midpoint",
            Scheme::BackwardEuler => "backward-euler",
        }
    }

    fn theta<T: Real>(self) -> T {
        match self {
            Scheme::ImplicitMidpoint => lit(0.5),
            Scheme::BackwardEuler => T::one(),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "implicit-midpoint" | "midpoint" => Ok(Scheme::ImplicitMidpoint),
            "backward-euler" => Ok(Scheme::BackwardEuler),
            other => Err(Error::Parameter(format!(
                "unknown scheme {other:?}, expected implicit-midpoint or backward-euler"
            ))),
        }
    }
}

/// Slack factor c in the envelope test `ratio ≤ 1 + c (h + dt²)`.
pub const ENVELOPE_SLACK: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig<T: Real> {
    pub dom: DomainSpec<T>,
    pub mat: MaterialPair<T>,
    pub bc: BoundarySpec<T>,
    pub path: InterfacePath<T>,
    pub n_minus: usize,
    pub n_plus: usize,
    pub dt: T,
    pub scheme: Scheme,
    pub horizon: T,
    /// Record every `cadence` steps (the last step is always recorded).
    pub cadence: usize,
    /// Seed of the random initial state.
    pub seed: u64,
    /// Number of sine modes per channel in the initial state.
    pub modes: usize,
    /// Largest interface move per step, in units of the smallest spacing.
    pub max_shift: T,
}

impl<T: Real> SimulationConfig<T> {
    /// Fixed interface at `dom.l0`, implicit midpoint, 1000 steps of 1e-3.
    pub fn fixed(dom: DomainSpec<T>, mat: MaterialPair<T>, bc: BoundarySpec<T>, n_per_panel: usize) -> Self {
        let horizon = T::one();
        Self {
            path: InterfacePath::constant(dom.l0, horizon),
            dom,
            mat,
            bc,
            n_minus: n_per_panel,
            n_plus: n_per_panel,
            dt: lit(1e-3),
            scheme: Scheme::ImplicitMidpoint,
            horizon,
            cadence: 1,
            seed: 0,
            modes: 4,
            max_shift: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) {
            return Err(Error::Parameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > T::zero()) {
            return Err(Error::Parameter(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.cadence == 0 {
            return Err(Error::Parameter("cadence must be at least 1".into()));
        }
        if self.modes == 0 {
            return Err(Error::Parameter("modes must be at least 1".into()));
        }
        if !(self.max_shift > T::zero()) {
            return Err(Error::Parameter(format!("max_shift must be positive, got {}", self.max_shift)));
        }
        self.steps().map(|_| ())
    }

    /// Number of steps; the horizon must be a whole number of steps.
    pub fn steps(&self) -> Result<usize> {
        let n = to_f64(self.horizon / self.dt).round().max(1.0);
        let gap = (count::<T>(n as usize) * self.dt - self.horizon).abs();
        if gap > lit::<T>(1e-9) * self.horizon {
            return Err(Error::Parameter(format!(
                "horizon {} is not a whole number of steps of {}",
                self.horizon, self.dt
            )));
        }
        Ok(n as usize)
    }
}

/// One output row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record<T> {
    pub t: T,
    /// H = ½ ∫ xᵀ Q_l x.
    pub h: T,
    /// ⟨e∂, f∂⟩.
    pub boundary_power: T,
    /// e_I f_I.
    pub interface_power: T,
    /// (H_end − H_start)/dt − ½ (P_start + P_end) of the last step, with
    /// P = ⟨e∂, f∂⟩ − e_I f_I and H_start taken after the transfer.
    pub balance_residual: T,
    /// Interface position of the grid carrying the state.
    pub l: T,
    pub e_l: T,
    /// Energy change caused by transfers since the previous record.
    pub regrid_dh: T,
    /// ½ ∫ xᵀ Q₀ x.
    pub q0_energy: T,
}

/// Comparison of ‖x(t)‖²_{Q₀} with the certified growth e^{2ωt}‖x₀‖²_{Q₀}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport<T> {
    pub omega: T,
    /// max_t ‖x(t)‖²_{Q₀} / (e^{2ωt} ‖x₀‖²_{Q₀}).
    pub max_ratio: T,
    /// max(ratio − 1, 0) / (h + dt²).
    pub constant: T,
    pub tol: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    pub records: Vec<Record<T>>,
    pub steps: usize,
    pub scheme: Scheme,
    pub dt: T,
    /// |C x₀|∞ / ‖x₀‖∞ of the raw initial state before projection.
    pub initial_violation: T,
    /// Largest |C x|∞ / ‖x‖∞ after any step.
    pub max_constraint_residual: T,
    /// Largest interface move of a single step.
    pub max_shift: T,
    pub envelope: Option<EnvelopeReport<T>>,
}

/// A grid with everything needed to step on it.
#[derive(Debug, Clone)]
pub struct FrozenGenerator<T: Real> {
    pub grid: PanelGrid<T>,
    pub projector: ConstraintProjector<T>,
    q_l: BlockDiag<T>,
    q_ref: BlockDiag<T>,
    jq: DMatrix<T>,
    lu: Option<(T, Scheme, LU<T, Dyn, Dyn>)>,
    big_m: T,
}

impl<T: Real> FrozenGenerator<T> {
    pub fn new(grid: PanelGrid<T>, mat: &MaterialPair<T>, bc: &BoundarySpec<T>) -> Result<Self> {
        let projector = constraint_projector(&grid, mat, bc, ProjectionNorm::Energy)?;
        let q_l = grid.q_l_field(mat);
        let jq = q_l.mul_right(&grid.j_matrix());
        Ok(Self { q_ref: grid.q_ref_field(mat), projector, q_l, jq, lu: None, big_m: mat.big_m(), grid })
    }

    /// H(x) = xᵀ W x.
    pub fn energy(&self, x: &StateVector<T>) -> T {
        self.projector.mass().bilinear(&x.values, &x.values)
    }

    pub fn q0_energy(&self, x: &StateVector<T>) -> T {
        self.grid.mass(&self.q_ref).bilinear(&x.values, &x.values)
    }

    /// (⟨e∂, f∂⟩, e_I f_I).
    pub fn powers(&self, x: &StateVector<T>) -> Result<(T, T)> {
        let u = x.mul_field(&self.q_l);
        let p = port_variables(&self.grid, &u, trace_tolerance(self.big_m, x))?;
        Ok((p.e_boundary.dot(&p.f_boundary), p.e_interface * p.f_interface))
    }

    /// |C x|∞ / ‖x‖∞.
    pub fn violation(&self, x: &StateVector<T>) -> T {
        let scale = x.values.amax();
        if scale == T::zero() {
            return T::zero();
        }
        self.projector.residual(&x.values).amax() / scale
    }

    pub fn project(&self, x: &StateVector<T>) -> StateVector<T> {
        StateVector::from_vector(self.projector.apply(&x.values))
    }

    /// One constrained step of size dt.
    pub fn step(&mut self, x: &StateVector<T>, t: T, dt: T, scheme: Scheme) -> Result<StateVector<T>> {
        let n = self.grid.dim();
        let theta: T = scheme.theta();
        let stale = !matches!(&self.lu, Some((d, s, _)) if *d == dt && *s == scheme);
        if stale {
            let m = self.projector.n_constraints();
            let mut k = DMatrix::<T>::zeros(n + m, n + m);
            k.view_mut((0, 0), (n, n)).copy_from(&(DMatrix::identity(n, n) - &self.jq * (theta * dt)));
            k.view_mut((0, n), (n, m)).copy_from(&(self.projector.winv_ct() * dt));
            k.view_mut((n, 0), (m, n)).copy_from(self.projector.rows());
            self.lu = Some((dt, scheme, k.lu()));
        }
        let (_, _, lu) = self.lu.as_ref().unwrap();
        let mut rhs = DVector::<T>::zeros(n + self.projector.n_constraints());
        let explicit = &x.values + &self.jq * &x.values * ((T::one() - theta) * dt);
        rhs.rows_mut(0, n).copy_from(&explicit);
        let sol = lu.solve(&rhs).filter(|s| s.iter().all(|v| v.is_finite())).ok_or_else(|| Error::Step {
            t: to_f64(t),
            reason: format!(
                "step matrix is singular: lambda = 1/(theta dt) = {} lies in the spectrum of the frozen generator",
                to_f64(T::one() / (theta * dt))
            ),
        })?;
        Ok(StateVector::from_vector(sol.rows(0, n).into_owned()))
    }
}

/// One constrained step from t on the grid frozen at l(t + θ dt). `x` must
/// live on that grid.
pub fn step<T: Real>(x: &StateVector<T>, t: T, dt: T, config: &SimulationConfig<T>) -> Result<StateVector<T>> {
    let l = config.path.eval(t + config.scheme.theta::<T>() * dt);
    let grid = build_grid(&config.dom, l, config.n_minus, config.n_plus)?;
    FrozenGenerator::new(grid, &config.mat, &config.bc)?.step(x, t, dt, config.scheme)
}

fn interpolate<T: Real>(nodes: &[T], values: &[T], z: T) -> T {
    // linear on the containing segment, extrapolated from the end segments
    let i = nodes.partition_point(|&v| v <= z).clamp(1, nodes.len() - 1) - 1;
    let s = (z - nodes[i]) / (nodes[i + 1] - nodes[i]);
    values[i] + (values[i + 1] - values[i]) * s
}

/// Per-panel piecewise linear transfer of a state from `old` to `new`. Each
/// panel reads only its own nodes, so one-sided traces stay one-sided.
pub fn transfer<T: Real>(x: &StateVector<T>, old: &PanelGrid<T>, new: &PanelGrid<T>, max_shift: T) -> Result<StateVector<T>> {
    let shift = (new.l - old.l).abs();
    let limit = max_shift * old.min_spacing();
    if shift > limit {
        return Err(Error::Regrid { shift: to_f64(shift), limit: to_f64(limit) });
    }
    if old == new {
        return Ok(x.clone());
    }
    let nm_old = old.n_minus();
    let mut values = DVector::zeros(new.dim());
    for c in 0..2 {
        let ch = x.channel(c);
        let (vm, vp) = ch.split_at(nm_old);
        for g in 0..new.n_nodes() {
            let z = new.z(g);
            values[2 * g + c] = if g < new.n_minus() {
                interpolate(&old.minus.nodes, vm, z)
            } else {
                interpolate(&old.plus.nodes, vp, z)
            };
        }
    }
    Ok(StateVector::from_vector(values))
}

/// Result of moving a state to a new grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Regridded<T> {
    pub state: StateVector<T>,
    /// H_new(x_new) − H_old(x).
    pub dh: T,
}

/// Transfers `x` from `old` to `new.grid` and projects onto the new
/// constraint subspace.
pub fn regrid<T: Real>(
    x: &StateVector<T>,
    old: &FrozenGenerator<T>,
    new: &FrozenGenerator<T>,
    max_shift: T,
) -> Result<Regridded<T>> {
    if old.grid == new.grid {
        return Ok(Regridded { state: x.clone(), dh: T::zero() });
    }
    let moved = transfer(x, &old.grid, &new.grid, max_shift)?;
    let state = new.project(&moved);
    let dh = new.energy(&state) - old.energy(x);
    Ok(Regridded { state, dh })
}

/// Random smooth state `φ(z) Σₘ (aₘ sin mπs + bₘ cos mπs)` per channel with
/// s = (z − a)/(b − a) and coefficients uniform in ±1/m. The cutoff φ
/// vanishes to second order at a, l and b, so all traces start at zero.
pub fn initial_state<T: Real, R: Rng + ?Sized>(grid: &PanelGrid<T>, modes: usize, rng: &mut R) -> StateVector<T> {
    let coeffs: Vec<[f64; 4]> = (1..=modes)
        .map(|m| {
            let s = 1.0 / m as f64;
            [
                rng.random_range(-s..s),
                rng.random_range(-s..s),
                rng.random_range(-s..s),
                rng.random_range(-s..s),
            ]
        })
        .collect();
    let (a, b, l) = (grid.a, grid.b, grid.l);
    let len = b - a;
    let scale = len * len * len / lit::<T>(8.0);
    StateVector::from_fn(grid, |z, _| {
        let phi = ((z - a) * (b - z) * (z - l) / scale).powi(2);
        let s = (z - a) / len;
        let mut out = [T::zero(); 2];
        for (m, c) in coeffs.iter().enumerate() {
            let arg = T::pi() * count::<T>(m + 1) * s;
            let (sn, cs) = arg.sin_cos();
            out[0] += lit::<T>(c[0]) * sn + lit::<T>(c[1]) * cs;
            out[1] += lit::<T>(c[2]) * sn + lit::<T>(c[3]) * cs;
        }
        [out[0] * phi, out[1] * phi]
    })
}

fn record<T: Real>(
    gen: &FrozenGenerator<T>,
    mat: &MaterialPair<T>,
    x: &StateVector<T>,
    t: T,
    residual: T,
    regrid_dh: T,
) -> Result<Record<T>> {
    let (bp, ip) = gen.powers(x)?;
    Ok(Record {
        t,
        h: gen.energy(x),
        boundary_power: bp,
        interface_power: ip,
        balance_residual: residual,
        l: gen.grid.l,
        e_l: energy_density_jump(&gen.grid, mat, x),
        regrid_dh,
        q0_energy: gen.q0_energy(x),
    })
}

/// Runs the simulation from the seeded initial state.
pub fn run<T: Real>(config: &SimulationConfig<T>) -> Result<TimeSeries<T>> {
    config.validate()?;
    let a2 = check_a2(&config.bc);
    if !a2.pass {
        return Err(Error::Parameter(format!(
            "boundary parametrization fails the port assumption (rank {}, r = {})",
            a2.rank, config.bc.r
        )));
    }
    let steps = config.steps()?;
    let dt = config.dt;
    let theta: T = config.scheme.theta();
    let half = lit::<T>(0.5);

    let grid0 = build_grid(&config.dom, config.path.eval(T::zero()), config.n_minus, config.n_plus)?;
    let mut gen = FrozenGenerator::new(grid0, &config.mat, &config.bc)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let raw = initial_state(&gen.grid, config.modes, &mut rng);
    let initial_violation = gen.violation(&raw);
    let mut x = gen.project(&raw);
    if !x.is_finite() {
        return Err(Error::Step { t: 0.0, reason: "non-finite initial state".into() });
    }

    let mut records = vec![record(&gen, &config.mat, &x, T::zero(), T::zero(), T::zero())?];
    let mut max_violation = gen.violation(&x);
    let mut max_shift = T::zero();
    let mut pending_dh = T::zero();
    for k in 0..steps {
        let t = count::<T>(k) * dt;
        let l = config.path.eval(t + theta * dt);
        if l != gen.grid.l {
            let grid = build_grid(&config.dom, l, config.n_minus, config.n_plus)?;
            let next = FrozenGenerator::new(grid, &config.mat, &config.bc)?;
            max_shift = max_shift.max((l - gen.grid.l).abs());
            let moved = regrid(&x, &gen, &next, config.max_shift)?;
            pending_dh += moved.dh;
            x = moved.state;
            gen = next;
        }
        let h0 = gen.energy(&x);
        let (bp0, ip0) = gen.powers(&x)?;
        let x_new = gen.step(&x, t, dt, config.scheme)?;
        if !x_new.is_finite() {
            return Err(Error::Step { t: to_f64(t), reason: "state became non-finite".into() });
        }
        let (bp1, ip1) = gen.powers(&x_new)?;
        let h1 = gen.energy(&x_new);
        let residual = (h1 - h0) / dt - half * (bp0 - ip0 + bp1 - ip1);
        max_violation = max_violation.max(gen.violation(&x_new));
        x = x_new;
        if (k + 1) % config.cadence == 0 || k + 1 == steps {
            records.push(record(&gen, &config.mat, &x, count::<T>(k + 1) * dt, residual, pending_dh)?);
            pending_dh = T::zero();
        }
    }

    let envelope = envelope(config, &records, &gen.grid)?;
    Ok(TimeSeries {
        records,
        steps,
        scheme: config.scheme,
        dt,
        initial_violation,
        max_constraint_residual: max_violation,
        max_shift,
        envelope,
    })
}

fn envelope<T: Real>(config: &SimulationConfig<T>, records: &[Record<T>], grid: &PanelGrid<T>) -> Result<Option<EnvelopeReport<T>>> {
    if !check_a1(&config.mat, 1024, lit(A1_TOL)).pass {
        return Ok(None);
    }
    let omega = omega_bound(&config.mat, 1024)?.omega;
    let e0 = records[0].q0_energy;
    if !(e0 > T::zero()) {
        return Ok(None);
    }
    let two = lit::<T>(2.0);
    let max_ratio = records
        .iter()
        .map(|r| r.q0_energy / (e0 * (two * omega * r.t).exp()))
        .fold(T::zero(), |a, b| a.max(b));
    let scale = grid.max_spacing() + config.dt * config.dt;
    let constant = (max_ratio - T::one()).max(T::zero()) / scale;
    let tol = lit::<T>(ENVELOPE_SLACK) * scale;
    Ok(Some(EnvelopeReport { omega, max_ratio, constant, tol, pass: max_ratio <= T::one() + tol }))
}

/// Residual statistics of the discrete power balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditStats<T> {
    pub max_abs: T,
    /// (Σ r_k² Δt_k)^{1/2}.
    pub l2: T,
    pub count: usize,
}

/// Recomputes `r_k = (H_{k+1} − H_k − ΔH_transfer)/Δt − ½ (P_k + P_{k+1})`
/// from consecutive records. Exact bookkeeping needs cadence 1 and a fixed
/// interface.
pub fn energy_audit<T: Real>(series: &TimeSeries<T>) -> AuditStats<T> {
    let half = lit::<T>(0.5);
    let power = |r: &Record<T>| r.boundary_power - r.interface_power;
    let mut max_abs = T::zero();
    let mut sq = T::zero();
    for w in series.records.windows(2) {
        let dt = w[1].t - w[0].t;
        let r = (w[1].h - w[0].h - w[1].regrid_dh) / dt - half * (power(&w[0]) + power(&w[1]));
        max_abs = max_abs.max(r.abs());
        sq += r * r * dt;
    }
    AuditStats { max_abs, l2: sq.sqrt(), count: series.records.len().saturating_sub(1) }
}

/// Max audit residuals under repeated dt halving, with observed orders
/// log₂(r_i / r_{i+1}).
#[derive(Debug, Clone, PartialEq)]
pub struct HalvingStudy<T> {
    pub dts: Vec<T>,
    pub max_residuals: Vec<T>,
    pub orders: Vec<T>,
}

pub fn halving_study<T: Real>(config: &SimulationConfig<T>, levels: usize) -> Result<HalvingStudy<T>> {
    if levels < 2 {
        return Err(Error::Parameter("a halving study needs at least two levels".into()));
    }
    let mut cfg = config.clone();
    cfg.cadence = 1;
    let mut dts = Vec::new();
    let mut max_residuals = Vec::new();
    for _ in 0..levels {
        let series = run(&cfg)?;
        dts.push(cfg.dt);
        max_residuals.push(energy_audit(&series).max_abs);
        cfg.dt /= lit::<T>(2.0);
    }
    let orders = max_residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(HalvingStudy { dts, max_residuals, orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CoefficientProfile, PathNode};

    fn poly(c: Vec<f64>) -> CoefficientProfile<f64> {
        CoefficientProfile::polynomial(-1.0, 1.0, c).unwrap()
    }

    fn materials() -> MaterialPair<f64> {
        // Q⁺ = ρ Q⁻ with ρ = 1 + z/10, diagonal and smooth
        MaterialPair::diagonal(poly(vec![1.0, 0.0, 0.25]), poly(vec![2.0]), poly(vec![1.0, 0.1, 0.25, 0.025]), poly(vec![2.0, 0.2]))
            .unwrap()
    }

    fn config(bc: BoundarySpec<f64>) -> SimulationConfig<f64> {
        let dom = DomainSpec::new(-1.0, 1.0, 0.1).unwrap();
        let mut c = SimulationConfig::fixed(dom, materials(), bc, 24);
        c.horizon = 0.2;
        c.dt = 1e-2;
        c.seed = 7;
        c
    }

    #[test]
    fn zero_state_stays_zero() {
        let cfg = config(BoundarySpec::dissipative());
        let grid = build_grid(&cfg.dom, 0.1, 24, 24).unwrap();
        let x = StateVector::zeros(&grid);
        let y = step(&x, 0.0, 0.01, &cfg).unwrap();
        assert_eq!(y.values.amax(), 0.0);
    }

    #[test]
    fn midpoint_is_an_isometry_for_lossless_ports() {
        let cfg = config(BoundarySpec::conservative());
        let series = run(&cfg).unwrap();
        let h0 = series.records[0].h;
        assert!(h0 > 0.0);
        for r in &series.records {
            assert!((r.h - h0).abs() <= 1e-12 * h0, "{} vs {h0}", r.h);
            assert!(r.boundary_power.abs() < 1e-12 && r.interface_power.abs() < 1e-12);
        }
        assert!(series.max_constraint_residual < 1e-10);
        assert!(series.initial_violation < 1e-12);
    }

    #[test]
    fn step_difference_quotient_matches_generator() {
        let cfg = config(BoundarySpec::dissipative());
        let grid = build_grid(&cfg.dom, 0.1, 24, 24).unwrap();
        let gen = FrozenGenerator::new(grid.clone(), &cfg.mat, &cfg.bc).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = gen.project(&initial_state(&grid, 3, &mut rng));
        let ax = |v: &DVector<f64>| gen.projector.apply(&(&gen.jq * v));
        let mut errs = Vec::new();
        for dt in [1e-3, 5e-4] {
            let y = step(&x, 0.0, dt, &cfg).unwrap();
            let dq = (&y.values - &x.values) / dt;
            // exact against the midpoint average, first order against x
            let mid = (&y.values + &x.values) * 0.5;
            assert!((&dq - ax(&mid)).amax() <= 1e-8 * dq.amax());
            errs.push((&dq - ax(&x.values)).amax());
        }
        let ratio = errs[0] / errs[1];
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn dissipative_energy_is_nonincreasing_and_audit_is_second_order() {
        let cfg = config(BoundarySpec::dissipative());
        let series = run(&cfg).unwrap();
        for w in series.records.windows(2) {
            assert!(w[1].h <= w[0].h * (1.0 + 1e-12));
        }
        let study = halving_study(&cfg, 3).unwrap();
        for o in &study.orders {
            assert!(*o >= 1.9, "{study:?}");
        }
    }

    #[test]
    fn transfer_is_exact_on_linear_states_and_identity_without_motion() {
        let dom = DomainSpec::new(-1.0, 1.0, 0.1).unwrap();
        let old = build_grid(&dom, 0.1, 20, 20).unwrap();
        let new = build_grid(&dom, 0.12, 20, 20).unwrap();
        let x = StateVector::from_fn(&old, |z, s| match s {
            crate::model::Side::Minus => [1.0 + z, 2.0 - z],
            crate::model::Side::Plus => [3.0 * z, -1.0],
        });
        let y = transfer(&x, &old, &new, 1.0).unwrap();
        let want = StateVector::from_fn(&new, |z, s| match s {
            crate::model::Side::Minus => [1.0 + z, 2.0 - z],
            crate::model::Side::Plus => [3.0 * z, -1.0],
        });
        assert!((&y.values - &want.values).amax() < 1e-14);
        assert_eq!(transfer(&x, &old, &old, 1.0).unwrap(), x);
        let far = build_grid(&dom, 0.3, 20, 20).unwrap();
        assert!(matches!(transfer(&x, &old, &far, 1.0), Err(Error::Regrid { .. })));
    }

    #[test]
    fn transfer_energy_error_is_second_order_in_h() {
        let dom = DomainSpec::new(-1.0, 1.0, 0.1).unwrap();
        let mat = materials();
        let bc = BoundarySpec::dissipative();
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let old = FrozenGenerator::new(build_grid(&dom, 0.1, n, n).unwrap(), &mat, &bc).unwrap();
            let h = old.grid.min_spacing();
            let new = FrozenGenerator::new(build_grid(&dom, 0.1 + h / 2.0, n, n).unwrap(), &mat, &bc).unwrap();
            let x = old.project(&StateVector::from_fn(&old.grid, |z, _| {
                let bump = ((1.0 - z * z) * (z - 0.1)).powi(2);
                [bump * (2.0 * z).sin(), bump * (1.0 + z).cos()]
            }));
            errs.push(regrid(&x, &old, &new, 1.0).unwrap().dh.abs());
        }
        for w in errs.windows(2) {
            assert!(w[0] / w[1] > 3.0, "{errs:?}");
        }
    }

    #[test]
    fn moving_interface_respects_certified_envelope() {
        let dom = DomainSpec::new(-1.0, 1.0, 0.0).unwrap();
        let mut cfg = SimulationConfig::fixed(dom, materials(), BoundarySpec::dissipative(), 32);
        cfg.horizon = 0.5;
        cfg.dt = 5e-3;
        cfg.path = InterfacePath::new(
            vec![PathNode { t: 0.0, l: -0.1, dl: 0.0 }, PathNode { t: 0.5, l: 0.1, dl: 0.0 }],
            &dom,
            0.2,
        )
        .unwrap();
        let series = run(&cfg).unwrap();
        let env = series.envelope.unwrap();
        assert!(env.omega > 0.0);
        assert!(env.pass, "{env:?}");
        assert!(series.max_shift > 0.0);
        assert!(series.records.iter().all(|r| r.h.is_finite() && r.e_l.is_finite()));
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = config(BoundarySpec::dissipative());
        assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
        let mut other = cfg.clone();
        other.seed = 8;
        assert_ne!(run(&cfg).unwrap().records[0].h, run(&other).unwrap().records[0].h);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = config(BoundarySpec::dissipative());
        cfg.dt = 0.03;
        assert!(cfg.validate().is_err());
        cfg.dt = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = config(BoundarySpec::dissipative());
        cfg.cadence = 0;
        assert!(run(&cfg).is_err());
    }
}
