use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Spatial domain `[a, b]` with `a < 0 < b` and a reference interface
/// position `l0 ∈ (a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec<T> {
    pub a: T,
    pub b: T,
    pub l0: T,
}

impl<T: Real> DomainSpec<T> {
    pub fn new(a: T, b: T, l0: T) -> Result<Self> {
        if !(a < T::zero() && T::zero() < b) {
            return Err(Error::InvalidDomain(format!("need a < 0 < b, got a = {a}, b = {b}")));
        }
        if !(a < l0 && l0 < b) {
            return Err(Error::InvalidDomain(format!("interface l0 = {l0} not inside ({a}, {b})")));
        }
        Ok(Self { a, b, l0 })
    }

    pub fn length(&self) -> T {
        self.b - self.a
    }
}

/// Color functions (c⁻, c⁺) at z for interface position l.
///
/// c⁻ = 1 on `[a, l)`, c⁺ = 1 on `(l, b]`; both vanish at z = l, where the
/// one-sided traces take over.
pub fn color<T: Real>(l: T, z: T) -> (T, T) {
    if z < l {
        (T::one(), T::zero())
    } else if z > l {
        (T::zero(), T::one())
    } else {
        (T::zero(), T::zero())
    }
}

/// Hermite node of an interface path: time, position, velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathNode<T> {
    pub t: T,
    pub l: T,
    pub dl: T,
}

/// Prescribed interface motion `l : [0, τ] → (a, b)`, piecewise cubic
/// Hermite and therefore C¹.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfacePath<T> {
    nodes: Vec<PathNode<T>>,
}

impl<T: Real> InterfacePath<T> {
    /// Builds a path and checks that it stays `margin` away from both ends of
    /// the domain.
    pub fn new(nodes: Vec<PathNode<T>>, dom: &DomainSpec<T>, margin: T) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Path("need at least two breakpoints".into()));
        }
        if nodes[0].t != T::zero() {
            return Err(Error::Path(format!("path must start at t = 0, got {}", nodes[0].t)));
        }
        if nodes.windows(2).any(|w| !(w[0].t < w[1].t)) {
            return Err(Error::Path("breakpoint times must increase strictly".into()));
        }
        if nodes.iter().any(|n| !n.l.is_finite() || !n.dl.is_finite()) {
            return Err(Error::Path("non-finite breakpoint".into()));
        }
        let path = Self { nodes };
        let (lo, hi) = path.range(64);
        if !(lo > dom.a + margin && hi < dom.b - margin) {
            return Err(Error::Path(format!(
                "range [{lo}, {hi}] leaves ({}, {}) shrunk by margin {margin}",
                dom.a, dom.b
            )));
        }
        Ok(path)
    }

    /// l(t) = l for all t ∈ [0, τ].
    pub fn constant(l: T, horizon: T) -> Self {
        Self {
            nodes: vec![
                PathNode { t: T::zero(), l, dl: T::zero() },
                PathNode { t: horizon, l, dl: T::zero() },
            ],
        }
    }

    /// Straight motion from `l_start` to `l_end` over `[0, τ]`.
    pub fn linear(l_start: T, l_end: T, horizon: T) -> Self {
        let v = (l_end - l_start) / horizon;
        Self {
            nodes: vec![
                PathNode { t: T::zero(), l: l_start, dl: v },
                PathNode { t: horizon, l: l_end, dl: v },
            ],
        }
    }

    pub fn nodes(&self) -> &[PathNode<T>] {
        &self.nodes
    }

    pub fn horizon(&self) -> T {
        self.nodes.last().unwrap().t
    }

    fn segment(&self, t: T) -> (usize, T, T) {
        let t = t.max(T::zero()).min(self.horizon());
        let i = self.nodes.partition_point(|n| n.t <= t).clamp(1, self.nodes.len() - 1) - 1;
        let h = self.nodes[i + 1].t - self.nodes[i].t;
        (i, (t - self.nodes[i].t) / h, h)
    }

    /// l(t); t is clamped to `[0, τ]`.
    pub fn eval(&self, t: T) -> T {
        let (i, s, h) = self.segment(t);
        let (p, q) = (&self.nodes[i], &self.nodes[i + 1]);
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        h00 * p.l + h10 * h * p.dl + h01 * q.l + h11 * h * q.dl
    }

    /// l'(t).
    pub fn velocity(&self, t: T) -> T {
        let (i, s, h) = self.segment(t);
        let (p, q) = (&self.nodes[i], &self.nodes[i + 1]);
        let six = lit::<T>(6.0);
        let s2 = s * s;
        let d00 = six * s2 - six * s;
        let d10 = lit::<T>(3.0) * s2 - lit::<T>(4.0) * s + T::one();
        let d01 = -six * s2 + six * s;
        let d11 = lit::<T>(3.0) * s2 - lit::<T>(2.0) * s;
        (d00 * p.l + d01 * q.l) / h + d10 * p.dl + d11 * q.dl
    }

    /// Sampled (min, max) of l over the horizon.
    pub fn range(&self, per_segment: usize) -> (T, T) {
        let mut lo = self.nodes[0].l;
        let mut hi = lo;
        for w in self.nodes.windows(2) {
            for k in 0..=per_segment {
                let t = w[0].t + (w[1].t - w[0].t) * count::<T>(k) / count::<T>(per_segment);
                let v = self.eval(t);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }
}
