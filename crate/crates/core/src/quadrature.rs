//! Composite Gauss–Legendre quadrature split at breakpoints, so piecewise
//! polynomial integrands are integrated piece by piece.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Nodes of a composite rule on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Composite rule with about `total` points, distributed over the segments
/// between consecutive `breaks` in proportion to their lengths. Each segment
/// is cut into panels carrying an `order`-point Gauss–Legendre rule, with at
/// least `min_panels` panels per segment.
pub fn composite_rule<T: Real>(breaks: &[T], order: usize, total: usize, min_panels: usize) -> Result<CompositeRule<T>> {
    let order_nz = NonZeroUsize::new(order).ok_or_else(|| Error::Parameter("quadrature order must be positive".into()))?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parameter("quadrature breakpoints must increase strictly".into()));
    }
    let rule = GaussLegendre::new(order_nz);
    let ref_pairs: Vec<(T, T)> = rule.as_node_weight_pairs().iter().map(|&(x, w)| (lit::<T>(x), lit::<T>(w))).collect();
    let span = breaks[breaks.len() - 1] - breaks[0];
    let panels_total = (total as f64 / order as f64).ceil();
    let half = lit::<T>(0.5);
    let mut nodes = Vec::with_capacity(total + breaks.len() * order * min_panels);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in breaks.windows(2) {
        let share = crate::scalar::to_f64((w[1] - w[0]) / span);
        let panels = ((share * panels_total).ceil() as usize).max(min_panels.max(1));
        let width = (w[1] - w[0]) / count::<T>(panels);
        for p in 0..panels {
            let lo = w[0] + width * count::<T>(p);
            let mid = lo + width * half;
            for &(x, wt) in &ref_pairs {
                nodes.push(mid + x * width * half);
                weights.push(wt * width * half);
            }
        }
    }
    Ok(CompositeRule { nodes, weights })
}

impl<T: Real> CompositeRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (&z, &w)| acc + w * f(z))
    }

    /// Integrates several integrands sharing one evaluation per node.
    pub fn integrate_many<const N: usize>(&self, f: impl Fn(T) -> [T; N]) -> [T; N] {
        let mut acc = [T::zero(); N];
        for (&z, &w) in self.nodes.iter().zip(&self.weights) {
            for (a, v) in acc.iter_mut().zip(f(z)) {
                *a += w * v;
            }
        }
        acc
    }

    /// Number of nodes inside `[lo, hi]`.
    pub fn points_in(&self, lo: T, hi: T) -> usize {
        self.nodes.iter().filter(|&&z| z >= lo && z <= hi).count()
    }
}
