//! Gauss–Legendre panels, including panels graded toward an integrable
//! `|r - c|^(-beta)` endpoint singularity.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::real::Real;

/// Default number of Gauss–Legendre points per panel.
pub const DEFAULT_PANEL_ORDER: usize = 64;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn new(order: usize) -> Result<Self> {
        let degree = NonZeroUsize::new(order)
            .ok_or_else(|| Error::InvalidInput("quadrature order must be positive".into()))?;
        let rule = GaussLegendre::new(degree);
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| T::lit(p.0)).collect(),
            weights: pairs.iter().map(|p| T::lit(p.1)).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Plain rule on [a, b].
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (b + a) * T::lit(0.5);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half * *x);
        }
        acc * half
    }

    /// Appends nodes and weights for `[a, b]`, graded toward `anchor`.
    ///
    /// With `anchor = Some(c)` and `c <= a` (or `c >= b`) the variable
    /// `t = |r - c|^(1 - beta)` is used, which absorbs a `|r - c|^(-beta)`
    /// factor of the integrand into the Jacobian.
    pub fn push_panel(&self, a: T, b: T, anchor: Option<T>, beta: T, out: &mut Vec<(T, T)>) {
        if b <= a {
            return;
        }
        let half_pt = T::lit(0.5);
        match anchor {
            Some(c) if beta > T::zero() && (c <= a || c >= b) => {
                let gamma = T::one() - beta;
                let inv = T::one() / gamma;
                let left = c <= a;
                let (ta, tb) = if left {
                    ((a - c).powf(gamma), (b - c).powf(gamma))
                } else {
                    ((c - b).powf(gamma), (c - a).powf(gamma))
                };
                let half = (tb - ta) * half_pt;
                let mid = (tb + ta) * half_pt;
                for (x, w) in self.nodes.iter().zip(&self.weights) {
                    let t = mid + half * *x;
                    let d = t.powf(inv);
                    let r = if left { c + d } else { c - d };
                    let jac = inv * d / t;
                    out.push((r, *w * half * jac));
                }
            }
            _ => {
                let half = (b - a) * half_pt;
                let mid = (b + a) * half_pt;
                for (x, w) in self.nodes.iter().zip(&self.weights) {
                    out.push((mid + half * *x, *w * half));
                }
            }
        }
    }

    /// Nodes and weights on `[lo, hi]` for integrands that are smooth apart
    /// from jumps at `breaks` and `|r - c|^(-beta)` singularities at `singular`.
    ///
    /// Cuts at breaks, at interior singular points and midway between
    /// neighbouring singular points; every panel within one panel length of
    /// a singular point (inside or just outside the range) is graded toward it.
    pub fn singular_points(
        &self,
        lo: T,
        hi: T,
        breaks: &[T],
        singular: &[T],
        beta: T,
        out: &mut Vec<(T, T)>,
    ) {
        let mut cuts: Vec<T> = Vec::with_capacity(breaks.len() + 3 * singular.len() + 2);
        cuts.push(lo);
        cuts.push(hi);
        cuts.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
        let mut inside: Vec<T> = singular.iter().copied().filter(|&x| x > lo && x < hi).collect();
        inside.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        cuts.extend(inside.iter().copied());
        cuts.extend(inside.windows(2).map(|p| (p[0] + p[1]) * T::lit(0.5)));
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        cuts.dedup();
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let len = b - a;
            let left = singular
                .iter()
                .copied()
                .filter(|&c| c <= a && a - c < len)
                .fold(None, |best: Option<T>, c| Some(best.map_or(c, |v: T| v.max(c))));
            let right = singular
                .iter()
                .copied()
                .filter(|&c| c >= b && c - b < len)
                .fold(None, |best: Option<T>, c| Some(best.map_or(c, |v: T| v.min(c))));
            match (left, right) {
                (Some(l), Some(r)) => {
                    let m = (a + b) * T::lit(0.5);
                    self.graded_panel(a, m, l, true, singular, beta, out);
                    self.graded_panel(m, b, r, false, singular, beta, out);
                }
                (Some(l), None) => self.graded_panel(a, b, l, true, singular, beta, out),
                (None, Some(r)) => self.graded_panel(a, b, r, false, singular, beta, out),
                (None, None) => self.push_panel(a, b, None, beta, out),
            }
        }
    }

    /// Panel graded toward `c`; when a second singular point sits behind `c`
    /// at a distance `gap` (below the panel length) the panel is split
    /// geometrically at `c ± gap * 4^j` so the cluster is resolved.
    #[allow(clippy::too_many_arguments)]
    fn graded_panel(&self, a: T, b: T, c: T, left: bool, singular: &[T], beta: T, out: &mut Vec<(T, T)>) {
        let len = b - a;
        let gap = singular
            .iter()
            .map(|&x| if left { c - x } else { x - c })
            .filter(|&g| g > T::zero() && g < len)
            .fold(None, |best: Option<T>, g| Some(best.map_or(g, |v: T| v.min(g))));
        let offset = if left { a - c } else { c - b };
        let Some(gap) = gap.filter(|&g| offset < g) else {
            self.push_panel(a, b, Some(c), beta, out);
            return;
        };
        let mut cuts = vec![a, b];
        let mut d = gap;
        while d < len + offset {
            let x = if left { c + d } else { c - d };
            if x > a && x < b {
                cuts.push(x);
            }
            d *= T::lit(4.0);
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        for seg in cuts.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let seg_len = hi - lo;
            // nearest singular point on the anchored side
            let anchor = singular
                .iter()
                .copied()
                .filter(|&x| if left { x <= lo && lo - x < seg_len } else { x >= hi && x - hi < seg_len })
                .fold(None, |best: Option<T>, x| {
                    Some(best.map_or(x, |v: T| if left { v.max(x) } else { v.min(x) }))
                });
            self.push_panel(lo, hi, anchor, beta, out);
        }
    }
}
