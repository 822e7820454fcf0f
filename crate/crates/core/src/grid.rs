//! Discretization of the compactified real line by a uniform grid in
//! `theta = atan(w)`, plus one node at infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

pub const DEFAULT_NODES: usize = 4096;

/// `theta_j = -pi/2 + (j + 1/2) pi / n`, `w_j = tan(theta_j)`, and `w = inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WGrid<T> {
    thetas: Vec<T>,
    ws: Vec<T>,
}

impl<T: Real> WGrid<T> {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 finite nodes".into()));
        }
        let pi = T::PI();
        let h = pi / T::from_count(n_nodes);
        let half = T::lit(0.5);
        let thetas: Vec<T> = (0..n_nodes)
            .map(|j| -pi * half + (T::from_count(j) + half) * h)
            .collect();
        // exact antisymmetry of the w values
        let mut ws: Vec<T> = thetas.iter().map(|t| t.tan()).collect();
        for j in 0..n_nodes / 2 {
            let k = n_nodes - 1 - j;
            let m = (ws[k] - ws[j]) * half;
            ws[j] = -m;
            ws[k] = m;
        }
        if n_nodes % 2 == 1 {
            ws[n_nodes / 2] = T::zero();
        }
        Ok(Self { thetas, ws })
    }

    /// Finite node count (the node at infinity is extra).
    pub fn n_nodes(&self) -> usize {
        self.ws.len()
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn ws(&self) -> &[T] {
        &self.ws
    }

    pub fn spacing(&self) -> T {
        T::PI() / T::from_count(self.ws.len())
    }

    /// Same construction with twice the nodes (half the spacing).
    pub fn refined(&self) -> Self {
        Self::new(2 * self.n_nodes()).expect("refining a valid grid")
    }

    /// Interpolation stencil for a finite `w`: `(lo, hi, lambda)` with the
    /// value `(1 - lambda) f[lo] + lambda f[hi]`; index `n_nodes()` stands
    /// for the node at infinity, which closes the circle at `theta = ±pi/2`.
    pub fn stencil(&self, w: T) -> (usize, usize, T) {
        let n = self.ws.len();
        let x = (w.atan() + T::FRAC_PI_2()) / self.spacing() - T::lit(0.5);
        if !(x >= T::zero()) {
            // between -inf and the first node (also catches NaN)
            let lam = (x + T::lit(0.5)) * T::lit(2.0);
            return (n, 0, lam.max(T::zero()).min(T::one()));
        }
        let last = T::from_count(n - 1);
        if x >= last {
            let lam = (x - last) * T::lit(2.0);
            return (n - 1, n, lam.max(T::zero()).min(T::one()));
        }
        let j = x.floor().to_usize().unwrap_or(0).min(n - 2);
        (j, j + 1, x - T::from_count(j))
    }
}

/// Non-negative function on the grid with its value at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction<T> {
    pub values: Vec<T>,
    pub value_at_infinity: T,
}

impl<T: Real> GridFunction<T> {
    pub fn constant(grid: &WGrid<T>, c: T) -> Self {
        Self { values: vec![c; grid.n_nodes()], value_at_infinity: c }
    }

    pub fn from_fn(grid: &WGrid<T>, f: impl Fn(T) -> T, at_infinity: T) -> Self {
        Self { values: grid.ws().iter().map(|&w| f(w)).collect(), value_at_infinity: at_infinity }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self, grid: &WGrid<T>) -> Result<()> {
        if self.values.len() != grid.n_nodes() {
            return Err(Error::InvalidInput(format!(
                "grid function has {} values for a {}-node grid",
                self.values.len(),
                grid.n_nodes()
            )));
        }
        let bad = self
            .values
            .iter()
            .chain(std::iter::once(&self.value_at_infinity))
            .any(|v| !v.is_finite() || *v < T::zero());
        if bad {
            return Err(Error::InvalidInput("grid function must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// Value at index `j`, with `j == len()` meaning infinity.
    #[inline]
    pub fn at(&self, j: usize) -> T {
        if j == self.values.len() {
            self.value_at_infinity
        } else {
            self.values[j]
        }
    }

    /// Linear interpolation in theta.
    pub fn eval(&self, grid: &WGrid<T>, w: T) -> T {
        if !w.is_finite() {
            return self.value_at_infinity;
        }
        let (lo, hi, lam) = grid.stencil(w);
        (T::one() - lam) * self.at(lo) + lam * self.at(hi)
    }

    /// Sup norm including the node at infinity.
    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(self.value_at_infinity.abs(), |a, v| a.max(v.abs()))
    }

    /// Node index of the largest finite value.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = j;
            }
        }
        best
    }

    pub fn scale_add(&self, a: T, other: &Self, b: T) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * *x + b * *y).collect(),
            value_at_infinity: a * self.value_at_infinity + b * other.value_at_infinity,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold((self.value_at_infinity - other.value_at_infinity).abs(), |a, (x, y)| {
                a.max((*x - *y).abs())
            })
    }
}
