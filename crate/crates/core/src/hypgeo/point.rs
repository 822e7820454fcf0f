use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Coordinate tolerance used by [`UpperHalfPoint::approx_eq`].
pub const POINT_EQ_TOL: f64 = 1e-12;

/// A point of the closed upper half-plane, or the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint<T> {
    pub re: T,
    pub im: T,
    /// When set, `re` and `im` carry no meaning.
    #[serde(default)]
    pub at_infinity: bool,
}

impl<T: Real> UpperHalfPoint<T> {
    pub fn new(re: T, im: T) -> Self {
        Self {
            re,
            im,
            at_infinity: false,
        }
    }

    pub fn infinity() -> Self {
        Self {
            re: T::zero(),
            im: T::zero(),
            at_infinity: true,
        }
    }

    /// `i`, the base point of all the normalizations below.
    pub fn i() -> Self {
        Self::new(T::zero(), T::one())
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.re, self.im)
    }

    /// True for finite points with strictly positive imaginary part.
    pub fn is_interior(&self) -> bool {
        !self.at_infinity && self.im > T::zero() && self.re.is_finite() && self.im.is_finite()
    }

    /// Fails with a domain error unless the point lies in the open half-plane.
    pub fn require_interior(&self, what: &str) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else if self.at_infinity {
            Err(Error::Domain(format!("{what}: point at infinity")))
        } else {
            Err(Error::Domain(format!(
                "{what}: boundary or invalid point {}+{}i",
                self.re, self.im
            )))
        }
    }

    /// Euclidean modulus.
    pub fn abs(&self) -> T {
        self.re.hypot(self.im)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.approx_eq_tol(other, T::lit(POINT_EQ_TOL))
    }

    pub fn approx_eq_tol(&self, other: &Self, tol: T) -> bool {
        if self.at_infinity || other.at_infinity {
            return self.at_infinity == other.at_infinity;
        }
        (self.re - other.re).abs() <= tol && (self.im - other.im).abs() <= tol
    }
}

/// An element of SL(2, R) acting by fractional linear transformations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> MobiusMap<T> {
    /// Builds the map, checking `ad - bc = 1` to within 1e-12.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let det = a * d - b * c;
        if (det - T::one()).abs() > T::lit(1e-12) {
            return Err(Error::InvalidInput(format!(
                "Mobius determinant {det} differs from 1"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// Normalizes an arbitrary matrix with positive determinant to unit determinant.
    pub fn normalized(a: T, b: T, c: T, d: T) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "determinant {det} is not positive"
            )));
        }
        let k = det.sqrt().recip();
        Self::new(a * k, b * k, c * k, d * k)
    }

    pub fn identity() -> Self {
        Self {
            a: T::one(),
            b: T::zero(),
            c: T::zero(),
            d: T::one(),
        }
    }

    pub fn translation(t: T) -> Self {
        Self {
            a: T::one(),
            b: t,
            c: T::zero(),
            d: T::one(),
        }
    }

    /// `z -> k z` for `k > 0`.
    pub fn dilation(k: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(Error::InvalidInput(format!("dilation factor {k} must be positive")));
        }
        let r = k.sqrt();
        Ok(Self {
            a: r,
            b: T::zero(),
            c: T::zero(),
            d: r.recip(),
        })
    }

    /// Elliptic element fixing `i`; rotates tangent vectors at `i` by `angle`.
    pub fn rotation_about_i(angle: T) -> Self {
        let half = angle / T::lit(2.0);
        let (s, c) = half.sin_cos();
        Self { a: c, b: s, c: -s, d: c }
    }

    pub fn determinant(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }
}

/// A finite, normalized, weighted set of interior points: the law of an
/// atomic half-plane valued random variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet<T> {
    points: Vec<UpperHalfPoint<T>>,
    weights: Vec<T>,
}

impl<T: Real> WeightedPointSet<T> {
    /// Validates non-negative weights summing to one (within 1e-12) and interior points.
    pub fn new(points: Vec<UpperHalfPoint<T>>, weights: Vec<T>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("empty point set".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite and non-negative".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(1e-12) {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        for p in &points {
            p.require_interior("weighted point set")?;
        }
        Ok(Self { points, weights })
    }

    /// Like [`Self::new`] but rescales positive weights to sum to one.
    pub fn normalized(points: Vec<UpperHalfPoint<T>>, weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::InvalidInput("weights have non-positive total".into()));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Self::new(points, weights)
    }

    /// Equal weights `1/n`.
    pub fn uniform(points: Vec<UpperHalfPoint<T>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty point set".into()));
        }
        let w = T::one() / T::from_count(n);
        Self::normalized(points, vec![w; n])
    }

    pub fn single(point: UpperHalfPoint<T>) -> Result<Self> {
        Self::new(vec![point], vec![T::one()])
    }

    pub fn points(&self) -> &[UpperHalfPoint<T>] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&UpperHalfPoint<T>, &T)> {
        self.points.iter().zip(self.weights.iter())
    }

    /// Image of the set under a Mobius map (weights unchanged).
    pub fn map(&self, m: &MobiusMap<T>) -> Self {
        Self {
            points: self.points.iter().map(|p| super::mobius_apply(m, *p)).collect(),
            weights: self.weights.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_weights() {
        let p = UpperHalfPoint::new(0.0, 1.0);
        assert!(WeightedPointSet::new(vec![p, p], vec![0.5, 0.6]).is_err());
        assert!(WeightedPointSet::new(vec![p], vec![-1.0]).is_err());
        assert!(WeightedPointSet::<f64>::new(vec![], vec![]).is_err());
        assert!(WeightedPointSet::new(vec![UpperHalfPoint::new(0.0, 0.0)], vec![1.0]).is_err());
        assert!(WeightedPointSet::new(vec![p, p], vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn mobius_determinant_checked() {
        assert!(MobiusMap::new(1.0, 1.0, 0.0, 1.0).is_ok());
        assert!(MobiusMap::new(2.0, 0.0, 0.0, 1.0).is_err());
        let m = MobiusMap::normalized(2.0, 0.0, 0.0, 1.0).unwrap();
        assert!((m.determinant() - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn infinity_equality() {
        let inf = UpperHalfPoint::<f64>::infinity();
        assert!(inf.approx_eq(&UpperHalfPoint::infinity()));
        assert!(!inf.approx_eq(&UpperHalfPoint::i()));
        assert!(inf.require_interior("t").is_err());
    }
}
