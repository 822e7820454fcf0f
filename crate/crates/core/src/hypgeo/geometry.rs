use num_complex::Complex;

use super::point::{MobiusMap, UpperHalfPoint};
use crate::error::{Error, Result};
use crate::real::Real;

/// Hyperbolic distance in the upper half-plane.
///
/// Evaluated as `2 asinh(|z1 - z2| / (2 sqrt(y1 y2)))`, which equals
/// `arcosh(1 + |z1 - z2|^2 / (2 y1 y2))` without the cancellation near 0.
pub fn hyp_dist<T: Real>(z1: UpperHalfPoint<T>, z2: UpperHalfPoint<T>) -> Result<T> {
    z1.require_interior("hyp_dist")?;
    z2.require_interior("hyp_dist")?;
    Ok(dist_unchecked(z1, z2))
}

#[inline]
pub(crate) fn dist_unchecked<T: Real>(z1: UpperHalfPoint<T>, z2: UpperHalfPoint<T>) -> T {
    let chord = (z1.re - z2.re).hypot(z1.im - z2.im);
    let two = T::lit(2.0);
    two * (chord / (two * (z1.im * z2.im).sqrt())).asinh()
}

/// `(a z + b) / (c z + d)` on the closed half-plane including infinity.
pub fn mobius_apply<T: Real>(m: &MobiusMap<T>, z: UpperHalfPoint<T>) -> UpperHalfPoint<T> {
    if z.at_infinity {
        if m.c == T::zero() {
            return UpperHalfPoint::infinity();
        }
        return UpperHalfPoint::new(m.a / m.c, T::zero());
    }
    let zc = z.to_complex();
    let den = zc * m.c + m.d;
    let den2 = den.norm_sqr();
    if den2 == T::zero() {
        return UpperHalfPoint::infinity();
    }
    let num = zc * m.a + m.b;
    let re = (num * den.conj()).re / den2;
    // Im(Mz) = Im(z) / |cz + d|^2 for unit determinant; keeps the sign exact.
    let im = z.im * m.determinant() / den2;
    UpperHalfPoint::new(re, im)
}

/// Riemannian logarithm at `i`, as a Euclidean tangent vector.
fn log_at_i<T: Real>(p: UpperHalfPoint<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    let pc = p.to_complex();
    // Cayley transform to the disk sends i to 0; geodesics from 0 are radii.
    let disk = (pc - i) / (pc + i);
    let r = disk.norm();
    if r == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let d = dist_unchecked(UpperHalfPoint::i(), p);
    // d(Cayley)/dz at i is -i/2, so a disk direction u maps back to i u.
    i * disk.unscale(r) * d
}

/// Riemannian exponential at `i` of a Euclidean tangent vector.
fn exp_at_i<T: Real>(v: Complex<T>) -> UpperHalfPoint<T> {
    let d = v.norm();
    if d == T::zero() {
        return UpperHalfPoint::i();
    }
    // Rotate the upward geodesic t -> i e^t onto direction v.
    let angle = v.im.atan2(v.re) - T::FRAC_PI_2();
    let MobiusMap { a: c, b: s, .. } = MobiusMap::rotation_about_i(angle);
    let e2 = (d + d).exp();
    let den = c * c + s * s * e2;
    if !e2.is_finite() {
        // Far out along a non-vertical geodesic the point converges to the
        // real boundary point -c/s; along the vertical one it runs to infinity.
        if s == T::zero() {
            return UpperHalfPoint::infinity();
        }
        return UpperHalfPoint::new(-c / s, T::zero());
    }
    UpperHalfPoint::new(s * c * (T::one() - e2) / den, d.exp() / den)
}

/// Riemannian logarithm `log_z(x)`; the result is a Euclidean vector at `z`
/// whose hyperbolic length is `d(z, x)`.
pub fn log_map<T: Real>(z: UpperHalfPoint<T>, x: UpperHalfPoint<T>) -> Result<Complex<T>> {
    z.require_interior("log_map base")?;
    x.require_interior("log_map target")?;
    Ok(log_map_unchecked(z, x))
}

#[inline]
pub(crate) fn log_map_unchecked<T: Real>(z: UpperHalfPoint<T>, x: UpperHalfPoint<T>) -> Complex<T> {
    let local = UpperHalfPoint::new((x.re - z.re) / z.im, x.im / z.im);
    log_at_i(local).scale(z.im)
}

/// Riemannian exponential `exp_z(v)` for a Euclidean tangent vector `v` at `z`.
pub fn exp_map<T: Real>(z: UpperHalfPoint<T>, v: Complex<T>) -> Result<UpperHalfPoint<T>> {
    z.require_interior("exp_map base")?;
    Ok(exp_map_unchecked(z, v))
}

#[inline]
pub(crate) fn exp_map_unchecked<T: Real>(z: UpperHalfPoint<T>, v: Complex<T>) -> UpperHalfPoint<T> {
    let p = exp_at_i(v.unscale(z.im));
    UpperHalfPoint::new(z.re + z.im * p.re, z.im * p.im)
}

/// Hyperbolic length of a Euclidean tangent vector at `z`.
#[inline]
pub fn tangent_norm<T: Real>(z: UpperHalfPoint<T>, v: Complex<T>) -> T {
    v.norm() / z.im
}

/// Point `gamma(lambda)` on the geodesic with `gamma(0) = z0`, `gamma(1) = z1`.
pub fn geodesic_combine<T: Real>(
    z0: UpperHalfPoint<T>,
    z1: UpperHalfPoint<T>,
    lambda: T,
) -> Result<UpperHalfPoint<T>> {
    z0.require_interior("geodesic_combine")?;
    z1.require_interior("geodesic_combine")?;
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::Domain(format!(
            "geodesic parameter {lambda} outside [0, 1]"
        )));
    }
    Ok(geodesic_unchecked(z0, z1, lambda))
}

#[inline]
pub(crate) fn geodesic_unchecked<T: Real>(
    z0: UpperHalfPoint<T>,
    z1: UpperHalfPoint<T>,
    lambda: T,
) -> UpperHalfPoint<T> {
    if lambda == T::zero() {
        return z0;
    }
    if lambda == T::one() {
        return z1;
    }
    exp_map_unchecked(z0, log_map_unchecked(z0, z1).scale(lambda))
}

/// Geodesic midpoint `(z0 + z1) / 2` in the hyperbolic sense.
pub fn midpoint<T: Real>(z0: UpperHalfPoint<T>, z1: UpperHalfPoint<T>) -> Result<UpperHalfPoint<T>> {
    geodesic_combine(z0, z1, T::lit(0.5))
}

/// The geodesically convex energy `log(|z|^2 / Im z) = -log Im(-1/z)`.
pub fn f_energy<T: Real>(z: UpperHalfPoint<T>) -> Result<T> {
    z.require_interior("f_energy")?;
    Ok(f_energy_unchecked(z))
}

#[inline]
pub(crate) fn f_energy_unchecked<T: Real>(z: UpperHalfPoint<T>) -> T {
    let r = z.re.hypot(z.im);
    T::lit(2.0) * r.ln() - z.im.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(re: f64, im: f64) -> UpperHalfPoint<f64> {
        UpperHalfPoint::new(re, im)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyp_dist(p(0.0, 1.0), p(0.0, 1.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(hyp_dist(p(0.0, 1.0), p(0.0, std::f64::consts::E)).unwrap(), 1.0, epsilon = 1e-14);
        // arcosh(1.5)
        let expected = (1.5f64 + (1.5f64 * 1.5 - 1.0).sqrt()).ln();
        assert_abs_diff_eq!(hyp_dist(p(0.0, 1.0), p(1.0, 1.0)).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(expected, 0.962424, epsilon = 1e-6);
    }

    #[test]
    fn distance_rejects_boundary() {
        assert!(matches!(hyp_dist(p(0.0, 0.0), p(0.0, 1.0)), Err(Error::Domain(_))));
        assert!(hyp_dist(UpperHalfPoint::infinity(), p(0.0, 1.0)).is_err());
    }

    #[test]
    fn mobius_examples() {
        let i = p(0.0, 1.0);
        let t = MobiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(mobius_apply(&t, i).approx_eq(&p(1.0, 1.0)));
        let inv = MobiusMap::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert!(mobius_apply(&inv, i).approx_eq(&i));
        let s2 = 2f64.sqrt();
        let dil = MobiusMap::new(s2, 0.0, 0.0, 1.0 / s2).unwrap();
        assert!(mobius_apply(&dil, i).approx_eq(&p(0.0, 2.0)));
        // infinity goes to a/c, or stays when c = 0
        let w = mobius_apply(&inv, UpperHalfPoint::infinity());
        assert!(w.approx_eq(&p(0.0, 0.0)));
        assert!(mobius_apply(&t, UpperHalfPoint::infinity()).at_infinity);
        assert!(mobius_apply(&inv, p(0.0, 0.0)).at_infinity);
    }

    #[test]
    fn geodesic_examples() {
        let z0 = p(0.3, 0.7);
        let z1 = p(-1.0, 2.0);
        assert!(geodesic_combine(z0, z1, 0.0).unwrap().approx_eq(&z0));
        assert!(geodesic_combine(z0, z1, 1.0).unwrap().approx_eq(&z1));
        assert!(geodesic_combine(p(0.0, 1.0), p(0.0, 4.0), 0.5).unwrap().approx_eq(&p(0.0, 2.0)));
        let apex = geodesic_combine(p(-1.0, 1.0), p(1.0, 1.0), 0.5).unwrap();
        assert!(apex.approx_eq(&p(0.0, 2f64.sqrt())), "{apex:?}");
        assert!(matches!(geodesic_combine(z0, z1, 1.5), Err(Error::Domain(_))));
        assert!(geodesic_combine(z0, z1, -0.1).is_err());
    }

    #[test]
    fn exp_log_roundtrip() {
        let z = p(0.4, 0.3);
        for &x in &[p(5.0, 0.01), p(-3.0, 7.0), p(0.4, 0.30001), p(0.0, 100.0)] {
            let v = log_map(z, x).unwrap();
            assert_abs_diff_eq!(tangent_norm(z, v), hyp_dist(z, x).unwrap(), epsilon = 1e-10);
            let back = exp_map(z, v).unwrap();
            assert!(back.approx_eq_tol(&x, 1e-9 * (1.0 + x.abs())), "{back:?} vs {x:?}");
        }
    }

    #[test]
    fn energy_examples() {
        assert_eq!(f_energy(p(0.0, 1.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(f_energy(p(0.0, 2.0)).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(f_energy(p(1.0, 1.0)).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert!(f_energy(p(1.0, 0.0)).is_err());
        // the alternative form -log Im(-1/z)
        let z = Complex::new(0.7, 0.2);
        let alt = -((-Complex::new(1.0_f64, 0.0) / z).im.ln());
        assert_abs_diff_eq!(f_energy(UpperHalfPoint::from_complex(z)).unwrap(), alt, epsilon = 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let d = hyp_dist(UpperHalfPoint::new(0.0f32, 1.0), UpperHalfPoint::new(0.0, 4.0)).unwrap();
        assert!((d - 4f32.ln()).abs() < 1e-5);
        let m = geodesic_combine(UpperHalfPoint::new(0.0f32, 1.0), UpperHalfPoint::new(0.0, 4.0), 0.5).unwrap();
        assert!((m.im - 2.0).abs() < 1e-5);
    }
}
