use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::potential::PotentialRealization;
use crate::error::{Error, Result};
use crate::real::Real;

/// Imaginary shift added at the leaves of near-real runs.
pub const LEAF_REGULARIZATION: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GreenOptions {
    /// Allow `Im z = 0` by shifting the leaf energies to `z + i 1e-8`.
    /// Results are exploratory only.
    pub regularize_leaves: bool,
}

/// Forward Green functions of one realization at one spectral parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenProfile<T> {
    pub g0: Complex<T>,
    /// `g_levels[n - 1] = (g_{n0}, g_{n1})`.
    pub g_levels: Vec<[Complex<T>; 2]>,
    pub z: Complex<T>,
    pub regularized: bool,
}

impl<T: Real> GreenProfile<T> {
    pub fn depth(&self) -> usize {
        self.g_levels.len()
    }

    /// `((g_{n0} + g_{n1}) / sqrt 2, (g_{n0} - g_{n1}) / sqrt 2)` for `n >= 1`.
    pub fn plus_minus(&self, n: usize) -> (Complex<T>, Complex<T>) {
        let [a, b] = self.g_levels[n - 1];
        let h = T::SQRT_2().recip();
        ((a + b) * h, (a - b) * h)
    }

    /// Green function of sphere `n`, colour `c` (the root for `n = 0`).
    pub fn at(&self, n: usize, c: usize) -> Complex<T> {
        if n == 0 {
            self.g0
        } else {
            self.g_levels[n - 1][c]
        }
    }

    pub fn is_herglotz(&self) -> bool {
        self.g0.im > T::zero() && self.g_levels.iter().all(|g| g[0].im > T::zero() && g[1].im > T::zero())
    }
}

fn neg_inv<T: Real>(d: Complex<T>, n: usize) -> Result<Complex<T>> {
    if d.norm_sqr() == T::zero() {
        return Err(Error::SingularEnergy(format!("zero denominator on sphere {n}")));
    }
    let r = -d.inv();
    if !(r.re.is_finite() && r.im.is_finite()) {
        return Err(Error::SingularEnergy(format!("denominator underflow on sphere {n}")));
    }
    Ok(r)
}

pub fn forward_green<T: Real>(pot: &PotentialRealization<T>, z: Complex<T>) -> Result<GreenProfile<T>> {
    forward_green_with(pot, z, GreenOptions::default())
}

/// Dirichlet leaves `g_{N,i} = -1/(z - q_{N,i})`, then
/// `g_{n,i} = -1/(g_{n+1,0} + g_{n+1,1} + z - q_{n,i})` down to the root.
pub fn forward_green_with<T: Real>(
    pot: &PotentialRealization<T>,
    z: Complex<T>,
    opts: GreenOptions,
) -> Result<GreenProfile<T>> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("z must be finite".into()));
    }
    if z.im < T::zero() || (z.im == T::zero() && !opts.regularize_leaves) {
        return Err(Error::Domain(format!("Im z = {} must be positive", z.im)));
    }
    let depth = pot.depth();
    let leaf_z = if opts.regularize_leaves { z + Complex::new(T::zero(), T::lit(LEAF_REGULARIZATION)) } else { z };
    if depth == 0 {
        let g0 = neg_inv(leaf_z - pot.q_root, 0)?;
        return Ok(GreenProfile { g0, g_levels: Vec::new(), z, regularized: opts.regularize_leaves });
    }
    let mut g_levels = vec![[Complex::new(T::zero(), T::zero()); 2]; depth];
    let q = pot.levels[depth - 1];
    g_levels[depth - 1] = [neg_inv(leaf_z - q[0], depth)?, neg_inv(leaf_z - q[1], depth)?];
    for n in (1..depth).rev() {
        let [a, b] = g_levels[n];
        let sum = a + b + z;
        let q = pot.levels[n - 1];
        g_levels[n - 1] = [neg_inv(sum - q[0], n)?, neg_inv(sum - q[1], n)?];
    }
    let [a, b] = g_levels[0];
    let g0 = neg_inv(a + b + z - pot.q_root, 0)?;
    Ok(GreenProfile { g0, g_levels, z, regularized: opts.regularize_leaves })
}

/// `log ||P_0 (H - z)^{-1} P_n||`.
pub fn log_moment_norm<T: Real>(profile: &GreenProfile<T>, n: usize) -> Result<T> {
    if n > profile.depth() {
        return Err(Error::Domain(format!("n = {n} exceeds profile depth {}", profile.depth())));
    }
    let half = T::lit(0.5);
    let mut acc = profile.g0.norm().ln();
    for g in &profile.g_levels[..n] {
        acc += half * (g[0].norm_sqr() + g[1].norm_sqr()).ln();
    }
    Ok(acc)
}

/// `||P_0 (H - z)^{-1} P_n|| = |g_0| prod_{j=1..n} (|g_{j0}|^2 + |g_{j1}|^2)^{1/2}`.
pub fn moment_norm<T: Real>(profile: &GreenProfile<T>, n: usize) -> Result<T> {
    log_moment_norm(profile, n).map(T::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flat(depth: usize, q: f64) -> PotentialRealization<f64> {
        PotentialRealization { q_root: q, levels: vec![[q, q]; depth], kappa: 0.0, seed: 0 }
    }

    #[test]
    fn depth_one_by_hand() {
        let p = forward_green(&flat(1, 0.0), Complex::new(0.0, 1.0)).unwrap();
        assert_relative_eq!((p.g_levels[0][0] - Complex::new(0.0, 1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((p.g0 - Complex::new(0.0, 1.0 / 3.0)).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(moment_norm(&p, 0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(moment_norm(&p, 1).unwrap(), 2f64.sqrt() / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn equal_pairs_collapse() {
        let pot: PotentialRealization<f64> = PotentialRealization { q_root: 0.1, levels: vec![[0.3, 0.3], [-0.2, -0.2], [0.5, 0.5]], kappa: 0.0, seed: 0 };
        let z = Complex::new(0.4, 0.05);
        let p = forward_green(&pot, z).unwrap();
        let mut g = -(z - 0.5).inv();
        for q in [-0.2, 0.3] {
            g = -(g * 2.0 + z - q).inv();
        }
        assert_relative_eq!((p.g_levels[0][0] - g).norm(), 0.0, epsilon = 1e-14);
        assert_eq!(p.g_levels[0][0], p.g_levels[0][1]);
        let direct: f64 = p.g0.norm() * p.g_levels.iter().map(|g| (2.0 * g[0].norm_sqr()).sqrt()).product::<f64>();
        assert_relative_eq!(moment_norm(&p, 3).unwrap(), direct, max_relative = 1e-14);
    }

    #[test]
    fn real_energy_needs_the_flag() {
        let pot = flat(4, 0.0);
        assert!(matches!(forward_green(&pot, Complex::new(0.3, 0.0)), Err(Error::Domain(_))));
        let p = forward_green_with(&pot, Complex::new(0.3, 0.0), GreenOptions { regularize_leaves: true }).unwrap();
        assert!(p.regularized);
    }

    #[test]
    fn exact_zero_denominator() {
        let pot = flat(0, 0.5);
        let r = forward_green_with(&pot, Complex::new(0.5, 0.0), GreenOptions::default());
        assert!(r.is_err());
        let pot = PotentialRealization { q_root: 0.0, levels: vec![[0.0, 0.0]], kappa: 0.0, seed: 0 };
        // leaves at -1/(1e-8 i) push the root denominator to imaginary infinity, never to zero
        let p = forward_green_with(&pot, Complex::new(0.0, 0.0), GreenOptions { regularize_leaves: true }).unwrap();
        assert!(p.g0.norm() < 1e-7);
    }
}
