use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use super::montecarlo::{summarize, MomentEstimate, MomentQuery};
use super::sample_rng;
use crate::disorder::RadialLaw;
use crate::error::{Error, Result};
use crate::real::Real;

pub fn sample_chain_potential<T: Real, R: Rng + ?Sized>(len: usize, nu: &RadialLaw<T>, rng: &mut R) -> Vec<T> {
    (0..len).map(|_| nu.sample(rng)).collect()
}

/// Forward Green functions `g_j = -1/(g_{j+1} + z - q_j)` on sites `0..=N`,
/// with `g_N = -1/(z - q_N)`.
pub fn chain_green_1d<T: Real>(q: &[T], z: Complex<T>) -> Result<Vec<Complex<T>>> {
    if q.is_empty() {
        return Err(Error::InvalidInput("empty chain".into()));
    }
    let mut g = vec![Complex::new(T::zero(), T::zero()); q.len()];
    let mut next = Complex::new(T::zero(), T::zero());
    for j in (0..q.len()).rev() {
        let d = next + z - q[j];
        if d.norm_sqr() == T::zero() {
            return Err(Error::SingularEnergy(format!("zero denominator at site {j}")));
        }
        next = -d.inv();
        g[j] = next;
    }
    Ok(g)
}

/// `|<delta_0, (H - z)^{-1} delta_n>| = prod_{j=0..n} |g_j|`.
pub fn chain_moment_norm<T: Real>(g: &[Complex<T>], n: usize) -> Result<T> {
    if n >= g.len() {
        return Err(Error::Domain(format!("site {n} beyond chain length {}", g.len())));
    }
    Ok(g[..=n].iter().map(|x| x.norm().ln()).sum::<T>().exp())
}

/// Solves `(H - z) u = delta_0` for the tridiagonal chain Hamiltonian by
/// forward elimination.
pub fn tridiagonal_oracle<T: Real>(q: &[T], z: Complex<T>) -> Result<Vec<Complex<T>>> {
    let n = q.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty chain".into()));
    }
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let mut c = vec![zero; n];
    let mut d = vec![zero; n];
    for i in 0..n {
        let diag = Complex::new(q[i], T::zero()) - z;
        let (den, prev_d) = if i == 0 { (diag, zero) } else { (diag - c[i - 1], d[i - 1]) };
        if den.norm_sqr() == T::zero() {
            return Err(Error::Conditioning(format!("zero pivot at site {i}")));
        }
        c[i] = one / den;
        d[i] = ((if i == 0 { one } else { zero }) - prev_d) / den;
    }
    let mut u = vec![zero; n];
    u[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        u[i] = d[i] - c[i] * u[i + 1];
    }
    Ok(u)
}

/// Chain analogue of [`super::mc_fractional_moment`]: `E |G(0, n)|^s` with
/// i.i.d. site potentials from `nu` on `0..=n + depth_buffer`.
pub fn mc_fractional_moment_1d<T: Real>(q: &MomentQuery<T>, nu: &RadialLaw<T>) -> Result<MomentEstimate<T>> {
    if !(q.epsilon > T::zero()) || !(q.s > T::zero() && q.s < T::one()) || q.n_samples < 2 {
        return Err(Error::Domain("need epsilon > 0, s in (0, 1) and at least two samples".into()));
    }
    let len = q.n + q.depth_buffer + 1;
    let z = Complex::new(q.e, q.epsilon);
    let values = (0..q.n_samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(q.seed, q.n as u64, k);
            let pot = sample_chain_potential(len, nu, &mut rng);
            let g = chain_green_1d(&pot, z)?;
            Ok(chain_moment_norm(&g, q.n)?.powf(q.s))
        })
        .collect::<Result<Vec<T>>>()?;
    let mut est = summarize(q, &values);
    est.kappa = T::zero();
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_chain_fixed_point() {
        let g = chain_green_1d(&vec![0.0; 80], Complex::new(0.0, 1.0)).unwrap();
        let fixed = Complex::new(0.0, (5f64.sqrt() - 1.0) / 2.0);
        assert_relative_eq!((g[0] - fixed).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!((g[0] * g[0] + Complex::new(0.0, 1.0) * g[0] + 1.0).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn product_form_against_tridiagonal_solve() {
        let q: Vec<f64> = (0..51).map(|j| ((j * 37 % 11) as f64 / 5.0) - 1.0).collect();
        let z = Complex::new(0.3, 0.01);
        let g = chain_green_1d(&q, z).unwrap();
        let u = tridiagonal_oracle(&q, z).unwrap();
        for n in 0..51 {
            let x = chain_moment_norm(&g, n).unwrap();
            assert_relative_eq!(x, u[n].norm(), max_relative = 1e-10);
        }
    }
}
