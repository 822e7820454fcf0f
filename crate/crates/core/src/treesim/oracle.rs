use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::green::GreenProfile;
use super::potential::PotentialRealization;
use crate::error::{Error, Result};
use crate::real::Real;

/// Largest depth accepted by [`dense_oracle`] (8191 vertices).
pub const MAX_DENSE_DEPTH: usize = 12;

/// First resolvent column of the truncated tree, heap-indexed: the root is
/// vertex 0 and vertex `v` has children `2v + 1` (colour 0) and `2v + 2` (colour 1).
#[derive(Clone, Debug)]
pub struct DenseSolution<T> {
    pub u: Vec<Complex<T>>,
    /// `||(H - z) u - delta_0||_2`.
    pub residual: T,
    pub depth: usize,
}

fn level_of(v: usize) -> usize {
    (usize::BITS - 1 - (v + 1).leading_zeros()) as usize
}

/// Builds `H` (adjacency plus diagonal potential) in `f64` and solves
/// `(H - z) u = delta_0` by LU.
pub fn dense_oracle<T: Real>(pot: &PotentialRealization<T>, z: Complex<T>) -> Result<DenseSolution<T>> {
    let depth = pot.depth();
    if depth > MAX_DENSE_DEPTH {
        return Err(Error::Resource(format!("dense oracle depth {depth} exceeds {MAX_DENSE_DEPTH}")));
    }
    let nv = (1usize << (depth + 1)) - 1;
    let z = Complex::new(z.re.as_f64(), z.im.as_f64());
    let one = Complex::new(1.0, 0.0);
    let mut h = DMatrix::<Complex<f64>>::zeros(nv, nv);
    for v in 0..nv {
        let n = level_of(v);
        let q = if n == 0 { pot.q_root } else { pot.levels[n - 1][if v % 2 == 1 { 0 } else { 1 }] };
        h[(v, v)] = Complex::new(q.as_f64(), 0.0) - z;
        for c in [2 * v + 1, 2 * v + 2] {
            if c < nv {
                h[(v, c)] = one;
                h[(c, v)] = one;
            }
        }
    }
    let mut rhs = DVector::<Complex<f64>>::zeros(nv);
    rhs[0] = one;
    let lu = h.clone().lu();
    let u = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Conditioning(format!("singular system at z = {z}")))?;
    let residual = (&h * &u - &rhs).norm();
    if !residual.is_finite() || u.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        return Err(Error::Conditioning(format!("non-finite solution at z = {z}")));
    }
    let scale = u.norm().max(1.0);
    if residual > 1e-8 * scale {
        return Err(Error::Conditioning(format!("residual {residual:e} at z = {z}")));
    }
    Ok(DenseSolution {
        u: u.iter().map(|x| Complex::new(T::lit(x.re), T::lit(x.im))).collect(),
        residual: T::lit(residual),
        depth,
    })
}

/// `(sum_{x in S_n} |u(x)|^2)^{1/2}`.
pub fn sphere_norm<T: Real>(sol: &DenseSolution<T>, n: usize) -> Result<T> {
    if n > sol.depth {
        return Err(Error::Domain(format!("sphere {n} beyond depth {}", sol.depth)));
    }
    let lo = (1usize << n) - 1;
    let hi = (1usize << (n + 1)) - 1;
    Ok(sol.u[lo..hi].iter().map(|x| x.norm_sqr()).sum::<T>().sqrt())
}

/// Resolvent entry `G(0, v)` from the forward Green functions along the
/// root-to-`v` path: `g_0 prod_j (-g_{x_j})`. The sign comes from the `+1`
/// hopping and drops out of every norm.
pub fn path_product<T: Real>(profile: &GreenProfile<T>, v: usize) -> Complex<T> {
    let mut acc = profile.g0;
    let mut x = v;
    while x > 0 {
        let n = level_of(x);
        let c = if x % 2 == 1 { 0 } else { 1 };
        acc = -acc * profile.at(n, c);
        x = (x - 1) / 2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treesim::forward_green;
    use approx::assert_relative_eq;

    #[test]
    fn levels() {
        assert_eq!(level_of(0), 0);
        assert_eq!(level_of(1), 1);
        assert_eq!(level_of(2), 1);
        assert_eq!(level_of(3), 2);
        assert_eq!(level_of(6), 2);
        assert_eq!(level_of(7), 3);
    }

    #[test]
    fn three_vertex_solve() {
        let pot = PotentialRealization { q_root: 0.0, levels: vec![[0.0, 0.0]], kappa: 0.0, seed: 0 };
        let z = Complex::new(0.0, 1.0);
        let sol = dense_oracle(&pot, z).unwrap();
        assert_relative_eq!((sol.u[0] - Complex::new(0.0, 1.0 / 3.0)).norm(), 0.0, epsilon = 1e-14);
        let p = forward_green(&pot, z).unwrap();
        for v in 0..3 {
            assert_relative_eq!((sol.u[v] - path_product(&p, v)).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn depth_cap() {
        let pot = PotentialRealization { q_root: 0.0, levels: vec![[0.0, 0.0]; 13], kappa: 0.0, seed: 0 };
        assert!(matches!(dense_oracle(&pot, Complex::new(0.0, 1.0)), Err(Error::Resource(_))));
    }
}
