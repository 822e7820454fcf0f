use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disorder::{RadialLaw, TransversalDisorder};
use crate::error::{Error, Result};
use crate::real::Real;

/// One draw of the potential: a root value and one `(q0, q1)` pair per sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialRealization<T> {
    pub q_root: T,
    /// `levels[n - 1]` holds the two colour values of sphere `n`.
    pub levels: Vec<[T; 2]>,
    pub kappa: T,
    pub seed: u64,
}

impl<T: Real> PotentialRealization<T> {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Potential at sphere `n` with colour `c` (`n = 0` is the root).
    pub fn at(&self, n: usize, c: usize) -> T {
        if n == 0 {
            self.q_root
        } else {
            self.levels[n - 1][c]
        }
    }

    /// Checks `|q_root| <= k_root` and `|q_{n,i}| <= k + kappa`.
    pub fn validate(&self, k_root: T, k: T) -> Result<()> {
        let slack = T::lit(1e-12);
        if !(self.q_root.abs() <= k_root + slack) {
            return Err(Error::InvalidInput(format!("root potential {} outside [-{k_root}, {k_root}]", self.q_root)));
        }
        let lim = k + self.kappa + slack;
        for (n, q) in self.levels.iter().enumerate() {
            if !(q[0].abs() <= lim && q[1].abs() <= lim) {
                return Err(Error::InvalidInput(format!("sphere {} potential {q:?} exceeds K + kappa", n + 1)));
            }
        }
        Ok(())
    }
}

pub(crate) fn draw_potential<T: Real, R: Rng + ?Sized>(
    depth: usize,
    kappa: T,
    nu0: &RadialLaw<T>,
    nu: &RadialLaw<T>,
    sigma: &TransversalDisorder<T>,
    seed: u64,
    rng: &mut R,
) -> PotentialRealization<T> {
    let q_root = nu0.sample(rng);
    let levels = (0..depth)
        .map(|_| {
            let r = nu.sample(rng);
            let p = sigma.sample(rng);
            [r + kappa * p[0], r + kappa * p[1]]
        })
        .collect();
    PotentialRealization { q_root, levels, kappa, seed }
}

/// `q_root ~ nu0`; on sphere `n >= 1`, `r ~ nu`, `(p0, p1) ~ sigma` and
/// `q_{n,i} = r + kappa p_i`.
pub fn sample_potential<T: Real>(
    depth: usize,
    kappa: T,
    nu0: &RadialLaw<T>,
    nu: &RadialLaw<T>,
    sigma: &TransversalDisorder<T>,
    seed: u64,
) -> Result<PotentialRealization<T>> {
    if !kappa.is_finite() || kappa < T::zero() {
        return Err(Error::InvalidInput(format!("kappa = {kappa} must be finite and >= 0")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_potential(depth, kappa, nu0, nu, sigma, seed, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::RadialDisorder;

    fn laws() -> (RadialLaw<f64>, TransversalDisorder<f64>) {
        (RadialLaw::Density(RadialDisorder::uniform(1.0).unwrap()), TransversalDisorder::antisymmetric_pair())
    }

    #[test]
    fn zero_coupling_is_radial() {
        let (nu, sigma) = laws();
        let p = sample_potential(30, 0.0, &nu, &nu, &sigma, 3).unwrap();
        assert!(p.levels.iter().all(|q| q[0] == q[1]));
    }

    #[test]
    fn support_and_reproducibility() {
        let (nu, sigma) = laws();
        let a = sample_potential(50, 0.7, &nu, &nu, &sigma, 11).unwrap();
        a.validate(1.0, 1.0).unwrap();
        assert_eq!(a, sample_potential(50, 0.7, &nu, &nu, &sigma, 11).unwrap());
        assert_ne!(a, sample_potential(50, 0.7, &nu, &nu, &sigma, 12).unwrap());
    }
}
