use num_complex::Complex;

use super::check_s;
use super::kernel::TreeKernel;
use crate::disorder::{RadialDisorder, TransversalDisorder};
use crate::error::{Error, Result};
use crate::real::Real;

/// Largest power evaluated by nested quadrature.
pub const MAX_POINTWISE_DEPTH: usize = 4;

#[derive(Clone, Copy, Debug)]
pub struct PointwiseOptions {
    /// Gauss–Legendre points per panel at every nesting level.
    pub order: usize,
}

impl Default for PointwiseOptions {
    fn default() -> Self {
        Self { order: 32 }
    }
}

fn nested<T: Real>(k: &TreeKernel<'_, T>, w: Complex<T>, m: usize, bufs: &mut [Vec<(T, T)>]) -> T {
    if m == 0 {
        return T::one();
    }
    if !w.re.is_finite() || !w.im.is_finite() {
        return T::zero();
    }
    let (head, tail) = bufs.split_first_mut().expect("one buffer per level");
    let mut pts: Vec<(Complex<T>, T)> = Vec::new();
    k.for_each_complex(w, head, |phi, wt| pts.push((phi, wt)));
    pts.iter().map(|&(phi, wt)| wt * nested(k, phi, m - 1, tail)).sum()
}

/// `(T^m_{kappa,E+i eps,s} 1)(w)` at a point of the closed upper half-plane by
/// `m`-fold nested quadrature, without interpolation.
#[allow(clippy::too_many_arguments)]
pub fn apply_t_pointwise_complex<T: Real>(
    w: Complex<T>,
    m: usize,
    kappa: T,
    e: T,
    eps: T,
    s: T,
    nu: &RadialDisorder<T>,
    sigma: &TransversalDisorder<T>,
    opts: &PointwiseOptions,
) -> Result<T> {
    check_s(s)?;
    if m > MAX_POINTWISE_DEPTH {
        return Err(Error::Resource(format!("nested quadrature depth {m} exceeds {MAX_POINTWISE_DEPTH}")));
    }
    if w.im < T::zero() || eps < T::zero() {
        return Err(Error::Domain("w and z must lie in the closed upper half-plane".into()));
    }
    let k = TreeKernel::new(kappa, e, eps, s, nu, sigma, opts.order)?;
    let mut bufs = vec![Vec::new(); m.max(1)];
    Ok(nested(&k, w, m, &mut bufs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridFunction, WGrid};
    use crate::transfer::TransferOperator;

    #[test]
    fn first_power_matches_the_grid_operator() {
        let g = WGrid::new(256).unwrap();
        let nu = RadialDisorder::uniform(1.0).unwrap().with_panel_order(32);
        let sigma = TransversalDisorder::radial();
        let op = TransferOperator::tree(&g, 0.0, 0.2, 0.1, &nu, &sigma).unwrap();
        let t1 = op.apply(&GridFunction::constant(&g, 1.0));
        for j in (0..256).step_by(37) {
            let w = Complex::new(g.ws()[j], 0.0);
            let v: f64 = apply_t_pointwise_complex(w, 1, 0.0, 0.2, 0.0, 0.1, &nu, &sigma, &Default::default()).unwrap();
            assert!((v - t1.values[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn depth_cap() {
        let nu = RadialDisorder::uniform(1.0).unwrap();
        let sigma = TransversalDisorder::radial();
        let r = apply_t_pointwise_complex(Complex::new(0.0, 1.0), 5, 0.0, 0.0, 0.0, 0.1, &nu, &sigma, &Default::default());
        assert!(matches!(r, Err(Error::Resource(_))));
    }
}
