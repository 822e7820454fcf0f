use rayon::prelude::*;

use super::kernel::{ChainKernel, TreeKernel};
use super::{check_s, ReducedLaw};
use crate::disorder::{RadialDisorder, TransversalDisorder};
use crate::error::Result;
use crate::grid::{GridFunction, WGrid};
use crate::real::Real;

/// `T` assembled on a grid for fixed parameters: each row stores the
/// interpolation-weighted kernel as a sparse row (column `n_nodes` is the
/// node at infinity, whose own row is empty).
#[derive(Clone, Debug)]
pub struct TransferOperator<T> {
    grid: WGrid<T>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    coefs: Vec<T>,
}

fn compress<T: Real>(grid: &WGrid<T>, points: &[(T, T)], row: &mut Vec<(u32, T)>) {
    row.clear();
    for &(phi, wt) in points {
        let (lo, hi, lam) = grid.stencil(phi);
        row.push((lo as u32, wt * (T::one() - lam)));
        row.push((hi as u32, wt * lam));
    }
    row.sort_unstable_by_key(|e| e.0);
    let mut out = 0;
    for k in 0..row.len() {
        if out > 0 && row[out - 1].0 == row[k].0 {
            let v = row[k].1;
            row[out - 1].1 += v;
        } else {
            row[out] = row[k];
            out += 1;
        }
    }
    row.truncate(out);
}

impl<T: Real> TransferOperator<T> {
    fn assemble<F>(grid: &WGrid<T>, row_points: F) -> Self
    where
        F: Fn(T, &mut Vec<(T, T)>, &mut Vec<(T, T)>) + Sync,
    {
        let rows: Vec<Vec<(u32, T)>> = grid
            .ws()
            .par_iter()
            .map_init(
                || (Vec::new(), Vec::new()),
                |(buf, pts), &w| {
                    pts.clear();
                    row_points(w, buf, pts);
                    let mut row = Vec::with_capacity(2 * pts.len());
                    compress(grid, pts, &mut row);
                    row
                },
            )
            .collect();
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut coefs = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for r in rows {
            for (c, v) in r {
                cols.push(c);
                coefs.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { grid: grid.clone(), row_ptr, cols, coefs }
    }

    /// `T_{kappa,E,s}` with the tree kernel.
    pub fn tree(
        grid: &WGrid<T>,
        kappa: T,
        e: T,
        s: T,
        nu: &RadialDisorder<T>,
        sigma: &TransversalDisorder<T>,
    ) -> Result<Self> {
        check_s(s)?;
        let k = TreeKernel::new(kappa, e, T::zero(), s, nu, sigma, nu.panel_order())?;
        Ok(Self::assemble(grid, |w, buf, pts| k.for_each(w, buf, |phi, wt| pts.push((phi, wt)))))
    }

    /// Chain-form operator `T_{E,s}` under a reduced law.
    pub fn chain(grid: &WGrid<T>, e: T, s: T, law: &ReducedLaw<T>) -> Result<Self> {
        check_s(s)?;
        let k = ChainKernel::new(law.energy(e), s, &law.law, law.law.panel_order())?;
        Ok(Self::assemble(grid, |w, buf, pts| k.for_each(w, buf, |phi, wt| pts.push((phi, wt)))))
    }

    pub fn grid(&self) -> &WGrid<T> {
        &self.grid
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, f: &GridFunction<T>) -> GridFunction<T> {
        let n = self.grid.n_nodes();
        let values = (0..n)
            .into_par_iter()
            .with_min_len(64)
            .map(|j| {
                let (a, b) = (self.row_ptr[j], self.row_ptr[j + 1]);
                let mut acc = T::zero();
                for k in a..b {
                    acc += self.coefs[k] * f.at(self.cols[k] as usize);
                }
                acc
            })
            .collect();
        GridFunction { values, value_at_infinity: T::zero() }
    }

    /// `T^m 1` for `m = 0..=m_max`, handed to `visit` one at a time.
    pub fn iterate_ones(&self, m_max: usize, mut visit: impl FnMut(usize, &GridFunction<T>)) {
        let mut f = GridFunction::constant(&self.grid, T::one());
        visit(0, &f);
        for k in 1..=m_max {
            f = self.apply(&f);
            visit(k, &f);
        }
    }

    /// `(||T^k 1||)_{k = 0..=m_max}`.
    pub fn iterate_norms(&self, m_max: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(m_max + 1);
        self.iterate_ones(m_max, |_, f| out.push(f.sup_norm()));
        out
    }
}

/// One application of the tree operator, evaluated directly (no stored matrix).
pub fn apply_t<T: Real>(
    f: &GridFunction<T>,
    grid: &WGrid<T>,
    kappa: T,
    e: T,
    s: T,
    nu: &RadialDisorder<T>,
    sigma: &TransversalDisorder<T>,
) -> Result<GridFunction<T>> {
    check_s(s)?;
    f.validate(grid)?;
    let k = TreeKernel::new(kappa, e, T::zero(), s, nu, sigma, nu.panel_order())?;
    let values = grid
        .ws()
        .par_iter()
        .map_init(Vec::new, |buf, &w| {
            let mut acc = T::zero();
            k.for_each(w, buf, |phi, wt| acc += wt * f.eval(grid, phi));
            acc
        })
        .collect();
    Ok(GridFunction { values, value_at_infinity: T::zero() })
}

/// One application of the chain-form operator under `law`.
pub fn apply_t_1d<T: Real>(
    f: &GridFunction<T>,
    grid: &WGrid<T>,
    e: T,
    s: T,
    law: &ReducedLaw<T>,
) -> Result<GridFunction<T>> {
    check_s(s)?;
    f.validate(grid)?;
    let k = ChainKernel::new(law.energy(e), s, &law.law, law.law.panel_order())?;
    let values = grid
        .ws()
        .par_iter()
        .map_init(Vec::new, |buf, &w| {
            let mut acc = T::zero();
            k.for_each(w, buf, |phi, wt| acc += wt * f.eval(grid, phi));
            acc
        })
        .collect();
    Ok(GridFunction { values, value_at_infinity: T::zero() })
}

/// `(||T^k_{kappa,E,s} 1||)_{k=0..=m_max}` on `grid`.
pub fn iterate_norms<T: Real>(
    kappa: T,
    e: T,
    s: T,
    nu: &RadialDisorder<T>,
    sigma: &TransversalDisorder<T>,
    m_max: usize,
    grid: &WGrid<T>,
) -> Result<Vec<T>> {
    Ok(TransferOperator::tree(grid, kappa, e, s, nu, sigma)?.iterate_norms(m_max))
}

pub fn iterate_norms_1d<T: Real>(e: T, s: T, law: &ReducedLaw<T>, m_max: usize, grid: &WGrid<T>) -> Result<Vec<T>> {
    Ok(TransferOperator::chain(grid, e, s, law)?.iterate_norms(m_max))
}

/// `max_{k <= m} ||T_kappa^k 1 - T_0^k 1||` on the grid.
pub fn kappa_deviation<T: Real>(
    kappa: T,
    e: T,
    s: T,
    nu: &RadialDisorder<T>,
    sigma: &TransversalDisorder<T>,
    m: usize,
    grid: &WGrid<T>,
) -> Result<Vec<T>> {
    let a = TransferOperator::tree(grid, kappa, e, s, nu, sigma)?;
    let b = TransferOperator::tree(grid, T::zero(), e, s, nu, &TransversalDisorder::radial())?;
    let mut fa = GridFunction::constant(grid, T::one());
    let mut fb = fa.clone();
    let mut out = vec![T::zero()];
    for _ in 0..m {
        fa = a.apply(&fa);
        fb = b.apply(&fb);
        out.push(fa.max_abs_diff(&fb));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::Reduction;
    use super::*;
    use approx::assert_relative_eq;

    fn setup() -> (WGrid<f64>, RadialDisorder<f64>, TransversalDisorder<f64>) {
        (WGrid::new(512).unwrap(), RadialDisorder::uniform(1.0).unwrap(), TransversalDisorder::radial())
    }

    #[test]
    fn zero_maps_to_zero_and_infinity_vanishes() {
        let (g, nu, sigma) = setup();
        let z = GridFunction::constant(&g, 0.0);
        let t = apply_t(&z, &g, 0.0, 0.3, 0.1, &nu, &sigma).unwrap();
        assert!(t.values.iter().all(|&v| v == 0.0));
        let one = GridFunction::constant(&g, 1.0);
        let t = apply_t(&one, &g, 0.0, 0.3, 0.1, &nu, &sigma).unwrap();
        assert_eq!(t.value_at_infinity, 0.0);
    }

    #[test]
    fn closed_form_at_the_singular_node() {
        // a grid containing w = -E/sqrt 2 = 0 exactly needs an odd count
        let g = WGrid::new(513).unwrap();
        let nu = RadialDisorder::uniform(1.0).unwrap();
        let sigma = TransversalDisorder::radial();
        let one = GridFunction::constant(&g, 1.0);
        for &s in &[0.1, 0.3] {
            let t = apply_t(&one, &g, 0.0, 0.0, s, &nu, &sigma).unwrap();
            assert_relative_eq!(t.values[256], 2f64.powf(s / 2.0) / (1.0 - s), max_relative = 1e-12);
        }
        let law = ReducedLaw::new(&nu, Reduction::PlainChain).unwrap();
        let t = apply_t_1d(&one, &g, 0.0, 0.1, &law).unwrap();
        assert_relative_eq!(t.values[256], 1.0 / 0.9, max_relative = 1e-12);
    }

    #[test]
    fn matrix_matches_direct_application() {
        let (g, nu, _) = setup();
        let sigma = TransversalDisorder::antisymmetric_pair();
        let op = TransferOperator::tree(&g, 0.05, 0.4, 0.2, &nu, &sigma).unwrap();
        let f = GridFunction::from_fn(&g, |w| 1.0 / (1.0 + w * w).powf(0.1), 0.0);
        let a = op.apply(&f);
        let b = apply_t(&f, &g, 0.05, 0.4, 0.2, &nu, &sigma).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn tree_at_zero_coupling_is_the_reduced_chain() {
        let (g, nu, sigma) = setup();
        let law = ReducedLaw::new(&nu, Reduction::TreeReduced).unwrap();
        let f = GridFunction::from_fn(&g, |w| (1.0 + (w - 0.3).powi(2)).powf(-0.05), 0.0);
        for &e in &[-1.0, 0.0, 0.7] {
            let a = apply_t(&f, &g, 0.0, e, 0.05, &nu, &sigma).unwrap();
            let b = apply_t_1d(&f, &g, e, 0.05, &law).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10, "{}", a.max_abs_diff(&b));
        }
    }

    #[test]
    fn rejects_s_out_of_range() {
        let (g, nu, sigma) = setup();
        let one = GridFunction::constant(&g, 1.0);
        assert!(apply_t(&one, &g, 0.0, 0.0, 0.5, &nu, &sigma).is_err());
        assert!(apply_t(&one, &g, 0.0, 0.0, 0.0, &nu, &sigma).is_err());
    }
}
