use num_complex::Complex;
use rayon::prelude::*;

use super::ReducedLaw;
use crate::error::Result;
use crate::grid::WGrid;
use crate::hypgeo::UpperHalfPoint;
use crate::quadrature::GaussRule;
use crate::real::Real;

/// Bounding function `|w - zeta|^(-s)`.
pub fn bounding_phi<T: Real>(zeta: UpperHalfPoint<T>, s: T, w: T) -> T {
    (Complex::new(w, T::zero()) - zeta.to_complex()).norm().powf(-s)
}

/// `|zeta (w + 1/zeta + E~ - q) / (w - zeta)|` as a function of `q`, for finite `w`.
fn ratio_parts<T: Real>(zeta: UpperHalfPoint<T>, w: T, e_tilde: T) -> (Complex<T>, T) {
    let z = zeta.to_complex();
    let inv = Complex::new(T::one(), T::zero()) / z;
    let num_shift = inv + Complex::new(w + e_tilde, T::zero());
    let den = (Complex::new(w, T::zero()) - z).norm() / z.norm();
    (num_shift, den)
}

/// `F_zeta(w, s, E) = E[|(w - zeta) / (zeta (w + 1/zeta + E~ - q))|^s]` under the
/// reduced law; `w` infinite gives the tail `|zeta|^(-s)`.
pub fn ratio_f<T: Real>(zeta: UpperHalfPoint<T>, w: T, s: T, e: T, law: &ReducedLaw<T>) -> Result<T> {
    zeta.require_interior("ratio_f")?;
    let rule = GaussRule::new(law.law.panel_order())?;
    Ok(ratio_f_with(&rule, zeta, w, s, law.energy(e), law))
}

fn ratio_f_with<T: Real>(rule: &GaussRule<T>, zeta: UpperHalfPoint<T>, w: T, s: T, e_tilde: T, law: &ReducedLaw<T>) -> T {
    if !w.is_finite() {
        return zeta.abs().powf(-s);
    }
    if s == T::zero() {
        return law.law.expect(rule, |_| T::one());
    }
    let (shift, den) = ratio_parts(zeta, w, e_tilde);
    law.law.expect(rule, |q| {
        let m = (shift - Complex::new(q, T::zero())).norm();
        (den / m).powf(s)
    })
}

/// Maximum of `F_zeta` over the grid nodes, the tail, and the sampled energies.
/// Returns `(sup, w_at_sup, e_at_sup)`.
pub fn ratio_f_sup<T: Real>(
    zeta: UpperHalfPoint<T>,
    s: T,
    energies: &[T],
    law: &ReducedLaw<T>,
    grid: &WGrid<T>,
) -> Result<(T, T, T)> {
    zeta.require_interior("ratio_f_sup")?;
    let rule = GaussRule::new(law.law.panel_order())?;
    let tail = zeta.abs().powf(-s);
    let mut best = (tail, T::infinity(), energies.first().copied().unwrap_or(T::zero()));
    for &e in energies {
        let et = law.energy(e);
        let (v, w) = grid
            .ws()
            .par_iter()
            .map(|&w| (ratio_f_with(&rule, zeta, w, s, et, law), w))
            .reduce(|| (T::neg_infinity(), T::zero()), |a, b| if b.0 > a.0 { b } else { a });
        if v > best.0 {
            best = (v, w, e);
        }
    }
    Ok(best)
}

/// `dF/ds` at `s = 0`: `E[log|(w - zeta) / (zeta (w + 1/zeta + E~ - q))|]`.
pub fn df_ds_at_zero<T: Real>(zeta: UpperHalfPoint<T>, w: T, e: T, law: &ReducedLaw<T>) -> Result<T> {
    zeta.require_interior("df_ds_at_zero")?;
    if !w.is_finite() {
        return Ok(-zeta.abs().ln());
    }
    let rule = GaussRule::new(law.law.panel_order())?;
    let (shift, den) = ratio_parts(zeta, w, law.energy(e));
    Ok(law.law.expect(&rule, |q| (den / (shift - Complex::new(q, T::zero())).norm()).ln()))
}

/// Upper bound `A` on `|w - zeta|^s (T_{E,s} 1)(w)` over `E` in `interval`
/// (sampled at `n_energies` points) and the grid, via the majorant
/// `1 + E[|(q - E~ - zeta)/(w + E~ - q)|^s]`; the majorant tends to 1 at infinity.
pub fn bound_a<T: Real>(
    zeta: UpperHalfPoint<T>,
    s: T,
    interval: (T, T),
    n_energies: usize,
    law: &ReducedLaw<T>,
    grid: &WGrid<T>,
) -> Result<T> {
    zeta.require_interior("bound_a")?;
    super::check_s(s)?;
    let rule = GaussRule::new(law.law.panel_order())?;
    let breaks = law.law.breakpoints();
    let (lo, hi) = law.law.support();
    let z = zeta.to_complex();
    let n = n_energies.max(2);
    let mut sup = T::one();
    for k in 0..n {
        let e = interval.0 + (interval.1 - interval.0) * T::from_count(k) / T::from_count(n - 1);
        let et = law.energy(e);
        let v = grid
            .ws()
            .par_iter()
            .map_init(Vec::new, |buf, &w| {
                let c = w + et;
                buf.clear();
                rule.singular_points(lo, hi, &breaks, &[c], s, buf);
                let mut acc = T::one();
                for &(q, qw) in buf.iter() {
                    let top = (Complex::new(q - et, T::zero()) - z).norm();
                    acc += qw * law.law.density(q) * (top / (c - q).abs()).powf(s);
                }
                acc
            })
            .reduce(|| T::one(), |a, b| a.max(b));
        sup = sup.max(v);
    }
    Ok(sup)
}

/// `4 * 2^(1 - s/2) ||nu||_inf K^(1-s) / (1 - s)`.
pub fn operator_norm_bound<T: Real>(s: T, k: T, sup_nu: T) -> T {
    let two = T::lit(2.0);
    T::lit(4.0) * two.powf(T::one() - s / two) * sup_nu * k.powf(T::one() - s) / (T::one() - s)
}

/// `C = 2 ||nu0||_inf K^(1-s) / (1 - s)`: bound on `E|g_0|^s`.
pub fn initial_bound<T: Real>(s: T, k: T, sup_nu0: T) -> T {
    T::lit(2.0) * sup_nu0 * k.powf(T::one() - s) / (T::one() - s)
}
