use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::functional::{alpha_unchecked, g_map, verify_key_estimate};
use crate::disorder::ScalarDisorder;
use crate::error::{Error, Result};
use crate::grid::{WGrid, DEFAULT_NODES};
use crate::hypgeo::{hyp_dist, UpperHalfPoint};
use crate::real::Real;

/// Default hyperbolic residual for `g(zeta) = i`.
pub const DEFAULT_ZETA_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaMethod {
    Symmetric,
    General,
}

/// A point `zeta` with `|zeta| > 1` together with its key-estimate check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaCertificate<T> {
    pub zeta: UpperHalfPoint<T>,
    pub abs_zeta: T,
    /// `d_H(g(zeta), i)`.
    pub residual: T,
    /// Grid minimum of the key functional including the tail.
    pub inf_value: T,
    /// `log |zeta|^2`.
    pub tail_value: T,
    /// Whether the grid check passed (positive and refinement-stable).
    pub verified: bool,
    pub method: ZetaMethod,
    /// Residual of the defining equation of the finder: `E log|alpha|^2`
    /// for the symmetric curve, equal to `residual` for the general search.
    pub equation_residual: T,
    pub winding: Option<i64>,
}

impl<T: Real> ZetaCertificate<T> {
    fn assemble(
        zeta: UpperHalfPoint<T>,
        q: &ScalarDisorder<T>,
        method: ZetaMethod,
        equation_residual: T,
        winding: Option<i64>,
    ) -> Result<Self> {
        let abs_zeta = zeta.abs();
        if !(abs_zeta > T::one()) {
            return Err(Error::Search {
                reason: format!("root has |zeta| = {abs_zeta} <= 1"),
                lo_value: zeta.re.as_f64(),
                hi_value: zeta.im.as_f64(),
            });
        }
        let g = g_map(zeta, q, T::lit(1e-13).max(T::epsilon() * T::lit(64.0)))?;
        let residual = hyp_dist(g, UpperHalfPoint::i())?;
        let grid = WGrid::new(DEFAULT_NODES)?;
        let check = verify_key_estimate(zeta, q, &grid)?;
        Ok(Self {
            zeta,
            abs_zeta,
            residual,
            inf_value: check.inf,
            tail_value: check.tail,
            verified: check.ok,
            method,
            equation_residual,
            winding,
        })
    }

    /// Re-checks the invariants, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        self.zeta.require_interior("zeta")?;
        let two = T::lit(2.0);
        if !(self.abs_zeta > T::one()) || (self.abs_zeta - self.zeta.abs()).abs() > T::lit(1e-12) {
            return Err(Error::Inconsistency("zeta certificate: |zeta| invalid".into()));
        }
        if (self.tail_value - two * self.abs_zeta.ln()).abs() > T::lit(1e-12) {
            return Err(Error::Inconsistency("zeta certificate: tail value mismatch".into()));
        }
        Ok(())
    }
}

fn zeta_on_curve<T: Real>(d: T, e: T) -> UpperHalfPoint<T> {
    // root of z^2 + (E - i d) z + 1 = 0 with the larger imaginary part
    let b = Complex::new(e, -d);
    let disc = (b * b - Complex::new(T::lit(4.0), T::zero())).sqrt();
    let half = T::lit(0.5);
    let r1 = (-b + disc) * half;
    let r2 = (-b - disc) * half;
    let r = if r1.im >= r2.im { r1 } else { r2 };
    UpperHalfPoint::new(r.re, r.im)
}

fn log_alpha_moment<T: Real>(zeta: UpperHalfPoint<T>, q: &ScalarDisorder<T>) -> T {
    q.expect(|v| {
        let a = alpha_unchecked(zeta, v);
        (a.re * a.re + a.im * a.im).ln()
    })
}

/// `zeta` for `Q = q - E` with `q` symmetric about 0: bisection in `d`
/// along the curve `zeta + 1/zeta + E = i d` for `E log|alpha|^2 = 0`.
pub fn find_zeta_symmetric<T: Real>(q: &ScalarDisorder<T>, e: T, tol: T) -> Result<ZetaCertificate<T>> {
    if !(q.variance() > T::zero()) {
        return Err(Error::Assumption("symmetric finder: E(q^2) > 0 required".into()));
    }
    if !q.is_symmetric(T::lit(1e-12) * (T::one() + q.bound())) {
        return Err(Error::Assumption("symmetric finder: q must be symmetric about 0".into()));
    }
    let law = q.shifted(-e);
    let h = |d: T| log_alpha_moment(zeta_on_curve(d, e), &law);
    let mut lo = T::lit(1e-6);
    let mut h_lo = h(lo);
    while !(h_lo > T::zero()) && lo > T::lit(1e-300) {
        lo = lo * T::lit(1e-3);
        h_lo = h(lo);
    }
    let mut hi = T::one();
    let mut h_hi = h(hi);
    while !(h_hi < T::zero()) && hi < T::lit(1e12) {
        hi = hi * T::lit(2.0);
        h_hi = h(hi);
    }
    if !(h_lo > T::zero() && h_hi < T::zero()) {
        return Err(Error::Search {
            reason: "no sign change of E log|alpha|^2 along the curve".into(),
            lo_value: h_lo.as_f64(),
            hi_value: h_hi.as_f64(),
        });
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = h(mid);
        if value > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if value.abs() <= tol * T::lit(1e-3) {
            break;
        }
    }
    let d = (lo + hi) * T::lit(0.5);
    let zeta = zeta_on_curve(d, e);
    let eq = h(d);
    if eq.abs() > tol {
        return Err(Error::Search {
            reason: "bisection did not reach the tolerance".into(),
            lo_value: lo.as_f64(),
            hi_value: hi.as_f64(),
        });
    }
    ZetaCertificate::assemble(zeta, &law, ZetaMethod::Symmetric, eq.abs(), None)
}

/// Tunables for the general search.
#[derive(Clone, Copy, Debug)]
pub struct GeneralSearch {
    pub gamma_samples: usize,
    pub coarse: usize,
    pub newton_iters: usize,
    pub refine_rounds: usize,
    pub inner_tol: f64,
    pub fd_step: f64,
}

impl Default for GeneralSearch {
    fn default() -> Self {
        Self {
            gamma_samples: 256,
            coarse: 17,
            newton_iters: 60,
            refine_rounds: 4,
            inner_tol: 1e-12,
            fd_step: 1e-6,
        }
    }
}

struct Searcher<'a, T> {
    q: &'a ScalarDisorder<T>,
    inner_tol: T,
}

impl<T: Real> Searcher<'_, T> {
    fn g(&self, a: T, b: T) -> Result<UpperHalfPoint<T>> {
        g_map(UpperHalfPoint::new(a, b), self.q, self.inner_tol)
    }

    fn miss(&self, a: T, b: T) -> Result<T> {
        hyp_dist(self.g(a, b)?, UpperHalfPoint::i())
    }
}

/// Two-term lower bound for `log Im g(a, b)`.
fn lower_bound<T: Real>(a: T, b: T, eps2: T, p: T) -> T {
    let r2 = a * a + b * b;
    let inv = T::one() / (r2 * r2);
    let half = T::lit(0.5);
    (T::one() - p) * half * inv.ln() + p * half * (eps2 / (T::lit(4.0) * b * b) + inv).ln()
}

fn winding_of<T: Real>(image: &[Complex<T>]) -> (i64, T) {
    let mut total = T::zero();
    let mut worst = T::zero();
    for k in 0..image.len() {
        let a = image[k];
        let b = image[(k + 1) % image.len()];
        let step = (b / a).arg();
        worst = worst.max(step.abs());
        total += step;
    }
    let turns = total / (T::lit(2.0) * T::PI());
    (turns.round().to_i64().unwrap_or(0), worst)
}

/// `zeta` with `g(zeta) = i`, `|zeta| > 1`, for bounded `Q` with positive
/// variance: winding-certified box search followed by damped Newton.
pub fn find_zeta_general<T: Real>(q: &ScalarDisorder<T>, tol: T) -> Result<ZetaCertificate<T>> {
    find_zeta_general_with(q, tol, &GeneralSearch::default())
}

pub fn find_zeta_general_with<T: Real>(
    q: &ScalarDisorder<T>,
    tol: T,
    opts: &GeneralSearch,
) -> Result<ZetaCertificate<T>> {
    if !(q.variance() > T::zero()) || q.support_size() < 2 {
        return Err(Error::Assumption("general finder: Q needs positive variance".into()));
    }
    let s = Searcher { q, inner_tol: T::lit(opts.inner_tol) };
    let two = T::lit(2.0);
    let a0 = q.bound() * T::lit(1.001) + T::lit(1e-3);

    // distinct support values for (eps, p)
    let mut vals: Vec<(T, T)> = Vec::new();
    for &(v, w) in q.atoms() {
        if w == T::zero() {
            continue;
        }
        match vals.iter_mut().find(|x| (x.0 - v).abs() <= T::lit(1e-14) * (T::one() + v.abs())) {
            Some(x) => x.1 += w,
            None => vals.push((v, w)),
        }
    }
    let mut eps2 = T::infinity();
    for i in 0..vals.len() {
        for j in (i + 1)..vals.len() {
            let d = vals[i].0 - vals[j].0;
            eps2 = eps2.min(d * d);
        }
    }
    let p = T::one() - vals.iter().map(|x| x.1 * x.1).sum::<T>();

    let n_side = (opts.gamma_samples / 4).max(4);
    let side_a: Vec<T> = (0..=n_side)
        .map(|k| -a0 + two * a0 * T::from_count(k) / T::from_count(n_side))
        .collect();

    // b0: smallest power of two with Im g < 1 on all sampled a
    let mut b0 = T::one();
    loop {
        let mut all = true;
        for &a in side_a.iter().step_by(4) {
            if !(s.g(a, b0)?.im < T::one()) {
                all = false;
                break;
            }
        }
        if all {
            break;
        }
        b0 = b0 * two;
        if b0 > T::lit(1e8) {
            return Err(Error::Search {
                reason: "no upper edge with Im g < 1 found".into(),
                lo_value: a0.as_f64(),
                hi_value: b0.as_f64(),
            });
        }
    }
    let b1 = |a: T| -> T {
        let floor = (T::one() - a * a).max(T::zero()).sqrt() * T::lit(1.0 + 1e-6);
        let mut b = b0;
        while !(lower_bound(a, b, eps2, p) > T::zero()) && b > T::lit(1e-12) {
            b = b / two;
        }
        if b < floor {
            floor.max(T::lit(1e-12))
        } else {
            b
        }
    };

    let gamma = |m: usize| -> Vec<(T, T)> {
        let mut pts = Vec::with_capacity(4 * m);
        let lin = |k: usize| -a0 + two * a0 * T::from_count(k) / T::from_count(m);
        let geo = |lo: T, hi: T, k: usize| lo * (hi / lo).powf(T::from_count(k) / T::from_count(m));
        for k in 0..m {
            let a = lin(k);
            pts.push((a, b1(a)));
        }
        let br = b1(a0);
        for k in 0..m {
            pts.push((a0, geo(br, b0, k)));
        }
        for k in 0..m {
            pts.push((-lin(k), b0));
        }
        let bl = b1(-a0);
        for k in 0..m {
            pts.push((-a0, geo(b0, bl, k)));
        }
        pts
    };

    let mut m = n_side;
    let (winding, samples) = loop {
        let pts = gamma(m);
        let mut image = Vec::with_capacity(pts.len());
        for &(a, b) in &pts {
            let g = s.g(a, b)?;
            image.push(Complex::new(g.re, g.im - T::one()));
        }
        let (w, worst) = winding_of(&image);
        if worst <= T::FRAC_PI_2() || m >= 16 * n_side {
            break (w, pts);
        }
        m *= 4;
    };
    if winding.abs() != 1 {
        return Err(Error::SearchDomain {
            winding,
            samples: samples.iter().map(|&(a, b)| (a.as_f64(), b.as_f64())).collect(),
        });
    }

    // coarse grid inside the box
    let mut best = (T::zero(), b0, T::infinity());
    let c = opts.coarse.max(3);
    for i in 0..c {
        let a = -a0 + two * a0 * T::from_count(i) / T::from_count(c - 1);
        let lo = b1(a);
        for j in 0..c {
            let b = lo * (b0 / lo).powf(T::from_count(j) / T::from_count(c - 1));
            if a * a + b * b <= T::one() {
                continue;
            }
            let d = s.miss(a, b)?;
            if d < best.2 {
                best = (a, b, d);
            }
        }
    }

    let h_rel = T::lit(opts.fd_step);
    let eval = |a: T, b: T| -> Result<(T, T, T)> {
        let g = s.g(a, b)?;
        Ok((g.re, g.im.ln(), hyp_dist(g, UpperHalfPoint::i())?))
    };
    let (mut a, mut b) = (best.0, best.1);
    let mut span = (two * a0 / T::from_count(c - 1), b0);
    for _round in 0..=opts.refine_rounds {
        let (mut fr, mut fl, mut d) = eval(a, b)?;
        let mut stalled = false;
        for _ in 0..opts.newton_iters {
            if d <= tol {
                break;
            }
            let ha = h_rel * a.abs().max(b);
            let hb = h_rel * b;
            let (ar, al, _) = eval(a + ha, b)?;
            let (br, bl, _) = eval(a, b + hb)?;
            let j11 = (ar - fr) / ha;
            let j21 = (al - fl) / ha;
            let j12 = (br - fr) / hb;
            let j22 = (bl - fl) / hb;
            let det = j11 * j22 - j12 * j21;
            if !det.is_finite() || det == T::zero() {
                stalled = true;
                break;
            }
            let da = -(j22 * fr - j12 * fl) / det;
            let db = -(-j21 * fr + j11 * fl) / det;
            let mut t = T::one();
            let mut moved = false;
            for _ in 0..40 {
                let (na, nb) = (a + t * da, b + t * db);
                if nb > T::zero() {
                    let (nr, nl, nd) = eval(na, nb)?;
                    if nd < d {
                        a = na;
                        b = nb;
                        fr = nr;
                        fl = nl;
                        d = nd;
                        moved = true;
                        break;
                    }
                }
                t = t / two;
            }
            if !moved {
                stalled = true;
                break;
            }
        }
        if d <= tol && a * a + b * b > T::one() {
            return ZetaCertificate::assemble(UpperHalfPoint::new(a, b), q, ZetaMethod::General, d, Some(winding));
        }
        if !stalled && d > tol {
            stalled = true;
        }
        if stalled {
            // local grid refinement around the best point so far
            span = (span.0 / T::lit(4.0), span.1 / T::lit(4.0));
            let mut local = (a, b, d);
            for i in 0..c {
                for j in 0..c {
                    let pa = a + span.0 * (T::from_count(i) / T::from_count(c - 1) - T::lit(0.5));
                    let pb = b * (T::one() + (span.1 / b0) * (T::from_count(j) / T::from_count(c - 1) - T::lit(0.5)));
                    if pb <= T::zero() || pa * pa + pb * pb <= T::one() {
                        continue;
                    }
                    let dd = s.miss(pa, pb)?;
                    if dd < local.2 {
                        local = (pa, pb, dd);
                    }
                }
            }
            a = local.0;
            b = local.1;
        }
    }
    Err(Error::Search {
        reason: "Newton stagnated after grid refinements".into(),
        lo_value: a.as_f64(),
        hi_value: b.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn golden_ratio_zeta() {
        let q = ScalarDisorder::<f64>::uniform(&[-1.0, 1.0]).unwrap();
        let c = find_zeta_symmetric(&q, 0.0, 1e-13).unwrap();
        let y = ((1.0 + 5f64.sqrt()) / 2.0).sqrt();
        assert!(c.zeta.re.abs() < 1e-12);
        assert_relative_eq!(c.zeta.im, y, epsilon = 1e-10);
        assert_relative_eq!(c.tail_value, 2.0 * y.ln(), epsilon = 1e-10);
        // two-point laws: the barycenter equation holds at the symmetric root too
        assert!(c.residual < 1e-8, "{}", c.residual);
        c.validate().unwrap();
    }

    #[test]
    fn symmetric_rejects_degenerate() {
        let q = ScalarDisorder::point(0.0);
        assert!(matches!(find_zeta_symmetric(&q, 0.0, 1e-10), Err(Error::Assumption(_))));
        let skew = ScalarDisorder::uniform(&[0.0, 1.0]).unwrap();
        assert!(matches!(find_zeta_symmetric(&skew, 0.0, 1e-10), Err(Error::Assumption(_))));
    }

    #[test]
    fn symmetric_outside_band() {
        let q = ScalarDisorder::<f64>::uniform(&[-1.0, 1.0]).unwrap();
        let c = find_zeta_symmetric(&q, 2.5, 1e-12).unwrap();
        assert!(c.abs_zeta > 1.0);
        assert!(c.equation_residual <= 1e-12);
        // realzeta condition
        let z = c.zeta.to_complex();
        assert!((z + 1.0 / z).re + 2.5 < 1e-10);
    }

    #[test]
    fn general_finder_three_points() {
        let q = ScalarDisorder::uniform(&[-1.0, 0.0, 1.0]).unwrap();
        let c = find_zeta_general(&q, 1e-9).unwrap();
        assert!(c.abs_zeta > 1.0);
        assert!(c.residual <= 1e-9, "{}", c.residual);
        assert_eq!(c.winding.map(i64::abs), Some(1));
        assert!(c.verified, "{c:?}");
    }

    #[test]
    fn general_matches_symmetric_on_two_points() {
        let q = ScalarDisorder::uniform(&[-1.0, 1.0]).unwrap();
        let g = find_zeta_general(&q, 1e-10).unwrap();
        let s = find_zeta_symmetric(&q, 0.0, 1e-13).unwrap();
        assert!(g.zeta.approx_eq_tol(&s.zeta, 1e-6), "{:?} vs {:?}", g.zeta, s.zeta);
    }

    #[test]
    fn general_rejects_point_mass() {
        let q = ScalarDisorder::point(0.3);
        assert!(matches!(find_zeta_general(&q, 1e-9), Err(Error::Assumption(_))));
    }
}
