//! Quadrature-point generators for one row of the operator: each call
//! reports `(phi_plus(w), weight)` pairs whose weighted sum against `f`
//! gives `(T f)(w)`.

use num_complex::Complex;

use crate::disorder::{RadialDisorder, TransversalDisorder};
use crate::quadrature::GaussRule;
use crate::real::Real;

pub(crate) struct TreeKernel<'a, T> {
    pub kappa: T,
    pub e: T,
    pub eps: T,
    pub s: T,
    pub nu: &'a RadialDisorder<T>,
    pub sigma: &'a TransversalDisorder<T>,
    pub rule: GaussRule<T>,
    breaks: Vec<T>,
}

impl<'a, T: Real> TreeKernel<'a, T> {
    pub fn new(
        kappa: T,
        e: T,
        eps: T,
        s: T,
        nu: &'a RadialDisorder<T>,
        sigma: &'a TransversalDisorder<T>,
        order: usize,
    ) -> crate::Result<Self> {
        Ok(Self { kappa, e, eps, s, nu, sigma, rule: GaussRule::new(order)?, breaks: nu.breakpoints() })
    }

    /// Real `w`, real energy.
    pub fn for_each(&self, w: T, buf: &mut Vec<(T, T)>, mut f: impl FnMut(T, T)) {
        let sq2 = T::SQRT_2();
        let half = T::lit(0.5);
        let big_r = sq2 * w + self.e;
        let (lo, hi) = self.nu.support();
        for (p, ws) in self.sigma.atoms() {
            if *ws == T::zero() {
                continue;
            }
            let c0 = big_r - self.kappa * p[0];
            let c1 = big_r - self.kappa * p[1];
            buf.clear();
            if c0 == c1 {
                self.rule.singular_points(lo, hi, &self.breaks, &[c0], self.s, buf);
            } else {
                self.rule.singular_points(lo, hi, &self.breaks, &[c0, c1], self.s, buf);
            }
            for &(r, qw) in buf.iter() {
                let dens = self.nu.density(r);
                if dens == T::zero() {
                    continue;
                }
                let i0 = sq2 / (c0 - r);
                let i1 = sq2 / (c1 - r);
                let php = -(i0 + i1) * half;
                let phm = -(i0 - i1) * half;
                let k = php.abs().powf(self.s) + phm.abs().powf(self.s);
                f(php, *ws * qw * dens * k);
            }
        }
    }

    /// Complex `w` in the closed upper half-plane and `z = E + i eps`.
    pub fn for_each_complex(&self, w: Complex<T>, buf: &mut Vec<(T, T)>, mut f: impl FnMut(Complex<T>, T)) {
        let sq2 = T::SQRT_2();
        let half = T::lit(0.5);
        let big_r = w.scale(sq2) + Complex::new(self.e, self.eps);
        let (lo, hi) = self.nu.support();
        for (p, ws) in self.sigma.atoms() {
            if *ws == T::zero() {
                continue;
            }
            let c0 = big_r - Complex::new(self.kappa * p[0], T::zero());
            let c1 = big_r - Complex::new(self.kappa * p[1], T::zero());
            buf.clear();
            if c0 == c1 {
                self.rule.singular_points(lo, hi, &self.breaks, &[c0.re], self.s, buf);
            } else {
                self.rule.singular_points(lo, hi, &self.breaks, &[c0.re, c1.re], self.s, buf);
            }
            for &(r, qw) in buf.iter() {
                let dens = self.nu.density(r);
                if dens == T::zero() {
                    continue;
                }
                let rr = Complex::new(r, T::zero());
                let i0 = Complex::new(sq2, T::zero()) / (c0 - rr);
                let i1 = Complex::new(sq2, T::zero()) / (c1 - rr);
                let php = -(i0 + i1).scale(half);
                let phm = -(i0 - i1).scale(half);
                let k = php.norm().powf(self.s) + phm.norm().powf(self.s);
                f(php, *ws * qw * dens * k);
            }
        }
    }
}

/// `(T f)(w) = E[f(-1/(w + E~ - q)) |w + E~ - q|^(-s)]` under the reduced law.
pub(crate) struct ChainKernel<'a, T> {
    pub e_tilde: T,
    pub s: T,
    pub law: &'a RadialDisorder<T>,
    pub rule: GaussRule<T>,
    breaks: Vec<T>,
}

impl<'a, T: Real> ChainKernel<'a, T> {
    pub fn new(e_tilde: T, s: T, law: &'a RadialDisorder<T>, order: usize) -> crate::Result<Self> {
        Ok(Self { e_tilde, s, law, rule: GaussRule::new(order)?, breaks: law.breakpoints() })
    }

    pub fn for_each(&self, w: T, buf: &mut Vec<(T, T)>, mut f: impl FnMut(T, T)) {
        let c = w + self.e_tilde;
        let (lo, hi) = self.law.support();
        buf.clear();
        self.rule.singular_points(lo, hi, &self.breaks, &[c], self.s, buf);
        for &(q, qw) in buf.iter() {
            let dens = self.law.density(q);
            if dens == T::zero() {
                continue;
            }
            let x = c - q;
            f(-T::one() / x, qw * dens * x.abs().powf(-self.s));
        }
    }
}
