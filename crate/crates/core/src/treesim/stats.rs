//! Least-squares fits and two-sample tests used for decay-law checks.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub slope_stderr: T,
}

/// Weighted least squares `y = a + b x`. With `sigmas` the slope error is the
/// known-variance one, `(sum w (x - x_w)^2)^{-1/2}` with `w = sigma^-2`;
/// without, it is the residual estimate and needs three or more points.
pub fn linear_fit<T: Real>(x: &[T], y: &[T], sigmas: Option<&[T]>) -> Result<LinearFit<T>> {
    let n = x.len();
    if n < 2 || y.len() != n || sigmas.is_some_and(|s| s.len() != n) {
        return Err(Error::InvalidInput("fit needs at least two matching points".into()));
    }
    let w: Vec<T> = match sigmas {
        Some(s) => {
            if s.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
                return Err(Error::InvalidInput("fit standard deviations must be positive".into()));
            }
            s.iter().map(|v| (*v * *v).recip()).collect()
        }
        None => vec![T::one(); n],
    };
    let sw: T = w.iter().copied().sum();
    let xm = x.iter().zip(&w).map(|(a, b)| *a * *b).sum::<T>() / sw;
    let ym = y.iter().zip(&w).map(|(a, b)| *a * *b).sum::<T>() / sw;
    let sxx: T = x.iter().zip(&w).map(|(a, b)| *b * (*a - xm) * (*a - xm)).sum();
    if !(sxx > T::zero()) {
        return Err(Error::InvalidInput("fit abscissae are all equal".into()));
    }
    let sxy: T = x.iter().zip(y).zip(&w).map(|((a, c), b)| *b * (*a - xm) * (*c - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let slope_stderr = if sigmas.is_some() {
        sxx.recip().sqrt()
    } else {
        if n < 3 {
            return Err(Error::InvalidInput("residual standard error needs three points".into()));
        }
        let rss: T = x.iter().zip(y).map(|(a, c)| (*c - intercept - slope * *a).powi(2)).sum();
        (rss / T::from_count(n - 2) / sxx).sqrt()
    };
    Ok(LinearFit { slope, intercept, slope_stderr })
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.is_empty() || b.is_empty() || a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("KS samples must be non-empty and free of NaN".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("no NaN"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("no NaN"));
    let (na, nb) = (T::from_count(a.len()), T::from_count(b.len()));
    let (mut i, mut j) = (0, 0);
    let mut d = T::zero();
    while i < a.len() && j < b.len() {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((T::from_count(i) / na - T::from_count(j) / nb).abs());
    }
    Ok(d)
}

/// Asymptotic critical value `sqrt(-ln(alpha/2)/2) sqrt((n+m)/(n m))`.
pub fn ks_critical<T: Real>(alpha: T, n: usize, m: usize) -> T {
    let c = (-(alpha * T::lit(0.5)).ln() * T::lit(0.5)).sqrt();
    let (n, m) = (T::from_count(n), T::from_count(m));
    c * ((n + m) / (n * m)).sqrt()
}
