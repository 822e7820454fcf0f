use num_complex::Complex;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::geometry::{dist_unchecked, exp_map_unchecked, geodesic_unchecked, log_map_unchecked};
use super::point::{UpperHalfPoint, WeightedPointSet};
use crate::error::{Error, Result};
use crate::real::Real;

/// Controls for the damped Newton descent.
#[derive(Clone, Copy, Debug)]
pub struct BarycenterOptions<T> {
    /// Stop when the hyperbolic norm of the gradient drops to this value, or
    /// to its rounding floor if that is larger.
    pub tol: T,
    pub max_iter: usize,
    /// Largest atom count for which the double average uses all pairs.
    pub pair_cap: usize,
    /// Seed for pair subsampling beyond `pair_cap`.
    pub pair_seed: u64,
}

impl<T: Real> Default for BarycenterOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10),
            max_iter: 100_000,
            pair_cap: 512,
            pair_seed: 0x5eed_ba7c,
        }
    }
}

impl<T: Real> BarycenterOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Result of a converged descent.
#[derive(Clone, Copy, Debug)]
pub struct BarycenterReport<T> {
    pub point: UpperHalfPoint<T>,
    pub grad_norm: T,
    pub iterations: usize,
}

fn objective<T: Real>(x: &WeightedPointSet<T>, z: UpperHalfPoint<T>) -> T {
    x.iter().map(|(p, &w)| {
        let d = dist_unchecked(*p, z);
        w * d * d
    }).sum()
}

/// Half the negative Riemannian gradient of the objective, i.e. the weighted
/// mean of the logarithms. Returned with its hyperbolic length.
fn mean_log<T: Real>(x: &WeightedPointSet<T>, z: UpperHalfPoint<T>) -> (Complex<T>, T) {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (p, &w) in x.iter() {
        acc += log_map_unchecked(z, *p).scale(w);
    }
    let norm = acc.norm() / z.im;
    (acc, norm)
}

/// Newton direction at `z`: the mean log mapped through the inverse of the
/// averaged Hessian of `d^2 / 2`, which is 1 along each log and `d coth d`
/// across it.
fn newton_direction<T: Real>(x: &WeightedPointSet<T>, z: UpperHalfPoint<T>, g: Complex<T>) -> Complex<T> {
    let (mut h11, mut h12, mut h22) = (T::zero(), T::zero(), T::zero());
    for (p, &w) in x.iter() {
        let l = log_map_unchecked(z, *p).unscale(z.im);
        let d = l.norm();
        let (ux, uy) = if d > T::zero() { (l.re / d, l.im / d) } else { (T::one(), T::zero()) };
        let across = if d > T::lit(1e-4) { d / d.tanh() } else { T::one() + d * d / T::lit(3.0) };
        h11 += w * (across + (T::one() - across) * ux * ux);
        h12 += w * (T::one() - across) * ux * uy;
        h22 += w * (across + (T::one() - across) * uy * uy);
    }
    let det = h11 * h22 - h12 * h12;
    let (gx, gy) = (g.re / z.im, g.im / z.im);
    Complex::new((h22 * gx - h12 * gy) / det, (h11 * gy - h12 * gx) / det).scale(z.im)
}

/// Rounding floor of the gradient norm at `z`.
fn gradient_floor<T: Real>(x: &WeightedPointSet<T>, z: UpperHalfPoint<T>) -> T {
    let spread: T = x.iter().map(|(p, &w)| w * dist_unchecked(*p, z)).sum();
    T::lit(256.0) * T::epsilon() * spread
}

fn initial_guess<T: Real>(x: &WeightedPointSet<T>) -> UpperHalfPoint<T> {
    let mut re = T::zero();
    let mut log_im = T::zero();
    for (p, &w) in x.iter() {
        re += w * p.re;
        log_im += w * p.im.ln();
    }
    UpperHalfPoint::new(re, log_im.exp())
}

/// Sturm d^2-barycenter of a weighted point set with a convergence report.
pub fn barycenter_report<T: Real>(
    x: &WeightedPointSet<T>,
    opts: &BarycenterOptions<T>,
) -> Result<BarycenterReport<T>> {
    let two = T::lit(2.0);
    if x.len() == 1 {
        return Ok(BarycenterReport {
            point: x.points()[0],
            grad_norm: T::zero(),
            iterations: 0,
        });
    }
    let mut z = initial_guess(x);
    let mut value = objective(x, z);
    let (mut step_dir, mut gnorm) = mean_log(x, z);
    let mut step = T::one();
    let eps = T::epsilon();
    for iter in 0..opts.max_iter {
        if two * gnorm <= opts.tol.max(gradient_floor(x, z)) {
            return Ok(BarycenterReport {
                point: z,
                grad_norm: two * gnorm,
                iterations: iter,
            });
        }
        let trial = exp_map_unchecked(z, newton_direction(x, z, step_dir).scale(step));
        let trial_value = objective(x, trial);
        let (trial_dir, trial_norm) = mean_log(x, trial);
        // Once the objective stops resolving decreases, fall back on the gradient.
        let noise = T::lit(16.0) * eps * value.max(T::min_positive_value());
        let accept = trial_value < value - noise
            || ((trial_value - value).abs() <= noise && trial_norm < gnorm);
        if accept && trial.is_interior() {
            z = trial;
            value = trial_value;
            step_dir = trial_dir;
            gnorm = trial_norm;
            step = T::one();
        } else {
            step = step / two;
            if step < T::lit(1e-30) {
                return Err(Error::Convergence {
                    iterations: iter,
                    last_re: z.re.as_f64(),
                    last_im: z.im.as_f64(),
                    grad_norm: (two * gnorm).as_f64(),
                });
            }
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iter,
        last_re: z.re.as_f64(),
        last_im: z.im.as_f64(),
        grad_norm: (two * gnorm).as_f64(),
    })
}

/// Minimizer of `z -> sum_i w_i d(x_i, z)^2`.
pub fn barycenter<T: Real>(x: &WeightedPointSet<T>, tol: T) -> Result<UpperHalfPoint<T>> {
    barycenter_report(x, &BarycenterOptions::with_tol(tol)).map(|r| r.point)
}

/// Law of the midpoint of two independent copies of `x`.
///
/// Uses all unordered pairs (merging `(i, j)` with `(j, i)`) up to
/// `opts.pair_cap` atoms; beyond that, i.i.d. pairs drawn with a fixed seed.
pub fn midpoint_law<T: Real>(
    x: &WeightedPointSet<T>,
    opts: &BarycenterOptions<T>,
) -> Result<WeightedPointSet<T>> {
    let n = x.len();
    let pts = x.points();
    let ws = x.weights();
    let half = T::lit(0.5);
    if n <= opts.pair_cap {
        let mut points = Vec::with_capacity(n * (n + 1) / 2);
        let mut weights = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            if ws[i] == T::zero() {
                continue;
            }
            points.push(pts[i]);
            weights.push(ws[i] * ws[i]);
            for j in (i + 1)..n {
                if ws[j] == T::zero() {
                    continue;
                }
                points.push(geodesic_unchecked(pts[i], pts[j], half));
                weights.push(T::lit(2.0) * ws[i] * ws[j]);
            }
        }
        return WeightedPointSet::normalized(points, weights);
    }
    let table: Vec<f64> = ws.iter().map(|w| w.as_f64()).collect();
    let dist = WeightedIndex::new(&table)
        .map_err(|e| Error::InvalidInput(format!("pair subsampling: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.pair_seed);
    let draws = opts.pair_cap * (opts.pair_cap + 1) / 2;
    let mut points = Vec::with_capacity(draws);
    for _ in 0..draws {
        let i = dist.sample(&mut rng);
        let j = dist.sample(&mut rng);
        points.push(geodesic_unchecked(pts[i], pts[j], half));
    }
    WeightedPointSet::uniform(points)
}

/// Double-average barycenter: barycenter of the midpoint law.
pub fn double_barycenter<T: Real>(x: &WeightedPointSet<T>, tol: T) -> Result<UpperHalfPoint<T>> {
    double_barycenter_with(x, &BarycenterOptions::with_tol(tol)).map(|r| r.point)
}

pub fn double_barycenter_with<T: Real>(
    x: &WeightedPointSet<T>,
    opts: &BarycenterOptions<T>,
) -> Result<BarycenterReport<T>> {
    let mids = midpoint_law(x, opts)?;
    barycenter_report(&mids, opts)
}
