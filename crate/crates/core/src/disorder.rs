//! Disorder laws: the radial density `nu` (and `nu0`), finite scalar atom
//! laws `Q`, and the transversal atom law `sigma` on [-1, 1]^2.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{GaussRule, DEFAULT_PANEL_ORDER};
use crate::real::Real;

const MASS_TOL: f64 = 1e-12;

/// Polynomial piece `sum_k coeffs[k] * (r - lo)^k` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub coeffs: Vec<T>,
}

impl<T: Real> Piece<T> {
    fn eval(&self, r: T) -> T {
        let x = r - self.lo;
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x + *c)
    }

    fn mass(&self) -> T {
        let len = self.hi - self.lo;
        let mut p = len;
        let mut acc = T::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += *c * p / T::from_count(k + 1);
            p *= len;
        }
        acc
    }
}

/// Bounded, compactly supported, piecewise-polynomial probability density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialDisorder<T> {
    pieces: Vec<Piece<T>>,
    radius: T,
    sup_density: T,
    panel_order: usize,
    piece_masses: Vec<T>,
    piece_sups: Vec<T>,
}

impl<T: Real> RadialDisorder<T> {
    /// Uniform density on `[-k, k]`.
    pub fn uniform(k: T) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::InvalidInput(format!("uniform half-width must be positive, got {k}")));
        }
        let two = T::lit(2.0);
        Self::from_pieces(vec![Piece { lo: -k, hi: k, coeffs: vec![T::one() / (two * k)] }])
    }

    /// Uniform density on `[lo, hi]`.
    pub fn uniform_on(lo: T, hi: T) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidInput("empty support".into()));
        }
        Self::from_pieces(vec![Piece { lo, hi, coeffs: vec![T::one() / (hi - lo)] }])
    }

    pub fn from_pieces(mut pieces: Vec<Piece<T>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("density needs at least one piece".into()));
        }
        pieces.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(std::cmp::Ordering::Equal));
        for p in &pieces {
            if !(p.hi > p.lo) || p.coeffs.is_empty() || p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput("malformed density piece".into()));
            }
        }
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::InvalidInput("density pieces overlap".into()));
            }
        }
        let masses: Vec<T> = pieces.iter().map(|p| p.mass()).collect();
        let total: T = masses.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(MASS_TOL).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::InvalidInput(format!("density integrates to {total}, not 1")));
        }
        // Dense sampling for sign and sup; exact for the degree <= 1 pieces
        // used in practice since extrema sit at sampled endpoints.
        let mut sups = Vec::with_capacity(pieces.len());
        for p in &pieces {
            let mut m = T::zero();
            for j in 0..=512 {
                let r = p.lo + (p.hi - p.lo) * T::from_count(j) / T::from_count(512);
                let v = p.eval(r);
                if v < -T::lit(1e-14) {
                    return Err(Error::InvalidInput(format!("density negative at {r}")));
                }
                m = m.max(v);
            }
            sups.push(m);
        }
        let radius = pieces
            .iter()
            .map(|p| p.lo.abs().max(p.hi.abs()))
            .fold(T::zero(), |a, b| a.max(b));
        let sup_density = sups.iter().copied().fold(T::zero(), |a, b| a.max(b));
        Ok(Self {
            pieces,
            radius,
            sup_density,
            panel_order: DEFAULT_PANEL_ORDER,
            piece_masses: masses,
            piece_sups: sups,
        })
    }

    pub fn with_panel_order(mut self, order: usize) -> Self {
        self.panel_order = order.max(1);
        self
    }

    pub fn panel_order(&self) -> usize {
        self.panel_order
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    /// `K` with support inside `[-K, K]`.
    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn sup_density(&self) -> T {
        self.sup_density
    }

    pub fn support(&self) -> (T, T) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    /// Piece endpoints, where the density may jump.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut b: Vec<T> = self.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        b.dedup();
        b
    }

    pub fn density(&self, r: T) -> T {
        for p in &self.pieces {
            if r >= p.lo && r <= p.hi {
                return p.eval(r);
            }
        }
        T::zero()
    }

    /// Density of `h * r` for `r ~ self`, `h > 0`.
    pub fn scaled(&self, h: T) -> Result<Self> {
        if !(h > T::zero()) {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut hk = h;
                let coeffs = p
                    .coeffs
                    .iter()
                    .map(|c| {
                        let v = *c / hk;
                        hk *= h;
                        v
                    })
                    .collect();
                Piece { lo: p.lo * h, hi: p.hi * h, coeffs }
            })
            .collect();
        Ok(Self::from_pieces(pieces)?.with_panel_order(self.panel_order))
    }

    pub fn is_symmetric(&self) -> bool {
        let tol = T::lit(1e-12);
        let k = self.radius;
        (0..=64).all(|j| {
            let r = k * T::from_count(j) / T::from_count(64);
            (self.density(r) - self.density(-r)).abs() <= tol * (T::one() + self.sup_density)
        }) && {
            let (lo, hi) = self.support();
            (lo + hi).abs() <= tol * (T::one() + k)
        }
    }

    /// Expectation of `f` under the density, by Gauss–Legendre per piece.
    pub fn expect<F: FnMut(T) -> T>(&self, rule: &GaussRule<T>, mut f: F) -> T {
        self.pieces
            .iter()
            .map(|p| rule.integrate(p.lo, p.hi, |r| p.eval(r) * f(r)))
            .sum()
    }

    /// Gauss–Legendre discretization into `n` atoms per piece.
    pub fn discretize(&self, n: usize) -> Result<ScalarDisorder<T>> {
        let rule = GaussRule::new(n)?;
        let mut atoms = Vec::with_capacity(n * self.pieces.len());
        for p in &self.pieces {
            let half = (p.hi - p.lo) * T::lit(0.5);
            let mid = (p.hi + p.lo) * T::lit(0.5);
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                let r = mid + half * *x;
                atoms.push((r, *w * half * p.eval(r)));
            }
        }
        ScalarDisorder::normalized(atoms)
    }

    /// One draw: pick a piece by mass, then rejection-sample inside it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let mut idx = 0;
        if self.pieces.len() > 1 {
            let u = T::lit(rng.gen::<f64>());
            let mut acc = T::zero();
            idx = self.pieces.len() - 1;
            for (k, m) in self.piece_masses.iter().enumerate() {
                acc += *m;
                if u < acc {
                    idx = k;
                    break;
                }
            }
        }
        let p = &self.pieces[idx];
        let width = p.hi - p.lo;
        if p.coeffs.len() == 1 {
            return p.lo + width * T::lit(rng.gen::<f64>());
        }
        let sup = self.piece_sups[idx];
        loop {
            let r = p.lo + width * T::lit(rng.gen::<f64>());
            if T::lit(rng.gen::<f64>()) * sup <= p.eval(r) {
                return r;
            }
        }
    }
}

/// A radial law as declared by a caller: a genuine density, or atoms
/// (accepted by the simulator, rejected wherever a bounded density is required).
#[derive(Clone, Debug)]
pub enum RadialLaw<T> {
    Density(RadialDisorder<T>),
    Atoms(ScalarDisorder<T>),
}

impl<T: Real> RadialLaw<T> {
    pub fn require_density(&self, what: &str) -> Result<&RadialDisorder<T>> {
        match self {
            RadialLaw::Density(d) => Ok(d),
            RadialLaw::Atoms(_) => Err(Error::Assumption(format!(
                "{what}: density required, the radial law is atomic"
            ))),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            RadialLaw::Density(d) => d.sample(rng),
            RadialLaw::Atoms(a) => a.sample(rng),
        }
    }

    /// Half-width of the smallest centred interval holding the support.
    pub fn radius(&self) -> T {
        match self {
            RadialLaw::Density(d) => d.radius(),
            RadialLaw::Atoms(a) => a.bound(),
        }
    }
}

fn pick<T: Real, R: Rng + ?Sized>(weights: impl Iterator<Item = T>, len: usize, rng: &mut R) -> usize {
    let u = T::lit(rng.gen::<f64>());
    let mut acc = T::zero();
    for (k, w) in weights.enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    len - 1
}

/// Finite law of a bounded real random variable: `(value, weight)` atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarDisorder<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Real> ScalarDisorder<T> {
    pub fn new(atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("empty atom law".into()));
        }
        let mut total = T::zero();
        for (v, w) in &atoms {
            if !v.is_finite() || !w.is_finite() || *w < T::zero() {
                return Err(Error::InvalidInput(format!("bad atom ({v}, {w})")));
            }
            total += *w;
        }
        if (total - T::one()).abs() > T::lit(MASS_TOL).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::InvalidInput(format!("atom weights sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    pub fn normalized(atoms: Vec<(T, T)>) -> Result<Self> {
        let total: T = atoms.iter().map(|a| a.1).sum();
        if !(total > T::zero()) {
            return Err(Error::InvalidInput("atom weights must have positive sum".into()));
        }
        Self::new(atoms.into_iter().map(|(v, w)| (v, w / total)).collect())
    }

    pub fn uniform(values: &[T]) -> Result<Self> {
        let w = T::one() / T::from_count(values.len().max(1));
        Self::new(values.iter().map(|&v| (v, w)).collect())
    }

    pub fn point(value: T) -> Self {
        Self { atoms: vec![(value, T::one())] }
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Law of `Q + c`.
    pub fn shifted(&self, c: T) -> Self {
        Self { atoms: self.atoms.iter().map(|&(v, w)| (v + c, w)).collect() }
    }

    pub fn mean(&self) -> T {
        self.atoms.iter().map(|&(v, w)| v * w).sum()
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.atoms.iter().map(|&(v, w)| w * (v - m) * (v - m)).sum()
    }

    /// Smallest `a0` with every atom in `[-a0, a0]`.
    pub fn bound(&self) -> T {
        self.atoms.iter().fold(T::zero(), |a, &(v, _)| a.max(v.abs()))
    }

    /// Number of distinct atom values carrying positive weight.
    pub fn support_size(&self) -> usize {
        let mut vals: Vec<T> = self.atoms.iter().filter(|a| a.1 > T::zero()).map(|a| a.0).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        vals.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-14) * (T::one() + b.abs()));
        vals.len()
    }

    /// Symmetric about 0 within `tol` in values and weights.
    pub fn is_symmetric(&self, tol: T) -> bool {
        let mut pos: Vec<(T, T)> = self.atoms.iter().filter(|a| a.1 > T::zero()).copied().collect();
        let mut neg: Vec<(T, T)> = pos.iter().map(|&(v, w)| (-v, w)).collect();
        let key = |a: &(T, T), b: &(T, T)| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal);
        pos.sort_by(key);
        neg.sort_by(key);
        pos.iter().zip(&neg).all(|(a, b)| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol)
    }

    pub fn expect<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.atoms.iter().map(|&(v, w)| w * f(v)).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        if self.atoms.len() == 1 {
            return self.atoms[0].0;
        }
        self.atoms[pick(self.atoms.iter().map(|a| a.1), self.atoms.len(), rng)].0
    }
}

/// Transversal law `sigma`: atoms `((p0, p1), weight)` in `[-1, 1]^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransversalDisorder<T> {
    atoms: Vec<([T; 2], T)>,
}

impl<T: Real> TransversalDisorder<T> {
    pub fn new(atoms: Vec<([T; 2], T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("sigma needs at least one atom".into()));
        }
        let mut total = T::zero();
        for (p, w) in &atoms {
            if p.iter().any(|x| !x.is_finite() || x.abs() > T::one()) {
                return Err(Error::InvalidInput(format!("sigma atom ({}, {}) outside [-1,1]^2", p[0], p[1])));
            }
            if !w.is_finite() || *w < T::zero() {
                return Err(Error::InvalidInput(format!("bad sigma weight {w}")));
            }
            total += *w;
        }
        if (total - T::one()).abs() > T::lit(MASS_TOL).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::InvalidInput(format!("sigma weights sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    /// Point mass at `(0, 0)`: purely radial disorder.
    pub fn radial() -> Self {
        Self { atoms: vec![([T::zero(), T::zero()], T::one())] }
    }

    /// `{(1, -1), (-1, 1)}` with equal weights.
    pub fn antisymmetric_pair() -> Self {
        let h = T::lit(0.5);
        Self { atoms: vec![([T::one(), -T::one()], h), ([-T::one(), T::one()], h)] }
    }

    /// Product Gauss–Legendre surrogate of the uniform law on `[-1, 1]^2`.
    pub fn uniform_surrogate(n: usize) -> Result<Self> {
        let rule = GaussRule::<T>::new(n)?;
        let quarter = T::lit(0.25);
        let mut atoms = Vec::with_capacity(n * n);
        for (x, wx) in rule.nodes().iter().zip(rule.weights()) {
            for (y, wy) in rule.nodes().iter().zip(rule.weights()) {
                atoms.push(([*x, *y], *wx * *wy * quarter));
            }
        }
        Self::new(atoms)
    }

    pub fn atoms(&self) -> &[([T; 2], T)] {
        &self.atoms
    }

    /// Same law with the two colours exchanged.
    pub fn swapped(&self) -> Self {
        Self { atoms: self.atoms.iter().map(|&(p, w)| ([p[1], p[0]], w)).collect() }
    }

    /// Coordinate marginal `sigma_i`.
    pub fn marginal(&self, i: usize) -> Result<ScalarDisorder<T>> {
        if i > 1 {
            return Err(Error::InvalidInput("marginal index must be 0 or 1".into()));
        }
        ScalarDisorder::new(self.atoms.iter().map(|&(p, w)| (p[i], w)).collect())
    }

    pub fn is_diagonal(&self) -> bool {
        self.atoms.iter().all(|(p, w)| *w == T::zero() || p[0] == p[1])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [T; 2] {
        if self.atoms.len() == 1 {
            return self.atoms[0].0;
        }
        self.atoms[pick(self.atoms.iter().map(|a| a.1), self.atoms.len(), rng)].0
    }

    /// Cumulative weights, for sampling by inversion.
    pub fn cumulative(&self) -> Vec<T> {
        let mut acc = T::zero();
        self.atoms
            .iter()
            .map(|a| {
                acc += a.1;
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_basics() {
        let nu = RadialDisorder::<f64>::uniform(1.0).unwrap();
        assert_eq!(nu.radius(), 1.0);
        assert_eq!(nu.sup_density(), 0.5);
        assert!(nu.is_symmetric());
        let rule = GaussRule::new(16).unwrap();
        assert_relative_eq!(nu.expect(&rule, |_| 1.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(nu.expect(&rule, |r| r * r), 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_densities() {
        assert!(RadialDisorder::<f64>::uniform(0.0).is_err());
        let half = vec![Piece { lo: -1.0, hi: 1.0, coeffs: vec![0.25] }];
        assert!(RadialDisorder::from_pieces(half).is_err());
        let neg = vec![Piece { lo: 0.0, hi: 1.0, coeffs: vec![2.0, -2.0 * 1.5] }];
        assert!(RadialDisorder::from_pieces(neg).is_err());
    }

    #[test]
    fn triangular_pieces_and_scaling() {
        // triangle on [-1, 1] with peak 1 at 0
        let tri = RadialDisorder::from_pieces(vec![
            Piece { lo: -1.0, hi: 0.0, coeffs: vec![0.0, 1.0] },
            Piece { lo: 0.0, hi: 1.0, coeffs: vec![1.0, -1.0] },
        ])
        .unwrap();
        assert_relative_eq!(tri.sup_density(), 1.0);
        assert!(tri.is_symmetric());
        let h = 1.0 / 2f64.sqrt();
        let sc = tri.scaled(h).unwrap();
        assert_relative_eq!(sc.radius(), h, epsilon = 1e-15);
        assert_relative_eq!(sc.density(0.3 * h), tri.density(0.3) / h, epsilon = 1e-13);
        let atoms = sc.discretize(16).unwrap();
        assert_relative_eq!(atoms.variance(), h * h / 6.0, epsilon = 1e-13);
    }

    #[test]
    fn sampling_stays_in_support_and_matches_mean() {
        let tri = RadialDisorder::from_pieces(vec![
            Piece { lo: 0.0, hi: 1.0, coeffs: vec![2.0, -2.0] },
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 40_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let r = tri.sample(&mut rng);
            assert!((0.0..=1.0).contains(&r));
            sum += r;
        }
        // mean 1/3, sd sqrt(1/18)
        assert!((sum / n as f64 - 1.0 / 3.0).abs() < 4.0 * (1.0f64 / 18.0).sqrt() / (n as f64).sqrt());
    }

    #[test]
    fn scalar_law_helpers() {
        let q = ScalarDisorder::<f64>::uniform(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(q.support_size(), 3);
        assert!(q.is_symmetric(1e-12));
        assert_relative_eq!(q.variance(), 2.0 / 3.0);
        assert_eq!(q.shifted(2.0).bound(), 3.0);
        assert!(!q.shifted(0.5).is_symmetric(1e-12));
        assert!(ScalarDisorder::new(vec![(0.0, 0.5)]).is_err());
    }

    #[test]
    fn transversal_law_helpers() {
        let s = TransversalDisorder::<f64>::antisymmetric_pair();
        assert_eq!(s.swapped().atoms()[0].0, [-1.0, 1.0]);
        assert!(!s.is_diagonal());
        assert!(TransversalDisorder::<f64>::radial().is_diagonal());
        assert!(TransversalDisorder::new(vec![([1.5, 0.0], 1.0)]).is_err());
        let u = TransversalDisorder::<f64>::uniform_surrogate(6).unwrap();
        assert_relative_eq!(u.marginal(0).unwrap().variance(), 1.0 / 3.0, epsilon = 1e-13);
    }
}
