use serde::{Deserialize, Serialize};

use super::bounds::{bound_a, ratio_f_sup};
use super::operator::{apply_t, TransferOperator};
use super::{Reduction, ReducedLaw};
use crate::disorder::{RadialDisorder, RadialLaw, TransversalDisorder};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, WGrid, DEFAULT_NODES};
use crate::hypgeo::UpperHalfPoint;
use crate::keyest::{find_zeta_general, find_zeta_symmetric, ZetaCertificate, DEFAULT_ZETA_TOL};
use crate::real::Real;

/// Direct iteration gives up once the norm exceeds this.
const DIVERGENCE: f64 = 1e12;

/// Geometry of the certified operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Binary tree with radial plus transversal disorder.
    Tree,
    /// One-dimensional Anderson chain.
    Chain,
}

impl Model {
    pub fn reduction(self) -> Reduction {
        match self {
            Model::Tree => Reduction::TreeReduced,
            Model::Chain => Reduction::PlainChain,
        }
    }
}

/// Search settings of the contraction certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub model: Model,
    /// Tried in the order given.
    pub s_scan: Vec<f64>,
    /// Initial half-width of the interval around `E0`.
    pub half_width: f64,
    /// Number of interval halvings tried per `s`.
    pub shrink_steps: usize,
    /// Energies sampled in the interval (endpoints included).
    pub energy_samples: usize,
    /// Acceptance threshold on `sup F`.
    pub ratio_threshold: f64,
    /// Target for the directly iterated `sup_E ||T^m 1||`.
    pub delta_target: f64,
    pub grid_nodes: usize,
    /// Largest power iterated directly.
    pub m_cap: usize,
    /// Gauss–Legendre atoms per density piece used for the zeta search.
    pub zeta_atoms: usize,
    pub zeta_tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            model: Model::Tree,
            s_scan: vec![0.1, 0.05, 0.02, 0.01, 0.005, 0.002],
            half_width: 0.05,
            shrink_steps: 6,
            energy_samples: 5,
            ratio_threshold: 1.0 - 1e-7,
            delta_target: 0.995,
            grid_nodes: DEFAULT_NODES,
            m_cap: 5000,
            zeta_atoms: 48,
            zeta_tol: DEFAULT_ZETA_TOL,
        }
    }
}

/// Record of `sup_{E in I} ||T^m 1|| <= delta < 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate<T> {
    pub e0: T,
    pub interval: [T; 2],
    pub s: T,
    pub m: usize,
    pub delta: T,
    pub zeta: UpperHalfPoint<T>,
    pub a: T,
    pub ell: T,
    pub kappa_max: T,
    pub grid_resolution: usize,
    pub model: Model,
    pub quadrature_order: usize,
    /// Grid-plus-tail supremum of `F_zeta` over the sampled energies.
    pub sup_f: T,
    /// Power from `A sup_f^(m-1) Im(zeta)^(-s) < 1`, if `sup_f < 1`.
    pub m_bound: Option<usize>,
    pub energies: Vec<T>,
    /// `sup_E ||T^k 1||` for `k = 0..=m`.
    pub norms: Vec<T>,
    pub zeta_certificate: ZetaCertificate<T>,
}

impl<T: Real> Certificate<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Inconsistency(format!("certificate: {msg}")));
        if !(self.delta < T::one()) || !(self.delta > T::zero()) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.s > T::zero() && self.s < T::lit(0.5)) {
            return bad("s must lie in (0, 1/2)");
        }
        if self.m == 0 {
            return bad("m must be positive");
        }
        let ell = self.delta.powf(-T::one() / T::from_count(self.m));
        if (ell - self.ell).abs() > T::lit(1e-12) * ell {
            return bad("ell differs from delta^(-1/m)");
        }
        if !(self.interval[0] <= self.e0 && self.e0 <= self.interval[1]) {
            return bad("interval does not contain E0");
        }
        self.zeta_certificate.validate()
    }

    /// `log ell`, the certified decay rate per step.
    pub fn rate(&self) -> T {
        self.ell.ln()
    }
}

fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n <= 1 {
        return vec![(lo + hi) * T::lit(0.5)];
    }
    (0..n).map(|k| lo + (hi - lo) * T::from_count(k) / T::from_count(n - 1)).collect()
}

/// Zeta for the key estimate at `e0`: the symmetric shortcut when the law is
/// symmetric, the general search otherwise.
pub fn zeta_for_energy<T: Real>(law: &ReducedLaw<T>, e0: T, params: &SearchParams) -> Result<ZetaCertificate<T>> {
    let atoms = law.law.discretize(params.zeta_atoms)?;
    let et = law.energy(e0);
    let tol = T::lit(params.zeta_tol);
    if law.law.is_symmetric() {
        find_zeta_symmetric(&atoms, et, tol)
    } else {
        find_zeta_general(&atoms.shifted(-et), tol)
    }
}

/// Contraction certificate at `E0`: zeta from the key estimate, an `(s, I)`
/// with `sup F <= ratio_threshold`, the bound `A`, and the first power `m`
/// whose directly iterated norm is below `delta_target`.
pub fn certify_contraction<T: Real>(
    e0: T,
    kappa: T,
    nu: &RadialLaw<T>,
    sigma: &TransversalDisorder<T>,
    params: &SearchParams,
) -> Result<Certificate<T>> {
    let nu = nu.require_density("certify_contraction")?;
    if kappa < T::zero() || !kappa.is_finite() {
        return Err(Error::InvalidInput(format!("kappa = {kappa} must be finite and >= 0")));
    }
    if params.model == Model::Chain && kappa != T::zero() {
        return Err(Error::InvalidInput("the chain model has no transversal coupling".into()));
    }
    if params.s_scan.iter().any(|&s| !(s > 0.0 && s < 0.5)) {
        return Err(Error::Domain("every scanned s must lie in (0, 1/2)".into()));
    }
    let law = ReducedLaw::new(nu, params.model.reduction())?;
    let grid = WGrid::new(params.grid_nodes)?;
    let zc = zeta_for_energy(&law, e0, params)?;
    let zeta = zc.zeta;

    // (s, I) with sup F below the threshold
    let threshold = T::lit(params.ratio_threshold);
    let mut best: Option<(f64, T)> = None;
    let mut chosen = None;
    'scan: for &s_f in &params.s_scan {
        let s = T::lit(s_f);
        let mut hw = T::lit(params.half_width);
        for _ in 0..=params.shrink_steps {
            let energies = linspace(e0 - hw, e0 + hw, params.energy_samples);
            let (sup, _, _) = ratio_f_sup(zeta, s, &energies, &law, &grid)?;
            if best.map_or(true, |b| sup < b.1) {
                best = Some((s_f, sup));
            }
            if sup <= threshold {
                chosen = Some((s, hw, energies, sup));
                break 'scan;
            }
            hw = hw * T::lit(0.5);
        }
    }
    let Some((s, hw, energies, sup_f)) = chosen else {
        let (best_s, best_sup) = best.unwrap_or((f64::NAN, T::nan()));
        return Err(Error::CertificationFailure {
            reason: format!("no scanned s gives sup F <= {}", params.ratio_threshold),
            best_s,
            best_sup_f: best_sup.as_f64(),
        });
    };
    let interval = [e0 - hw, e0 + hw];
    let a = bound_a(zeta, s, (interval[0], interval[1]), 2 * params.energy_samples - 1, &law, &grid)?;

    let m_bound = if sup_f < T::one() {
        let lead = (a * zeta.im.powf(-s)).ln();
        if lead < T::zero() {
            Some(1)
        } else {
            let steps = (lead / -sup_f.ln()).floor().to_usize().unwrap_or(usize::MAX);
            Some(steps.saturating_add(2))
        }
    } else {
        None
    };

    // direct iteration, all sampled energies in lockstep
    let ops: Vec<TransferOperator<T>> = energies
        .iter()
        .map(|&e| match params.model {
            Model::Tree => TransferOperator::tree(&grid, kappa, e, s, nu, sigma),
            Model::Chain => TransferOperator::chain(&grid, e, s, &law),
        })
        .collect::<Result<_>>()?;
    let limit = m_bound.map_or(params.m_cap, |mb| mb.min(params.m_cap));
    let target = T::lit(params.delta_target);
    let mut fs: Vec<GridFunction<T>> = ops.iter().map(|_| GridFunction::constant(&grid, T::one())).collect();
    let mut norms = vec![T::one()];
    let mut found = None;
    for k in 1..=limit {
        let mut sup = T::zero();
        for (op, f) in ops.iter().zip(fs.iter_mut()) {
            *f = op.apply(f);
            sup = sup.max(f.sup_norm());
        }
        norms.push(sup);
        if sup <= target {
            found = Some(k);
            break;
        }
        if sup > T::lit(DIVERGENCE) {
            let ratio = sup / norms[k - 1];
            return Err(Error::CertificationFailure {
                reason: format!("sup_E ||T^k 1|| diverges: {:e} at k = {k}, growth ratio {ratio}", sup.as_f64()),
                best_s: s.as_f64(),
                best_sup_f: sup_f.as_f64(),
            });
        }
    }
    let Some(m) = found else {
        let last = *norms.last().expect("k = 0 entry");
        // the analytic bound controls T_0 only
        if kappa == T::zero() && m_bound == Some(limit) && last >= T::one() {
            return Err(Error::Inconsistency(format!(
                "analytic bound gives ||T^{limit} 1|| < 1 but the grid iterate is {last}; discretization too coarse"
            )));
        }
        return Err(Error::CertificationFailure {
            reason: format!("sup_E ||T^m 1|| = {last} > {} for all m <= {limit}", params.delta_target),
            best_s: s.as_f64(),
            best_sup_f: sup_f.as_f64(),
        });
    };
    let delta = norms[m];
    let cert = Certificate {
        e0,
        interval,
        s,
        m,
        delta,
        zeta,
        a,
        ell: delta.powf(-T::one() / T::from_count(m)),
        kappa_max: kappa,
        grid_resolution: params.grid_nodes,
        model: params.model,
        quadrature_order: nu.panel_order(),
        sup_f,
        m_bound,
        energies,
        norms,
        zeta_certificate: zc,
    };
    cert.validate()?;
    Ok(cert)
}

/// `2^(1-s/2) * 4 K ||nu|| (||sigma_0|| + ||sigma_1||) kappa^(-s) / (1 - s)`.
pub fn large_coupling_bound<T: Real>(s: T, k: T, sup_nu: T, sigma_sups: (T, T), kappa: T) -> T {
    let two = T::lit(2.0);
    two.powf(T::one() - s / two) * T::lit(4.0) * k * sup_nu * (sigma_sups.0 + sigma_sups.1) * kappa.powf(-s)
        / (T::one() - s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeCouplingReport<T> {
    pub s: T,
    /// Smallest scanned kappa with the analytic bound below 1.
    pub kappa1: T,
    /// Exact solution of bound = 1.
    pub closed_form: T,
    /// Ratio between consecutive scan points.
    pub scan_ratio: T,
    pub bound_at_kappa1: T,
    /// `(E, sup_w (T_{kappa1,E,s} 1)(w))`.
    pub direct: Vec<(T, T)>,
}

/// Large-coupling threshold from the analytic bound on a logarithmic scan,
/// plus a direct grid evaluation of `sup_w T_{kappa1,E,s} 1` with `sigma`.
pub fn certify_large_coupling<T: Real>(
    s: T,
    nu: &RadialDisorder<T>,
    sigma_marginal_sups: (T, T),
    sigma: &TransversalDisorder<T>,
    energies: &[T],
    grid: &WGrid<T>,
) -> Result<LargeCouplingReport<T>> {
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::Domain(format!("s = {s} outside (0, 1)")));
    }
    let (s0, s1) = sigma_marginal_sups;
    if !(s0 > T::zero() && s1 > T::zero()) || !s0.is_finite() || !s1.is_finite() {
        return Err(Error::Assumption("marginal density sups of sigma must be declared and positive".into()));
    }
    let k = nu.radius();
    let sup = nu.sup_density();
    let bound = |kappa: T| large_coupling_bound(s, k, sup, sigma_marginal_sups, kappa);
    let ratio = T::lit(10f64.powf(1.0 / 32.0));
    let mut kappa = T::lit(1e-3);
    let mut guard = 0;
    while !(bound(kappa) < T::one()) {
        kappa = kappa * ratio;
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Search {
                reason: "large-coupling scan did not terminate".into(),
                lo_value: kappa.as_f64(),
                hi_value: bound(kappa).as_f64(),
            });
        }
    }
    let two = T::lit(2.0);
    let closed_form = (two.powf(T::one() - s / two) * T::lit(4.0) * k * sup * (s0 + s1) / (T::one() - s))
        .powf(T::one() / s);
    let one = GridFunction::constant(grid, T::one());
    let mut direct = Vec::with_capacity(energies.len());
    for &e in energies {
        let t1 = apply_t(&one, grid, kappa, e, s, nu, sigma)?;
        direct.push((e, t1.sup_norm()));
    }
    Ok(LargeCouplingReport { s, kappa1: kappa, closed_form, scan_ratio: ratio, bound_at_kappa1: bound(kappa), direct })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_atomic_nu() {
        let atoms = crate::disorder::ScalarDisorder::uniform(&[-1.0, 1.0]).unwrap();
        let r = certify_contraction(0.0, 0.0, &RadialLaw::Atoms(atoms), &TransversalDisorder::radial(), &SearchParams::default());
        match r {
            Err(Error::Assumption(msg)) => assert!(msg.contains("density required")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closed_form_inversion() {
        let nu = RadialDisorder::uniform(1.0).unwrap();
        let sigma = TransversalDisorder::uniform_surrogate(2).unwrap();
        let g = WGrid::new(64).unwrap();
        let r = certify_large_coupling(0.3, &nu, (0.5, 0.5), &sigma, &[], &g).unwrap();
        assert!(r.kappa1 >= r.closed_form && r.kappa1 <= r.closed_form * r.scan_ratio);
        assert!((large_coupling_bound::<f64>(0.3, 1.0, 0.5, (0.5, 0.5), r.closed_form) - 1.0).abs() < 1e-12);
        assert!(
            large_coupling_bound(0.3, 1.0, 0.5, (0.5, 0.5), 2.0 * r.kappa1)
                < large_coupling_bound(0.3, 1.0, 0.5, (0.5, 0.5), r.kappa1)
        );
    }
}
