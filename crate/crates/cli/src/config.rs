use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use treeloc::disorder::{Piece, RadialDisorder, RadialLaw, ScalarDisorder, TransversalDisorder};
use treeloc::transfer::{Model, SearchParams};

use crate::error::CliError;

/// A single value or a list, so `kappa = 0.0` and `kappa = [0.0, 0.01]` both parse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialSpec {
    Uniform { k: f64 },
    UniformOn { lo: f64, hi: f64 },
    Piecewise { pieces: Vec<PieceSpec> },
    Atoms { values: Vec<f64>, #[serde(default, skip_serializing_if = "Option::is_none")] weights: Option<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub lo: f64,
    pub hi: f64,
    /// Polynomial coefficients in powers of `r - lo`.
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaSpec {
    Radial,
    AntisymmetricPair,
    UniformSurrogate { n: usize },
    /// `[p0, p1, weight]` triples.
    Atoms { atoms: Vec<[f64; 3]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu0: Option<RadialSpec>,
    pub nu: RadialSpec,
    #[serde(default = "default_sigma")]
    pub sigma: SigmaSpec,
    /// Declared density sups of the two marginals of sigma.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_marginal_sups: Option<[f64; 2]>,
}

fn default_sigma() -> SigmaSpec {
    SigmaSpec::Radial
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrink_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_atoms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_nodes: treeloc::grid::DEFAULT_NODES }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub panel_order: usize,
    pub pointwise_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { panel_order: treeloc::quadrature::DEFAULT_PANEL_ORDER, pointwise_order: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McConfig {
    pub n_samples: usize,
    pub depth_buffer: usize,
    pub epsilon: f64,
    /// Sphere indices to estimate.
    pub n_values: Vec<usize>,
    /// Fractional exponent; taken from the certificate when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Certificate file to compare the fitted decay against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PathBuf>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { n_samples: 10_000, depth_buffer: 40, epsilon: 0.01, n_values: vec![0, 2, 4, 6, 8, 10, 12], s: None, certificate: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LargeCouplingConfig {
    pub s: f64,
    pub energies: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrosscheckConfig {
    pub depth: usize,
    pub realizations: usize,
    pub energies: Vec<f64>,
    pub epsilon: f64,
    /// Added to one forward Green value before the oracle comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_perturbation: Option<f64>,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        Self { depth: 6, realizations: 20, energies: vec![-2.0, 0.0, 2.0], epsilon: 0.01, inject_perturbation: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_model")]
    pub model: Model,
    pub disorder: DisorderConfig,
    #[serde(default = "zero")]
    pub kappa: OneOrMany,
    #[serde(default = "zero")]
    pub energy: OneOrMany,
    #[serde(default = "default_s_scan")]
    pub s_scan: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large_coupling: Option<LargeCouplingConfig>,
    #[serde(default)]
    pub crosscheck: CrosscheckConfig,
}

fn default_model() -> Model {
    Model::Tree
}

fn zero() -> OneOrMany {
    OneOrMany::One(0.0)
}

fn default_s_scan() -> Vec<f64> {
    SearchParams::default().s_scan
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn radial(spec: &RadialSpec, order: usize) -> Result<RadialLaw<f64>, CliError> {
    let density = |d: treeloc::Result<RadialDisorder<f64>>| -> Result<RadialLaw<f64>, CliError> {
        Ok(RadialLaw::Density(d?.with_panel_order(order)))
    };
    match spec {
        RadialSpec::Uniform { k } => density(RadialDisorder::uniform(*k)),
        RadialSpec::UniformOn { lo, hi } => density(RadialDisorder::uniform_on(*lo, *hi)),
        RadialSpec::Piecewise { pieces } => density(RadialDisorder::from_pieces(
            pieces.iter().map(|p| Piece { lo: p.lo, hi: p.hi, coeffs: p.coeffs.clone() }).collect(),
        )),
        RadialSpec::Atoms { values, weights } => {
            let law = match weights {
                None => ScalarDisorder::uniform(values)?,
                Some(w) if w.len() == values.len() => {
                    ScalarDisorder::new(values.iter().copied().zip(w.iter().copied()).collect())?
                }
                Some(_) => return Err(bad("atom values and weights differ in length")),
            };
            Ok(RadialLaw::Atoms(law))
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.kappa.values().is_empty() || self.energy.values().is_empty() {
            return Err(bad("kappa and energy lists must be non-empty"));
        }
        if self.kappa.values().iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
            return Err(bad("kappa values must be finite and >= 0"));
        }
        if self.energy.values().iter().any(|e| !e.is_finite()) {
            return Err(bad("energies must be finite"));
        }
        if self.s_scan.is_empty() || self.s_scan.iter().any(|s| !(*s > 0.0 && *s < 0.5)) {
            return Err(bad("s_scan entries must lie in (0, 1/2)"));
        }
        if self.grid.n_nodes < 8 {
            return Err(bad("grid.n_nodes must be at least 8"));
        }
        if self.quadrature.panel_order == 0 || self.quadrature.pointwise_order == 0 {
            return Err(bad("quadrature orders must be positive"));
        }
        if !(self.mc.epsilon > 0.0) || self.mc.n_samples < 2 {
            return Err(bad("mc.epsilon must be > 0 and mc.n_samples >= 2"));
        }
        if let Some(s) = self.mc.s {
            if !(s > 0.0 && s < 1.0) {
                return Err(bad("mc.s must lie in (0, 1)"));
            }
        }
        if self.model == Model::Chain && self.kappa.values().iter().any(|k| *k != 0.0) {
            return Err(bad("the chain model takes kappa = 0 only"));
        }
        // build the laws once so that malformed disorder is reported here
        self.nu()?;
        self.nu0()?;
        self.sigma()?;
        Ok(())
    }

    pub fn nu(&self) -> Result<RadialLaw<f64>, CliError> {
        radial(&self.disorder.nu, self.quadrature.panel_order)
    }

    pub fn nu0(&self) -> Result<RadialLaw<f64>, CliError> {
        match &self.disorder.nu0 {
            Some(spec) => radial(spec, self.quadrature.panel_order),
            None => self.nu(),
        }
    }

    pub fn sigma(&self) -> Result<TransversalDisorder<f64>, CliError> {
        Ok(match &self.disorder.sigma {
            SigmaSpec::Radial => TransversalDisorder::radial(),
            SigmaSpec::AntisymmetricPair => TransversalDisorder::antisymmetric_pair(),
            SigmaSpec::UniformSurrogate { n } => TransversalDisorder::uniform_surrogate(*n)?,
            SigmaSpec::Atoms { atoms } => TransversalDisorder::new(atoms.iter().map(|a| ([a[0], a[1]], a[2])).collect())?,
        })
    }

    /// Declared marginal sups; the uniform surrogate stands for the uniform law on `[-1, 1]^2`.
    pub fn sigma_marginal_sups(&self) -> Option<(f64, f64)> {
        match (self.disorder.sigma_marginal_sups, &self.disorder.sigma) {
            (Some([a, b]), _) => Some((a, b)),
            (None, SigmaSpec::UniformSurrogate { .. }) => Some((0.5, 0.5)),
            _ => None,
        }
    }

    pub fn search_params(&self) -> SearchParams {
        let d = SearchParams::default();
        let s = &self.search;
        SearchParams {
            model: self.model,
            s_scan: self.s_scan.clone(),
            half_width: s.half_width.unwrap_or(d.half_width),
            shrink_steps: s.shrink_steps.unwrap_or(d.shrink_steps),
            energy_samples: s.energy_samples.unwrap_or(d.energy_samples),
            ratio_threshold: s.ratio_threshold.unwrap_or(d.ratio_threshold),
            delta_target: s.delta_target.unwrap_or(d.delta_target),
            grid_nodes: self.grid.n_nodes,
            m_cap: s.m_cap.unwrap_or(d.m_cap),
            zeta_atoms: s.zeta_atoms.unwrap_or(d.zeta_atoms),
            zeta_tol: s.zeta_tol.unwrap_or(d.zeta_tol),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
model = "tree"
kappa = [0.0, 0.01]
energy = 0.0
seed = 7

[disorder]
nu = { kind = "uniform", k = 1.0 }
sigma = { kind = "antisymmetric_pair" }

[mc]
n_samples = 1000
depth_buffer = 40
epsilon = 0.01
n_values = [0, 2, 4]
"#;

    #[test]
    fn round_trip() {
        let cfg = RunConfig::parse(SAMPLE).unwrap();
        let again = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.kappa.values(), vec![0.0, 0.01]);
        assert_eq!(cfg.grid.n_nodes, 4096);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::parse(&format!("{SAMPLE}\nbogus = 1\n")).is_err());
        assert!(RunConfig::parse(&SAMPLE.replace("k = 1.0", "k = -1.0")).is_err());
        assert!(RunConfig::parse(&SAMPLE.replace("energy = 0.0", "s_scan = [0.7]")).is_err());
    }

    #[test]
    fn atoms_parse_as_atoms() {
        let cfg = RunConfig::parse(&SAMPLE.replace(
            r#"{ kind = "uniform", k = 1.0 }"#,
            r#"{ kind = "atoms", values = [-1.0, 1.0] }"#,
        ))
        .unwrap();
        assert!(matches!(cfg.nu().unwrap(), RadialLaw::Atoms(_)));
    }
}
