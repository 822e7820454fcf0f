pub mod certify;
pub mod crosscheck;
pub mod keyest;
pub mod simulate;
pub mod sweep;

use std::path::PathBuf;

use treeloc::disorder::{RadialLaw, TransversalDisorder};
use treeloc::grid::WGrid;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{config_hash, OutDir, TOOL, VERSION};

pub struct Context {
    pub cfg: RunConfig,
    pub out: OutDir,
    pub nu0: RadialLaw<f64>,
    pub nu: RadialLaw<f64>,
    pub sigma: TransversalDisorder<f64>,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Result<Self, CliError> {
        let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
        let out = OutDir::create(&dir)?;
        let manifest = format!("# {TOOL} {VERSION} config_hash={}\n{}", config_hash(&cfg), cfg.to_toml());
        std::fs::write(out.path("run_config.toml"), manifest)?;
        Ok(Self { nu0: cfg.nu0()?, nu: cfg.nu()?, sigma: cfg.sigma()?, out, cfg })
    }

    pub fn grid(&self) -> Result<WGrid<f64>, CliError> {
        Ok(WGrid::new(self.cfg.grid.n_nodes)?)
    }
}
