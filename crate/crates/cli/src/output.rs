use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TOOL: &str = "treeloc";

/// SHA-256 of the canonical JSON form of the effective config, with the
/// output directory left out.
pub fn config_hash(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.output_dir = None;
    let json = serde_json::to_string(&c).expect("config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

/// Header carried by every JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<P> {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub command: String,
    pub seed: u64,
    pub payload: P,
}

impl<P> Envelope<P> {
    pub fn new(cfg: &RunConfig, command: &str, payload: P) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            config_hash: config_hash(cfg),
            command: command.into(),
            seed: cfg.seed,
            payload,
        }
    }
}

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(path).map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    pub fn write_json<P: Serialize>(&self, name: &str, env: &Envelope<P>) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        let mut text = serde_json::to_string_pretty(env).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        fs::write(&p, text)?;
        Ok(p)
    }

    /// CSV with a leading `#` line naming tool, version and config hash.
    pub fn write_csv(&self, name: &str, cfg: &RunConfig, header: &str, rows: &[String]) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        let mut text = format!("# {TOOL} {VERSION} config_hash={}\n{header}\n", config_hash(cfg));
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        fs::write(&p, text)?;
        Ok(p)
    }
}

pub fn read_json<P: for<'de> Deserialize<'de>>(path: &Path) -> Result<Envelope<P>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
