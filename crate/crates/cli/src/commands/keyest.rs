use serde::{Deserialize, Serialize};
use treeloc::keyest::ZetaCertificate;
use treeloc::transfer::{zeta_for_energy, ReducedLaw};

use super::Context;
use crate::error::CliError;
use crate::output::Envelope;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KeyestRow {
    pub e: f64,
    pub reduced_energy: f64,
    pub certificate: ZetaCertificate<f64>,
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let params = cfg.search_params();
    let law = ReducedLaw::new(ctx.nu.require_density("keyest")?, cfg.model.reduction())?;
    let mut rows = Vec::new();
    for e in cfg.energy.values() {
        let c = zeta_for_energy(&law, e, &params)?;
        println!(
            "E = {e}  zeta = {}{:+}i  |zeta| = {:.9}  inf = {:.3e}  tail = {:.6}  verified = {}",
            c.zeta.re, c.zeta.im, c.abs_zeta, c.inf_value, c.tail_value, c.verified
        );
        rows.push(KeyestRow { e, reduced_energy: law.energy(e), certificate: c });
    }
    let p = ctx.out.write_json("keyest.json", &Envelope::new(cfg, "keyest", rows))?;
    println!("wrote {}", p.display());
    Ok(())
}
