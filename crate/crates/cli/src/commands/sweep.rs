use rayon::prelude::*;
use treeloc::treesim::CSV_HEADER;

use super::simulate::estimate;
use super::Context;
use crate::error::CliError;

/// Every `(E, kappa, n)` of the config at `mc.s`, one CSV row each, in
/// config order whatever the scheduling.
pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let s = cfg.mc.s.ok_or_else(|| CliError::Input("sweep needs mc.s".into()))?;
    let mut items = Vec::new();
    for e in cfg.energy.values() {
        for kappa in cfg.kappa.values() {
            for &n in &cfg.mc.n_values {
                items.push((e, kappa, n));
            }
        }
    }
    let rows = items
        .par_iter()
        .map(|&(e, kappa, n)| estimate(ctx, n, e, kappa, s).map(|r| r.csv_row()))
        .collect::<Result<Vec<_>, _>>()?;
    let p = ctx.out.write_csv("sweep.csv", cfg, CSV_HEADER, &rows)?;
    println!("{} rows, wrote {}", rows.len(), p.display());
    Ok(())
}
