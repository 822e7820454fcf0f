use serde::{Deserialize, Serialize};
use treeloc::transfer::{initial_bound, iterate_norms, iterate_norms_1d, Model, ReducedLaw};
use treeloc::treesim::stats::linear_fit;
use treeloc::treesim::{mc_fractional_moment, mc_fractional_moment_1d, MomentEstimate, MomentQuery, TreeDisorder, CSV_HEADER};

use super::certify::load_certificates;
use super::Context;
use crate::error::CliError;
use crate::output::Envelope;

pub fn estimate(ctx: &Context, n: usize, e: f64, kappa: f64, s: f64) -> Result<MomentEstimate<f64>, CliError> {
    let mc = &ctx.cfg.mc;
    let q = MomentQuery { n, e, epsilon: mc.epsilon, s, kappa, n_samples: mc.n_samples, depth_buffer: mc.depth_buffer, seed: ctx.cfg.seed };
    Ok(match ctx.cfg.model {
        Model::Tree => {
            let laws = TreeDisorder { nu0: ctx.nu0.clone(), nu: ctx.nu.clone(), sigma: ctx.sigma.clone() };
            mc_fractional_moment(&q, &laws)?
        }
        Model::Chain => mc_fractional_moment_1d(&q, &ctx.nu)?,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub e: f64,
    pub kappa: f64,
    pub s: f64,
    /// Slope of `log mean` against `n` over the rows with `n > 0`.
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
    pub ell_hat: Option<f64>,
    /// `mean <= C_0 + 3 stderr` on the `n = 0` row.
    pub initial_bound: f64,
    pub initial_bound_ok: Option<bool>,
    pub certified_ell: Option<f64>,
    /// `slope <= -log ell + 2 stderr`.
    pub decay_consistent: Option<bool>,
    /// `mean <= C ||T^n 1|| + 3 stderr` for every row.
    pub moment_bound_ok: Option<bool>,
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let certs = match &cfg.mc.certificate {
        Some(p) => load_certificates(p)?.payload.certificates,
        None => Vec::new(),
    };
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for e in cfg.energy.values() {
        for kappa in cfg.kappa.values() {
            let cert = certs.iter().find(|c| c.e0 == e && c.kappa_max == kappa);
            let s = match (cfg.mc.s, cert) {
                (Some(s), _) => s,
                (None, Some(c)) => c.s,
                (None, None) => {
                    return Err(CliError::Input(format!("no mc.s and no certificate for E = {e}, kappa = {kappa}")))
                }
            };
            let est: Vec<MomentEstimate<f64>> =
                cfg.mc.n_values.iter().map(|&n| estimate(ctx, n, e, kappa, s)).collect::<Result<_, _>>()?;
            summaries.push(summarize(ctx, e, kappa, s, &est, cert)?);
            rows.extend(est.iter().map(|r| r.csv_row()));
        }
    }
    let csv = ctx.out.write_csv("estimates.csv", cfg, CSV_HEADER, &rows)?;
    let json = ctx.out.write_json("simulate_summary.json", &Envelope::new(cfg, "simulate", &summaries))?;
    for s in &summaries {
        println!(
            "E = {}  kappa = {}  s = {}  slope = {:?}  ell_hat = {:?}  decay_consistent = {:?}",
            s.e, s.kappa, s.s, s.slope, s.ell_hat, s.decay_consistent
        );
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn summarize(
    ctx: &Context,
    e: f64,
    kappa: f64,
    s: f64,
    est: &[MomentEstimate<f64>],
    cert: Option<&treeloc::transfer::Certificate<f64>>,
) -> Result<SeriesSummary, CliError> {
    let nu0 = ctx.nu0.require_density("initial bound");
    let c0 = match nu0 {
        Ok(d) => initial_bound(s, d.radius(), d.sup_density()),
        Err(_) => f64::INFINITY,
    };
    let initial_bound_ok = est.iter().find(|r| r.n == 0).map(|r| r.mean <= c0 + 3.0 * r.stderr);
    let pts: Vec<&MomentEstimate<f64>> = est.iter().filter(|r| r.n > 0 && r.mean > 0.0 && r.stderr > 0.0).collect();
    let fit = if pts.len() >= 2 {
        let x: Vec<f64> = pts.iter().map(|r| r.n as f64).collect();
        let y: Vec<f64> = pts.iter().map(|r| r.mean.ln()).collect();
        let sd: Vec<f64> = pts.iter().map(|r| r.stderr / r.mean).collect();
        Some(linear_fit(&x, &y, Some(&sd))?)
    } else {
        None
    };
    let mut decay_consistent = None;
    let mut moment_bound_ok = None;
    if let (Some(c), Ok(nu)) = (cert, ctx.nu.require_density("moment bound")) {
        if let Some(f) = fit {
            decay_consistent = Some(f.slope <= -c.ell.ln() + 2.0 * f.slope_stderr);
        }
        let n_max = est.iter().map(|r| r.n).max().unwrap_or(0);
        let grid = ctx.grid()?;
        let norms = match ctx.cfg.model {
            Model::Tree => iterate_norms(kappa, e, s, nu, &ctx.sigma, n_max, &grid)?,
            Model::Chain => iterate_norms_1d(e, s, &ReducedLaw::new(nu, Model::Chain.reduction())?, n_max, &grid)?,
        };
        moment_bound_ok = Some(est.iter().all(|r| r.mean <= c0 * norms[r.n] + 3.0 * r.stderr));
    }
    Ok(SeriesSummary {
        e,
        kappa,
        s,
        slope: fit.map(|f| f.slope),
        slope_stderr: fit.map(|f| f.slope_stderr),
        ell_hat: fit.map(|f| (-f.slope).exp()),
        initial_bound: c0,
        initial_bound_ok,
        certified_ell: cert.map(|c| c.ell),
        decay_consistent,
        moment_bound_ok,
    })
}
