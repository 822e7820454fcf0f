use std::path::Path;

use serde::{Deserialize, Serialize};
use treeloc::transfer::{
    certify_contraction, certify_large_coupling, kappa_deviation, Certificate, LargeCouplingReport,
};

use super::Context;
use crate::error::CliError;
use crate::output::{read_json, Envelope};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KappaRow {
    pub e0: f64,
    pub kappa: f64,
    pub delta: f64,
    pub m: usize,
    pub s: f64,
    /// `||T_kappa^m 1 - T_0^m 1||` at `E0`.
    pub deviation_from_zero_coupling: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyPayload {
    pub certificates: Vec<Certificate<f64>>,
    pub kappa_scan: Vec<KappaRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large_coupling: Option<LargeCouplingReport<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FailurePayload {
    pub e0: f64,
    pub kappa: f64,
    pub message: String,
    pub certified_so_far: Vec<Certificate<f64>>,
}

/// Reads a certificate file and re-checks every certificate in it.
pub fn load_certificates(path: &Path) -> Result<Envelope<CertifyPayload>, CliError> {
    let env: Envelope<CertifyPayload> = read_json(path)?;
    for c in &env.payload.certificates {
        c.validate().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(env)
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let params = cfg.search_params();
    let nu = ctx.nu.require_density("certify")?;
    let grid = ctx.grid()?;
    let mut certificates = Vec::new();
    let mut kappa_scan = Vec::new();
    for e0 in cfg.energy.values() {
        for kappa in cfg.kappa.values() {
            let cert = match certify_contraction(e0, kappa, &ctx.nu, &ctx.sigma, &params) {
                Ok(c) => c,
                Err(e) => {
                    let err = CliError::from(e.clone());
                    if let CliError::Certification(_) | CliError::Internal(_) = err {
                        let payload = FailurePayload { e0, kappa, message: e.to_string(), certified_so_far: certificates };
                        let p = ctx.out.write_json("certify_failure.json", &Envelope::new(cfg, "certify", payload))?;
                        eprintln!("diagnostics written to {}", p.display());
                    }
                    return Err(err);
                }
            };
            let deviation = if kappa > 0.0 {
                *kappa_deviation(kappa, e0, cert.s, nu, &ctx.sigma, cert.m, &grid)?.last().expect("m >= 1")
            } else {
                0.0
            };
            println!(
                "E0 = {e0}  kappa = {kappa}  s = {}  I = [{}, {}]  m = {}  delta = {:.6}  ell = {:.8}  |T_k^m 1 - T_0^m 1| = {deviation:.3e}",
                cert.s, cert.interval[0], cert.interval[1], cert.m, cert.delta, cert.ell
            );
            kappa_scan.push(KappaRow { e0, kappa, delta: cert.delta, m: cert.m, s: cert.s, deviation_from_zero_coupling: deviation });
            certificates.push(cert);
        }
    }
    let large_coupling = match &cfg.large_coupling {
        None => None,
        Some(lc) => {
            let sups = cfg.sigma_marginal_sups().ok_or_else(|| {
                CliError::Input("large coupling needs declared sigma marginal density sups".into())
            })?;
            let r = certify_large_coupling(lc.s, nu, sups, &ctx.sigma, &lc.energies, &grid)?;
            println!("large coupling: s = {}  kappa1 = {:.4}  closed form = {:.4}", r.s, r.kappa1, r.closed_form);
            Some(r)
        }
    };
    let p = ctx
        .out
        .write_json("certificate.json", &Envelope::new(cfg, "certify", CertifyPayload { certificates, kappa_scan, large_coupling }))?;
    println!("wrote {}", p.display());
    Ok(())
}
