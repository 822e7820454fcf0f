use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use treeloc::disorder::ScalarDisorder;
use treeloc::grid::{GridFunction, WGrid};
use treeloc::hypgeo::{barycenter, f_energy, hyp_dist, mobius_apply, MobiusMap, UpperHalfPoint, WeightedPointSet};
use treeloc::keyest::{find_zeta_general, find_zeta_symmetric};
use treeloc::transfer::{apply_t_pointwise_complex, PointwiseOptions, TransferOperator};
use treeloc::treesim::{dense_oracle, forward_green, moment_norm, path_product, sample_potential, sample_rng, sphere_norm};

use super::Context;
use crate::error::CliError;
use crate::output::Envelope;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    /// Largest observed error, in the units of `tolerance`.
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, cases: usize, max_error: f64, tolerance: f64) -> Self {
        Self { name: name.into(), cases, max_error, tolerance, passed: max_error <= tolerance }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn recursion_vs_dense(ctx: &Context) -> Result<Vec<Check>, CliError> {
    let cc = &ctx.cfg.crosscheck;
    let kappa = ctx.cfg.kappa.values().into_iter().fold(0.0, f64::max);
    let (mut norm_err, mut path_err, mut cases) = (0.0f64, 0.0f64, 0);
    for (ie, &e) in cc.energies.iter().enumerate() {
        for r in 0..cc.realizations {
            let seed = ctx.cfg.seed ^ ((ie as u64) << 32 | r as u64);
            let pot = sample_potential(cc.depth, kappa, &ctx.nu0, &ctx.nu, &ctx.sigma, seed)?;
            let z = Complex::new(e, cc.epsilon);
            let mut prof = forward_green(&pot, z)?;
            if let Some(d) = cc.inject_perturbation {
                match prof.g_levels.first_mut() {
                    Some(g) => g[0] += d,
                    None => prof.g0 += d,
                }
            }
            let sol = dense_oracle(&pot, z)?;
            for n in 0..=cc.depth {
                norm_err = norm_err.max(rel(moment_norm(&prof, n)?, sphere_norm(&sol, n)?));
            }
            for (v, u) in sol.u.iter().enumerate() {
                path_err = path_err.max((path_product(&prof, v) - u).norm() / u.norm());
            }
            cases += 1;
        }
    }
    Ok(vec![
        Check::new("moment_norm_vs_dense", cases, norm_err, 1e-9),
        Check::new("path_product_vs_dense", cases, path_err, 1e-9),
    ])
}

fn grid_vs_pointwise(ctx: &Context) -> Result<Check, CliError> {
    let order = ctx.cfg.quadrature.pointwise_order;
    let nu = ctx.nu.require_density("grid_vs_pointwise")?.clone().with_panel_order(order);
    let kappa = ctx.cfg.kappa.values().into_iter().fold(0.0, f64::max);
    let e = ctx.cfg.energy.values()[0];
    let s = ctx.cfg.s_scan[0];
    let grid = WGrid::new(257)?;
    let op = TransferOperator::tree(&grid, kappa, e, s, &nu, &ctx.sigma)?;
    let t1 = op.apply(&GridFunction::constant(&grid, 1.0));
    let opts = PointwiseOptions { order };
    let mut err = 0.0f64;
    let mut cases = 0;
    for j in (0..grid.n_nodes()).step_by(16) {
        let w = Complex::new(grid.ws()[j], 0.0);
        let v = apply_t_pointwise_complex(w, 1, kappa, e, 0.0, s, &nu, &ctx.sigma, &opts)?;
        err = err.max(rel(v, t1.values[j]));
        cases += 1;
    }
    Ok(Check::new("grid_vs_pointwise", cases, err, 1e-10))
}

fn symmetric_vs_general() -> Result<Check, CliError> {
    let q = ScalarDisorder::uniform(&[-1.0, 1.0])?;
    let a = find_zeta_symmetric(&q, 0.0, 1e-10)?;
    let b = find_zeta_general(&q, 1e-10)?;
    let err = (a.zeta.to_complex() - b.zeta.to_complex()).norm();
    Ok(Check::new("zeta_symmetric_vs_general", 1, err, 1e-6))
}

fn geometry(seed: u64) -> Result<Vec<Check>, CliError> {
    let mut rng = sample_rng(seed, 0x6e0, 0);
    let pt = |rng: &mut rand_chacha::ChaCha8Rng| UpperHalfPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..4.0));
    let (mut iso, mut jensen) = (0.0f64, 0.0f64);
    let cases = 200;
    for _ in 0..cases {
        let (z, w) = (pt(&mut rng), pt(&mut rng));
        let (a, b, c): (f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let d = (1.0 + b * c) / a.max(0.1);
        let m = MobiusMap::normalized(a.max(0.1), b, c, d)?;
        iso = iso.max(rel(hyp_dist(mobius_apply(&m, z), mobius_apply(&m, w))?, hyp_dist(z, w)?.max(1e-300)));
        let pts: Vec<UpperHalfPoint<f64>> = (0..5).map(|_| pt(&mut rng)).collect();
        let wts: Vec<f64> = (0..5).map(|_| rng.gen_range(0.1..1.0)).collect();
        let set = WeightedPointSet::normalized(pts, wts)?;
        let bary = barycenter(&set, 1e-12)?;
        let mean: f64 = set.iter().map(|(p, w)| w * f_energy(*p).unwrap()).sum();
        jensen = jensen.max(f_energy(bary)? - mean);
    }
    Ok(vec![Check::new("mobius_isometry", cases, iso, 1e-9), Check::new("jensen", cases, jensen, 1e-12)])
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let mut checks = recursion_vs_dense(ctx)?;
    checks.push(grid_vs_pointwise(ctx)?);
    checks.push(symmetric_vs_general()?);
    checks.extend(geometry(ctx.cfg.seed)?);
    for c in &checks {
        println!("{:<28} {}  cases = {:<5} max error = {:.3e}  tol = {:.0e}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.cases, c.max_error, c.tolerance);
    }
    let p = ctx.out.write_json("crosscheck.json", &Envelope::new(&ctx.cfg, "crosscheck", &checks))?;
    println!("wrote {}", p.display());
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Internal(format!("crosscheck failed: {}", failed.join(", "))))
    }
}

