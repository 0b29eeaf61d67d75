//! Experiment drivers behind the CLI subcommands: each one turns a
//! configuration into a deterministic text artifact (a constants table
//! or a CSV file with a provenance header).
//!
//! Every CSV starts with a comment block recording the configuration
//! hash and seed, so a data file can always be traced to the exact run
//! that produced it; identical (config, seed) pairs reproduce identical
//! bytes.

use std::fmt::Write as _;

use crate::analytic::{self, epstein_c, relay_error_asymptote, AnalyticError, AsymptoteCurve};
use crate::config::{ConfigError, ExperimentConfig};
use crate::montecarlo::{estimate_metric, run_sweep, sweep_point_seed, Metric, SweepSpec};

/// Failures of an experiment command (bad config or analytic domain).
#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// Lattice-constant table: `C(alpha)` for each requested exponent, with
/// a cross-validation gap against a direct lattice sum as the achieved
/// tolerance.
pub fn cmd_constants(alphas: &[f64]) -> Result<String, AnalyticError> {
    let mut out = String::from("alpha,c_alpha,series_gap\n");
    for &alpha in alphas {
        let c = epstein_c(alpha)?;
        let gap = (c - epstein_brute(alpha, 600.0)).abs();
        writeln!(out, "{alpha},{c:.8},{gap:.2e}").unwrap();
    }
    Ok(out)
}

/// Direct square-lattice sum over a disk of radius `m` plus the integral
/// tail estimate; used only to cross-check the closed form.
fn epstein_brute(alpha: f64, m: f64) -> f64 {
    let k = m.ceil() as i64;
    let m2 = m * m;
    let mut sum = 0.0;
    for i in -k..=k {
        for j in -k..=k {
            let r2 = (i * i + j * j) as f64;
            if r2 > 0.0 && r2 <= m2 {
                sum += r2.powf(-alpha / 2.0);
            }
        }
    }
    sum + 2.0 * std::f64::consts::PI * m.powf(2.0 - alpha) / (alpha - 2.0)
}

/// Outage sweep CSV: per (SNR, beta) grid point the measured direct,
/// conditional-relay, and composed success probabilities, the joint
/// failure diagnostic, and the analytic outage asymptote of the scheme.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<String, ExperimentError> {
    cfg.validate()?;
    let base = cfg.system_params();
    let quad = cfg.quadrature();
    let spec = SweepSpec {
        snr_db: cfg.sweep_snr_db.clone(),
        betas: cfg.sweep_betas.clone(),
        scheme: cfg.scheme,
        trials: cfg.trials,
        seed: cfg.seed,
    };
    let mut out = header(cfg, "sweep");
    out.push_str(
        "snr_db,beta,scheme,lambda_b,p_d,p_d_stderr,p_r_cond,p_r_cond_stderr,\
         p_s,p_s_stderr,joint_fail,joint_fail_stderr,asymptote_outage\n",
    );
    let points = run_sweep(&base, &spec);
    let mut asym: Option<(f64, Option<AsymptoteCurve>)> = None;
    for pt in points {
        // One asymptote per beta; undefined on the regime boundary.
        if asym.map(|(b, _)| b) != Some(pt.beta) {
            let at = base.at_sweep_point(base.snr, pt.beta);
            asym = Some((pt.beta, relay_error_asymptote(cfg.scheme, &at, &quad).ok()));
        }
        let snr = 10f64.powf(pt.snr_db / 10.0);
        let asym_cell = match asym.and_then(|(_, a)| a) {
            Some(curve) => curve.eval(snr).to_string(),
            None => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            pt.snr_db,
            pt.beta,
            cfg.scheme.label(),
            pt.lambda_b,
            pt.direct.value,
            pt.direct.stderr,
            pt.relay_cond.value,
            pt.relay_cond.stderr,
            pt.two_hop.value,
            pt.two_hop.stderr,
            pt.joint_fail,
            pt.joint_fail_stderr,
            asym_cell,
        )
        .unwrap();
    }
    Ok(out)
}

/// Relaying-gain CSV: measured outage ratio per grid point plus the
/// analytic high-SNR gain limit of the scheme (per beta).
pub fn cmd_gain(cfg: &ExperimentConfig) -> Result<String, ExperimentError> {
    cfg.validate()?;
    let base = cfg.system_params();
    let quad = cfg.quadrature();
    let mut out = header(cfg, "gain");
    out.push_str("snr_db,beta,scheme,lambda_b,gain,gain_stderr,gain_defined,asymptotic_gain\n");
    for &beta in &cfg.sweep_betas {
        let limit = analytic::asymptotic_gain(cfg.scheme, &base.at_sweep_point(base.snr, beta), &quad)
            .map(|g| g.to_string())
            .unwrap_or_default();
        for &snr_db in &cfg.sweep_snr_db {
            let snr = 10f64.powf(snr_db / 10.0);
            let p = base.at_sweep_point(snr, beta);
            let seed = sweep_point_seed(cfg.seed, snr, p.lattice.density);
            let g = estimate_metric(&p, Metric::Gain(cfg.scheme), cfg.trials, seed);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                snr_db,
                beta,
                cfg.scheme.label(),
                p.lattice.density,
                g.value,
                g.stderr,
                g.defined,
                limit,
            )
            .unwrap();
        }
    }
    Ok(out)
}

/// Throughput-density CSV over the sweep grid.
pub fn cmd_throughput(cfg: &ExperimentConfig) -> Result<String, ExperimentError> {
    cfg.validate()?;
    let base = cfg.system_params();
    let mut out = header(cfg, "throughput");
    out.push_str("snr_db,beta,scheme,lambda_b,density,density_stderr\n");
    for &beta in &cfg.sweep_betas {
        for &snr_db in &cfg.sweep_snr_db {
            let snr = 10f64.powf(snr_db / 10.0);
            let p = base.at_sweep_point(snr, beta);
            let seed = sweep_point_seed(cfg.seed, snr, p.lattice.density);
            let t = estimate_metric(&p, Metric::ThroughputDensity(cfg.scheme), cfg.trials, seed);
            writeln!(
                out,
                "{},{},{},{},{},{}",
                snr_db,
                beta,
                cfg.scheme.label(),
                p.lattice.density,
                t.value,
                t.stderr,
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn header(cfg: &ExperimentConfig, kind: &str) -> String {
    format!(
        "# cellhop {kind}\n# config_hash = {:016x}\n# seed = {}\n# trials = {}\n# scheme = {}\n",
        cfg.hash(),
        cfg.seed,
        cfg.trials,
        cfg.scheme.label(),
    )
}
