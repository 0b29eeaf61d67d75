//! Diversity order of the direct link under density rescaling.
//!
//! With the base-station density tied to the operating point as
//! `lambda_b = snr^-beta`, the direct outage `1 - P_d` falls off as
//! `snr^-d` with diversity order `d = min{1, alpha beta / 2}`: noise
//! limits the slope to 1 for `alpha beta > 2`, interference limits it to
//! `alpha beta / 2` below. The example sweeps the 20-40 dB decade for
//! several beta, fits the tail slope, and prints it next to the
//! prediction.
//!
//! Run with: `cargo run --release --example diversity_slopes`

use cellhop::analytic::diversity_order;
use cellhop::montecarlo::{estimate_metric_smoothed, fit_slope, sweep_point_seed, Metric};
use cellhop::prelude::*;

fn main() {
    let base = SystemParams::default();
    let alpha = base.path_loss.alpha();
    let trials = 200_000;

    println!("fitted high-SNR slope of log(1 - P_d) vs log(snr), alpha = {alpha}");
    println!("{:>6} {:>12} {:>12}", "beta", "fitted", "predicted");
    for beta in [0.25, 0.5, 0.75, 1.0] {
        let mut curve = Vec::new();
        for k in 0..=5 {
            let snr_db = 30.0 + 2.0 * k as f64;
            let snr = 10f64.powf(snr_db / 10.0);
            let p = base.at_sweep_point(snr, beta);
            let est = estimate_metric_smoothed(
                &p,
                Metric::DirectSuccess,
                trials,
                sweep_point_seed(7, snr, p.lattice.density),
            );
            curve.push((snr, 1.0 - est.value));
        }
        let slope = fit_slope(&curve).expect("positive errors expected");
        println!("{beta:>6} {slope:>12.3} {:>12.3}", diversity_order(alpha, beta));
    }

    println!();
    println!("slopes are fitted over 30-40 dB; the interference-limited values");
    println!("(alpha beta < 2) approach their limits from below as snr grows.");
}
