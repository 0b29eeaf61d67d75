//! Relaying gain: how much outage each scheme removes, and its limit.
//!
//! The gain of a scheme is the outage ratio
//!
//!   G = (1 - P_direct) / (1 - P_relay | occupied)
//!
//! measured at the same operating point. Along the density-coupled
//! sweep both error probabilities decay with the same exponent, so G
//! tends to a finite constant: relaying buys a coefficient, never a
//! diversity order. This example measures G per scheme over SNR and
//! prints the analytic limit next to it.
//!
//! Retransmission (the base station repeats itself) is the control: its
//! second slot replays the direct law, so its gain limit is exactly 1.
//!
//! Run with: `cargo run --release --example relay_gain`

use cellhop::analytic::{asymptotic_gain, QuadratureSpec};
use cellhop::montecarlo::{estimate_metric_smoothed, sweep_point_seed, Metric, RelayScheme};
use cellhop::prelude::*;

fn main() {
    let base = SystemParams::default();
    let beta = 0.25;
    let trials = 30_000;
    let quad = QuadratureSpec::default();

    println!("relaying gain versus SNR, beta = {beta}");
    println!(
        "{:>13} {:>8} {:>8} {:>8} {:>8} {:>8} {:>10}",
        "scheme", "15dB", "20dB", "25dB", "30dB", "35dB", "limit"
    );
    for scheme in RelayScheme::ALL {
        let mut row = format!("{:>13}", scheme.label());
        for snr_db in [15.0, 20.0, 25.0, 30.0, 35.0] {
            let snr = 10f64.powf(snr_db / 10.0);
            let p = base.at_sweep_point(snr, beta);
            let g = estimate_metric_smoothed(
                &p,
                Metric::Gain(scheme),
                trials,
                sweep_point_seed(19, snr, p.lattice.density),
            );
            row.push_str(&format!(" {:>8.3}", g.value));
        }
        let limit = asymptotic_gain(scheme, &base.at_sweep_point(base.snr, beta), &quad)
            .expect("beta off the regime boundary");
        println!("{row} {limit:>10.3}");
    }
    println!();
    println!("best-channel selection dominates at every point and is still far");
    println!("from its limit at 35 dB (its outage has a long pre-asymptotic");
    println!("regime); the nearest-relay gain has essentially converged.");
}
