//! The decoded set: who can relay, and how close to the destination.
//!
//! After the first slot each cell holds a random set of mobiles that
//! decoded the broadcast. Independent fading makes this set an
//! inhomogeneous Poisson process: the mobile process thinned by the
//! position-dependent decode probability delta(x). This example checks
//! the simulated set against that law three ways:
//!
//!   - intensity along the cell diagonal (histogram vs delta)
//!   - summary statistics (mean decoder count, mean decoder distance)
//!   - the first-contact law: distance from the destination to the
//!     nearest decoder, a defective distribution since the set can be
//!     empty
//!
//! Run with: `cargo run --release --example decoded_set`

use cellhop::analytic::{relay_intensity, DecodedSetModel, QuadratureSpec};
use cellhop::montecarlo::trial_decoded_set;
use cellhop::prelude::*;

fn main() {
    let p = SystemParams::default();
    let quad = QuadratureSpec::matched_to_window(p.lattice.truncation);
    let model = DecodedSetModel::new(&p, &quad);
    let trials = 30_000u64;

    // One pass over simulated cells collects everything at once.
    let nbins = 8;
    let mut diag = vec![0.0f64; nbins]; // counts in diagonal strip |x-y| < 0.1
    let mut count_sum = 0.0f64;
    let mut dist_sum = 0.0f64;
    let mut contacts: Vec<f64> = Vec::new();
    for t in 0..trials {
        let s = trial_decoded_set(&p, t, 51);
        count_sum += s.positions.len() as f64;
        for pos in &s.positions {
            dist_sum += pos.norm();
            if (pos.x - pos.y).abs() < 0.1 {
                let i = (((pos.x + 0.5) / (1.0 / nbins as f64)) as usize).min(nbins - 1);
                diag[i] += 1.0;
            }
        }
        if let Some(d) = s.contact_distance {
            contacts.push(d);
        }
    }
    contacts.sort_by(f64::total_cmp);

    println!("decode probability along the diagonal (destination corner at +0.5,+0.5)");
    println!("{:>8} {:>12} {:>12}", "x=y", "simulated", "intensity");
    let w = 1.0 / nbins as f64;
    for i in 0..nbins {
        let x0 = -0.5 + i as f64 * w;
        // Integral of the intensity over the strip piece, midpoint rule
        // with the strip clipped to the cell near the corners.
        let nq = 8;
        let mut strip = 0.0;
        for a in 0..nq {
            let x = x0 + (a as f64 + 0.5) * w / nq as f64;
            let (ylo, yhi) = ((x - 0.1).max(-0.5), (x + 0.1).min(0.5));
            for b in 0..nq {
                let y = ylo + (b as f64 + 0.5) * (yhi - ylo) / nq as f64;
                strip += relay_intensity(Point::new(x, y), &p, &quad)
                    * (w / nq as f64)
                    * ((yhi - ylo) / nq as f64);
            }
        }
        let xc = x0 + 0.5 * w;
        println!("{xc:>8.3} {:>12.4} {strip:>12.4}", diag[i] / trials as f64);
    }

    println!();
    println!("mean decoders per cell:     simulated {:.4}, model {:.4}", count_sum / trials as f64, model.total);
    println!("mean decoder-to-BS distance: simulated {:.4}, model {:.4}",
        dist_sum / count_sum,
        cellhop::analytic::mean_connect_distance(&p, &quad).unwrap(),
    );
    println!("cell relays at all:          simulated {:.4}, model {:.4}",
        contacts.len() as f64 / trials as f64,
        model.mu_prime,
    );

    println!();
    println!("first-contact CDF from the destination corner");
    println!("{:>6} {:>12} {:>12}", "r", "simulated", "model");
    for r in [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4] {
        let emp = contacts.partition_point(|&d| d <= r) as f64 / trials as f64;
        println!("{r:>6.2} {emp:>12.4} {:>12.4}", model.contact_cdf(r));
    }
    println!();
    println!("the CDF saturates at the occupancy-and-decode mass, not at 1: a");
    println!("cell with no decoder stays silent in the second slot.");
}
