//! Direct transmission: closed-form success probability, its power-law
//! asymptote under density scaling, and the mean-interference SIR.

use super::lattice::{log_interference_sum, tail_z};
use super::zeta::epstein_c;
use super::{AnalyticError, AsymptoteCurve, QuadratureSpec, Regime};
use crate::SystemParams;

/// Success probability of the base-station-to-destination link under
/// Rayleigh fading, noise, and lattice interference:
/// `P_d = exp(-theta sigma^2 / (P ell(R))) * Delta(r_dest)`.
pub fn p_direct(params: &SystemParams, quad: &QuadratureSpec) -> f64 {
    let noise_exponent = params.theta * params.noise_over_p() / params.ell_r();
    (-noise_exponent - log_interference_sum(params.dest_offset, params, quad)).exp()
}

/// Power-law asymptote of `1 - P_d` along `lambda_b = snr^-beta`.
///
/// Above the regime boundary (`alpha beta > 2`) noise dominates with
/// coefficient `theta`; below it interference dominates with coefficient
/// `theta C(alpha) / ell(R)`; exactly on it both terms survive.
pub fn direct_error_asymptote(
    params: &SystemParams,
    quad: &QuadratureSpec,
) -> Result<AsymptoteCurve, AnalyticError> {
    let _ = quad;
    let alpha = params.path_loss.alpha();
    let beta = params.beta;
    if beta < 0.0 {
        return Err(AnalyticError::Domain("beta must be non-negative".into()));
    }
    let c_alpha = epstein_c(alpha)?;
    let ab = alpha * beta;
    let (coefficient, exponent, regime) = if ab > 2.0 {
        (params.theta, 1.0, Regime::NoiseLimited)
    } else if ab == 2.0 {
        (params.theta * (1.0 + c_alpha / params.ell_r()), 1.0, Regime::Boundary)
    } else {
        (params.theta * c_alpha / params.ell_r(), ab / 2.0, Regime::InterferenceLimited)
    };
    Ok(AsymptoteCurve { coefficient, exponent, regime })
}

/// Destination SIR with mean (unit) fading:
/// `ell(R) / sum_a ell(a s - r_dest)`, window plus integral tail.
pub fn sir_at_destination(params: &SystemParams, quad: &QuadratureSpec) -> f64 {
    let s = params.lattice.spacing();
    let t = quad.lattice_truncation as i64;
    let z = params.dest_offset;
    let mut interference = 0.0;
    for i in -t..=t {
        for j in -t..=t {
            if i == 0 && j == 0 {
                continue;
            }
            let site = crate::geometry::Point::new(i as f64 * s, j as f64 * s);
            interference += params.path_loss.gain2(site.dist2(z));
        }
    }
    if quad.include_tail {
        let alpha = params.path_loss.alpha();
        interference +=
            params.lattice.density.powf(alpha / 2.0) * tail_z(quad.lattice_truncation, alpha);
    }
    params.ell_r() / interference
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SystemParams;

    #[test]
    fn no_interference_reduces_to_rayleigh_noise_law() {
        // Empty window: P_d = exp(-theta/snr).
        let mut p = SystemParams::default();
        p.snr = 15.0;
        p.lattice.density = 1e-12;
        let quad = QuadratureSpec { include_tail: false, ..QuadratureSpec::default() };
        let got = p_direct(&p, &quad);
        let expect = (-0.1f64).exp();
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn infinite_snr_leaves_interference_factor() {
        let mut p = SystemParams::default();
        p.snr = 1e15;
        let quad = QuadratureSpec::default();
        let got = p_direct(&p, &quad);
        let delta = super::super::lattice::interference_factor(p.dest_offset, &p, &quad);
        assert!((got - delta).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_matches_infinite_snr() {
        let mut with_noise = SystemParams::default();
        with_noise.snr = 1e300;
        let mut no_noise = SystemParams::default();
        no_noise.sigma2 = 0.0;
        let quad = QuadratureSpec::default();
        assert_eq!(p_direct(&no_noise, &quad), p_direct(&with_noise, &quad));
    }

    #[test]
    fn frozen_reference_values() {
        // Pinned regression constants for the baseline configuration at
        // 20 dB: the window matched to the simulator (T=2, no tail) and
        // the effectively infinite lattice (T=64 with tail).
        let p = SystemParams::default();
        let matched = p_direct(&p, &QuadratureSpec::matched_to_window(2));
        let full = p_direct(&p, &QuadratureSpec::default());
        assert!((matched - 5.380663e-3).abs() < 1e-8, "matched {matched}");
        assert!((full - 2.361286e-3).abs() < 1e-8, "full {full}");
        assert!(matched > full);
    }

    #[test]
    fn asymptote_regimes() {
        let mut p = SystemParams::default();
        let quad = QuadratureSpec::default();
        let c4 = crate::analytic::epstein_c(4.0).unwrap();

        p.beta = 0.75; // alpha beta = 3 > 2
        let a = direct_error_asymptote(&p, &quad).unwrap();
        assert_eq!(a.regime, Regime::NoiseLimited);
        assert_eq!(a.exponent, 1.0);
        assert!((a.coefficient - 1.5).abs() < 1e-12);

        p.beta = 0.25; // alpha beta = 1 < 2
        let a = direct_error_asymptote(&p, &quad).unwrap();
        assert_eq!(a.regime, Regime::InterferenceLimited);
        assert_eq!(a.exponent, 0.5);
        let expect = 1.5 * c4 / 0.8;
        assert!((a.coefficient - expect).abs() < 1e-9);

        p.beta = 0.5; // boundary
        let a = direct_error_asymptote(&p, &quad).unwrap();
        assert_eq!(a.regime, Regime::Boundary);
        assert_eq!(a.exponent, 1.0);
        let expect = 1.5 * (1.0 + c4 / 0.8);
        assert!((a.coefficient - expect).abs() < 1e-9);

        // eval follows the power law.
        assert!((a.eval(100.0) - a.coefficient / 100.0).abs() < 1e-15);
    }

    #[test]
    fn sir_scales_with_sparsity() {
        let quad = QuadratureSpec::default();
        let mut p = SystemParams::default();
        let sir1 = sir_at_destination(&p, &quad);
        p.lattice.density = 0.01;
        let sir2 = sir_at_destination(&p, &quad);
        // Interference scales like lambda^2 for alpha = 4.
        assert!(sir2 > 5e3 * sir1, "{sir1} vs {sir2}");

        // Sparse limit: interference ~ C(alpha) lambda^2 ell(R)^-1...
        // SIR -> ell(R) / (C(alpha) lambda^2).
        let c4 = crate::analytic::epstein_c(4.0).unwrap();
        let expect = 0.8 / (c4 * 0.01f64.powi(2));
        assert!((sir2 - expect).abs() / expect < 0.02, "{sir2} vs {expect}");
    }
}
