//! Monte-Carlo simulation and numerical analysis of a two-hop downlink
//! cellular network with opportunistic relaying.
//!
//! Base stations sit on a square lattice, one per cell. In the first slot
//! every base station transmits; mobiles that decode (SINR above a
//! threshold, Rayleigh fading) form a decoded set per cell. In the second
//! slot one relay per cell forwards toward that cell's destination while
//! the other cells' relays interfere. The crate pairs a deterministic,
//! reproducible simulator of this process with independent numerical
//! evaluation of its outage probabilities, decoded-set laws, asymptotic
//! error expansions, relaying gains, and throughput density.
//!
//! The two sides are kept strictly separate so that each can serve as an
//! oracle for the other: the simulator never calls into `analytic`, and
//! `analytic` performs quadrature and lattice summation only.
//!
//! # Layout
//!
//! - [`geometry`]: lattice of sites, per-cell Poisson mobiles, realizations.
//! - [`channel`]: path-loss models, fading, SINR, decode events.
//! - [`analytic`]: lattice constants, interference products, decoded-set
//!   intensity, outage integrals, asymptotes, gains, bounds.
//! - [`montecarlo`]: trial functions, estimators, sweeps.
//! - [`config`]: flat key-value experiment configuration.
//! - [`experiment`]: CSV-producing drivers behind the CLI subcommands.
//!
//! # Example
//!
//! ```
//! use cellhop::prelude::*;
//!
//! let params = SystemParams::default(); // 20 dB SNR, unit lattice density
//! // Match the analytic lattice window to the simulator's truncation.
//! let quad = QuadratureSpec::matched_to_window(params.lattice.truncation);
//! let p_direct = cellhop::analytic::p_direct(&params, &quad);
//! let est = cellhop::montecarlo::estimate_metric(
//!     &params, Metric::DirectSuccess, 20_000, 7,
//! );
//! assert!((est.value - p_direct).abs() < 4.0 * est.stderr.max(1e-3));
//! ```
//!
//! Runnable end-to-end demonstrations live in `examples/`; each one maps to
//! a capability (outage sweeps, asymptote overlays, gain plateaus, decoded
//! set laws, throughput density).

pub mod analytic;
pub mod channel;
pub mod config;
pub mod experiment;
pub mod geometry;
pub mod montecarlo;
pub mod rng;

/// Convenient re-exports of the types used by almost every caller.
pub mod prelude {
    pub use crate::analytic::QuadratureSpec;
    pub use crate::channel::PathLossModel;
    pub use crate::config::ExperimentConfig;
    pub use crate::geometry::{IntensityProfile, LatticeSpec, Point};
    pub use crate::montecarlo::{Estimate, Metric, RelayScheme, SweepSpec};
    pub use crate::SystemParams;
}

use channel::PathLossModel;
use geometry::{IntensityProfile, LatticeSpec, Point};

/// Full parameter set of one network configuration.
///
/// `beta` is the density-scaling exponent coupling lattice density to SNR
/// (`lambda_b = snr^-beta`); it is read only by sweep drivers and asymptote
/// routines, never by single-point evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub lattice: LatticeSpec,
    pub mobiles: IntensityProfile,
    pub path_loss: PathLossModel,
    /// SINR decode threshold, strictly positive. Values above 1 guarantee
    /// at most one transmitter decodes at any receiver.
    pub theta: f64,
    /// Destination offset from its base station, in cell coordinates.
    pub dest_offset: Point,
    /// Noise power. Zero selects the interference-limited regime.
    pub sigma2: f64,
    /// Transmit SNR (linear). Transmit power is `snr * sigma2 / ell(R)`,
    /// so the noise-to-power ratio is always `ell(R) / snr`.
    pub snr: f64,
    /// Density-scaling exponent, `lambda_b = snr^-beta` in sweeps.
    pub beta: f64,
}

impl Default for SystemParams {
    /// Baseline configuration: unit-density lattice truncated at index 2,
    /// 5 mobiles per unit cell, fourth-power bounded path loss, threshold
    /// 1.5, destination at the cell corner, 20 dB SNR.
    fn default() -> Self {
        SystemParams {
            lattice: LatticeSpec { density: 1.0, truncation: 2 },
            mobiles: IntensityProfile { density: 5.0, side: 1.0 },
            path_loss: PathLossModel::NonSingularSum { alpha: 4.0 },
            theta: 1.5,
            dest_offset: Point { x: 0.5, y: 0.5 },
            sigma2: 1.0,
            snr: 100.0,
            beta: 0.0,
        }
    }
}

impl SystemParams {
    /// Destination distance `R` from its serving base station.
    pub fn r_dist(&self) -> f64 {
        self.dest_offset.norm()
    }

    /// Path gain on the base-station-to-destination link.
    pub fn ell_r(&self) -> f64 {
        self.path_loss.gain(self.r_dist())
    }

    /// Noise-to-power ratio `sigma^2 / P = ell(R) / snr`, or 0 when
    /// noise is switched off entirely.
    pub fn noise_over_p(&self) -> f64 {
        if self.sigma2 == 0.0 { 0.0 } else { self.ell_r() / self.snr }
    }

    /// Mean number of mobiles per cell, `lambda_m * L^2`.
    pub fn mean_mobiles(&self) -> f64 {
        self.mobiles.mean_count()
    }

    /// Probability that a cell holds at least one mobile, `1 - e^-N`.
    pub fn mu(&self) -> f64 {
        -(-self.mean_mobiles()).exp_m1()
    }

    /// Copy with the lattice density replaced by `snr^-beta`.
    pub fn at_sweep_point(&self, snr: f64, beta: f64) -> SystemParams {
        let mut p = self.clone();
        p.snr = snr;
        p.beta = beta;
        p.lattice.density = snr.powf(-beta);
        p
    }

    /// Basic domain checks shared by every entry point.
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.theta > 0.0) {
            return Err(ParamError::new("theta must be positive"));
        }
        if !(self.lattice.density > 0.0) {
            return Err(ParamError::new("lattice density must be positive"));
        }
        if self.mobiles.density < 0.0 || !(self.mobiles.side > 0.0) {
            return Err(ParamError::new("mobile intensity must be non-negative on a positive cell"));
        }
        if self.path_loss.alpha() <= 2.0 {
            return Err(ParamError::new("path-loss exponent must exceed 2"));
        }
        if !(self.snr > 0.0) || self.sigma2 < 0.0 {
            return Err(ParamError::new("snr must be positive and sigma2 non-negative"));
        }
        if self.r_dist() == 0.0 {
            return Err(ParamError::new("destination must not coincide with its base station"));
        }
        Ok(())
    }
}

/// Invalid parameter combination.
#[derive(Debug, Clone, thiserror::Error)]
#[error("invalid parameters: {msg}")]
pub struct ParamError {
    msg: String,
}

impl ParamError {
    fn new(msg: &str) -> Self {
        ParamError { msg: msg.to_string() }
    }
}
