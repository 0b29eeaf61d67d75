//! Propagation and decoding: path-loss laws, received SINR, and the
//! threshold decode rule.
//!
//! Fading is multiplicative unit-mean exponential power fading drawn per
//! (slot, transmitter, receiver); see [`crate::rng::FadingField`].

use crate::geometry::Point;

/// Distance-dependent power gain `ell(r)`.
///
/// All three laws decay like `r^-alpha`; the two bounded variants differ
/// only near the origin. `alpha` must exceed 2 for every interference
/// functional in this crate to converge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathLossModel {
    /// `r^-alpha`, infinite at the origin.
    Singular { alpha: f64 },
    /// `(1 + r^alpha)^-1`, bounded by 1.
    NonSingularSum { alpha: f64 },
    /// `min(1, r^-alpha)`, bounded by 1.
    NonSingularMin { alpha: f64 },
}

impl PathLossModel {
    pub fn alpha(&self) -> f64 {
        match *self {
            PathLossModel::Singular { alpha }
            | PathLossModel::NonSingularSum { alpha }
            | PathLossModel::NonSingularMin { alpha } => alpha,
        }
    }

    /// Same law with the exponent replaced.
    pub fn with_alpha(self, alpha: f64) -> PathLossModel {
        match self {
            PathLossModel::Singular { .. } => PathLossModel::Singular { alpha },
            PathLossModel::NonSingularSum { .. } => PathLossModel::NonSingularSum { alpha },
            PathLossModel::NonSingularMin { .. } => PathLossModel::NonSingularMin { alpha },
        }
    }

    /// Gain at distance `r >= 0`.
    #[inline]
    pub fn gain(&self, r: f64) -> f64 {
        self.gain2(r * r)
    }

    /// Gain from a squared distance; the hot path of the simulator.
    #[inline]
    pub fn gain2(&self, r2: f64) -> f64 {
        match *self {
            PathLossModel::Singular { alpha } => {
                if r2 == 0.0 { f64::INFINITY } else { 1.0 / pow_half(r2, alpha) }
            }
            PathLossModel::NonSingularSum { alpha } => 1.0 / (1.0 + pow_half(r2, alpha)),
            PathLossModel::NonSingularMin { alpha } => {
                if r2 <= 1.0 { 1.0 } else { 1.0 / pow_half(r2, alpha) }
            }
        }
    }

    /// Reciprocal gain `1 / ell(r)`, finite for the bounded laws, used by
    /// the analytic integrands.
    #[inline]
    pub fn inv_gain2(&self, r2: f64) -> f64 {
        match *self {
            PathLossModel::Singular { alpha } => pow_half(r2, alpha),
            PathLossModel::NonSingularSum { alpha } => 1.0 + pow_half(r2, alpha),
            PathLossModel::NonSingularMin { alpha } => pow_half(r2, alpha).max(1.0),
        }
    }
}

/// `r2^(alpha/2)` with the dominant exponent special-cased away from
/// `powf`.
#[inline]
fn pow_half(r2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 { r2 * r2 } else { r2.powf(alpha * 0.5) }
}

/// One transmitter as seen by a receiver: position, transmit power, and
/// the power fade on the link toward that receiver.
#[derive(Debug, Clone, Copy)]
pub struct Emission {
    pub pos: Point,
    pub power: f64,
    pub fade: f64,
}

impl Emission {
    /// Received power at `rx`.
    #[inline]
    pub fn received(&self, rx: Point, pl: &PathLossModel) -> f64 {
        self.power * self.fade * pl.gain2(self.pos.dist2(rx))
    }
}

/// Received SINR of `signal` at `rx` under the given interferer set.
///
/// A zero denominator (no noise, no interference) yields infinity when
/// any signal power arrives and zero otherwise.
pub fn sinr(
    rx: Point,
    signal: &Emission,
    interferers: &[Emission],
    sigma2: f64,
    pl: &PathLossModel,
) -> f64 {
    let s = signal.received(rx, pl);
    let denom = sigma2 + interferers.iter().map(|e| e.received(rx, pl)).sum::<f64>();
    if denom == 0.0 {
        if s > 0.0 { f64::INFINITY } else { 0.0 }
    } else {
        s / denom
    }
}

/// Strict threshold decode rule: the link is closed iff `SINR > theta`.
pub fn connects(
    rx: Point,
    signal: &Emission,
    interferers: &[Emission],
    sigma2: f64,
    pl: &PathLossModel,
    theta: f64,
) -> bool {
    sinr(rx, signal, interferers, sigma2, pl) > theta
}
