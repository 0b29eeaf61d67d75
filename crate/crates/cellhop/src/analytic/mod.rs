//! Numerical evaluation of the network's probabilistic laws: lattice
//! constants, interference products, decoded-set intensity and contact
//! laws, outage integrals, asymptotic expansions, gains and bounds.
//!
//! Everything here is deterministic quadrature and summation; nothing
//! draws random numbers. The Monte-Carlo side never calls into this
//! module, so each side can independently validate the other.

mod best;
mod direct;
mod lattice;
mod nearest;
mod quad2d;
mod thinning;
mod zeta;

pub use best::{best_error_asymptote, jensen_bounds, JensenBounds};
pub use direct::{direct_error_asymptote, p_direct, sir_at_destination};
pub use lattice::{interference_factor, one_minus_interference_factor, DeltaField};
pub use nearest::{nearest_error_asymptote, nearest_success_semianalytic};
pub use quad2d::gauss_legendre;
pub use thinning::{
    first_contact_cdf, first_contact_pdf, mean_connect_count, mean_connect_distance,
    relay_intensity, DecodedSetModel,
};
pub use zeta::{epstein_c, hurwitz_zeta, riemann_zeta};

use crate::montecarlo::RelayScheme;
use crate::SystemParams;

/// Failure modes of the analytic routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum AnalyticError {
    /// Parameters outside the domain of the requested quantity.
    #[error("{0}")]
    Domain(String),
    /// `alpha * beta = 2` separates the noise- and interference-limited
    /// regimes; relay asymptotes are undefined on the boundary.
    #[error("alpha*beta = 2 sits on the regime boundary; no power-law asymptote exists")]
    BoundaryRegime,
    /// A bound or expansion whose defining series diverges at these
    /// parameters.
    #[error("divergent: {0}")]
    Divergent(String),
}

/// Discretization controls shared by all quadrature-based routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Target step length of 1-D radial integrals. Each smooth piece is
    /// subdivided uniformly at roughly this resolution.
    pub radial_step: f64,
    /// Cap for radial integrals whose support is unbounded; 0 means
    /// derive the cap from the geometry at hand.
    pub max_radius: f64,
    /// Intervals per axis of 2-D cell-square grids (even).
    pub grid_n: usize,
    /// Window half-width of truncated lattice sums and products: indices
    /// `{-T ..= T}^2`. Deliberately independent of the simulator's
    /// window so either side can be matched or refined at will.
    pub lattice_truncation: usize,
    /// Whether truncated lattice sums add the integral estimate of the
    /// remainder beyond the window. Disable when matching a simulator
    /// window exactly.
    pub include_tail: bool,
    /// Absolute tolerance target for lattice sums and products.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_step: 4e-3,
            max_radius: 0.0,
            grid_n: 128,
            lattice_truncation: 64,
            include_tail: true,
            tol: 1e-6,
        }
    }
}

impl QuadratureSpec {
    /// Spec that reproduces a simulator window exactly: same truncation,
    /// no tail beyond it. Used whenever analytic values are compared
    /// against Monte-Carlo estimates.
    pub fn matched_to_window(truncation: usize) -> Self {
        QuadratureSpec {
            lattice_truncation: truncation,
            include_tail: false,
            ..QuadratureSpec::default()
        }
    }

    /// Halved step sizes / doubled resolutions everywhere; convergence
    /// checks compare results at `self` and `self.refined()`.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            radial_step: self.radial_step / 2.0,
            max_radius: self.max_radius,
            grid_n: self.grid_n * 2,
            lattice_truncation: self.lattice_truncation * 2,
            include_tail: self.include_tail,
            tol: self.tol,
        }
    }
}

/// Exponent regime of a density-coupled sweep, decided by the sign of
/// `alpha * beta - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `alpha*beta > 2`: interference thins out faster than noise.
    NoiseLimited,
    /// `alpha*beta = 2`: noise and interference decay at the same rate.
    /// Only the direct link has a closed asymptote here.
    Boundary,
    /// `alpha*beta < 2`: lattice interference dominates.
    InterferenceLimited,
}

impl Regime {
    pub fn of(alpha: f64, beta: f64) -> Regime {
        let ab = alpha * beta;
        if ab > 2.0 {
            Regime::NoiseLimited
        } else if ab == 2.0 {
            Regime::Boundary
        } else {
            Regime::InterferenceLimited
        }
    }
}

/// Power-law asymptote `error ~ coefficient * snr^-exponent` of an outage
/// quantity along the sweep `lambda_b = snr^-beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoteCurve {
    pub coefficient: f64,
    pub exponent: f64,
    pub regime: Regime,
}

impl AsymptoteCurve {
    /// Predicted error probability at a linear SNR.
    pub fn eval(&self, snr: f64) -> f64 {
        self.coefficient * snr.powf(-self.exponent)
    }
}

/// Diversity order of the direct link under density scaling `beta`:
/// `min(1, alpha*beta/2)`.
pub fn diversity_order(alpha: f64, beta: f64) -> f64 {
    (alpha * beta / 2.0).min(1.0)
}

/// Error asymptote of a scheme's measured outage: `1 - P_d` for
/// retransmission (the second slot copies the direct law), else the
/// conditional relay outage `1 - P_r|occupied`.
pub fn relay_error_asymptote(
    scheme: RelayScheme,
    params: &SystemParams,
    quad: &QuadratureSpec,
) -> Result<AsymptoteCurve, AnalyticError> {
    match scheme {
        RelayScheme::Retransmit => direct_error_asymptote(params, quad),
        RelayScheme::NearestToDestination => nearest_error_asymptote(params, quad),
        RelayScheme::BestChannel => best_error_asymptote(params, quad),
    }
}

/// Asymptotic relaying gain: ratio of the direct-transmission error
/// coefficient to the scheme's, both taken in the same regime. The
/// exponents agree, so the error-probability ratio tends to this
/// constant and the diversity gain is zero.
pub fn asymptotic_gain(
    scheme: RelayScheme,
    params: &SystemParams,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    let direct = direct_error_asymptote(params, quad)?;
    let relay = relay_error_asymptote(scheme, params, quad)?;
    debug_assert_eq!(direct.regime, relay.regime);
    Ok(direct.coefficient / relay.coefficient)
}
