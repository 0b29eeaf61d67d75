//! The decoded set of a cell as an inhomogeneous Poisson process: its
//! intensity under fading/SINR thinning, the contact law of the nearest
//! decoded point around the destination, and the transmit density of the
//! nearest-relay rule.

use super::lattice::{log_interference_sum, DeltaField};
use super::quad2d::{CellSquare, GridField, RadialLaw};
use super::{AnalyticError, QuadratureSpec};
use crate::geometry::Point;
use crate::SystemParams;

/// Intensity `delta(x)` of the decoded set at cell-local `x`: the mobile
/// intensity thinned by the probability that a mobile at `x` decodes the
/// first-hop transmission under noise, fading, and lattice interference.
pub fn relay_intensity(x: Point, params: &SystemParams, quad: &QuadratureSpec) -> f64 {
    let eta = params.mobiles.value(x);
    if eta == 0.0 {
        return 0.0;
    }
    let noise_term = params.theta * params.noise_over_p() * params.path_loss.inv_gain2(x.norm2());
    eta * (-noise_term - log_interference_sum(x, params, quad)).exp()
}

/// Precomputed numeric model of one cell's decoded set.
///
/// Holds the thinned intensity on the cell grid, its radial cumulative
/// law around the destination, and the derived nearest-relay transmit
/// density. Built once per parameter point and shared by the outage
/// integrals.
pub struct DecodedSetModel {
    /// `delta` on the cell grid.
    pub delta: GridField,
    /// `D(r) = ∫_{B(dest, r) ∩ cell} delta`, with exact derivative.
    pub around_dest: RadialLaw,
    /// Mean decoded count `∫ delta`.
    pub total: f64,
    /// Probability the decoded set is non-empty, `1 - e^-total`.
    pub mu_prime: f64,
    dest: Point,
}

impl DecodedSetModel {
    pub fn new(params: &SystemParams, quad: &QuadratureSpec) -> DecodedSetModel {
        let field = DeltaField::new(params, quad);
        let nop = params.theta * params.noise_over_p();
        let pl = params.path_loss;
        let profile = params.mobiles;
        let delta = field.scaled_grid(|p| {
            profile.value(p) * (-nop * pl.inv_gain2(p.norm2())).exp()
        });
        let total = delta.integral();
        let dest = params.dest_offset;
        let square = CellSquare { half: params.mobiles.side / 2.0 };
        let around_dest = RadialLaw::build(square, dest, quad.radial_step, |p| delta.eval(p));
        DecodedSetModel {
            delta,
            around_dest,
            total,
            mu_prime: -(-total).exp_m1(),
            dest,
        }
    }

    /// Destination the radial law is centred on.
    pub fn dest(&self) -> Point {
        self.dest
    }

    /// Contact CDF of the nearest decoded point around the destination,
    /// `F(r) = 1 - exp(-D(r))`. Defective: its total mass is `mu_prime`.
    pub fn contact_cdf(&self, r: f64) -> f64 {
        -(-self.around_dest.cum(r)).exp_m1()
    }

    /// Contact density `f(r) = exp(-D(r)) D'(r)`, with `D'` evaluated as
    /// the boundary line integral rather than a finite difference.
    pub fn contact_pdf(&self, r: f64) -> f64 {
        (-self.around_dest.cum(r)).exp() * self.around_dest.line(r)
    }

    /// Transmit density of the nearest-relay rule: `t(x) = delta(x)
    /// exp(-D(|x - dest|))`, the density of the point that is decoded and
    /// closest to the destination. Integrates to `mu_prime`.
    pub fn transmit_density(&self) -> GridField {
        let dest = self.dest;
        let law = &self.around_dest;
        self.delta.map(|p, d| d * (-law.cum(p.dist(dest))).exp())
    }
}

/// Mean number of decoded mobiles per cell, `∫ delta`.
pub fn mean_connect_count(params: &SystemParams, quad: &QuadratureSpec) -> f64 {
    DecodedSetModel::new(params, quad).total
}

/// Mean distance from the base station to a decoded mobile
/// (intensity-weighted). Undefined when nothing ever decodes.
pub fn mean_connect_distance(
    params: &SystemParams,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    let model = DecodedSetModel::new(params, quad);
    if model.total <= 0.0 {
        return Err(AnalyticError::Domain(
            "mean decoded distance is undefined: the decoded set is almost surely empty"
                .into(),
        ));
    }
    let weighted = model.delta.weighted_integral(|p, v| p.norm() * v);
    Ok(weighted / model.total)
}

/// Contact CDF `F_o(r)` of the nearest decoded relay around the
/// destination (defective, mass `1 - e^-∫delta` in total).
pub fn first_contact_cdf(r: f64, params: &SystemParams, quad: &QuadratureSpec) -> f64 {
    DecodedSetModel::new(params, quad).contact_cdf(r)
}

/// Contact density `f_o(r)`; the exact derivative of the CDF.
pub fn first_contact_pdf(r: f64, params: &SystemParams, quad: &QuadratureSpec) -> f64 {
    DecodedSetModel::new(params, quad).contact_pdf(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SystemParams;

    fn params() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn intensity_vanishes_outside_cell() {
        let quad = QuadratureSpec::default();
        let p = params();
        assert_eq!(relay_intensity(Point::new(0.51, 0.0), &p, &quad), 0.0);
        assert_eq!(relay_intensity(Point::new(0.0, -0.6), &p, &quad), 0.0);
    }

    #[test]
    fn intensity_approaches_eta_without_thinning() {
        // No interference (empty window, huge SNR): delta -> eta.
        let mut p = params();
        p.snr = 1e15;
        p.lattice.density = 1e-9;
        let quad = QuadratureSpec { include_tail: false, ..QuadratureSpec::default() };
        let x = Point::new(0.2, -0.3);
        let d = relay_intensity(x, &p, &quad);
        assert!((d - 5.0).abs() < 1e-4, "{d}");
    }

    #[test]
    fn huge_threshold_kills_everything() {
        let mut p = params();
        p.theta = 1e9;
        let quad = QuadratureSpec::default();
        let model = DecodedSetModel::new(&p, &quad);
        assert!(model.total < 1e-6);
        assert!(model.mu_prime < 1e-6);
    }

    #[test]
    fn totals_and_mean_distance_without_thinning() {
        // Unthinned limit: count -> N = 5, mean distance -> the uniform
        // square value L (sqrt 2 + asinh 1) / 6.
        let mut p = params();
        p.snr = 1e15;
        p.lattice.density = 1e-9;
        let quad = QuadratureSpec { include_tail: false, ..QuadratureSpec::default() };
        let count = mean_connect_count(&p, &quad);
        assert!((count - 5.0).abs() < 1e-6, "{count}");
        let dist = mean_connect_distance(&p, &quad).unwrap();
        let expect = (std::f64::consts::SQRT_2 + 1f64.asinh()) / 6.0;
        assert!((dist - expect).abs() < 1e-6, "{dist} vs {expect}");
    }

    #[test]
    fn contact_law_shape() {
        let p = params();
        let quad = QuadratureSpec::default();
        let model = DecodedSetModel::new(&p, &quad);
        assert_eq!(model.contact_cdf(0.0), 0.0);
        // Monotone, defective at mu_prime.
        let mut prev = 0.0;
        for k in 0..=500 {
            let r = 1.5 * k as f64 / 500.0;
            let v = model.contact_cdf(r);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        // Saturation mass: radial cumulative vs grid integral are two
        // independent quadratures of the same measure.
        assert!((model.contact_cdf(5.0) - model.mu_prime).abs() < 1e-4);
        assert!(model.mu_prime < model.delta.integral().min(1.0));

        // CDF and PDF are consistent: integrate the pdf.
        let mut acc = 0.0;
        let n = 4000;
        let h = model.around_dest.rmax() / n as f64;
        for k in 0..n {
            let r = (k as f64 + 0.5) * h;
            acc += model.contact_pdf(r) * h;
        }
        assert!(
            (acc - model.mu_prime).abs() < 1e-4,
            "pdf mass {acc} vs {}",
            model.mu_prime
        );
    }

    #[test]
    fn transmit_density_mass_is_mu_prime() {
        // ∫ delta(x) e^{-D(|x-z|)} dx telescopes to 1 - e^{-∫delta}
        // exactly; the grid must reproduce that within quadrature error.
        let p = params();
        let quad = QuadratureSpec::default();
        let model = DecodedSetModel::new(&p, &quad);
        let t = model.transmit_density();
        let mass = t.integral();
        assert!(
            (mass - model.mu_prime).abs() < 2e-3 * model.mu_prime,
            "mass {mass} vs {}",
            model.mu_prime
        );
    }

    #[test]
    fn matched_window_raises_intensity() {
        // Less interference in a small window -> more decoding.
        let p = params();
        let full = DecodedSetModel::new(&p, &QuadratureSpec::default());
        let matched = DecodedSetModel::new(&p, &QuadratureSpec::matched_to_window(2));
        assert!(matched.total > full.total * 1.05);
    }

    #[test]
    fn grid_refinement_converges() {
        // Halving the grid step changes the totals below the tolerance
        // scale of the coarse grid.
        let p = params();
        let quad = QuadratureSpec::default();
        let coarse = DecodedSetModel::new(&p, &quad);
        let fine = DecodedSetModel::new(
            &p,
            &QuadratureSpec { grid_n: quad.grid_n * 2, radial_step: quad.radial_step / 2.0, ..quad },
        );
        assert!((coarse.total - fine.total).abs() < 1e-4);
        for r in [0.2, 0.5, 0.9, 1.2] {
            assert!((coarse.contact_cdf(r) - fine.contact_cdf(r)).abs() < 5e-4);
        }
    }
}
