//! Best-channel forwarding: the closed-form error asymptote and the
//! Jensen-type bounds on the conditional success probability.
//!
//! The exact success probability of this scheme has no tractable closed
//! form (the selected relay's position law couples with its fade), so
//! the finite-SNR numbers here are bounds; exact values come from the
//! simulator.

use super::lattice::InterferenceTable;
use super::quad2d::{axis_nodes, integrate_gl32, simpson_weights, GridField};
use super::thinning::DecodedSetModel;
use super::{AnalyticError, AsymptoteCurve, QuadratureSpec, Regime};
use crate::channel::PathLossModel;
use crate::geometry::Point;
use crate::SystemParams;

/// Two-sided bracket on a conditional success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Coefficient and exponent of `1 - P_r|cond ~ c snr^-e` for the
/// best-channel scheme under `lambda_b = snr^-beta`.
///
/// The coefficient integrates the unthinned mobile intensity against
/// the combined first- and second-hop path losses; conditioning on a
/// non-empty cell contributes the `(1 - mu) / mu` prefactor. In the
/// interference-limited regime the second-hop term carries an extra
/// factor `mu` (the probability that an interfering cell transmits).
pub fn best_error_asymptote(
    params: &SystemParams,
    quad: &QuadratureSpec,
) -> Result<AsymptoteCurve, AnalyticError> {
    let regime = Regime::of(params.path_loss.alpha(), params.beta);
    if regime == Regime::Boundary {
        return Err(AnalyticError::BoundaryRegime);
    }
    let mu = params.mu();
    if mu <= 0.0 {
        return Err(AnalyticError::Domain(
            "best-channel asymptote needs a positive mobile density".into(),
        ));
    }
    let pl = params.path_loss;
    let theta = params.theta;
    let z = params.dest_offset;
    let (scale, mix, exponent) = match regime {
        Regime::NoiseLimited => (theta * params.ell_r(), 1.0, 1.0),
        Regime::InterferenceLimited => (
            theta * super::zeta::epstein_c(pl.alpha())?,
            mu,
            pl.alpha() * params.beta / 2.0,
        ),
        Regime::Boundary => unreachable!("rejected above"),
    };
    let profile = params.mobiles;
    let bracket = GridField::tabulate(profile.side / 2.0, quad.grid_n, |x| {
        profile.value(x) * (mix * pl.inv_gain2(x.dist2(z)) + pl.inv_gain2(x.norm2()))
    });
    let coefficient = (1.0 - mu) / mu * scale * bracket.integral();
    Ok(AsymptoteCurve { coefficient, exponent, regime })
}

/// Jensen upper bound and first-order lower bound on the best-channel
/// success probability conditioned on a non-empty cell.
///
/// Both sides need the Laplace transform of the interference seen at
/// the destination, taken over the other cells' selected relays; those
/// relays follow the best-channel transmit density `q`, computed here
/// by integrating the selection law over the winning fade.
///
/// Fails when the lower bound's exponential moment diverges, which
/// happens once `theta ∫ delta / ell(x - dest) dx` times an interferer
/// gain reaches 1 somewhere the transmit density is positive.
pub fn jensen_bounds(
    params: &SystemParams,
    quad: &QuadratureSpec,
) -> Result<JensenBounds, AnalyticError> {
    let mu = params.mu();
    if mu <= 0.0 {
        return Err(AnalyticError::Domain(
            "bounds condition on a non-empty cell; mobile density must be positive".into(),
        ));
    }
    let model = DecodedSetModel::new(params, quad);
    let z = params.dest_offset;
    let pl = params.path_loss;
    let theta = params.theta;
    let nop = params.noise_over_p();

    let q = best_transmit_density(&model, params);
    let table = InterferenceTable::new(z, params, quad);
    let rho = table.bind_density(&q);
    let far = table.far_gain(z, &rho);

    // Upper: Jensen's inequality moves the expectation over interference
    // and fading inside the Poisson exponent.
    let n = quad.grid_n / super::lattice::PRODUCT_STRIDE;
    let axis = axis_nodes(model.delta.half, n);
    let w1 = simpson_weights(n, 2.0 * model.delta.half / n as f64);
    let mut j_total = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let x = Point::new(axis[i], axis[j]);
            let d = model.delta.eval(x);
            if d == 0.0 {
                continue;
            }
            let inv = pl.inv_gain2(x.dist2(z));
            let li = table.log_product(theta * inv, &rho, &far).exp();
            j_total += w1[i] * w1[j] * d * (-theta * nop * inv).exp() * li;
        }
    }
    let upper = -(-j_total).exp_m1() / mu;

    // Lower: exp(-x) >= 1 - x inside the Poisson exponent leaves an
    // exponential moment of the interference, finite only while every
    // tilted fade factor stays integrable.
    let w_int = model.delta.weighted_integral(|p, v| v * pl.inv_gain2(p.dist2(z)));
    let c_tilde = theta * w_int;
    let log_plus = table.log_product_plus(c_tilde, &rho, &far)?;
    let inner = (-model.total + theta * nop * w_int + log_plus).exp();
    let lower = (1.0 - inner) / mu;

    Ok(JensenBounds { lower, upper })
}

/// Transmit density of the best-channel rule: `q(y) = delta(y) E[exp(-M(
/// ell(y - dest) U))]` with `U` a unit exponential and `M(m) = ∫ delta(x)
/// exp(-m / ell(x - dest)) dx`.
///
/// A decoded point at `y` with fade `u` wins when no other decoded point
/// beats the product `u ell(y - dest)`; averaging the resulting void
/// probability over the fade gives the selection factor. Integrates to
/// `mu_prime` like any single-transmitter rule.
fn best_transmit_density(model: &DecodedSetModel, params: &SystemParams) -> GridField {
    let law = MaxFadeLaw::new(&model.delta, model.dest(), params.path_loss);
    let dest = model.dest();
    let pl = params.path_loss;
    model.delta.map(|p, d| {
        if d == 0.0 {
            0.0
        } else {
            d * law.selection_factor(pl.gain2(p.dist2(dest)))
        }
    })
}

/// Tabulated `M(m)` plus the fade-averaged void probability built on it.
struct MaxFadeLaw {
    ln_lo: f64,
    ln_step: f64,
    vals: Vec<f64>,
}

impl MaxFadeLaw {
    const NODES: usize = 512;
    /// Fades above this carry less than 1e-17 of the unit-exponential
    /// mass.
    const U_MAX: f64 = 40.0;

    fn new(delta: &GridField, dest: Point, pl: PathLossModel) -> MaxFadeLaw {
        // The argument m = ell(y - dest) u spans (0, g_max U_MAX]; cover
        // it with a log grid and clamp at both ends (M is flat near 0,
        // negligible past the top).
        let mut g_max: f64 = 1.0;
        let xs = axis_nodes(delta.half, delta.n);
        for &x in &xs {
            for &y in &xs {
                let g = pl.gain2(Point::new(x, y).dist2(dest));
                if g.is_finite() && g > g_max {
                    g_max = g;
                }
            }
        }
        let m_lo: f64 = 1e-6;
        let m_hi = g_max * Self::U_MAX;
        let ln_lo = m_lo.ln();
        let ln_step = (m_hi.ln() - ln_lo) / (Self::NODES - 1) as f64;
        let vals = (0..Self::NODES)
            .map(|k| {
                let m = (ln_lo + ln_step * k as f64).exp();
                delta.weighted_integral(|p, v| {
                    if v == 0.0 {
                        0.0
                    } else {
                        v * (-m * pl.inv_gain2(p.dist2(dest))).exp()
                    }
                })
            })
            .collect();
        MaxFadeLaw { ln_lo, ln_step, vals }
    }

    fn m_at(&self, m: f64) -> f64 {
        if !m.is_finite() {
            return 0.0;
        }
        let t = (m.ln() - self.ln_lo) / self.ln_step;
        if t <= 0.0 {
            return self.vals[0];
        }
        let top = (Self::NODES - 1) as f64;
        if t >= top {
            return self.vals[Self::NODES - 1];
        }
        let i = t as usize;
        let frac = t - i as f64;
        self.vals[i] * (1.0 - frac) + self.vals[i + 1] * frac
    }

    /// `E[exp(-M(g U))]`, `U ~ Exp(1)`: the probability that a point with
    /// channel gain `g` to the destination beats every other decoded
    /// point, averaged over its own fade.
    fn selection_factor(&self, g: f64) -> f64 {
        if !g.is_finite() {
            // Unbounded gain wins outright.
            return 1.0;
        }
        let mut total = 0.0;
        for win in [(0.0, 2.0), (2.0, 6.0), (6.0, 15.0), (15.0, Self::U_MAX)] {
            total += integrate_gl32(win.0, win.1, |u| (-u - self.m_at(g * u)).exp());
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SystemParams;

    #[test]
    fn asymptote_matches_closed_form_integrals() {
        // For the default square cell the bracket integrals are exact
        // polynomials: ∫(1+|x|^4) = 1 + 7/180 and, around the corner
        // destination, ∫(1+|x-z|^4) = 1 + 28/45.
        let mut p = SystemParams::default();
        let quad = QuadratureSpec::default();
        let mu = p.mu();
        let pre = (1.0 - mu) / mu * p.theta;
        let i_dest = 1.0 + 28.0 / 45.0;
        let i_base = 1.0 + 7.0 / 180.0;

        p.beta = 0.75;
        let noise = best_error_asymptote(&p, &quad).unwrap();
        let expect = pre * p.ell_r() * 5.0 * (i_dest + i_base);
        assert!(
            (noise.coefficient - expect).abs() < 1e-7 * expect,
            "{} vs {}",
            noise.coefficient,
            expect
        );
        assert_eq!((noise.exponent, noise.regime), (1.0, Regime::NoiseLimited));
        // Literature-rounded value 0.108.
        assert!((noise.coefficient - 0.1083124).abs() < 1e-4);

        p.beta = 0.25;
        let intf = best_error_asymptote(&p, &quad).unwrap();
        let c4 = super::super::zeta::epstein_c(4.0).unwrap();
        let expect = pre * c4 * 5.0 * (mu * i_dest + i_base);
        assert!(
            (intf.coefficient - expect).abs() < 1e-6 * expect,
            "{} vs {}",
            intf.coefficient,
            expect
        );
        assert_eq!((intf.exponent, intf.regime), (0.5, Regime::InterferenceLimited));
        // Literature-rounded value 0.812.
        assert!((intf.coefficient - 0.8126215).abs() < 2e-4);
    }

    #[test]
    fn asymptote_domain_errors() {
        let quad = QuadratureSpec::default();
        let mut p = SystemParams::default();
        p.beta = 0.5;
        assert!(matches!(best_error_asymptote(&p, &quad), Err(AnalyticError::BoundaryRegime)));
        let mut p = SystemParams::default();
        p.beta = 0.75;
        p.mobiles.density = 0.0;
        assert!(best_error_asymptote(&p, &quad).is_err());
    }

    #[test]
    fn transmit_density_mass_is_mu_prime() {
        let p = SystemParams::default();
        let quad = QuadratureSpec::default();
        let model = DecodedSetModel::new(&p, &quad);
        let q = best_transmit_density(&model, &p);
        let mass = q.integral();
        assert!(
            (mass - model.mu_prime).abs() < 1e-3 * model.mu_prime,
            "mass {mass} vs mu' {}",
            model.mu_prime
        );
    }

    #[test]
    fn selection_prefers_strong_channels() {
        // The selection factor q / delta grows with the channel gain to
        // the destination.
        let p = SystemParams::default();
        let quad = QuadratureSpec::default();
        let model = DecodedSetModel::new(&p, &quad);
        let q = best_transmit_density(&model, &p);
        let near = Point::new(0.40625, 0.40625);
        let far = Point::new(-0.40625, -0.40625);
        let ratio_near = q.eval(near) / model.delta.eval(near);
        let ratio_far = q.eval(far) / model.delta.eval(far);
        assert!(
            ratio_near > ratio_far && ratio_far > 0.0,
            "{ratio_near} vs {ratio_far}"
        );
        // Factors are probabilities of winning the selection.
        assert!(ratio_near < 1.0 + 1e-9);
    }

    #[test]
    fn bounds_are_ordered_and_proper() {
        let mut p = SystemParams::default();
        p.lattice.density = 0.1;
        let quad = QuadratureSpec::default();
        let b = jensen_bounds(&p, &quad).unwrap();
        assert!(b.lower <= b.upper, "{b:?}");
        assert!(b.upper <= 1.0 && b.lower > 0.0, "{b:?}");
    }

    #[test]
    fn bounds_shrink_with_harder_threshold() {
        let mut p = SystemParams::default();
        p.lattice.density = 0.1;
        let quad = QuadratureSpec::default();
        let easy = jensen_bounds(&p, &quad).unwrap();
        p.theta = 3.0;
        let hard = jensen_bounds(&p, &quad).unwrap();
        assert!(hard.upper < easy.upper, "{easy:?} vs {hard:?}");
        assert!(hard.lower <= easy.lower, "{easy:?} vs {hard:?}");
    }

    #[test]
    fn bounds_close_to_one_in_isolation() {
        // Vanishing interference and noise: a decoded relay exists with
        // probability mu -> success | non-empty tends to 1, and the
        // bracket collapses onto it.
        let mut p = SystemParams::default();
        p.lattice.density = 1e-6;
        p.snr = 1e12;
        let quad = QuadratureSpec::default();
        let b = jensen_bounds(&p, &quad).unwrap();
        assert!(b.upper <= 1.0 + 1e-12 && b.lower > 1.0 - 1e-3, "{b:?}");
    }

    #[test]
    fn lower_bound_divergence_is_reported() {
        // A dense lattice under singular path loss puts an interferer
        // arbitrarily close to the destination; the exponential moment
        // of the lower bound blows up and the routine must say so.
        let mut p = SystemParams::default();
        p.path_loss = crate::channel::PathLossModel::Singular { alpha: 4.0 };
        p.lattice.density = 4.0;
        let quad = QuadratureSpec::default();
        assert!(matches!(
            jensen_bounds(&p, &quad),
            Err(AnalyticError::Divergent(_))
        ));
    }
}
