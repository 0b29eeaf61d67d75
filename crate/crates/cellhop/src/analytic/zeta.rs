//! Riemann/Hurwitz zeta evaluation and the square-lattice interference
//! constant built from them.

use super::AnalyticError;

/// Hurwitz zeta `zeta(s, q) = sum_{k>=0} (k + q)^-s` for `s > 1`, `q > 0`.
///
/// Euler-Maclaurin with a 64-term head and Bernoulli corrections through
/// `B_8`; absolute accuracy is far below 1e-12 over the arguments used
/// here (`s >= 1.25`, `q >= 1/4`), where direct summation alone would
/// need ~1e9 terms at `s = 1.5`.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta requires s > 1");
    assert!(q > 0.0, "hurwitz_zeta requires q > 0");
    const M: usize = 64;
    let mut head = 0.0;
    for k in 0..M {
        head += (k as f64 + q).powf(-s);
    }
    let a = M as f64 + q;
    let tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Bernoulli numbers B_2, B_4, B_6, B_8 over (2j)!.
    const B_OVER_FACT: [f64; 4] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
    ];
    let mut corr = 0.0;
    let mut poch = s; // rising factorial with an odd number of factors
    for (j, b) in B_OVER_FACT.iter().enumerate() {
        corr += b * poch * a.powf(-(s + 2.0 * j as f64 + 1.0));
        poch *= (s + 2.0 * j as f64 + 1.0) * (s + 2.0 * j as f64 + 2.0);
    }
    head + tail + corr
}

/// Riemann zeta for `s > 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// Interference constant of the unit square lattice,
/// `C(alpha) = sum_{z in Z^2, z != 0} |z|^-alpha`,
/// expressed through zeta functions:
/// `C = zeta(a) (zeta(a, 1/4) - zeta(a, 3/4)) / 2^(2a - 2)` with
/// `a = alpha / 2`.
///
/// Diverges for `alpha <= 2`.
pub fn epstein_c(alpha: f64) -> Result<f64, AnalyticError> {
    if !(alpha > 2.0) {
        return Err(AnalyticError::Domain(format!(
            "lattice constant diverges for alpha = {alpha} (needs alpha > 2)"
        )));
    }
    let a = alpha / 2.0;
    let beta_sum = (hurwitz_zeta(a, 0.25) - hurwitz_zeta(a, 0.75)) / 4f64.powf(a);
    Ok(4.0 * riemann_zeta(a) * beta_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((riemann_zeta(2.0) - pi * pi / 6.0).abs() < 1e-12);
        assert!((riemann_zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-12);
        assert!((riemann_zeta(3.0) - 1.2020569031595942854).abs() < 1e-12);
    }

    #[test]
    fn hurwitz_zeta_known_values() {
        // zeta(2, 1/4) = pi^2 + 8 G with G Catalan's constant.
        let pi = std::f64::consts::PI;
        let catalan = 0.915_965_594_177_219_015_1;
        assert!((hurwitz_zeta(2.0, 0.25) - (pi * pi + 8.0 * catalan)).abs() < 1e-10);
        // zeta(s, 1) is the Riemann zeta.
        assert!((hurwitz_zeta(1.5, 1.0) - 2.612_375_348_685_488_3).abs() < 1e-10);
        // Shift identity zeta(s, q) = q^-s + zeta(s, q + 1).
        let (s, q) = (1.7, 0.4);
        let lhs = hurwitz_zeta(s, q);
        let rhs = q.powf(-s) + hurwitz_zeta(s, q + 1.0);
        assert!((lhs - rhs).abs() < 1e-11);
    }

    #[test]
    fn lattice_constant_reference_values() {
        // Tabulated values for the square lattice.
        assert!((epstein_c(3.0).unwrap() - 9.03362).abs() < 5e-5);
        assert!((epstein_c(4.0).unwrap() - 6.02681).abs() < 5e-5);
    }

    #[test]
    fn lattice_constant_matches_direct_sum() {
        // Brute-force lattice sum with an integral tail sandwich. For the
        // window |i|,|j| <= T the remainder lies between the integrals of
        // r^-alpha over the plane minus the inscribed and circumscribed
        // disks of the window boundary.
        for alpha in [3.0f64, 4.0, 5.5] {
            let t = 400i64;
            let mut partial = 0.0;
            for i in -t..=t {
                for j in -t..=t {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let r2 = (i * i + j * j) as f64;
                    partial += r2.powf(-alpha / 2.0);
                }
            }
            // Integral bounds on the tail outside the square window:
            // 2 pi r_in^(2-alpha)/(alpha-2) with r_in = T (circumscribed
            // disk of removed region has radius T sqrt 2 >= points kept).
            let tail_hi = 2.0 * std::f64::consts::PI * (t as f64 - 1.0).powf(2.0 - alpha)
                / (alpha - 2.0);
            let c = epstein_c(alpha).unwrap();
            assert!(c > partial, "alpha {alpha}: sum exceeds closed form");
            assert!(c - partial < tail_hi, "alpha {alpha}: {c} vs {partial} + {tail_hi}");
        }
    }

    #[test]
    fn lattice_constant_rejects_divergent_exponent() {
        assert!(epstein_c(2.0).is_err());
        assert!(epstein_c(1.5).is_err());
    }
}
