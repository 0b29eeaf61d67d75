//! Lattice interference functionals: the success-probability product over
//! interfering sites, its field over the cell, and Laplace-type products
//! over per-cell transmit densities.
//!
//! Everything is summed over the window `{-T..T}^2` of the quadrature
//! spec. With `include_tail` the remainder beyond the window is added in
//! integral form, giving effectively infinite-lattice values; without it
//! the window is exact, which is how analytic values are matched to the
//! simulator's truncated lattice.

use super::quad2d::{integrate_gl32, simpson_weights, axis_nodes, GridField};
use super::QuadratureSpec;
use crate::geometry::Point;
use crate::SystemParams;

/// `sum_{|a|_inf > T} |a|^-alpha` estimated by the integral of `r^-alpha`
/// outside the square of half-width `T + 1/2`.
pub(crate) fn tail_z(t: usize, alpha: f64) -> f64 {
    let m = 8.0 * integrate_gl32(0.0, std::f64::consts::FRAC_PI_4, |phi| {
        phi.cos().powf(alpha - 2.0)
    });
    m / (alpha - 2.0) * (t as f64 + 0.5).powf(2.0 - alpha)
}

/// Interfering sites of the window, in units of the lattice spacing.
fn window_indices(t: usize) -> impl Iterator<Item = (i64, i64)> {
    let t = t as i64;
    (-t..=t).flat_map(move |i| (-t..=t).map(move |j| (i, j))).filter(|&(i, j)| i != 0 || j != 0)
}

/// Negative log of the interference product at receiver `x` (relative to
/// the serving site at the origin):
/// `S(x) = sum_a log(1 + theta ell(a s - x) / ell(x))`, plus the tail.
///
/// The summand of far sites is `theta ell(d)/ell(x) ~ d^-alpha`, so the
/// tail adds `theta/ell(x) * lambda^(alpha/2) * tail_z(T)`.
pub fn log_interference_sum(x: Point, params: &SystemParams, quad: &QuadratureSpec) -> f64 {
    let s = params.lattice.spacing();
    let w = params.theta * params.path_loss.inv_gain2(x.norm2());
    if w == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for (i, j) in window_indices(quad.lattice_truncation) {
        let site = Point::new(i as f64 * s, j as f64 * s);
        total += (w * params.path_loss.gain2(site.dist2(x))).ln_1p();
    }
    if quad.include_tail {
        let alpha = params.path_loss.alpha();
        total += w
            * params.lattice.density.powf(alpha / 2.0)
            * tail_z(quad.lattice_truncation, alpha);
    }
    total
}

/// Probability that a Rayleigh link of gain `ell(x)` beats the lattice
/// interference at threshold `theta` (the interference-only success
/// factor), `Delta(x) = exp(-S(x))` in `(0, 1]`.
pub fn interference_factor(x: Point, params: &SystemParams, quad: &QuadratureSpec) -> f64 {
    (-log_interference_sum(x, params, quad)).exp()
}

/// `1 - Delta(x)` computed without cancellation, accurate however close
/// the product is to 1.
pub fn one_minus_interference_factor(
    x: Point,
    params: &SystemParams,
    quad: &QuadratureSpec,
) -> f64 {
    -(-log_interference_sum(x, params, quad)).exp_m1()
}

/// `S(x)` tabulated over the cell square.
///
/// Sites within a few spacings are summed exactly per node. The joint
/// contribution of all farther window sites varies slowly across the
/// cell, so their gain sums are tabulated on a coarse subgrid and
/// interpolated, which keeps the field build orders of magnitude cheaper
/// than node-by-node summation at large truncations.
#[derive(Debug, Clone)]
pub struct DeltaField {
    log_sum: GridField,
}

impl DeltaField {
    pub fn new(params: &SystemParams, quad: &QuadratureSpec) -> DeltaField {
        let s = params.lattice.spacing();
        let half = params.mobiles.side / 2.0;
        let theta = params.theta;
        let alpha = params.path_loss.alpha();
        let t = quad.lattice_truncation;
        // Sites within this index range are summed exactly; chosen so the
        // exact zone always covers a physical distance where the summand
        // may be non-negligible relative to third order.
        let near_idx = ((4.0 / s).ceil() as usize).max(4).min(t);

        let pl = params.path_loss;
        let near: Vec<Point> = window_indices(near_idx)
            .map(|(i, j)| Point::new(i as f64 * s, j as f64 * s))
            .collect();

        // First and second moments of the far-site gains on a coarse grid.
        let coarse_n = 8;
        let far_sites: Vec<Point> = window_indices(t)
            .filter(|&(i, j)| i.unsigned_abs().max(j.unsigned_abs()) as usize > near_idx)
            .map(|(i, j)| Point::new(i as f64 * s, j as f64 * s))
            .collect();
        let (g1, g2) = if far_sites.is_empty() {
            (None, None)
        } else {
            let g1 = GridField::tabulate(half, coarse_n, |p| {
                far_sites.iter().map(|site| pl.gain2(site.dist2(p))).sum()
            });
            let g2 = GridField::tabulate(half, coarse_n, |p| {
                far_sites.iter().map(|site| pl.gain2(site.dist2(p)).powi(2)).sum()
            });
            (Some(g1), Some(g2))
        };

        let tail = if quad.include_tail {
            params.lattice.density.powf(alpha / 2.0) * tail_z(t, alpha)
        } else {
            0.0
        };

        let log_sum = GridField::tabulate(half, quad.grid_n, |p| {
            let w = theta * pl.inv_gain2(p.norm2());
            if w == 0.0 {
                return 0.0;
            }
            let mut total = 0.0;
            for site in &near {
                total += (w * pl.gain2(site.dist2(p))).ln_1p();
            }
            if total > 750.0 {
                // Near sites alone already underflow exp(-total); the far
                // contribution is non-negative and cannot matter.
                return total;
            }
            if let (Some(g1), Some(g2)) = (&g1, &g2) {
                // log(1+wg) summed over far sites through second order,
                // valid while the quadratic correction stays a small
                // fraction of the linear term (w * g_far << 1).
                let lin = w * g1.eval(p);
                let sq = 0.5 * w * w * g2.eval(p);
                if sq <= 0.1 * lin {
                    total += lin - sq;
                } else {
                    for site in &far_sites {
                        total += (w * pl.gain2(site.dist2(p))).ln_1p();
                    }
                }
            }
            total + w * tail
        });
        DeltaField { log_sum }
    }

    /// `Delta` at a cell-local position.
    pub fn delta(&self, p: Point) -> f64 {
        (-self.log_sum.eval(p)).exp()
    }

    /// Node-aligned tabulation of `Delta` scaled by `f(node)`.
    pub fn scaled_grid(&self, mut f: impl FnMut(Point) -> f64) -> GridField {
        self.log_sum.map(|p, s| f(p) * (-s).exp())
    }
}

/// Per-cell tables of the link gain toward a fixed receiver, for
/// products of the form `prod_a (1 - ∫ rho(y) u(s g_a(y)) dy)` over the
/// interfering cells `a` of the window.
///
/// Gains are tabulated on a stride-reduced cell grid for cells near
/// enough that the transmitter position matters; farther cells enter
/// through their gain at the density centroid, and sites beyond the
/// window through the integral tail.
pub(crate) struct InterferenceTable {
    /// Simpson weights of the strided grid (including the stride factor).
    w2d: Vec<f64>,
    /// Strided node offsets within the cell.
    nodes: Vec<Point>,
    /// Gain grids of nearby interfering cells.
    cell_gains: Vec<Vec<f64>>,
    /// Sites of distant cells (gain evaluated at the centroid only).
    far_sites: Vec<Point>,
    /// Scaled tail-sum of gains beyond the window (0 when matched).
    tail_gain: f64,
    pl: crate::channel::PathLossModel,
}

pub(crate) const PRODUCT_STRIDE: usize = 4;

impl InterferenceTable {
    /// Builds gain tables toward receiver `z` (global coordinates).
    pub fn new(z: Point, params: &SystemParams, quad: &QuadratureSpec) -> InterferenceTable {
        let s = params.lattice.spacing();
        let half = params.mobiles.side / 2.0;
        let t = quad.lattice_truncation;
        let n = quad.grid_n / PRODUCT_STRIDE;
        let stride_step = 2.0 * half / n as f64;
        let axis = axis_nodes(half, n);
        let w1 = simpson_weights(n, stride_step);
        let mut w2d = Vec::with_capacity((n + 1) * (n + 1));
        let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..=n {
            for j in 0..=n {
                w2d.push(w1[i] * w1[j]);
                nodes.push(Point::new(axis[i], axis[j]));
            }
        }

        // Transmitter positions inside a cell shift the gain appreciably
        // only within this physical distance of the receiver.
        let near_idx = ((8.0 / s).ceil() as usize).max(4).min(t);
        let mut cell_gains = Vec::new();
        let mut far_sites = Vec::new();
        for (i, j) in window_indices(t) {
            let site = Point::new(i as f64 * s, j as f64 * s);
            if i.unsigned_abs().max(j.unsigned_abs()) as usize <= near_idx {
                cell_gains.push(
                    nodes.iter().map(|y| params.path_loss.gain2(site.add(*y).dist2(z))).collect(),
                );
            } else {
                far_sites.push(site);
            }
        }
        let alpha = params.path_loss.alpha();
        let tail_gain = if quad.include_tail {
            params.lattice.density.powf(alpha / 2.0) * tail_z(t, alpha)
        } else {
            0.0
        };
        InterferenceTable { w2d, nodes, cell_gains, far_sites, tail_gain, pl: params.path_loss }
    }

    /// Downsamples a full-resolution density grid onto the product grid
    /// and returns (node densities, integral, centroid).
    pub fn bind_density(&self, rho: &GridField) -> BoundDensity {
        let vals: Vec<f64> = self.nodes.iter().map(|p| rho.eval(*p)).collect();
        let mut total = 0.0;
        let (mut cx, mut cy) = (0.0, 0.0);
        for ((v, w), p) in vals.iter().zip(&self.w2d).zip(&self.nodes) {
            let m = v * w;
            total += m;
            cx += m * p.x;
            cy += m * p.y;
        }
        let centroid = if total > 0.0 {
            Point::new(cx / total, cy / total)
        } else {
            Point::ORIGIN
        };
        BoundDensity { vals, total, centroid }
    }

    /// Log of `prod_a (1 - ∫ rho(y) s g_a(y) / (1 + s g_a(y)) dy)`, the
    /// Laplace-type interference product at transform variable `s`.
    ///
    /// Always non-positive; `s = 0` gives 0 (empty product).
    pub fn log_product(&self, s: f64, rho: &BoundDensity, z_to_far: impl Fn(&Point) -> f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let mut log_total = 0.0;
        for gains in &self.cell_gains {
            let mut integral = 0.0;
            for ((g, r), w) in gains.iter().zip(&rho.vals).zip(&self.w2d) {
                if *r == 0.0 {
                    continue;
                }
                let sg = s * g;
                // sg = inf means the fade factor is a.s. exceeded.
                let frac = if sg.is_finite() { sg / (1.0 + sg) } else { 1.0 };
                integral += w * r * frac;
            }
            log_total += (-integral).ln_1p();
        }
        // Far cells: whole mass at the centroid; their factors are so
        // close to 1 that log(1-x) ~ -x - x^2/2 suffices.
        let (mut e1, mut e2) = (0.0, 0.0);
        for site in &self.far_sites {
            let g = z_to_far(site);
            let sg = s * g;
            let x = rho.total * sg / (1.0 + sg);
            e1 += x;
            e2 += x * x;
        }
        log_total -= e1 + 0.5 * e2;
        // Window tail: same first-order form with summed gains.
        log_total -= rho.total * s * self.tail_gain;
        log_total
    }

    /// Gain of a far site's centre toward the receiver offset by the
    /// density centroid; pass to [`Self::log_product`].
    pub fn far_gain<'a>(&'a self, z: Point, rho: &'a BoundDensity) -> impl Fn(&Point) -> f64 + 'a {
        move |site: &Point| self.pl.gain2(site.add(rho.centroid).dist2(z))
    }

    /// Log of the reversed product `prod_a (1 + ∫ rho c g / (1 - c g))`
    /// used by the lower bound; fails when `c g` reaches 1 anywhere the
    /// density lives.
    pub fn log_product_plus(
        &self,
        c: f64,
        rho: &BoundDensity,
        z_to_far: impl Fn(&Point) -> f64,
    ) -> Result<f64, super::AnalyticError> {
        let mut log_total = 0.0;
        for gains in &self.cell_gains {
            let mut integral = 0.0;
            for ((g, r), w) in gains.iter().zip(&rho.vals).zip(&self.w2d) {
                if *r == 0.0 {
                    continue;
                }
                let cg = c * g;
                if cg >= 1.0 {
                    return Err(super::AnalyticError::Divergent(format!(
                        "lower-bound series needs c*gain < 1, got {cg}"
                    )));
                }
                integral += w * r * cg / (1.0 - cg);
            }
            log_total += integral.ln_1p();
        }
        let mut e1 = 0.0;
        for site in &self.far_sites {
            let g = z_to_far(site);
            let cg = c * g;
            if cg >= 1.0 {
                return Err(super::AnalyticError::Divergent(
                    "lower-bound series diverges at a window site".into(),
                ));
            }
            e1 += rho.total * cg / (1.0 - cg);
        }
        log_total += e1 + rho.total * c * self.tail_gain;
        Ok(log_total)
    }
}

/// A density grid resampled onto an [`InterferenceTable`]'s nodes.
pub(crate) struct BoundDensity {
    vals: Vec<f64>,
    pub total: f64,
    pub centroid: Point,
}
