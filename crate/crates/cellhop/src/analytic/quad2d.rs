//! Quadrature primitives: Gauss-Legendre rules, circle/square arc
//! geometry, radial cumulative integrals over a square cell, and a
//! Simpson product rule on cell grids.
//!
//! The recurring geometric task is integrating a function over
//! `B(c, r) ∩ S` for a growing radius, where `S` is the cell square and
//! `c` an arbitrary centre (a destination, usually at a corner). All
//! such integrals are computed exactly in polar form around `c`: the
//! circle of radius `rho` meets `S` in at most a few angular intervals,
//! which are found in closed form, integrated with Gauss-Legendre, and
//! accumulated radially piecewise between the critical radii where the
//! interval structure changes.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::geometry::Point;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence; nodes converge to
/// machine precision in a handful of steps.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(32))
}

/// Integrates `f` over `[a, b]` with the cached 32-node rule.
pub fn integrate_gl32(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (nodes, weights) = gl32();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Centred square `[-half, half]^2`.
#[derive(Debug, Clone, Copy)]
pub struct CellSquare {
    pub half: f64,
}

impl CellSquare {
    pub fn contains(&self, p: Point) -> bool {
        p.x.abs() <= self.half && p.y.abs() <= self.half
    }

    /// Angular intervals (subsets of `[0, 2pi)`) where `c + rho e(phi)`
    /// lies inside the square. At most a few intervals; appended to
    /// `out` as disjoint, sorted `(lo, hi)` pairs.
    pub fn arc_intervals(&self, c: Point, rho: f64, out: &mut Vec<(f64, f64)>) {
        out.clear();
        if rho <= 0.0 {
            if self.contains(c) {
                out.push((0.0, 2.0 * PI));
            }
            return;
        }
        // cos(phi) in [ax, bx], sin(phi) in [ay, by]
        let ax = (-self.half - c.x) / rho;
        let bx = (self.half - c.x) / rho;
        let ay = (-self.half - c.y) / rho;
        let by = (self.half - c.y) / rho;
        if ax > 1.0 || bx < -1.0 || ay > 1.0 || by < -1.0 {
            return;
        }
        let mut a_set = Vec::with_capacity(2);
        cos_in_range(ax, bx, &mut a_set);
        let mut b_set = Vec::with_capacity(2);
        sin_in_range(ay, by, &mut b_set);
        intersect_unions(&a_set, &b_set, out);
    }

    /// Radii at which the arc structure around `c` changes: distances to
    /// the four edge segments and the four corners, deduplicated.
    pub fn critical_radii(&self, c: Point) -> Vec<f64> {
        let h = self.half;
        let mut r = Vec::with_capacity(8);
        for (cx, cy) in [(h, h), (h, -h), (-h, h), (-h, -h)] {
            r.push(c.dist(Point::new(cx, cy)));
        }
        // Edge segments: x = ±h with |y| <= h, and y = ±h with |x| <= h.
        let seg = |d_perp: f64, t: f64| -> f64 {
            let over = (t.abs() - h).max(0.0);
            (d_perp * d_perp + over * over).sqrt()
        };
        r.push(seg(h - c.x, c.y));
        r.push(seg(-h - c.x, c.y));
        r.push(seg(h - c.y, c.x));
        r.push(seg(-h - c.y, c.x));
        r.retain(|v| *v > 0.0);
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        r.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        r
    }

    /// Largest distance from `c` to the square (its farthest corner).
    pub fn max_radius(&self, c: Point) -> f64 {
        let h = self.half;
        [(h, h), (h, -h), (-h, h), (-h, -h)]
            .into_iter()
            .map(|(x, y)| c.dist(Point::new(x, y)))
            .fold(0.0, f64::max)
    }
}

/// `{phi in [0, 2pi): cos phi in [a, b]}` as disjoint sorted intervals.
fn cos_in_range(a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
    let lo = b.min(1.0).max(-1.0).acos(); // smallest |phi|
    let hi = a.min(1.0).max(-1.0).acos(); // largest |phi|
    if hi <= lo {
        if a <= -1.0 && b >= 1.0 {
            out.push((0.0, 2.0 * PI));
        }
        return;
    }
    push_normalized(lo, hi, out);
    push_normalized(2.0 * PI - hi, 2.0 * PI - lo, out);
    normalize_union(out);
}

/// `{phi in [0, 2pi): sin phi in [a, b]}` as disjoint sorted intervals.
fn sin_in_range(a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
    if a <= -1.0 && b >= 1.0 {
        out.push((0.0, 2.0 * PI));
        return;
    }
    let a1 = a.min(1.0).max(-1.0).asin();
    let a2 = b.min(1.0).max(-1.0).asin();
    if a2 <= a1 {
        return;
    }
    push_normalized(a1, a2, out);
    push_normalized(PI - a2, PI - a1, out);
    normalize_union(out);
}

/// Pushes `[lo, hi]` shifted into `[0, 2pi)`, splitting at the wrap.
fn push_normalized(mut lo: f64, mut hi: f64, out: &mut Vec<(f64, f64)>) {
    let tau = 2.0 * PI;
    while lo < 0.0 {
        lo += tau;
        hi += tau;
    }
    if hi <= tau {
        out.push((lo, hi));
    } else {
        out.push((lo, tau));
        out.push((0.0, hi - tau));
    }
}

/// Sorts and merges overlapping pieces in place.
fn normalize_union(set: &mut Vec<(f64, f64)>) {
    set.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(set.len());
    for &(lo, hi) in set.iter() {
        match merged.last_mut() {
            Some(last) if lo <= last.1 + 1e-14 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    *set = merged;
}

/// Intersection of two disjoint sorted interval unions.
fn intersect_unions(a: &[(f64, f64)], b: &[(f64, f64)], out: &mut Vec<(f64, f64)>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
}

/// Cumulative radial integrals of a planar function over `B(c, r) ∩ S`.
///
/// Stores the boundary line integral `line(rho) = rho ∫_arcs F dphi` and
/// its antiderivative `cum(r) = ∫_0^r line` on a piecewise-uniform grid
/// refined between critical radii, so both the measure-type quantity and
/// its exact derivative are available without finite differencing.
#[derive(Debug, Clone)]
pub struct RadialLaw {
    rho: Vec<f64>,
    line: Vec<f64>,
    cum: Vec<f64>,
}

impl RadialLaw {
    /// Builds the law for integrand `f` around centre `c`, resolving each
    /// smooth piece at roughly `radial_step`.
    pub fn build(
        square: CellSquare,
        c: Point,
        radial_step: f64,
        mut f: impl FnMut(Point) -> f64,
    ) -> RadialLaw {
        let mut cuts = square.critical_radii(c);
        let rmax = square.max_radius(c);
        cuts.retain(|r| *r < rmax - 1e-12);
        cuts.insert(0, 0.0);
        cuts.push(rmax);

        let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(4);
        let line_at = |rho: f64, arcs: &mut Vec<(f64, f64)>, f: &mut dyn FnMut(Point) -> f64| {
            square.arc_intervals(c, rho, arcs);
            let mut total = 0.0;
            for &(lo, hi) in arcs.iter() {
                total += integrate_gl32(lo, hi, |phi| {
                    f(Point::new(c.x + rho * phi.cos(), c.y + rho * phi.sin()))
                });
            }
            rho * total
        };

        let mut rho_grid = vec![0.0];
        let mut line = vec![0.0];
        let mut cum = vec![0.0];
        // 2-point Gauss per substep accumulates the antiderivative with
        // O(h^4) error without needing integrand smoothness across cuts.
        let g = 0.5 / 3.0f64.sqrt();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 1e-13 {
                continue;
            }
            let n = ((b - a) / radial_step).ceil().max(4.0) as usize;
            let h = (b - a) / n as f64;
            for k in 0..n {
                let lo = a + k as f64 * h;
                let inc = 0.5
                    * h
                    * (line_at(lo + h * (0.5 - g), &mut arcs, &mut f)
                        + line_at(lo + h * (0.5 + g), &mut arcs, &mut f));
                let r1 = lo + h;
                rho_grid.push(r1);
                line.push(line_at(r1, &mut arcs, &mut f));
                cum.push(cum.last().unwrap() + inc);
            }
        }
        RadialLaw { rho: rho_grid, line, cum }
    }

    /// Total integral over the whole square.
    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Largest tabulated radius.
    pub fn rmax(&self) -> f64 {
        *self.rho.last().unwrap()
    }

    fn locate(&self, r: f64) -> usize {
        match self.rho.binary_search_by(|v| v.partial_cmp(&r).unwrap()) {
            Ok(i) => i.max(1),
            Err(i) => i.clamp(1, self.rho.len() - 1),
        }
    }

    /// Boundary line integral (the derivative of [`Self::cum`]).
    pub fn line(&self, r: f64) -> f64 {
        if r <= 0.0 || r >= self.rmax() {
            return if r >= self.rmax() { 0.0 } else { 0.0 };
        }
        let i = self.locate(r);
        let (r0, r1) = (self.rho[i - 1], self.rho[i]);
        let t = (r - r0) / (r1 - r0);
        self.line[i - 1] * (1.0 - t) + self.line[i] * t
    }

    /// Cumulative integral over `B(c, r) ∩ S`.
    pub fn cum(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.rmax() {
            return self.total();
        }
        let i = self.locate(r);
        let (r0, r1) = (self.rho[i - 1], self.rho[i]);
        let t = (r - r0) / (r1 - r0);
        // Local trapezoid correction keeps interpolation consistent with
        // the stored increments.
        let seg = self.cum[i] - self.cum[i - 1];
        let l0 = self.line[i - 1];
        let l1 = self.line[i];
        let frac = if l0 + l1 > 0.0 {
            let lt = l0 * (1.0 - t) + l1 * t;
            t * (l0 + lt) / (l0 + l1)
        } else {
            t
        };
        self.cum[i - 1] + seg * frac
    }
}

/// Composite Simpson weights for `n + 1` uniform nodes (`n` even), scaled
/// by the step, i.e. `integral = sum_i w[i] f(x_i)`.
pub fn simpson_weights(n: usize, step: f64) -> Vec<f64> {
    assert!(n >= 2 && n % 2 == 0, "Simpson rule needs an even interval count");
    let mut w = vec![0.0; n + 1];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        } * step
            / 3.0;
    }
    w
}

/// Uniform node coordinates spanning `[-half, half]` with `n` intervals.
pub fn axis_nodes(half: f64, n: usize) -> Vec<f64> {
    let step = 2.0 * half / n as f64;
    (0..=n).map(|i| -half + i as f64 * step).collect()
}

/// Values of a function on the `(n+1)^2` tensor grid over the square.
#[derive(Debug, Clone)]
pub struct GridField {
    pub half: f64,
    pub n: usize,
    /// Row-major `v[i * (n+1) + j]` for node `(x_i, y_j)`.
    pub v: Vec<f64>,
}

impl GridField {
    pub fn tabulate(half: f64, n: usize, mut f: impl FnMut(Point) -> f64) -> GridField {
        let xs = axis_nodes(half, n);
        let mut v = Vec::with_capacity((n + 1) * (n + 1));
        for &x in &xs {
            for &y in &xs {
                v.push(f(Point::new(x, y)));
            }
        }
        GridField { half, n, v }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half / self.n as f64
    }

    /// Bilinear interpolation; zero outside the square.
    pub fn eval(&self, p: Point) -> f64 {
        let h = self.half;
        if p.x.abs() > h || p.y.abs() > h {
            return 0.0;
        }
        let step = self.step();
        let fx = ((p.x + h) / step).clamp(0.0, self.n as f64);
        let fy = ((p.y + h) / step).clamp(0.0, self.n as f64);
        // The last cell owns its far edge, so boundary points interpolate
        // with weight exactly 1 on the edge nodes.
        let i = (fx as usize).min(self.n - 1);
        let j = (fy as usize).min(self.n - 1);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let m = self.n + 1;
        let v00 = self.v[i * m + j];
        let v01 = self.v[i * m + j + 1];
        let v10 = self.v[(i + 1) * m + j];
        let v11 = self.v[(i + 1) * m + j + 1];
        v00 * (1.0 - tx) * (1.0 - ty)
            + v01 * (1.0 - tx) * ty
            + v10 * tx * (1.0 - ty)
            + v11 * tx * ty
    }

    /// Simpson integral of the tabulated values over the square.
    pub fn integral(&self) -> f64 {
        self.weighted_integral(|_, v| v)
    }

    /// Simpson integral of `g(node, value)` over the square.
    pub fn weighted_integral(&self, mut g: impl FnMut(Point, f64) -> f64) -> f64 {
        let w = simpson_weights(self.n, self.step());
        let xs = axis_nodes(self.half, self.n);
        let m = self.n + 1;
        let mut total = 0.0;
        for i in 0..m {
            let mut row = 0.0;
            for j in 0..m {
                row += w[j] * g(Point::new(xs[i], xs[j]), self.v[i * m + j]);
            }
            total += w[i] * row;
        }
        total
    }

    /// Applies `g` to every stored node value.
    pub fn map(&self, mut g: impl FnMut(Point, f64) -> f64) -> GridField {
        let xs = axis_nodes(self.half, self.n);
        let m = self.n + 1;
        let mut v = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                v.push(g(Point::new(xs[i], xs[j]), self.v[i * m + j]));
            }
        }
        GridField { half: self.half, n: self.n, v }
    }
}
