//! Network geometry: the square lattice of sites and the per-cell point
//! processes of mobiles.

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::rng;

/// Point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn add(self, o: Point) -> Point {
        Point { x: self.x + o.x, y: self.y + o.y }
    }

    #[inline]
    pub fn sub(self, o: Point) -> Point {
        Point { x: self.x - o.x, y: self.y - o.y }
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    #[inline]
    pub fn dist2(self, o: Point) -> f64 {
        self.sub(o).norm2()
    }

    #[inline]
    pub fn dist(self, o: Point) -> f64 {
        self.dist2(o).sqrt()
    }
}

/// Square lattice of sites with intensity `density`, truncated to window
/// indices `{-truncation ..= truncation}^2`. Site spacing is
/// `1 / sqrt(density)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub density: f64,
    pub truncation: usize,
}

impl LatticeSpec {
    /// Distance between neighbouring sites.
    pub fn spacing(&self) -> f64 {
        1.0 / self.density.sqrt()
    }

    /// Number of sites in the window, `(2K+1)^2`.
    pub fn site_count(&self) -> usize {
        let n = 2 * self.truncation + 1;
        n * n
    }

    /// Window index of the central site.
    pub fn origin_index(&self) -> usize {
        (self.site_count() - 1) / 2
    }

    /// Integer window coordinates of site `index`, row-major from
    /// `(-K, -K)`.
    pub fn index_coords(&self, index: usize) -> (i64, i64) {
        let k = self.truncation as i64;
        let n = 2 * k + 1;
        let i = index as i64 / n - k;
        let j = index as i64 % n - k;
        (i, j)
    }
}

/// All sites of the window, row-major from `(-K, -K)` so that the
/// ordering (and hence every site index) is deterministic.
pub fn lattice_sites(spec: &LatticeSpec) -> Vec<Point> {
    let k = spec.truncation as i64;
    let s = spec.spacing();
    let mut sites = Vec::with_capacity(spec.site_count());
    for i in -k..=k {
        for j in -k..=k {
            sites.push(Point::new(i as f64 * s, j as f64 * s));
        }
    }
    sites
}

/// Homogeneous mobile intensity `density` on a centred square cell of
/// side `side`. Mobiles of a cell are confined to that cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityProfile {
    pub density: f64,
    pub side: f64,
}

impl IntensityProfile {
    /// Mean number of points, `lambda_m * L^2`.
    pub fn mean_count(&self) -> f64 {
        self.density * self.side * self.side
    }

    /// Intensity value at a cell-local position.
    pub fn value(&self, local: Point) -> f64 {
        let h = self.side / 2.0;
        if local.x.abs() <= h && local.y.abs() <= h { self.density } else { 0.0 }
    }
}

fn uniform_in_cell(profile: &IntensityProfile, rng: &mut ChaCha8Rng) -> Point {
    let h = profile.side / 2.0;
    Point::new(rng.random_range(-h..h), rng.random_range(-h..h))
}

/// Samples one cell's mobiles: Poisson count, positions i.i.d. uniform.
/// Positions are cell-local (relative to the site).
pub fn sample_cell(profile: &IntensityProfile, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let n_mean = profile.mean_count();
    let count = if n_mean == 0.0 {
        0
    } else {
        Poisson::new(n_mean).expect("positive mean").sample(rng) as usize
    };
    (0..count).map(|_| uniform_in_cell(profile, rng)).collect()
}

/// Samples one cell's mobiles conditioned on the cell being non-empty
/// (zero-truncated Poisson count).
pub fn sample_cell_conditioned(profile: &IntensityProfile, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let count = zero_truncated_poisson(profile.mean_count(), rng);
    (0..count).map(|_| uniform_in_cell(profile, rng)).collect()
}

/// Zero-truncated Poisson sampler, `P(k) = e^-N N^k / (k! mu)` for k >= 1.
///
/// Inversion over the truncated pmf; exact for any mean for which `e^-N`
/// is representable, and above that threshold the truncation is vacuous.
pub fn zero_truncated_poisson(n_mean: f64, rng: &mut ChaCha8Rng) -> usize {
    assert!(n_mean > 0.0, "conditioning on a non-empty cell requires a positive mean");
    if n_mean > 700.0 {
        // exp(-n_mean) underflows; the zero class has no mass anyway.
        return Poisson::new(n_mean).expect("positive mean").sample(rng) as usize;
    }
    let mu = -(-n_mean).exp_m1();
    let u = rng.random::<f64>() * mu;
    let mut k = 1usize;
    let mut pk = (-n_mean).exp() * n_mean; // P(k = 1) before the mu division
    let mut cdf = pk;
    while cdf < u && k < 100_000 {
        k += 1;
        pk *= n_mean / k as f64;
        cdf += pk;
    }
    k
}

/// One cell of a realization.
#[derive(Debug, Clone)]
pub struct Cell {
    pub site: Point,
    pub dest: Point,
    /// Global mobile positions.
    pub mobiles: Vec<Point>,
}

/// A sampled network: the deterministic lattice with destinations, plus
/// one mobile point set per cell.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub cells: Vec<Cell>,
    pub origin: usize,
}

/// Draws a full realization for one trial.
///
/// Every cell's mobiles come from an independent substream keyed by the
/// cell index, so the realization is identical no matter how or where
/// trials are scheduled. With `condition_origin` the central cell's count
/// is zero-truncated; all other cells stay unconditioned.
pub fn realize_network(
    lattice: &LatticeSpec,
    profile: &IntensityProfile,
    dest_offset: Point,
    trial_seed: u64,
    condition_origin: bool,
) -> NetworkRealization {
    let sites = lattice_sites(lattice);
    let origin = lattice.origin_index();
    let cells = sites
        .into_iter()
        .enumerate()
        .map(|(c, site)| {
            let mut stream = rng::cell_stream(trial_seed, c as u64);
            let local = if condition_origin && c == origin {
                sample_cell_conditioned(profile, &mut stream)
            } else {
                sample_cell(profile, &mut stream)
            };
            Cell {
                site,
                dest: site.add(dest_offset),
                mobiles: local.into_iter().map(|p| site.add(p)).collect(),
            }
        })
        .collect();
    NetworkRealization { cells, origin }
}
