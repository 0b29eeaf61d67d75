//! Monte-Carlo trial engine: realizes networks, plays both protocol
//! slots, and aggregates outcomes into reproducible estimates.
//!
//! Reproducibility contract: every estimate is a pure function of
//! (parameters, metric, trials, seed). All randomness is counter-based
//! per trial, and parallel aggregation folds fixed-size chunks in chunk
//! order, so results are bit-identical for any worker count.
//!
//! Two estimator families exist. The indicator estimators of
//! [`estimate_metric`] average raw success booleans and carry binomial
//! standard errors. The smoothed estimators of
//! [`estimate_metric_smoothed`] integrate the fades the measured cell
//! sees out of each trial in closed form — the direct link's signal
//! fade, and for relaying the origin cell's first-hop decode fades and
//! second-hop signal fades jointly — leaving an unbiased estimator of
//! the same probability with far lower variance; they exist for jobs
//! that need tight statistical resolution (diversity slopes, asymptote
//! comparisons) and report sample standard errors instead.

use rayon::prelude::*;

use crate::geometry::{lattice_sites, realize_network, NetworkRealization, Point};
use crate::rng::{mix2, trial_seed, unit_open, FadingField, NodeId, Slot};
use crate::SystemParams;

/// Who forwards in the second slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelayScheme {
    /// The base station itself resends.
    Retransmit,
    /// The decoded mobile closest to the destination; silent if none
    /// decoded.
    NearestToDestination,
    /// The decoded mobile with the strongest faded channel toward the
    /// destination in the second slot; silent if none decoded.
    BestChannel,
}

impl RelayScheme {
    pub const ALL: [RelayScheme; 3] =
        [RelayScheme::Retransmit, RelayScheme::NearestToDestination, RelayScheme::BestChannel];

    /// Stable lowercase name used by the CLI and CSV output.
    pub fn label(self) -> &'static str {
        match self {
            RelayScheme::Retransmit => "retransmit",
            RelayScheme::NearestToDestination => "nearest",
            RelayScheme::BestChannel => "best",
        }
    }

    /// Inverse of [`Self::label`].
    pub fn from_label(s: &str) -> Option<RelayScheme> {
        RelayScheme::ALL.into_iter().find(|k| k.label() == s)
    }
}

/// What an estimate measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Probability the destination decodes its base station in slot 1.
    DirectSuccess,
    /// Probability the second hop delivers (unconditioned).
    RelaySuccess(RelayScheme),
    /// Second-hop success given the origin cell holds at least one
    /// mobile.
    RelaySuccessGivenOccupied(RelayScheme),
    /// Either slot delivers: `1 - (1 - P_d)(1 - P_r)` with the
    /// unconditioned relay probability.
    TwoHopSuccess(RelayScheme),
    /// Outage ratio `(1 - P_d) / (1 - P_r|occupied)`.
    Gain(RelayScheme),
    /// `(P_s | occupied) log2(1 + theta) snr^-beta` per unit area.
    ThroughputDensity(RelayScheme),
}

/// A Monte-Carlo estimate with its provenance.
///
/// Probability metrics have `value` in `[0, 1]` and, from
/// [`estimate_metric`], the binomial standard error
/// `sqrt(p (1 - p) / trials)`; smoothed estimates carry the sample
/// standard error. Composite metrics (gain, throughput) propagate the
/// standard errors of their parts to first order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub metric: Metric,
    /// False only for a gain whose denominator vanished (every relay
    /// trial succeeded); `value` is then infinite.
    pub defined: bool,
}

/// Sweep protocol: a grid of (SNR, beta) points with the lattice density
/// coupled as `lambda_b = snr^-beta` at every point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// SNR grid in dB.
    pub snr_db: Vec<f64>,
    /// Density-scaling exponents; one output curve per entry.
    pub betas: Vec<f64>,
    pub scheme: RelayScheme,
    /// Trials per grid point.
    pub trials: u64,
    pub seed: u64,
}

/// Estimates at one sweep grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub beta: f64,
    pub lambda_b: f64,
    pub direct: Estimate,
    pub relay_cond: Estimate,
    /// Composed success `1 - (1 - p_d)(1 - p_r|occ)`.
    pub two_hop: Estimate,
    /// Empirical rate of both hops failing in the same conditioned
    /// trial; diagnostic only, the composition above treats the slots
    /// as independent.
    pub joint_fail: f64,
    pub joint_fail_stderr: f64,
}

/// Outcome of one two-hop trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoHopOutcome {
    /// Destination decoded its base station in slot 1.
    pub first_hop_direct: bool,
    /// Destination decoded the selected transmitter in slot 2.
    pub second_hop: bool,
    /// The origin cell held at least one mobile.
    pub origin_occupied: bool,
    /// The origin cell's decoded set was non-empty.
    pub origin_decoded: bool,
}

/// Decoded set of the origin cell in one trial, reduced to the
/// quantities the analytic side predicts laws for.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedSetSample {
    /// Cell-local position (relative to the serving base station) of
    /// each decoded mobile.
    pub positions: Vec<Point>,
    /// Distance from the base station to each decoded mobile.
    pub bs_distances: Vec<f64>,
    /// Distance from the destination to the nearest decoded mobile.
    pub contact_distance: Option<f64>,
}

/// Estimation failures.
#[derive(Debug, Clone, thiserror::Error)]
pub enum SimError {
    /// The slope fit had fewer than three usable points.
    #[error("slope fit needs at least 3 positive-error points, got {0}")]
    TooFewPoints(usize),
    /// The slope fit's SNR values were all equal.
    #[error("slope fit needs at least two distinct SNR values")]
    DegenerateGrid,
}

/// One direct-transmission trial: all base stations transmit, the origin
/// destination listens. Mobiles play no role in slot 1.
pub fn trial_direct(params: &SystemParams, trial_index: u64, base_seed: u64) -> bool {
    let ctx = DirectContext::new(params);
    ctx.success(&FadingField::new(trial_seed(base_seed, trial_index)))
}

/// One full two-hop trial with an unconditioned origin cell.
pub fn trial_two_hop(
    params: &SystemParams,
    scheme: RelayScheme,
    trial_index: u64,
    base_seed: u64,
) -> TwoHopOutcome {
    trial_two_hop_inner(params, scheme, trial_index, base_seed, false)
}

/// One full two-hop trial with the origin cell conditioned non-empty
/// (zero-truncated mobile count); every other cell stays unconditioned.
pub fn trial_two_hop_conditioned(
    params: &SystemParams,
    scheme: RelayScheme,
    trial_index: u64,
    base_seed: u64,
) -> TwoHopOutcome {
    trial_two_hop_inner(params, scheme, trial_index, base_seed, true)
}

fn trial_two_hop_inner(
    params: &SystemParams,
    scheme: RelayScheme,
    trial_index: u64,
    base_seed: u64,
    conditioned: bool,
) -> TwoHopOutcome {
    let seed = trial_seed(base_seed, trial_index);
    let net =
        realize_network(&params.lattice, &params.mobiles, params.dest_offset, seed, conditioned);
    let fading = FadingField::new(seed);
    outcome_with_mode(params, scheme, SelectMode::Scheme, &net, &fading, seed)
}

/// Plays both slots on a given realization. Exposed so that handcrafted
/// realizations can be pushed through the exact production decode path.
pub fn two_hop_outcome(
    params: &SystemParams,
    scheme: RelayScheme,
    net: &NetworkRealization,
    fading: &FadingField,
) -> TwoHopOutcome {
    outcome_with_mode(params, scheme, SelectMode::Scheme, net, fading, 0)
}

/// Decoded set of the origin cell in one unconditioned trial.
pub fn trial_decoded_set(
    params: &SystemParams,
    trial_index: u64,
    base_seed: u64,
) -> DecodedSetSample {
    let seed = trial_seed(base_seed, trial_index);
    let net = realize_network(&params.lattice, &params.mobiles, params.dest_offset, seed, false);
    let fading = FadingField::new(seed);
    let cell = &net.cells[net.origin];
    let mut positions = Vec::new();
    let mut bs_distances = Vec::new();
    let mut contact: Option<f64> = None;
    for m in 0..cell.mobiles.len() {
        if mobile_decodes(params, &net, net.origin, m, &fading) {
            positions.push(cell.mobiles[m].sub(cell.site));
            bs_distances.push(cell.mobiles[m].dist(cell.site));
            let d = cell.mobiles[m].dist(cell.dest);
            contact = Some(contact.map_or(d, |c: f64| c.min(d)));
        }
    }
    DecodedSetSample { positions, bs_distances, contact_distance: contact }
}

/// Indicator-based estimate of any metric at one parameter point.
///
/// Probability metrics average success booleans over `trials`
/// realizations. The composite metrics run the required probability
/// estimates on the same seed (sharing fades where links coincide) and
/// combine them: two-hop success composes the two slot probabilities,
/// gain takes the conditional outage ratio, throughput scales the
/// conditioned composition by `log2(1 + theta) snr^-beta`.
///
/// # Panics
/// On invalid parameters or `trials = 0`.
pub fn estimate_metric(params: &SystemParams, metric: Metric, trials: u64, seed: u64) -> Estimate {
    estimate_inner(params, metric, trials, seed, false)
}

/// Smoothed (conditionally averaged) estimate of any metric.
///
/// Instead of a boolean, each trial contributes the exact conditional
/// success probability given everything except the measured link's own
/// fade: the signal fade (direct and nearest schemes) or the whole
/// fade-maximum over the decoded set (best scheme) is integrated out in
/// closed form. The estimator is unbiased for the same quantity as
/// [`estimate_metric`] with variance lower by orders of magnitude in
/// outage regimes; `stderr` is the sample standard error.
///
/// # Panics
/// On invalid parameters or `trials = 0`.
pub fn estimate_metric_smoothed(
    params: &SystemParams,
    metric: Metric,
    trials: u64,
    seed: u64,
) -> Estimate {
    estimate_inner(params, metric, trials, seed, true)
}

fn estimate_inner(
    params: &SystemParams,
    metric: Metric,
    trials: u64,
    seed: u64,
    smoothed: bool,
) -> Estimate {
    params.validate().expect("invalid parameters");
    assert!(trials >= 1, "at least one trial is required");
    match metric {
        Metric::DirectSuccess => estimate_direct(params, trials, seed, smoothed),
        Metric::RelaySuccess(scheme) => {
            relay_run(params, scheme, SelectMode::Scheme, false, smoothed, trials, seed)
                .second(metric, seed)
        }
        Metric::RelaySuccessGivenOccupied(scheme) => {
            relay_run(params, scheme, SelectMode::Scheme, true, smoothed, trials, seed)
                .second(metric, seed)
        }
        Metric::TwoHopSuccess(scheme) => {
            let d = estimate_direct(params, trials, seed, smoothed);
            let r = estimate_inner(params, Metric::RelaySuccess(scheme), trials, seed, smoothed);
            compose_success(&d, &r, metric)
        }
        Metric::Gain(scheme) => {
            let d = estimate_direct(params, trials, seed, smoothed);
            let r = estimate_inner(
                params,
                Metric::RelaySuccessGivenOccupied(scheme),
                trials,
                seed,
                smoothed,
            );
            gain_from(&d, &r, metric, seed)
        }
        Metric::ThroughputDensity(scheme) => {
            let d = estimate_direct(params, trials, seed, smoothed);
            let r = estimate_inner(
                params,
                Metric::RelaySuccessGivenOccupied(scheme),
                trials,
                seed,
                smoothed,
            );
            let ps = compose_success(&d, &r, metric);
            let factor = (1.0 + params.theta).log2() * params.snr.powf(-params.beta);
            Estimate { value: ps.value * factor, stderr: ps.stderr * factor, ..ps }
        }
    }
}

/// Runs the full sweep protocol: at every (SNR, beta) grid point the
/// lattice density is set to `snr^-beta`, a point seed is derived from
/// the physics of the point (so identical points across sweeps agree),
/// and the direct, conditional-relay, and composed success probabilities
/// are estimated.
pub fn run_sweep(params: &SystemParams, spec: &SweepSpec) -> Vec<SweepPoint> {
    let mut out = Vec::with_capacity(spec.betas.len() * spec.snr_db.len());
    for &beta in &spec.betas {
        for &snr_db in &spec.snr_db {
            let snr = 10f64.powf(snr_db / 10.0);
            let p = params.at_sweep_point(snr, beta);
            let pseed = sweep_point_seed(spec.seed, snr, p.lattice.density);
            let direct = estimate_metric(&p, Metric::DirectSuccess, spec.trials, pseed);
            let run = relay_run(
                &p,
                spec.scheme,
                SelectMode::Scheme,
                true,
                false,
                spec.trials,
                pseed,
            );
            let relay_cond =
                run.second(Metric::RelaySuccessGivenOccupied(spec.scheme), pseed);
            let two_hop =
                compose_success(&direct, &relay_cond, Metric::TwoHopSuccess(spec.scheme));
            let (joint_fail, joint_fail_stderr) = run.joint_fail_rate();
            out.push(SweepPoint {
                snr_db,
                beta,
                lambda_b: p.lattice.density,
                direct,
                relay_cond,
                two_hop,
                joint_fail,
                joint_fail_stderr,
            });
        }
    }
    out
}

/// Deterministic per-point seed: a function of the base seed and the
/// point's physics only, so the same (snr, lambda_b) pair reproduces the
/// same estimate in any sweep.
pub fn sweep_point_seed(base_seed: u64, snr: f64, lambda_b: f64) -> u64 {
    mix2(mix2(base_seed, snr.to_bits()), lambda_b.to_bits())
}

/// Least-squares diversity slope: fits `log(error)` against `log(snr)`
/// over the given `(snr_linear, error)` points and returns the negated
/// slope. Zero or non-finite error values are excluded first.
pub fn fit_slope(curve: &[(f64, f64)]) -> Result<f64, SimError> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(s, e)| *e > 0.0 && e.is_finite() && *s > 0.0)
        .map(|&(s, e)| (s.ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(SimError::TooFewPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in pts {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
    }
    if sxx == 0.0 {
        return Err(SimError::DegenerateGrid);
    }
    Ok(-sxy / sxx)
}

/// Composition `1 - (1 - p_d)(1 - p_r)` of two slot probabilities, with
/// the binomial standard error of the composed value.
fn compose_success(direct: &Estimate, relay: &Estimate, metric: Metric) -> Estimate {
    let value = 1.0 - (1.0 - direct.value) * (1.0 - relay.value);
    let n = relay.trials as f64;
    Estimate {
        value,
        stderr: (value * (1.0 - value) / n).sqrt(),
        trials: relay.trials,
        seed: relay.seed,
        metric,
        defined: true,
    }
}

fn gain_from(direct: &Estimate, relay: &Estimate, metric: Metric, seed: u64) -> Estimate {
    let num = 1.0 - direct.value;
    let den = 1.0 - relay.value;
    if den == 0.0 {
        return Estimate {
            value: f64::INFINITY,
            stderr: f64::INFINITY,
            trials: relay.trials,
            seed,
            metric,
            defined: false,
        };
    }
    let value = num / den;
    // First-order error propagation for the ratio.
    let stderr = (direct.stderr / den).hypot(value * relay.stderr / den);
    Estimate { value, stderr, trials: relay.trials, seed, metric, defined: true }
}

/// Chunk size of the deterministic parallel reduction. Partial sums are
/// combined in ascending chunk order, making every estimate independent
/// of the worker count.
const CHUNK: u64 = 4096;

fn map_chunks<T: Send>(trials: u64, eval: impl Fn(u64, u64) -> T + Sync) -> Vec<T> {
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| eval(c * CHUNK, ((c + 1) * CHUNK).min(trials)))
        .collect()
}

fn estimate_direct(params: &SystemParams, trials: u64, seed: u64, smoothed: bool) -> Estimate {
    let ctx = DirectContext::new(params);
    let metric = Metric::DirectSuccess;
    if smoothed {
        let parts = map_chunks(trials, |lo, hi| {
            let mut s = 0.0;
            let mut q = 0.0;
            for t in lo..hi {
                let v = ctx.smoothed(&FadingField::new(trial_seed(seed, t)));
                s += v;
                q += v * v;
            }
            (s, q)
        });
        let (sum, sumsq) = parts.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        sample_estimate(metric, sum, sumsq, trials, seed)
    } else {
        let parts = map_chunks(trials, |lo, hi| {
            let mut k = 0u64;
            for t in lo..hi {
                k += ctx.success(&FadingField::new(trial_seed(seed, t))) as u64;
            }
            k
        });
        bernoulli_estimate(metric, parts.into_iter().sum(), trials, seed)
    }
}

fn bernoulli_estimate(metric: Metric, successes: u64, trials: u64, seed: u64) -> Estimate {
    let n = trials as f64;
    let p = successes as f64 / n;
    Estimate { value: p, stderr: (p * (1.0 - p) / n).sqrt(), trials, seed, metric, defined: true }
}

fn sample_estimate(metric: Metric, sum: f64, sumsq: f64, trials: u64, seed: u64) -> Estimate {
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 { ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Estimate { value: mean, stderr: (var / n).sqrt(), trials, seed, metric, defined: true }
}

/// Precomputed geometry of the direct link: gains never change across
/// trials, so a trial reduces to drawing one fade per base station.
struct DirectContext {
    theta: f64,
    nop: f64,
    signal_gain: f64,
    origin_cell: u32,
    /// (cell index, gain toward the origin destination) per interferer.
    interferers: Vec<(u32, f64)>,
}

impl DirectContext {
    fn new(params: &SystemParams) -> DirectContext {
        let sites = lattice_sites(&params.lattice);
        let origin = params.lattice.origin_index();
        let z = sites[origin].add(params.dest_offset);
        let pl = params.path_loss;
        let interferers = sites
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != origin)
            .map(|(c, s)| (c as u32, pl.gain2(s.dist2(z))))
            .collect();
        DirectContext {
            theta: params.theta,
            nop: params.noise_over_p(),
            signal_gain: pl.gain2(sites[origin].dist2(z)),
            origin_cell: origin as u32,
            interferers,
        }
    }

    fn denom(&self, fading: &FadingField) -> f64 {
        let rx = NodeId::Destination { cell: self.origin_cell };
        let mut denom = self.nop;
        for &(c, g) in &self.interferers {
            denom += fading.power(Slot::First, NodeId::Base { cell: c }, rx) * g;
        }
        denom
    }

    fn success(&self, fading: &FadingField) -> bool {
        let rx = NodeId::Destination { cell: self.origin_cell };
        let s = fading.power(Slot::First, NodeId::Base { cell: self.origin_cell }, rx)
            * self.signal_gain;
        let denom = self.denom(fading);
        if denom == 0.0 { s > 0.0 } else { s / denom > self.theta }
    }

    /// Success probability given the interference, the signal fade
    /// integrated out: `exp(-theta (nop + I) / ell(R))`.
    fn smoothed(&self, fading: &FadingField) -> f64 {
        (-self.theta * self.denom(fading) / self.signal_gain).exp()
    }
}

/// How the slot-2 transmitter is picked among decoded mobiles. The
/// uniform mode exists only as a stochastic baseline for tests of the
/// selection schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SelectMode {
    Scheme,
    RandomUniform,
}

const PICK_SALT: u64 = 0x9216_D5D9_8979_FB1B;

/// What a cell puts on the air in slot 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pick {
    Mobile(usize),
    Base,
    Silent,
}

fn mobile_decodes(
    params: &SystemParams,
    net: &NetworkRealization,
    a: usize,
    m: usize,
    fading: &FadingField,
) -> bool {
    let pos = net.cells[a].mobiles[m];
    let rx = NodeId::Mobile { cell: a as u32, index: m as u32 };
    let pl = params.path_loss;
    let sig = fading.power(Slot::First, NodeId::Base { cell: a as u32 }, rx)
        * pl.gain2(pos.dist2(net.cells[a].site));
    let mut denom = params.noise_over_p();
    for (b, other) in net.cells.iter().enumerate() {
        if b != a {
            denom += fading.power(Slot::First, NodeId::Base { cell: b as u32 }, rx)
                * pl.gain2(pos.dist2(other.site));
        }
    }
    if denom == 0.0 { sig > 0.0 } else { sig / denom > params.theta }
}

fn select_transmitter(
    params: &SystemParams,
    net: &NetworkRealization,
    a: usize,
    scheme: RelayScheme,
    mode: SelectMode,
    fading: &FadingField,
    pick_seed: u64,
) -> Pick {
    if scheme == RelayScheme::Retransmit {
        return Pick::Base;
    }
    let cell = &net.cells[a];
    if mode == SelectMode::RandomUniform {
        let decoded: Vec<usize> = (0..cell.mobiles.len())
            .filter(|&m| mobile_decodes(params, net, a, m, fading))
            .collect();
        if decoded.is_empty() {
            return Pick::Silent;
        }
        let u = unit_open(mix2(pick_seed, PICK_SALT ^ a as u64));
        return Pick::Mobile(decoded[((u * decoded.len() as f64) as usize).min(decoded.len() - 1)]);
    }
    let pl = params.path_loss;
    let mut best: Option<(usize, f64)> = None;
    for m in 0..cell.mobiles.len() {
        if !mobile_decodes(params, net, a, m, fading) {
            continue;
        }
        let score = match scheme {
            RelayScheme::NearestToDestination => -cell.mobiles[m].dist2(cell.dest),
            RelayScheme::BestChannel => {
                fading.power(
                    Slot::Second,
                    NodeId::Mobile { cell: a as u32, index: m as u32 },
                    NodeId::Destination { cell: a as u32 },
                ) * pl.gain2(cell.mobiles[m].dist2(cell.dest))
            }
            RelayScheme::Retransmit => unreachable!(),
        };
        // Strict improvement keeps the lowest index on (measure-zero)
        // ties.
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((m, score));
        }
    }
    match best {
        Some((m, _)) => Pick::Mobile(m),
        None => Pick::Silent,
    }
}

fn outcome_with_mode(
    params: &SystemParams,
    scheme: RelayScheme,
    mode: SelectMode,
    net: &NetworkRealization,
    fading: &FadingField,
    pick_seed: u64,
) -> TwoHopOutcome {
    let origin = net.origin;
    let origin_cell = &net.cells[origin];
    let pl = params.path_loss;
    let z = origin_cell.dest;
    let rx = NodeId::Destination { cell: origin as u32 };

    // Slot 1 at the destination (same fades as a direct-only trial).
    let first_sig = fading.power(Slot::First, NodeId::Base { cell: origin as u32 }, rx)
        * pl.gain2(origin_cell.site.dist2(z));
    let mut first_denom = params.noise_over_p();
    for (b, other) in net.cells.iter().enumerate() {
        if b != origin {
            first_denom += fading.power(Slot::First, NodeId::Base { cell: b as u32 }, rx)
                * pl.gain2(other.site.dist2(z));
        }
    }
    let first_hop_direct = if first_denom == 0.0 {
        first_sig > 0.0
    } else {
        first_sig / first_denom > params.theta
    };

    let origin_decoded = (0..origin_cell.mobiles.len())
        .any(|m| mobile_decodes(params, net, origin, m, fading));

    // Slot 2: selection everywhere, measurement at the origin
    // destination only.
    let own = select_transmitter(params, net, origin, scheme, mode, fading, pick_seed);
    let second_hop = match own {
        Pick::Silent => false,
        _ => {
            let (tx, pos) = match own {
                Pick::Base => (NodeId::Base { cell: origin as u32 }, origin_cell.site),
                Pick::Mobile(i) => (
                    NodeId::Mobile { cell: origin as u32, index: i as u32 },
                    origin_cell.mobiles[i],
                ),
                Pick::Silent => unreachable!(),
            };
            let sig = fading.power(Slot::Second, tx, rx) * pl.gain2(pos.dist2(z));
            let denom = params.noise_over_p() + interference_at_origin(params, net, scheme, mode, fading, pick_seed);
            if denom == 0.0 { sig > 0.0 } else { sig / denom > params.theta }
        }
    };

    TwoHopOutcome {
        first_hop_direct,
        second_hop,
        origin_occupied: !origin_cell.mobiles.is_empty(),
        origin_decoded,
    }
}

/// Slot-2 interference power (per unit transmit power) at the origin
/// destination from every other cell's selected transmitter.
fn interference_at_origin(
    params: &SystemParams,
    net: &NetworkRealization,
    scheme: RelayScheme,
    mode: SelectMode,
    fading: &FadingField,
    pick_seed: u64,
) -> f64 {
    let z = net.cells[net.origin].dest;
    let rx = NodeId::Destination { cell: net.origin as u32 };
    let pl = params.path_loss;
    let mut total = 0.0;
    for (a, cell) in net.cells.iter().enumerate() {
        if a == net.origin {
            continue;
        }
        let (tx, pos) = match select_transmitter(params, net, a, scheme, mode, fading, pick_seed) {
            Pick::Silent => continue,
            Pick::Base => (NodeId::Base { cell: a as u32 }, cell.site),
            Pick::Mobile(i) => {
                (NodeId::Mobile { cell: a as u32, index: i as u32 }, cell.mobiles[i])
            }
        };
        total += fading.power(Slot::Second, tx, rx) * pl.gain2(pos.dist2(z));
    }
    total
}

/// Second-hop success probability given the realization and the slot-2
/// interference, with every fade the origin cell sees averaged out in
/// closed form.
///
/// Given the geometry, the origin's mobiles decode independently (their
/// fade sets are disjoint) with the Rayleigh probability `p_m` — the
/// noise factor times the interference product over foreign sites — and
/// a candidate at slot-2 gain `g` succeeds with `e_m = exp(-theta (nop +
/// I2) / g)`, independent of its decode event. Retransmission keeps only
/// the signal-fade average; the nearest rule decomposes failure over the
/// distance order; the best rule succeeds iff any decoded candidate's
/// independent fade clears the threshold, so `fail = prod_m (1 - p_m
/// e_m)`. Interfering cells keep their actual draws throughout, so the
/// slot-2 interference stays a genuine sample.
fn smoothed_second_hop(
    params: &SystemParams,
    net: &NetworkRealization,
    scheme: RelayScheme,
    fading: &FadingField,
) -> f64 {
    let origin = net.origin;
    let cell = &net.cells[origin];
    let pl = params.path_loss;
    let z = cell.dest;
    let denom = params.noise_over_p()
        + interference_at_origin(params, net, scheme, SelectMode::Scheme, fading, 0);
    let threshold = params.theta * denom;
    if scheme == RelayScheme::Retransmit {
        return (-threshold / pl.gain2(cell.site.dist2(z))).exp();
    }

    // Candidates with (distance² to dest, decode prob, slot-2 success).
    let mut cand: Vec<(f64, f64, f64)> = cell
        .mobiles
        .iter()
        .map(|&pos| {
            let inv_g = pl.inv_gain2(pos.dist2(cell.site));
            let mut log_p = -params.theta * params.noise_over_p() * inv_g;
            for (b, other) in net.cells.iter().enumerate() {
                if b != origin {
                    log_p -=
                        (params.theta * pl.gain2(pos.dist2(other.site)) * inv_g).ln_1p();
                }
            }
            let e = (-threshold * pl.inv_gain2(pos.dist2(z))).exp();
            (pos.dist2(z), log_p.exp(), e)
        })
        .collect();
    match scheme {
        RelayScheme::Retransmit => unreachable!(),
        RelayScheme::NearestToDestination => {
            cand.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut success = 0.0;
            let mut none_closer = 1.0;
            for &(_, p, e) in &cand {
                success += none_closer * p * e;
                none_closer *= 1.0 - p;
            }
            success
        }
        RelayScheme::BestChannel => {
            let mut fail = 1.0;
            for &(_, p, e) in &cand {
                fail *= 1.0 - p * e;
            }
            1.0 - fail
        }
    }
}

/// Aggregated sums over one batch of two-hop trials.
#[derive(Debug, Clone, Copy, Default)]
struct TrialSums {
    second: f64,
    second_sq: f64,
    first_successes: u64,
    joint_fails: u64,
    n: u64,
}

impl TrialSums {
    fn merge(a: TrialSums, b: TrialSums) -> TrialSums {
        TrialSums {
            second: a.second + b.second,
            second_sq: a.second_sq + b.second_sq,
            first_successes: a.first_successes + b.first_successes,
            joint_fails: a.joint_fails + b.joint_fails,
            n: a.n + b.n,
        }
    }
}

struct RelayRun {
    sums: TrialSums,
    trials: u64,
    smoothed: bool,
}

impl RelayRun {
    fn second(&self, metric: Metric, seed: u64) -> Estimate {
        if self.smoothed {
            sample_estimate(metric, self.sums.second, self.sums.second_sq, self.trials, seed)
        } else {
            bernoulli_estimate(metric, self.sums.second as u64, self.trials, seed)
        }
    }

    fn joint_fail_rate(&self) -> (f64, f64) {
        let n = self.trials as f64;
        let p = self.sums.joint_fails as f64 / n;
        (p, (p * (1.0 - p) / n).sqrt())
    }
}

fn relay_run(
    params: &SystemParams,
    scheme: RelayScheme,
    mode: SelectMode,
    conditioned: bool,
    smoothed: bool,
    trials: u64,
    seed: u64,
) -> RelayRun {
    let parts = map_chunks(trials, |lo, hi| {
        let mut acc = TrialSums::default();
        for t in lo..hi {
            let s = trial_seed(seed, t);
            let net = realize_network(
                &params.lattice,
                &params.mobiles,
                params.dest_offset,
                s,
                conditioned,
            );
            let fading = FadingField::new(s);
            if smoothed {
                let v = smoothed_second_hop(params, &net, scheme, &fading);
                acc.second += v;
                acc.second_sq += v * v;
            } else {
                let o = outcome_with_mode(params, scheme, mode, &net, &fading, s);
                acc.second += o.second_hop as u64 as f64;
                acc.first_successes += o.first_hop_direct as u64;
                acc.joint_fails += (!o.first_hop_direct && !o.second_hop) as u64;
            }
            acc.n += 1;
        }
        acc
    });
    let sums = parts.into_iter().fold(TrialSums::default(), TrialSums::merge);
    RelayRun { sums, trials, smoothed }
}
