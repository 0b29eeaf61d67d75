//! Counter-based randomness.
//!
//! Every random quantity in a trial is a pure function of (base seed,
//! trial index, purpose), so trials can be evaluated in any order, on any
//! number of workers, and re-evaluated in isolation, always producing the
//! same numbers. Position sampling uses a ChaCha8 stream keyed per cell;
//! fading coefficients are hashed directly from (slot, transmitter,
//! receiver) identity so that a link's fade can be looked up lazily
//! without storing a matrix.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a context word into a seed, order-sensitively.
#[inline]
pub fn mix2(seed: u64, word: u64) -> u64 {
    mix(seed ^ mix(word))
}

/// Per-trial root seed.
#[inline]
pub fn trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    mix2(base_seed, trial_index ^ 0xD1B5_4A32_D192_ED03)
}

/// Stream for sampling the mobiles of one cell in one trial.
pub fn cell_stream(trial_seed: u64, cell_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix2(trial_seed, cell_index ^ 0xA076_1D64_78BD_642F))
}

/// Maps 64 random bits to a uniform in the open interval (0, 1).
///
/// 52 bits keep `k + 0.5` exactly representable, so the extremes map to
/// `2^-53` and `1 - 2^-53` instead of rounding onto the endpoints.
#[inline]
pub fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0)
}

/// Transmission slot of the two-hop protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

impl Slot {
    #[inline]
    fn salt(self) -> u64 {
        match self {
            Slot::First => 0x243F_6A88_85A3_08D3,
            Slot::Second => 0x1319_8A2E_0370_7344,
        }
    }
}

/// Compact identity of a transmitter or receiver.
///
/// Cells are numbered by their window index; mobiles carry their sample
/// index within the cell. The encoding is injective over any realistic
/// window, which is all the fading hash needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeId {
    Base { cell: u32 },
    Mobile { cell: u32, index: u32 },
    Destination { cell: u32 },
}

impl NodeId {
    #[inline]
    fn code(self) -> u64 {
        match self {
            NodeId::Base { cell } => (1 << 62) | cell as u64,
            NodeId::Mobile { cell, index } => (2 << 62) | ((cell as u64) << 30) | index as u64,
            NodeId::Destination { cell } => (3 << 62) | cell as u64,
        }
    }
}

/// Lazily evaluated field of i.i.d. unit-mean exponential power fades,
/// one per (slot, transmitter, receiver) triple, fixed within a trial.
#[derive(Debug, Clone, Copy)]
pub struct FadingField {
    key: u64,
}

impl FadingField {
    pub fn new(trial_seed: u64) -> Self {
        FadingField { key: mix2(trial_seed, 0xE703_7ED1_A0B4_28DB) }
    }

    /// Power fade on a directed link in a given slot.
    #[inline]
    pub fn power(&self, slot: Slot, tx: NodeId, rx: NodeId) -> f64 {
        let mut s = mix(self.key ^ slot.salt());
        s = mix(s ^ tx.code());
        s = mix(s ^ rx.code());
        -unit_open(s).ln()
    }
}
