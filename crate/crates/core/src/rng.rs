//! Deterministic counter-based random source.
//!
//! Draws are pure functions of `(seed, trial, counter, lane)`, so ensembles
//! are reproducible regardless of execution order and trials can run
//! concurrently without shared state. The generator is the splitmix64
//! output function applied to a per-trial base key plus a Weyl increment
//! per counter position; distinct trials get independently mixed base keys.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const TRIAL_SALT: u64 = 0xa076_1d64_78bd_642f;

/// splitmix64 finalizer (Stafford mix 13).
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn to_unit(word: u64) -> f64 {
    // 53 high bits -> [0, 1)
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One trial's substream of uniform variates, indexed by a step counter.
#[derive(Debug, Clone, Copy)]
pub struct TrialStream {
    key: u64,
}

impl TrialStream {
    pub fn new(seed: u64, trial: u64) -> Self {
        let key = mix(mix(seed ^ TRIAL_SALT) ^ trial.wrapping_mul(GOLDEN));
        TrialStream { key }
    }

    /// Uniform draw in [0, 1) at counter position `ctr`, lane 0 or 1.
    #[inline]
    pub fn uniform(&self, ctr: u64, lane: u64) -> f64 {
        let pos = ctr.wrapping_mul(2).wrapping_add(lane & 1);
        to_unit(mix(self.key.wrapping_add(pos.wrapping_mul(GOLDEN))))
    }

    /// Both lanes at one counter position.
    #[inline]
    pub fn uniform_pair(&self, ctr: u64) -> (f64, f64) {
        (self.uniform(ctr, 0), self.uniform(ctr, 1))
    }
}
