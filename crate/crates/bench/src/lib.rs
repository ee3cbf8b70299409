//! Fixed inputs shared by the benchmarks.

use isac_core::prob::random::{random_channel, random_source};
use isac_core::{ChannelSpec, SourceSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A dense `|S| = |X| = |Y| = |Z| = 4` channel, the same on every call.
pub fn dense_channel() -> ChannelSpec {
    random_channel(&mut ChaCha8Rng::seed_from_u64(11), (4, 4, 4, 4))
}

/// A 4-letter source with 4 reconstructions, the same on every call.
pub fn dense_source() -> SourceSpec {
    random_source(&mut ChaCha8Rng::seed_from_u64(12), 4, 4)
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
