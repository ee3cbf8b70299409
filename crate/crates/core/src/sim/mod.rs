//! Monte Carlo simulation of the random-coding scheme and of the uncoded
//! symbolwise scheme.
//!
//! Every random draw comes from a ChaCha8 stream keyed by `(seed, role, index)`,
//! so trials can run in any order or in parallel and still reproduce bit for bit.

mod codebook;
mod report;
mod run;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::prob::{ChannelSpec, Distribution};

pub use codebook::{generate_codebook, typicality_decode, Codebook, DecodeError, MAX_CODEBOOK_BITS};
pub use report::{Counters, SimConfig, SimMode, SimulationReport, TraceRow};
pub use run::{
    run_channel_coding_trial, run_channel_coding_with, run_symbolwise_jscc, sample_sensing_block,
    sensing_joint_type_distance, CodingConfig, JsccConfig, SensingBlock,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Role {
    Codeword = 1,
    Trial = 2,
    Block = 3,
}

/// The stream for one codeword, trial or block.
pub(crate) fn stream(seed: u64, role: Role, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((role as u64) << 56) ^ index);
    rng
}

pub(crate) fn sampler(p: &[f64]) -> WeightedIndex<f64> {
    WeightedIndex::new(p).expect("validated distribution")
}

/// State, output and feedback sequences of one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub s: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

/// Samplers for `P_S` and for `(Y, Z)` given each `(s, x)`.
#[derive(Debug, Clone)]
pub(crate) struct ChannelSampler {
    n_inputs: usize,
    n_feedback: usize,
    state: WeightedIndex<f64>,
    /// Indexed `s * n_inputs + x`, over the flattened `(y, z)` pair.
    outputs: Vec<WeightedIndex<f64>>,
}

impl ChannelSampler {
    pub(crate) fn new(spec: &ChannelSpec) -> Self {
        let (ns, nx, ny, nz) = (spec.n_states(), spec.n_inputs(), spec.n_outputs(), spec.n_feedback());
        let outputs = (0..ns * nx)
            .map(|i| {
                let (s, x) = (i / nx, i % nx);
                let row: Vec<f64> = (0..ny * nz).map(|j| spec.law(s, x, j / nz, j % nz)).collect();
                sampler(&row)
            })
            .collect();
        Self {
            n_inputs: nx,
            n_feedback: nz,
            state: sampler(spec.state_prior().probs()),
            outputs,
        }
    }

    pub(crate) fn transmit(&self, x: &[usize], rng: &mut ChaCha8Rng) -> Transmission {
        let mut out = Transmission {
            s: Vec::with_capacity(x.len()),
            y: Vec::with_capacity(x.len()),
            z: Vec::with_capacity(x.len()),
        };
        for &xi in x {
            let s = self.state.sample(rng);
            let yz = self.outputs[s * self.n_inputs + xi].sample(rng);
            out.s.push(s);
            out.y.push(yz / self.n_feedback);
            out.z.push(yz % self.n_feedback);
        }
        out
    }
}

/// Sends `x` through the memoryless channel using the stream keyed by `seed`.
///
/// # Panics
/// If an entry of `x` is not an input index.
pub fn transmit(spec: &ChannelSpec, x: &[usize], seed: u64) -> Transmission {
    assert!(x.iter().all(|&v| v < spec.n_inputs()), "input index out of range");
    ChannelSampler::new(spec).transmit(x, &mut stream(seed, Role::Block, 0))
}

/// `n` i.i.d. draws from `p`.
pub(crate) fn sample_iid(p: &Distribution, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let d = sampler(p.probs());
    (0..n).map(|_| d.sample(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::build_binary_isac_channel;

    #[test]
    fn zero_input_silences_channel() {
        let spec = build_binary_isac_channel(0.4).unwrap();
        let t = transmit(&spec, &[0; 200], 3);
        assert!(t.y.iter().all(|&v| v == 0));
        assert_eq!(t.y, t.z);
        assert!(t.s.iter().any(|&v| v == 1));
    }

    #[test]
    fn unit_input_reveals_state() {
        let spec = build_binary_isac_channel(0.4).unwrap();
        let t = transmit(&spec, &[1; 200], 3);
        assert_eq!(t.y, t.s);
        assert_eq!(t.z, t.s);
    }

    #[test]
    fn streams_are_distinct_and_repeatable() {
        use rand::Rng;
        let a: u64 = stream(1, Role::Trial, 0).random();
        let b: u64 = stream(1, Role::Trial, 1).random();
        let c: u64 = stream(1, Role::Codeword, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, stream(1, Role::Trial, 0).random::<u64>());
    }
}
