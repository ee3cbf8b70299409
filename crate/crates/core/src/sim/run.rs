use rand::distr::Distribution as _;
use rand::Rng;
use rayon::prelude::*;

use super::codebook::{generate_codebook, typicality_decode, DecodeError};
use super::report::{Counters, ReportParts, SimConfig, SimMode, SimulationReport, TraceRow};
use super::{sample_iid, sampler, stream, ChannelSampler, Role, Transmission};
use crate::error::{Error, Result};
use crate::estimators::{comm_estimator, sensing_estimator, SensingEstimator};
use crate::prob::{marginal_input, ChannelSpec, ConditionalDistribution, Distribution, SourceSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CodingConfig {
    pub n: usize,
    pub rate: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub input: Distribution,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JsccConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub trace: bool,
}

struct Outcome {
    counters: Counters,
    row: TraceRow,
}

fn sensing_sums(spec: &ChannelSpec, est: &SensingEstimator, x: &[usize], t: &Transmission) -> (f64, f64) {
    x.iter()
        .zip(&t.s)
        .zip(&t.z)
        .map(|((&x, &s), &z)| spec.state_distortion(s, est.estimate(x, z)))
        .fold((0.0, 0.0), |(a, b), d| (a + d, b + d * d))
}

fn merge(outcomes: Vec<Outcome>, trace: bool) -> (Counters, Vec<TraceRow>) {
    let mut total = Counters::default();
    let mut rows = Vec::new();
    for o in outcomes {
        total.merge(&o.counters);
        if trace {
            rows.push(o.row);
        }
    }
    (total, rows)
}

/// Random coding with the optimal sensing estimator.
pub fn run_channel_coding_trial(spec: &ChannelSpec, config: &CodingConfig) -> Result<SimulationReport> {
    run_channel_coding_with(spec, config, &sensing_estimator(spec))
}

/// Random coding with an arbitrary sensing map at the transmitter.
pub fn run_channel_coding_with(
    spec: &ChannelSpec,
    config: &CodingConfig,
    estimator: &SensingEstimator,
) -> Result<SimulationReport> {
    if !(config.epsilon > 0.0) {
        return Err(Error::domain("epsilon", config.epsilon, "(0, inf)"));
    }
    if estimator.map().len() != spec.n_inputs() * spec.n_feedback() {
        return Err(Error::DimensionMismatch("sensing map does not fit the channel".into()));
    }
    let n = config.n;
    let codebook = generate_codebook(spec, &config.input, config.rate, n, config.seed)?;
    let channel = ChannelSampler::new(spec);

    let outcomes: Vec<Outcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(config.seed, Role::Trial, trial as u64);
            let w = rng.random_range(0..codebook.len());
            let x = codebook.codeword(w);
            let t = channel.transmit(x, &mut rng);
            let decoded = typicality_decode(spec, &codebook, &t.y, &t.s, config.epsilon);
            let (ds, ds_sq) = sensing_sums(spec, estimator, x, &t);
            let err = decoded != Ok(w);
            let counters = Counters {
                trials: 1,
                symbols: n as u64,
                errors: err.into(),
                decode_none: (decoded == Err(DecodeError::None)).into(),
                decode_ambiguous: matches!(decoded, Err(DecodeError::Ambiguous(_))).into(),
                decode_wrong: matches!(decoded, Ok(v) if v != w).into(),
                ds_sum: ds,
                ds_sq_sum: ds_sq,
                ds_sum_on_error: if err { ds } else { 0.0 },
                ..Counters::default()
            };
            Outcome {
                counters,
                row: TraceRow {
                    trial,
                    w: Some(w),
                    w_hat: decoded.ok(),
                    err,
                    ds: if n == 0 { 0.0 } else { ds / n as f64 },
                    du: None,
                },
            }
        })
        .collect();
    let (counters, trace) = merge(outcomes, config.trace);

    Ok(SimulationReport::assemble(ReportParts {
        config: SimConfig {
            mode: SimMode::RandomCoding,
            n,
            k: None,
            gamma: None,
            rate: Some(config.rate),
            epsilon: Some(config.epsilon),
            trials: config.trials,
            seed: config.seed,
            input: config.input.probs().to_vec(),
        },
        codebook_bits: Some(codebook.bits),
        codebook_sensing: Some({
            let (mean, var) = codebook.symbol_moments(estimator.cost());
            (mean, var / (codebook.len() * n.max(1)) as f64)
        }),
        counters,
        analytic_delta_s: estimator.expected_distortion(&config.input),
        analytic_delta_u: None,
        d_max_s: spec.max_state_distortion(),
        d_max_u: None,
        trace,
    }))
}

/// Uncoded scheme with `k = n`: `U_i -> X_i ~ P(X|U_i)`, the receiver applies
/// `u_hat*(s_i, y_i)` and the transmitter `s_hat*(x_i, z_i)`.
pub fn run_symbolwise_jscc(
    spec: &ChannelSpec,
    source: &SourceSpec,
    p_x_given_u: &ConditionalDistribution,
    config: &JsccConfig,
) -> Result<SimulationReport> {
    let comm = comm_estimator(spec, source, p_x_given_u)?;
    let sens = sensing_estimator(spec);
    let input = marginal_input(source.prior(), p_x_given_u)?;
    let encoders: Vec<_> = (0..p_x_given_u.rows()).map(|u| sampler(p_x_given_u.row(u))).collect();
    let channel = ChannelSampler::new(spec);
    let n = config.n;

    let outcomes: Vec<Outcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(config.seed, Role::Trial, trial as u64);
            let u = sample_iid(source.prior(), n, &mut rng);
            let x: Vec<usize> = u.iter().map(|&ui| encoders[ui].sample(&mut rng)).collect();
            let t = channel.transmit(&x, &mut rng);
            let (ds, ds_sq) = sensing_sums(spec, &sens, &x, &t);
            let (du, du_sq) = u
                .iter()
                .zip(&t.s)
                .zip(&t.y)
                .map(|((&u, &s), &y)| source.distortion(u, comm.estimate(s, y)))
                .fold((0.0, 0.0), |(a, b), d| (a + d, b + d * d));
            let per = |v: f64| if n == 0 { 0.0 } else { v / n as f64 };
            Outcome {
                counters: Counters {
                    trials: 1,
                    symbols: n as u64,
                    ds_sum: ds,
                    ds_sq_sum: ds_sq,
                    du_sum: du,
                    du_sq_sum: du_sq,
                    ..Counters::default()
                },
                row: TraceRow {
                    trial,
                    w: None,
                    w_hat: None,
                    err: false,
                    ds: per(ds),
                    du: Some(per(du)),
                },
            }
        })
        .collect();
    let (counters, trace) = merge(outcomes, config.trace);

    Ok(SimulationReport::assemble(ReportParts {
        config: SimConfig {
            mode: SimMode::Symbolwise,
            n,
            k: Some(n),
            gamma: Some(1.0),
            rate: None,
            epsilon: None,
            trials: config.trials,
            seed: config.seed,
            input: input.probs().to_vec(),
        },
        codebook_bits: None,
        codebook_sensing: None,
        counters,
        analytic_delta_s: sens.expected_distortion(&input),
        analytic_delta_u: Some(comm.distortion()),
        d_max_s: spec.max_state_distortion(),
        d_max_u: Some(source.max_distortion()),
        trace,
    }))
}

/// One uncoded block with i.i.d. inputs, for checking empirical joint types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensingBlock {
    pub x: Vec<usize>,
    pub transmission: Transmission,
}

pub fn sample_sensing_block(spec: &ChannelSpec, p_x: &Distribution, n: usize, seed: u64) -> SensingBlock {
    let mut rng = stream(seed, super::Role::Block, 1);
    let x = sample_iid(p_x, n, &mut rng);
    let transmission = ChannelSampler::new(spec).transmit(&x, &mut rng);
    SensingBlock { x, transmission }
}

/// Total variation between the empirical type of `(s, x, z, s_hat(x, z))` and
/// `P_S P_X P(z|s,x) 1{s_hat = estimator(x, z)}`.
pub fn sensing_joint_type_distance(
    spec: &ChannelSpec,
    p_x: &Distribution,
    estimator: &SensingEstimator,
    block: &SensingBlock,
) -> f64 {
    let (ns, nx, nz, ne) = (spec.n_states(), spec.n_inputs(), spec.n_feedback(), spec.n_estimates());
    let cell = |s: usize, x: usize, z: usize, t: usize| ((s * nx + x) * nz + z) * ne + t;
    let mut empirical = vec![0.0; ns * nx * nz * ne];
    let n = block.x.len() as f64;
    let t = &block.transmission;
    for ((&x, &s), &z) in block.x.iter().zip(&t.s).zip(&t.z) {
        empirical[cell(s, x, z, estimator.estimate(x, z))] += 1.0 / n;
    }
    let p_s = spec.state_prior().probs();
    let mut tv = 0.0;
    for s in 0..ns {
        for x in 0..nx {
            for z in 0..nz {
                for e in 0..ne {
                    let target = if e == estimator.estimate(x, z) {
                        p_s[s] * p_x.probs()[x] * spec.p_z_given_sx(z, s, x)
                    } else {
                        0.0
                    };
                    tv += (empirical[cell(s, x, z, e)] - target).abs();
                }
            }
        }
    }
    0.5 * tv
}
