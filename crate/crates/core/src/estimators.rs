//! Symbolwise Bayes estimators: the state estimate `s_hat*(x, z)` at the
//! transmitter, the source reconstruction `u_hat*(s, y)` at the receiver, and
//! their per-input expected distortions `c(x)` and `d(x)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::prob::{marginal_input, ChannelSpec, ConditionalDistribution, Distribution, SourceSpec};

/// `P(s | x, z)` from the state prior and the feedback marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorTable {
    n_states: usize,
    n_inputs: usize,
    n_feedback: usize,
    /// Indexed `[x][z][s]`.
    values: Vec<f64>,
    /// `P(z | x) = sum_s P_S(s) P(z | s, x)`.
    evidence: Vec<f64>,
}

impl PosteriorTable {
    pub fn get(&self, s: usize, x: usize, z: usize) -> f64 {
        self.values[(x * self.n_feedback + z) * self.n_states + s]
    }

    pub fn row(&self, x: usize, z: usize) -> &[f64] {
        let at = (x * self.n_feedback + z) * self.n_states;
        &self.values[at..at + self.n_states]
    }

    pub fn evidence(&self, x: usize, z: usize) -> f64 {
        self.evidence[x * self.n_feedback + z]
    }

    /// False when `(x, z)` has zero probability; the row then holds the prior.
    pub fn reachable(&self, x: usize, z: usize) -> bool {
        self.evidence(x, z) > 0.0
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_feedback(&self) -> usize {
        self.n_feedback
    }
}

pub fn posterior(spec: &ChannelSpec) -> PosteriorTable {
    let (ns, nx, nz) = (spec.n_states(), spec.n_inputs(), spec.n_feedback());
    let prior = spec.state_prior().probs();
    let mut values = Vec::with_capacity(nx * nz * ns);
    let mut evidence = Vec::with_capacity(nx * nz);
    for x in 0..nx {
        for z in 0..nz {
            let joint: Vec<f64> = (0..ns)
                .map(|s| prior[s] * spec.p_z_given_sx(z, s, x))
                .collect();
            let total: f64 = joint.iter().sum();
            evidence.push(total);
            if total > 0.0 {
                values.extend(joint.iter().map(|j| j / total));
            } else {
                values.extend_from_slice(prior);
            }
        }
    }
    PosteriorTable {
        n_states: ns,
        n_inputs: nx,
        n_feedback: nz,
        values,
        evidence,
    }
}

/// `argmin_t sum_i weights[i] * dist(i, t)`, lowest index on ties.
pub(crate) fn bayes_choice(weights: &[f64], n_choices: usize, dist: impl Fn(usize, usize) -> f64) -> usize {
    let risk = |t: usize| -> f64 { weights.iter().enumerate().map(|(i, w)| w * dist(i, t)).sum() };
    let mut best = (0, risk(0));
    for t in 1..n_choices {
        let risk = risk(t);
        if risk < best.1 - 1e-12 * best.1.abs().max(1.0) {
            best = (t, risk);
        }
    }
    best.0
}

/// Transmitter-side state estimator `s_hat*(x, z)` with its cost `c(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingEstimator {
    n_feedback: usize,
    map: Vec<usize>,
    reachable: Vec<bool>,
    cost: Vec<f64>,
}

impl SensingEstimator {
    /// Builds an estimator from an arbitrary map `[x][z] -> s_hat`, evaluating its
    /// per-input cost under the channel. Used to compare against the optimum.
    pub fn from_map(spec: &ChannelSpec, map: Vec<usize>) -> Result<Self> {
        let (nx, nz) = (spec.n_inputs(), spec.n_feedback());
        if map.len() != nx * nz {
            return Err(Error::DimensionMismatch(format!(
                "sensing map has {} entries, expected {}",
                map.len(),
                nx * nz
            )));
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= spec.n_estimates()) {
            return Err(Error::DimensionMismatch(format!(
                "sensing map entry {bad} is not a state estimate"
            )));
        }
        let post = posterior(spec);
        let reachable = (0..nx)
            .flat_map(|x| (0..nz).map(move |z| (x, z)))
            .map(|(x, z)| post.reachable(x, z))
            .collect();
        let cost = sensing_cost(spec, &map);
        Ok(Self {
            n_feedback: nz,
            map,
            reachable,
            cost,
        })
    }

    pub fn estimate(&self, x: usize, z: usize) -> usize {
        self.map[x * self.n_feedback + z]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn reachable(&self, x: usize, z: usize) -> bool {
        self.reachable[x * self.n_feedback + z]
    }

    /// `c(x) = E[d(S, s_hat(X, Z)) | X = x]`.
    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    /// `sum_x P_X(x) c(x)`.
    pub fn expected_distortion(&self, p_x: &Distribution) -> f64 {
        p_x.expect(&self.cost)
    }

    /// One row per `(x, z)`: `x,z,s_hat,reachable`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,z,s_hat,reachable\n");
        for (i, t) in self.map.iter().enumerate() {
            let (x, z) = (i / self.n_feedback, i % self.n_feedback);
            let _ = writeln!(out, "{x},{z},{t},{}", self.reachable[i]);
        }
        out
    }
}

fn sensing_cost(spec: &ChannelSpec, map: &[usize]) -> Vec<f64> {
    let (ns, nx, nz) = (spec.n_states(), spec.n_inputs(), spec.n_feedback());
    let prior = spec.state_prior().probs();
    (0..nx)
        .map(|x| {
            let mut c = 0.0;
            for s in 0..ns {
                for z in 0..nz {
                    let w = prior[s] * spec.p_z_given_sx(z, s, x);
                    if w > 0.0 {
                        c += w * spec.state_distortion(s, map[x * nz + z]);
                    }
                }
            }
            c
        })
        .collect()
}

/// The distortion-minimizing symbolwise state estimator.
pub fn sensing_estimator(spec: &ChannelSpec) -> SensingEstimator {
    let post = posterior(spec);
    let (nx, nz) = (spec.n_inputs(), spec.n_feedback());
    let mut map = Vec::with_capacity(nx * nz);
    let mut reachable = Vec::with_capacity(nx * nz);
    for x in 0..nx {
        for z in 0..nz {
            map.push(bayes_choice(post.row(x, z), spec.n_estimates(), |s, t| {
                spec.state_distortion(s, t)
            }));
            reachable.push(post.reachable(x, z));
        }
    }
    let cost = sensing_cost(spec, &map);
    SensingEstimator {
        n_feedback: nz,
        map,
        reachable,
        cost,
    }
}

/// `sum_x P_X(x) c(x)` under the optimal state estimator.
pub fn expected_sensing_distortion(spec: &ChannelSpec, p_x: &Distribution) -> Result<f64> {
    if p_x.len() != spec.n_inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input distribution has {} entries, the channel has {} inputs",
            p_x.len(),
            spec.n_inputs()
        )));
    }
    Ok(sensing_estimator(spec).expected_distortion(p_x))
}

/// Receiver-side reconstruction `u_hat*(s, y)` for a fixed encoder kernel.
///
/// `cost()` is `d(x)`, a functional of the encoder passed in: the posterior
/// `P(u | y, s)` it is built from depends on `P(x | u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommEstimator {
    n_outputs: usize,
    map: Vec<usize>,
    reachable: Vec<bool>,
    cost: Vec<f64>,
    input: Distribution,
    distortion: f64,
}

impl CommEstimator {
    pub fn estimate(&self, s: usize, y: usize) -> usize {
        self.map[s * self.n_outputs + y]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn reachable(&self, s: usize, y: usize) -> bool {
        self.reachable[s * self.n_outputs + y]
    }

    /// True when some `(s, y)` pair carries no probability; its entry is the
    /// zero-rate guess under the source prior.
    pub fn has_unreachable(&self) -> bool {
        self.reachable.iter().any(|r| !r)
    }

    /// `d(x) = E[d(U, u_hat*(S, Y)) | X = x]`.
    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    /// Input marginal `P_X` induced by the encoder.
    pub fn input(&self) -> &Distribution {
        &self.input
    }

    /// `D_u = sum_x P_X(x) d(x)`.
    pub fn distortion(&self) -> f64 {
        self.distortion
    }

    /// One row per `(s, y)`: `s,y,u_hat,reachable`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,y,u_hat,reachable\n");
        for (i, r) in self.map.iter().enumerate() {
            let (s, y) = (i / self.n_outputs, i % self.n_outputs);
            let _ = writeln!(out, "{s},{y},{r},{}", self.reachable[i]);
        }
        out
    }
}

pub fn comm_estimator(
    spec: &ChannelSpec,
    source: &SourceSpec,
    p_x_given_u: &ConditionalDistribution,
) -> Result<CommEstimator> {
    let (ns, nx, ny) = (spec.n_states(), spec.n_inputs(), spec.n_outputs());
    let nu = source.n_symbols();
    if p_x_given_u.rows() != nu || p_x_given_u.cols() != nx {
        return Err(Error::DimensionMismatch(format!(
            "encoder is {}x{}, expected {nu}x{nx}",
            p_x_given_u.rows(),
            p_x_given_u.cols()
        )));
    }
    let p_u = source.prior().probs();
    let p_s = spec.state_prior().probs();
    let input = marginal_input(source.prior(), p_x_given_u)?;

    let mut map = Vec::with_capacity(ns * ny);
    let mut reachable = Vec::with_capacity(ns * ny);
    for s in 0..ns {
        for y in 0..ny {
            let weights: Vec<f64> = (0..nu)
                .map(|u| {
                    (0..nx)
                        .map(|x| p_u[u] * p_x_given_u.get(u, x) * p_s[s] * spec.p_y_given_sx(y, s, x))
                        .sum()
                })
                .collect();
            let live = weights.iter().sum::<f64>() > 0.0;
            let weights = if live { &weights[..] } else { p_u };
            map.push(bayes_choice(weights, source.n_reconstructions(), |u, r| {
                source.distortion(u, r)
            }));
            reachable.push(live);
        }
    }

    let cost: Vec<f64> = (0..nx)
        .map(|x| {
            let px = input.probs()[x];
            let mut dx = 0.0;
            for u in 0..nu {
                let pu_given_x = if px > 0.0 {
                    p_u[u] * p_x_given_u.get(u, x) / px
                } else {
                    p_u[u]
                };
                if pu_given_x == 0.0 {
                    continue;
                }
                for s in 0..ns {
                    for y in 0..ny {
                        let w = p_s[s] * spec.p_y_given_sx(y, s, x);
                        if w > 0.0 {
                            dx += pu_given_x * w * source.distortion(u, map[s * ny + y]);
                        }
                    }
                }
            }
            dx
        })
        .collect();
    let distortion = input.expect(&cost);
    Ok(CommEstimator {
        n_outputs: ny,
        map,
        reachable,
        cost,
        input,
        distortion,
    })
}
