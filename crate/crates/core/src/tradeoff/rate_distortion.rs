use std::cell::Cell;

use rayon::prelude::*;

use super::blahut::BaOptions;
use super::multiplier::{meet_budget, Mixable, Search};
use super::{chord_violations, Curvature, FLOOR_SLACK, TOL_CONSTRAINT};
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::info::log2_sum_exp2;
use crate::prob::{ConditionalDistribution, SourceSpec};

/// `R(D) = min I(U; U_hat)` subject to `E d(U, U_hat) <= D`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdResult {
    /// Bits per source symbol.
    pub value: f64,
    pub test_channel: ConditionalDistribution,
    /// Distortion multiplier (the negative slope of `R(D)` in bits per unit distortion).
    pub slope: f64,
    pub iterations: usize,
    pub converged: bool,
    pub achieved_du: f64,
}

#[derive(Debug, Clone)]
struct TestChannel {
    /// `q[u][r]`.
    q: Vec<Vec<f64>>,
    distortion: f64,
    converged: bool,
}

impl Mixable for TestChannel {
    fn mix(&self, other: &Self, theta: f64) -> Self {
        Self {
            q: self
                .q
                .iter()
                .zip(&other.q)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| theta * x + (1.0 - theta) * y).collect())
                .collect(),
            distortion: theta * self.distortion + (1.0 - theta) * other.distortion,
            converged: self.converged && other.converged,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RateDistortionSolver<'a> {
    source: &'a SourceSpec,
    opts: BaOptions,
}

impl<'a> RateDistortionSolver<'a> {
    pub fn new(source: &'a SourceSpec) -> Self {
        Self {
            source,
            opts: BaOptions::default(),
        }
    }

    fn distortion_of(&self, q: &[Vec<f64>]) -> f64 {
        let p = self.source.prior().probs();
        let mut d = 0.0;
        for (u, row) in q.iter().enumerate() {
            for (r, qr) in row.iter().enumerate() {
                if *qr > 0.0 {
                    d += p[u] * qr * self.source.distortion(u, r);
                }
            }
        }
        d
    }

    fn rate_of(&self, q: &[Vec<f64>]) -> f64 {
        let p = self.source.prior().probs();
        let nr = self.source.n_reconstructions();
        let mut marginal = vec![0.0; nr];
        for (u, row) in q.iter().enumerate() {
            for (m, qr) in marginal.iter_mut().zip(row) {
                *m += p[u] * qr;
            }
        }
        let mut rate = 0.0;
        for (u, row) in q.iter().enumerate() {
            for (r, &qr) in row.iter().enumerate() {
                if qr > 0.0 && p[u] > 0.0 {
                    rate += p[u] * qr * (qr / marginal[r]).log2();
                }
            }
        }
        rate.max(0.0)
    }

    /// The zero-rate solution: every symbol mapped to the best constant reconstruction.
    fn constant(&self) -> TestChannel {
        let (r, d) = self.source.zero_rate_distortion();
        let nr = self.source.n_reconstructions();
        let q = (0..self.source.n_symbols())
            .map(|_| (0..nr).map(|i| if i == r { 1.0 } else { 0.0 }).collect())
            .collect();
        TestChannel {
            q,
            distortion: d,
            converged: true,
        }
    }

    /// Blahut's iteration for `min I + slope * E d`, in the log domain.
    fn tilted(&self, slope: f64, iterations: &Cell<usize>) -> TestChannel {
        if slope == 0.0 {
            return self.constant();
        }
        let (nu, nr) = (self.source.n_symbols(), self.source.n_reconstructions());
        let log_pu: Vec<f64> = self
            .source
            .prior()
            .probs()
            .iter()
            .map(|&v| if v > 0.0 { v.log2() } else { f64::NEG_INFINITY })
            .collect();
        let kernel: Vec<Vec<f64>> = (0..nu)
            .map(|u| (0..nr).map(|r| -slope * self.source.distortion(u, r)).collect())
            .collect();
        let mut log_r = vec![-(nr as f64).log2(); nr];
        let mut log_c = vec![0.0; nu];
        let mut log_ratio = vec![0.0; nr];
        let mut steps = 0;
        let converged = loop {
            for u in 0..nu {
                log_c[u] = log2_sum_exp2((0..nr).map(|r| log_r[r] + kernel[u][r]));
            }
            for (r, lr) in log_ratio.iter_mut().enumerate() {
                *lr = log2_sum_exp2(
                    (0..nu)
                        .filter(|&u| log_pu[u] > f64::NEG_INFINITY)
                        .map(|u| log_pu[u] + kernel[u][r] - log_c[u]),
                );
            }
            // Upper minus lower bound on the tilted objective.
            let gap = log_ratio.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if gap < self.opts.gap_tol {
                break true;
            }
            if steps >= self.opts.max_iters {
                break false;
            }
            for (lr, ratio) in log_r.iter_mut().zip(&log_ratio) {
                *lr += ratio;
            }
            let norm = log2_sum_exp2(log_r.iter().copied());
            for lr in &mut log_r {
                *lr -= norm;
            }
            steps += 1;
        };
        iterations.set(iterations.get() + steps);
        let q: Vec<Vec<f64>> = (0..nu)
            .map(|u| {
                (0..nr)
                    .map(|r| (log_r[r] + kernel[u][r] - log_c[u]).exp2())
                    .collect()
            })
            .collect();
        TestChannel {
            distortion: self.distortion_of(&q),
            q,
            converged,
        }
    }

    pub fn solve(&self, max_distortion: f64) -> Result<RdResult> {
        if max_distortion.is_nan() || max_distortion < 0.0 {
            return Err(Error::domain("D_u", max_distortion, "[0, inf)"));
        }
        let floor = self.source.min_distortion();
        if max_distortion < floor - FLOOR_SLACK {
            return Err(Error::Infeasible {
                what: "communication distortion",
                requested: max_distortion,
                floor,
            });
        }
        let iterations = Cell::new(0);
        let (tc, slope) = match meet_budget(
            |s| Ok::<_, Error>(self.tilted(s, &iterations)),
            |c| c.distortion,
            max_distortion,
        )? {
            Search::Met { candidate, lambda } | Search::Saturated { candidate, lambda } => (candidate, lambda),
        };
        let achieved_du = self.distortion_of(&tc.q);
        let result = RdResult {
            value: self.rate_of(&tc.q),
            test_channel: ConditionalDistribution::new(tc.q.clone())
                .unwrap_or_else(|_| renormalized(&tc.q)),
            slope,
            iterations: iterations.get(),
            converged: tc.converged && achieved_du <= max_distortion + TOL_CONSTRAINT,
            achieved_du,
        };
        if result.converged {
            Ok(result)
        } else {
            Err(Error::RdNotConverged {
                iterations: result.iterations,
                best: Box::new(result),
            })
        }
    }
}

fn renormalized(q: &[Vec<f64>]) -> ConditionalDistribution {
    let rows = q
        .iter()
        .map(|row| {
            let t: f64 = row.iter().sum();
            let mut r: Vec<f64> = row.iter().map(|v| v / t).collect();
            let tail: f64 = r[1..].iter().sum();
            r[0] = 1.0 - tail;
            r
        })
        .collect();
    ConditionalDistribution::new(rows).expect("rows renormalized")
}

pub fn rate_distortion(source: &SourceSpec, max_distortion: f64) -> Result<RdResult> {
    RateDistortionSolver::new(source).solve(max_distortion)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdPoint {
    pub d_u: f64,
    pub result: Result<RdResult, String>,
}

impl RdPoint {
    pub fn value(&self) -> Option<f64> {
        self.result.as_ref().ok().map(|r| r.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdCurve {
    pub points: Vec<RdPoint>,
}

impl RdCurve {
    fn solved(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.value().map(|v| (p.d_u, v)))
            .collect()
    }

    /// Indices `i` with `R(D[i+1]) > R(D[i]) + slack`.
    pub fn monotonicity_violations(&self, slack: f64) -> Vec<usize> {
        self.solved()
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].1 > w[0].1 + slack)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn convexity_violations(&self, slack: f64) -> Vec<usize> {
        chord_violations(&self.solved(), slack, Curvature::Convex)
    }

    /// CSV with header `d_u,d_s,r_bits`. The single-constraint solver has no
    /// sensing coordinate, so `d_s` is left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d_u,d_s,r_bits\n");
        for p in &self.points {
            let r = p.value().map(|v| sig(v, 12)).unwrap_or_default();
            out.push_str(&format!("{},,{r}\n", sig(p.d_u, 12)));
        }
        out
    }
}

pub fn rd_sweep(source: &SourceSpec, grid: &[f64]) -> RdCurve {
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let solver = RateDistortionSolver::new(source);
    RdCurve {
        points: grid
            .par_iter()
            .map(|&d_u| RdPoint {
                d_u,
                result: solver.solve(d_u).map_err(|e| e.to_string()),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{binary_entropy, entropy};
    use crate::prob::Distribution;

    fn bern_half() -> SourceSpec {
        SourceSpec::hamming(Distribution::uniform(2))
    }

    #[test]
    fn bernoulli_half_hamming() {
        let r = rate_distortion(&bern_half(), 0.11).unwrap();
        assert!((r.value - (1.0 - binary_entropy(0.11))).abs() < 1e-8, "{}", r.value);
        assert!((r.value - 0.5001).abs() < 1e-4);
        assert!((r.achieved_du - 0.11).abs() < 1e-9);
    }

    #[test]
    fn zero_rate_above_threshold() {
        let src = SourceSpec::hamming(Distribution::new(vec![0.3, 0.7]).unwrap());
        let r = rate_distortion(&src, 0.3).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.slope, 0.0);
        assert_eq!(rate_distortion(&src, 0.9).unwrap().value, 0.0);
    }

    #[test]
    fn lossless_limit_is_entropy() {
        let prior = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let h = entropy(prior.probs());
        let src = SourceSpec::hamming(prior);
        let r = rate_distortion(&src, 0.0).unwrap();
        assert!((r.value - h).abs() < 1e-9);
    }

    #[test]
    fn below_floor_is_infeasible() {
        let raw = crate::prob::RawSource {
            prior: vec![0.5, 0.5],
            distortion: vec![vec![0.2, 1.0], vec![1.0, 0.2]],
        };
        let src = crate::prob::validate_source(raw).unwrap();
        assert!(matches!(rate_distortion(&src, 0.1), Err(Error::Infeasible { .. })));
        assert!(rate_distortion(&src, 0.2).is_ok());
    }

    #[test]
    fn sweep_shape() {
        let grid: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
        let curve = rd_sweep(&bern_half(), &grid);
        assert!(curve.monotonicity_violations(1e-6).is_empty());
        assert!(curve.convexity_violations(1e-6).is_empty());
        for p in &curve.points {
            let expected = if p.d_u < 0.5 { 1.0 - binary_entropy(p.d_u) } else { 0.0 };
            assert!((p.value().unwrap() - expected).abs() < 1e-5);
        }
    }
}
