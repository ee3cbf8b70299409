use std::cell::Cell;

use rayon::prelude::*;

use super::blahut::{BaOptions, LogChannel};
use super::multiplier::{meet_budget, Mixable, Search};
use super::{ConstraintSet, SolverResult, TradeoffCurve, TradeoffPoint, FLOOR_SLACK, TOL_CONSTRAINT};
use crate::error::{Error, Result};
use crate::estimators::sensing_estimator;
use crate::info::mutual_information;
use crate::prob::{ChannelSpec, Distribution, STOCHASTIC_TOL};

/// The capacity problem reduced to the input distribution: the state-augmented
/// channel `x -> (s, y)` together with the per-input sensing cost `c(x)` and
/// input cost `b(x)`.
#[derive(Debug, Clone)]
pub struct CostedChannel {
    channel: LogChannel,
    sensing: Vec<f64>,
    cost: Vec<f64>,
}

impl CostedChannel {
    pub fn new(spec: &ChannelSpec) -> Self {
        Self {
            channel: LogChannel::new(spec.state_augmented_channel()),
            sensing: sensing_estimator(spec).cost().to_vec(),
            cost: spec.cost().to_vec(),
        }
    }

    /// `w[x][y]` must be row-stochastic; `sensing` and `cost` have one entry per row.
    pub fn from_parts(w: Vec<Vec<f64>>, sensing: Vec<f64>, cost: Vec<f64>) -> Result<Self> {
        let nx = w.len();
        if nx == 0 || sensing.len() != nx || cost.len() != nx {
            return Err(Error::DimensionMismatch(format!(
                "{nx} channel rows, {} sensing costs, {} input costs",
                sensing.len(),
                cost.len()
            )));
        }
        let ny = w[0].len();
        for (x, row) in w.iter().enumerate() {
            let total: f64 = row.iter().sum();
            if row.len() != ny || row.iter().any(|v| !(*v >= 0.0)) || (total - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::DimensionMismatch(format!("channel row {x} is not a distribution")));
            }
        }
        Ok(Self {
            channel: LogChannel::new(w),
            sensing,
            cost,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.cost.len()
    }

    pub fn sensing_cost(&self) -> &[f64] {
        &self.sensing
    }

    pub fn input_cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn mutual_information(&self, p: &Distribution) -> f64 {
        mutual_information(p.probs(), self.channel.rows())
    }

    fn penalty(&self, lambda_s: f64, lambda_b: f64) -> Vec<f64> {
        self.sensing
            .iter()
            .zip(&self.cost)
            .map(|(c, b)| {
                // 0 * inf must not poison the penalty of a zero-cost input.
                let ps = if lambda_s == 0.0 { 0.0 } else { lambda_s * c };
                let pb = if lambda_b == 0.0 { 0.0 } else { lambda_b * b };
                ps + pb
            })
            .collect()
    }

    /// One Blahut-Arimoto update of `p` at the given multipliers.
    pub fn ba_step(&self, p: &Distribution, multipliers: (f64, f64)) -> Distribution {
        let next = self
            .channel
            .step(p.probs(), &self.penalty(multipliers.0, multipliers.1));
        Distribution::from_normalized(next)
    }
}

/// Minimum expected sensing (and optionally communication) cost under a cost budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floors {
    pub ds_min: f64,
    pub du_min: Option<f64>,
}

/// `min sum_x P(x) f(x)` subject to `sum_x P(x) b(x) <= budget`. The optimum sits
/// on a vertex of the simplex cut by one halfspace: a point mass on an
/// affordable input, or a two-point mixture that spends the budget exactly.
fn linear_floor(f: &[f64], b: &[f64], budget: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut take = |v: f64| best = Some(best.map_or(v, |cur: f64| cur.min(v)));
    for x in 0..f.len() {
        if b[x] <= budget {
            take(f[x]);
        }
    }
    for i in 0..f.len() {
        for j in 0..f.len() {
            if b[i] < budget && budget < b[j] {
                let theta = (b[j] - budget) / (b[j] - b[i]);
                take(theta * f[i] + (1.0 - theta) * f[j]);
            }
        }
    }
    best
}

#[derive(Debug, Clone)]
struct Penalized {
    p: Vec<f64>,
    ds: f64,
    b: f64,
    lambda_s: f64,
    converged: bool,
}

impl Mixable for Penalized {
    fn mix(&self, other: &Self, theta: f64) -> Self {
        Self {
            p: self
                .p
                .iter()
                .zip(&other.p)
                .map(|(a, b)| theta * a + (1.0 - theta) * b)
                .collect(),
            ds: theta * self.ds + (1.0 - theta) * other.ds,
            b: theta * self.b + (1.0 - theta) * other.b,
            lambda_s: theta * self.lambda_s + (1.0 - theta) * other.lambda_s,
            converged: self.converged && other.converged,
        }
    }
}

/// Solver for `C(D_s, B)` and the boundary quantities around it.
#[derive(Debug, Clone)]
pub struct CapacitySolver {
    channel: CostedChannel,
    opts: BaOptions,
}

impl CapacitySolver {
    pub fn new(spec: &ChannelSpec) -> Self {
        Self::from_costed(CostedChannel::new(spec))
    }

    pub fn from_costed(channel: CostedChannel) -> Self {
        Self {
            channel,
            opts: BaOptions::default(),
        }
    }

    pub fn with_options(mut self, opts: BaOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn channel(&self) -> &CostedChannel {
        &self.channel
    }

    fn penalized(&self, lambda_s: f64, lambda_b: f64, iterations: &Cell<usize>) -> Penalized {
        let sol = self
            .channel
            .channel
            .solve(&self.channel.penalty(lambda_s, lambda_b), &self.opts);
        iterations.set(iterations.get() + sol.iterations);
        let p = Distribution::from_normalized(sol.p);
        Penalized {
            ds: p.expect(&self.channel.sensing),
            b: p.expect(&self.channel.cost),
            p: p.probs().to_vec(),
            lambda_s,
            converged: sol.converged,
        }
    }

    /// `D_s_min(B)`, and `D_u_min(B)` when a communication cost `d(x)` is given.
    pub fn floors(&self, budget: f64, comm_cost: Option<&[f64]>) -> Result<Floors> {
        let cost = &self.channel.cost;
        let min_b = cost.iter().copied().fold(f64::INFINITY, f64::min);
        let ds_min = linear_floor(&self.channel.sensing, cost, budget).ok_or(Error::Infeasible {
            what: "cost budget",
            requested: budget,
            floor: min_b,
        })?;
        let du_min = match comm_cost {
            Some(d) if d.len() != cost.len() => {
                return Err(Error::DimensionMismatch(format!(
                    "communication cost has {} entries, expected {}",
                    d.len(),
                    cost.len()
                )))
            }
            Some(d) => linear_floor(d, cost, budget),
            None => None,
        };
        Ok(Floors { ds_min, du_min })
    }

    /// `C_NoEst(B)`: capacity under the cost budget alone.
    pub fn capacity_unconstrained(&self, budget: f64) -> Result<SolverResult> {
        self.capacity_distortion_cost(ConstraintSet::cost_only(budget)?)
    }

    /// `C(D_s, B) = max I(X; Y | S)` over `P_X` with `E c(X) <= D_s`, `E b(X) <= B`.
    pub fn capacity_distortion_cost(&self, constraints: ConstraintSet) -> Result<SolverResult> {
        let (ds_budget, b_budget) = (constraints.sensing_budget, constraints.cost_budget);
        if ds_budget.is_nan() || ds_budget < 0.0 {
            return Err(Error::domain("D_s", ds_budget, "[0, inf)"));
        }
        let floors = self.floors(b_budget, None)?;
        if ds_budget < floors.ds_min - FLOOR_SLACK {
            return Err(Error::Infeasible {
                what: "sensing distortion",
                requested: ds_budget,
                floor: floors.ds_min,
            });
        }

        let iterations = Cell::new(0);
        let inner = |lambda_b: f64| -> Result<Penalized> {
            let search = meet_budget(
                |ls| Ok::<_, Error>(self.penalized(ls, lambda_b, &iterations)),
                |c| c.ds,
                ds_budget,
            )?;
            Ok(match search {
                Search::Met {
                    mut candidate,
                    lambda,
                } => {
                    candidate.lambda_s = lambda;
                    candidate
                }
                Search::Saturated {
                    mut candidate,
                    lambda,
                } => {
                    candidate.lambda_s = lambda;
                    candidate
                }
            })
        };
        let (best, lambda_b) = match meet_budget(inner, |c| c.b, b_budget)? {
            Search::Met { candidate, lambda } | Search::Saturated { candidate, lambda } => {
                (candidate, lambda)
            }
        };

        let input = Distribution::from_normalized(best.p);
        let achieved_ds = input.expect(&self.channel.sensing);
        let achieved_b = input.expect(&self.channel.cost);
        let within = achieved_ds <= ds_budget + TOL_CONSTRAINT && achieved_b <= b_budget + TOL_CONSTRAINT;
        let result = SolverResult {
            value: self.channel.mutual_information(&input),
            argmax_input: input,
            multipliers: (best.lambda_s, lambda_b),
            iterations: iterations.get(),
            converged: best.converged && within,
            achieved_ds,
            achieved_b,
        };
        if result.converged {
            Ok(result)
        } else {
            Err(Error::NotConverged {
                iterations: result.iterations,
                best: Box::new(result),
            })
        }
    }

    /// `D_s_max(B)`: sensing distortion of the cost-constrained capacity-achieving input.
    pub fn saturation_distortion(&self, budget: f64) -> Result<f64> {
        Ok(self.capacity_unconstrained(budget)?.achieved_ds)
    }

    /// Solves every grid point independently; the curve is ordered by `D_s`.
    pub fn sweep_curve(&self, budget: f64, grid: &[f64]) -> TradeoffCurve {
        let mut grid = grid.to_vec();
        grid.sort_by(f64::total_cmp);
        let points = grid
            .par_iter()
            .map(|&d_s| TradeoffPoint {
                d_s,
                b: budget,
                result: ConstraintSet::new(d_s, budget)
                    .and_then(|c| self.capacity_distortion_cost(c))
                    .map_err(|e| e.to_string()),
            })
            .collect();
        TradeoffCurve {
            points,
            cost_budget: budget,
        }
    }
}

pub fn capacity_unconstrained(spec: &ChannelSpec, budget: f64) -> Result<SolverResult> {
    CapacitySolver::new(spec).capacity_unconstrained(budget)
}

pub fn capacity_distortion_cost(spec: &ChannelSpec, constraints: ConstraintSet) -> Result<SolverResult> {
    CapacitySolver::new(spec).capacity_distortion_cost(constraints)
}

/// `(D_s_min(B), D_u_min(B))`; the second needs the encoder-dependent `d(x)`.
pub fn sensing_floor(spec: &ChannelSpec, budget: f64, comm_cost: Option<&[f64]>) -> Result<Floors> {
    CapacitySolver::new(spec).floors(budget, comm_cost)
}

pub fn saturation_distortion(spec: &ChannelSpec, budget: f64) -> Result<f64> {
    CapacitySolver::new(spec).saturation_distortion(budget)
}

pub fn sweep_curve(spec: &ChannelSpec, budget: f64, grid: &[f64]) -> TradeoffCurve {
    CapacitySolver::new(spec).sweep_curve(budget, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::binary_entropy;
    use crate::prob::build_binary_isac_channel;

    fn binary() -> ChannelSpec {
        build_binary_isac_channel(0.4).unwrap()
    }

    #[test]
    fn binary_unconstrained_capacity() {
        let r = capacity_unconstrained(&binary(), 0.0).unwrap();
        assert!((r.value - 0.4).abs() < 1e-9);
        assert!((r.argmax_input.probs()[0] - 0.5).abs() < 1e-6);
        assert_eq!(r.multipliers, (0.0, 0.0));
    }

    #[test]
    fn useless_channel_has_zero_capacity() {
        let ch = CostedChannel::from_parts(vec![vec![0.3, 0.7]; 3], vec![0.0; 3], vec![0.0; 3]).unwrap();
        let r = CapacitySolver::from_costed(ch).capacity_unconstrained(0.0).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn bsc_as_single_state_channel() {
        let e = 0.11;
        let ch = CostedChannel::from_parts(vec![vec![1.0 - e, e], vec![e, 1.0 - e]], vec![0.0; 2], vec![0.0; 2])
            .unwrap();
        let r = CapacitySolver::from_costed(ch).capacity_unconstrained(0.0).unwrap();
        assert!((r.value - (1.0 - binary_entropy(e))).abs() < 1e-9);
        assert!((r.value - 0.5001).abs() < 1e-4);
    }

    #[test]
    fn binary_tradeoff_point() {
        let r = capacity_distortion_cost(&binary(), ConstraintSet::new(0.16, 0.0).unwrap()).unwrap();
        let expected = 0.4 * binary_entropy(0.4);
        assert!((r.value - expected).abs() < 1e-9, "{}", r.value);
        assert!((r.value - 0.3884).abs() < 5e-5);
        assert!((r.achieved_ds - 0.16).abs() < 1e-9);
        assert!(r.multipliers.0 > 0.0);
    }

    #[test]
    fn saturated_budget_matches_unconstrained() {
        let solver = CapacitySolver::new(&binary());
        let c0 = solver.capacity_unconstrained(0.0).unwrap();
        let r = solver.capacity_distortion_cost(ConstraintSet::new(0.35, 0.0).unwrap()).unwrap();
        assert_eq!(r.multipliers.0, 0.0);
        assert!((r.value - c0.value).abs() < 1e-12);
        assert!((solver.saturation_distortion(0.0).unwrap() - 0.2).abs() < 1e-6);
    }

    #[test]
    fn floor_of_binary_channel() {
        let solver = CapacitySolver::new(&binary());
        let r = solver.capacity_distortion_cost(ConstraintSet::new(0.0, 0.0).unwrap()).unwrap();
        assert!(r.value.abs() < 1e-9);
        assert_eq!(solver.floors(0.0, None).unwrap().ds_min, 0.0);
    }

    #[test]
    fn infeasible_requests() {
        let ch = CostedChannel::from_parts(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.2, 0.3], vec![1.0, 2.0])
            .unwrap();
        let solver = CapacitySolver::from_costed(ch);
        assert!(matches!(
            solver.capacity_distortion_cost(ConstraintSet::new(0.1, 5.0).unwrap()),
            Err(Error::Infeasible { .. })
        ));
        assert!(matches!(
            solver.capacity_unconstrained(0.5),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn linear_floor_cases() {
        // Constant objective.
        assert_eq!(linear_floor(&[0.7, 0.7, 0.7], &[0.0, 1.0, 2.0], 1.5), Some(0.7));
        // Budget forces a point mass.
        assert_eq!(linear_floor(&[0.1, 0.9], &[5.0, 1.0], 1.0), Some(0.9));
        // Two-point mixture spending the budget.
        let v = linear_floor(&[0.0, 1.0], &[4.0, 0.0], 1.0).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        assert_eq!(linear_floor(&[0.0], &[2.0], 1.0), None);
    }

    #[test]
    fn cost_constraint_binds() {
        // Noiseless binary channel where sending a 1 costs 1.
        let ch = CostedChannel::from_parts(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0; 2], vec![0.0, 1.0])
            .unwrap();
        let solver = CapacitySolver::from_costed(ch);
        let r = solver.capacity_unconstrained(0.2).unwrap();
        assert!((r.value - binary_entropy(0.2)).abs() < 1e-9);
        assert!((r.achieved_b - 0.2).abs() < 1e-9);
        assert!(r.multipliers.1 > 0.0);
        // A point mass on the free input is all that is left at B = 0.
        let r = solver.capacity_unconstrained(0.0).unwrap();
        assert!(r.value.abs() < 1e-6);
    }

    #[test]
    fn fixed_point_after_solve() {
        let solver = CapacitySolver::new(&binary());
        let r = solver.capacity_distortion_cost(ConstraintSet::new(0.12, 0.0).unwrap()).unwrap();
        let next = solver.channel().ba_step(&r.argmax_input, r.multipliers);
        assert!(r.argmax_input.total_variation(&next) < 1e-8);
    }

    #[test]
    fn sweep_matches_closed_form() {
        let solver = CapacitySolver::new(&binary());
        let grid: Vec<f64> = (1..=5).map(|i| 0.04 * i as f64).collect();
        let curve = solver.sweep_curve(0.0, &grid);
        for p in &curve.points {
            let expected = 0.4 * binary_entropy(p.d_s / 0.4);
            assert!((p.value().unwrap() - expected).abs() < 1e-4);
        }
        assert!(curve.monotonicity_violations(1e-6).is_empty());
        assert!(curve.concavity_violations(1e-6).is_empty());
        assert!(solver.sweep_curve(0.0, &[]).points.is_empty());
        assert!(curve.to_csv().starts_with("d_s,b,c_bits\n0.04,0,"));
    }
}
