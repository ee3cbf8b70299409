//! Capacity-distortion-cost and rate-distortion solvers.
//!
//! Every inner problem is a Blahut-Arimoto iteration on a tilted objective;
//! linear budgets are handled by Lagrange multipliers found by bisection. The
//! two bracketing iterates of the final bisection step are mixed so that an
//! active budget is met exactly, which keeps the reported value within the
//! inner convergence gap of the true optimum.

mod blahut;
mod capacity;
mod multiplier;
mod rate_distortion;

use serde::Serialize;

use crate::fmt::sig;
use crate::prob::Distribution;

pub use blahut::{BaOptions, PenalizedSolution};
pub use capacity::{
    capacity_distortion_cost, capacity_unconstrained, saturation_distortion, sensing_floor,
    sweep_curve, CapacitySolver, CostedChannel, Floors,
};
pub use rate_distortion::{rate_distortion, rd_sweep, RateDistortionSolver, RdCurve, RdPoint, RdResult};

/// Constraint residual accepted when a budget cannot be met exactly.
pub const TOL_CONSTRAINT: f64 = 1e-6;
/// Slack used when comparing a budget against its feasibility floor.
pub const FLOOR_SLACK: f64 = 1e-9;

/// Budgets for the sensing distortion, input cost and (optionally) communication distortion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintSet {
    pub sensing_budget: f64,
    pub cost_budget: f64,
    pub comm_budget: Option<f64>,
}

impl ConstraintSet {
    pub fn new(sensing_budget: f64, cost_budget: f64) -> crate::Result<Self> {
        for (what, v) in [("D_s", sensing_budget), ("B", cost_budget)] {
            if v.is_nan() || v < 0.0 {
                return Err(crate::Error::domain(what, v, "[0, inf)"));
            }
        }
        Ok(Self {
            sensing_budget,
            cost_budget,
            comm_budget: None,
        })
    }

    /// Only the cost constraint is binding.
    pub fn cost_only(cost_budget: f64) -> crate::Result<Self> {
        Self::new(f64::INFINITY, cost_budget)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverResult {
    /// `C(D_s, B)` in bits per channel use.
    pub value: f64,
    pub argmax_input: Distribution,
    /// `(lambda_s, lambda_B)`.
    pub multipliers: (f64, f64),
    /// Total inner iterations across the multiplier search.
    pub iterations: usize,
    pub converged: bool,
    pub achieved_ds: f64,
    pub achieved_b: f64,
}

/// One solved point of a sweep; failed points keep their error text.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub d_s: f64,
    pub b: f64,
    pub result: Result<SolverResult, String>,
}

impl TradeoffPoint {
    pub fn value(&self) -> Option<f64> {
        self.result.as_ref().ok().map(|r| r.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    pub points: Vec<TradeoffPoint>,
    pub cost_budget: f64,
}

impl TradeoffCurve {
    /// Indices `i` with `C(D_s[i]) > C(D_s[i+1]) + slack`.
    pub fn monotonicity_violations(&self, slack: f64) -> Vec<usize> {
        let pts = self.solved();
        pts.windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].1 > w[1].1 + slack)
            .map(|(i, _)| i)
            .collect()
    }

    /// Interior indices where the value falls below the chord of its neighbours by more than `slack`.
    pub fn concavity_violations(&self, slack: f64) -> Vec<usize> {
        chord_violations(&self.solved(), slack, Curvature::Concave)
    }

    fn solved(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.value().map(|v| (p.d_s, v)))
            .collect()
    }

    /// CSV with header `d_s,b,c_bits`; failed points leave `c_bits` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d_s,b,c_bits\n");
        for p in &self.points {
            let c = p.value().map(|v| sig(v, 12)).unwrap_or_default();
            out.push_str(&format!("{},{},{c}\n", sig(p.d_s, 12), sig(p.b, 12)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Curvature {
    Concave,
    Convex,
}

/// Interior points whose value lies on the wrong side of the chord through
/// their two neighbours by more than `slack`.
pub(crate) fn chord_violations(pts: &[(f64, f64)], slack: f64, shape: Curvature) -> Vec<usize> {
    let mut bad = Vec::new();
    for i in 1..pts.len().saturating_sub(1) {
        let (x0, y0) = pts[i - 1];
        let (x1, y1) = pts[i];
        let (x2, y2) = pts[i + 1];
        if x2 <= x0 {
            continue;
        }
        let chord = y0 + (x1 - x0) / (x2 - x0) * (y2 - y0);
        let violated = match shape {
            Curvature::Concave => y1 < chord - slack,
            Curvature::Convex => y1 > chord + slack,
        };
        if violated {
            bad.push(i);
        }
    }
    bad
}
