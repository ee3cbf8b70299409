//! Closed forms for the binary channel `Y = S X`, `Z = Y` with a Bernoulli
//! source and Hamming distortions.
//!
//! Encoder parametrization: `P(X=0|U=0) = a`, `P(X=0|U=1) = b`, `P(U=0) = p`,
//! `P(S=1) = q`, and `alpha = P(X=0) = p a + (1 - p) b`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::info::binary_entropy;
use crate::prob::ConditionalDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryParams {
    pub p: f64,
    pub q: f64,
}

impl BinaryParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (what, v) in [("p", p), ("q", q)] {
            if !(0.0..=0.5).contains(&v) {
                return Err(Error::domain(what, v, "[0, 1/2]"));
            }
        }
        Ok(Self { p, q })
    }

    pub fn alpha(&self, a: f64, b: f64) -> f64 {
        self.p * a + (1.0 - self.p) * b
    }

    /// The kernel `P(X|U)` with rows indexed by `u`.
    pub fn encoder(&self, a: f64, b: f64) -> Result<ConditionalDistribution> {
        ConditionalDistribution::binary(a, b)
    }

    /// `(D_u, D_s)` produced by the encoder `(a, b)` with the optimal estimators.
    pub fn distortions(&self, a: f64, b: f64) -> (f64, f64) {
        let (p, q) = (self.p, self.q);
        let d_u = (1.0 - q) * p + q * (1.0 - p) * b + q * p * (1.0 - a);
        (d_u, self.alpha(a, b) * q)
    }

    /// The encoder parameters `(a, b)` that realize `(D_u, D_s)`. Either may lie outside `[0, 1]`.
    pub fn region_arguments(&self, d_u: f64, d_s: f64) -> (f64, f64) {
        let (p, q) = (self.p, self.q);
        (
            (d_s - d_u + p) / (2.0 * p * q),
            (d_u + d_s - p) / (2.0 * (1.0 - p) * q),
        )
    }

    /// `R` of the encoder `(a, b)`: `q H(alpha) - p q H(a) - (1-p) q H(b)`.
    pub fn parametric_rate(&self, a: f64, b: f64) -> f64 {
        let (p, q) = (self.p, self.q);
        q * binary_entropy(self.alpha(a, b))
            - p * q * binary_entropy(a)
            - (1.0 - p) * q * binary_entropy(b)
    }
}

pub fn closed_form_c(params: &BinaryParams, d_s: f64) -> Result<f64> {
    let q = params.q;
    if q == 0.0 {
        return if d_s == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::domain("D_s/q", f64::INFINITY, "[0, 1]"))
        };
    }
    let t = d_s / q;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("D_s/q", t, "[0, 1]"));
    }
    Ok(q * binary_entropy(t))
}

/// Rounding allowance on the region test; arguments within it are treated as endpoints.
pub const REGION_SLACK: f64 = 1e-12;

/// A term whose weight vanishes contributes nothing and its argument is not checked.
fn weighted_entropy(weight: f64, arg: f64, which: &'static str) -> Result<f64> {
    if weight == 0.0 {
        return Ok(0.0);
    }
    if !(-REGION_SLACK..=1.0 + REGION_SLACK).contains(&arg) {
        return Err(Error::OutOfRegion {
            which,
            argument: arg,
        });
    }
    Ok(weight * binary_entropy(arg.clamp(0.0, 1.0)))
}

pub fn closed_form_r(params: &BinaryParams, d_u: f64, d_s: f64) -> Result<f64> {
    let (p, q) = (params.p, params.q);
    let c = closed_form_c(params, d_s)?;
    let (a, b) = params.region_arguments(d_u, d_s);
    Ok(c - weighted_entropy(p * q, a, "first")? - weighted_entropy((1.0 - p) * q, b, "second")?)
}

/// Whether `(D_u, D_s)` lies where both entropy arguments are in `[0, 1]`.
pub fn in_region(params: &BinaryParams, d_u: f64, d_s: f64) -> bool {
    closed_form_r(params, d_u, d_s).is_ok()
}

/// Brute-force minimum of the parametric rate over an `(a, b)` grid with
/// `grid_n + 1` values per axis.
///
/// A grid encoder is feasible when both of its distortions are within
/// `q / (2 grid_n)` of the target; that is the largest residual of the grid
/// point nearest any target in the region, so an in-region target always has a
/// feasible point. Each encoder is scored at its own `alpha`, so the result is
/// the rate of an encoder that actually exists.
pub fn parametric_oracle(params: &BinaryParams, d_u: f64, d_s: f64, grid_n: usize) -> Result<f64> {
    if grid_n < 100 {
        return Err(Error::domain("grid_n", grid_n as f64, "[100, inf)"));
    }
    let (p, q) = (params.p, params.q);
    let n = grid_n as f64;
    if q == 0.0 {
        // Every encoder gives D_s = 0 and D_u = p at zero rate.
        return if d_s == 0.0 && (d_u - p).abs() <= 1.0 / n {
            Ok(0.0)
        } else {
            Err(Error::NoFeasiblePoint)
        };
    }
    let tol = q / (2.0 * n) * (1.0 + 1e-9);
    let h: Vec<f64> = (0..=grid_n).map(|i| binary_entropy(i as f64 / n)).collect();

    let best = (0..=grid_n)
        .into_par_iter()
        .filter_map(|i| {
            let a = i as f64 / n;
            let mut row_best: Option<f64> = None;
            for (j, hb) in h.iter().enumerate() {
                let b = j as f64 / n;
                let (du, ds) = params.distortions(a, b);
                if (ds - d_s).abs() <= tol && (du - d_u).abs() <= tol {
                    let r = q * binary_entropy(params.alpha(a, b)) - p * q * h[i] - (1.0 - p) * q * hb;
                    row_best = Some(row_best.map_or(r, |v: f64| v.min(r)));
                }
            }
            row_best
        })
        .reduce_with(f64::min);
    best.ok_or(Error::NoFeasiblePoint)
}

/// A point on both tradeoffs where every correction term of the closed form vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intersection {
    pub d_s: f64,
    pub d_u: f64,
    pub value: f64,
}

const BISECTION_BUDGET: usize = 200;

/// Bisection along the line `b = 0` (`D_u = p - D_s`) for the point where `a` reaches 1.
///
/// With `p = 0` the source is deterministic and every `(D_s, 0)` meets the
/// curve; the member at `D_s = 0` is returned.
pub fn find_intersection(params: &BinaryParams, tol: f64) -> Result<Intersection> {
    let (p, q) = (params.p, params.q);
    if !(tol > 0.0) {
        return Err(Error::domain("tol", tol, "(0, inf)"));
    }
    if q == 0.0 {
        return Err(Error::domain("q", q, "(0, 1/2]"));
    }
    if p == 0.0 {
        return Ok(Intersection {
            d_s: 0.0,
            d_u: 0.0,
            value: 0.0,
        });
    }
    let excess = |d_s: f64| params.region_arguments(p - d_s, d_s).0 - 1.0;
    let (mut lo, mut hi) = (0.0, q.min(p));
    if excess(lo) > 0.0 || excess(hi) < 0.0 {
        return Err(Error::NotFound { tol });
    }
    let mut steps = 0;
    while hi - lo > tol {
        if steps == BISECTION_BUDGET {
            return Err(Error::NotFound { tol });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let d_s = 0.5 * (lo + hi);
    let d_u = p - d_s;
    let value = closed_form_c(params, d_s)?;
    Ok(Intersection { d_s, d_u, value })
}

/// How the rate curve's `D_u` follows the shared distortion axis `d = D_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Coupling {
    /// `D_u = p - d` while `d <= p q` (so `b = 0`), then `D_u = d + p - 2 p q` (so `a = 1`).
    Boundary,
    /// A fixed `D_u`; points outside the region are left blank.
    Fixed { d_u: f64 },
}

impl Coupling {
    pub fn d_u(&self, params: &BinaryParams, d: f64) -> f64 {
        match *self {
            Coupling::Boundary => {
                let pq = params.p * params.q;
                if d <= pq {
                    params.p - d
                } else {
                    d + params.p - 2.0 * pq
                }
            }
            Coupling::Fixed { d_u } => d_u,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub d: f64,
    pub d_u: f64,
    pub c: f64,
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryCurves {
    pub params: BinaryParams,
    pub coupling: Coupling,
    pub points: Vec<CurvePoint>,
}

/// `grid` points over `[0, q/2]`; a single point sits at `q/2`.
pub fn binary_curves(params: &BinaryParams, grid: usize, coupling: Coupling) -> Result<BinaryCurves> {
    if grid == 0 {
        return Err(Error::domain("grid", 0.0, "[1, inf)"));
    }
    let top = params.q / 2.0;
    let points = (0..grid)
        .map(|i| {
            let d = if grid == 1 {
                top
            } else {
                top * i as f64 / (grid - 1) as f64
            };
            let d_u = coupling.d_u(params, d);
            Ok(CurvePoint {
                d,
                d_u,
                c: closed_form_c(params, d)?,
                r: closed_form_r(params, d_u, d).ok(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(BinaryCurves {
        params: *params,
        coupling,
        points,
    })
}

impl BinaryCurves {
    /// CSV with header `d,c_curve,r_curve`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,c_curve,r_curve\n");
        for pt in &self.points {
            let r = pt.r.map(|v| sig(v, 12)).unwrap_or_default();
            out.push_str(&format!("{},{},{r}\n", sig(pt.d, 12), sig(pt.c, 12)));
        }
        out
    }

    /// Indices where `r > c + slack`.
    pub fn ordering_violations(&self, slack: f64) -> Vec<usize> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, pt)| pt.r.is_some_and(|r| r > pt.c + slack))
            .map(|(i, _)| i)
            .collect()
    }
}
