use std::fmt::Write as _;

use serde::Serialize;

use crate::fmt::sig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    RandomCoding,
    Symbolwise,
}

/// The effective configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub mode: SimMode,
    pub n: usize,
    pub k: Option<usize>,
    pub gamma: Option<f64>,
    pub rate: Option<f64>,
    pub epsilon: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub input: Vec<f64>,
}

/// Raw sums over all trials. Merged in trial order so the floating-point
/// totals do not depend on scheduling.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Counters {
    pub trials: u64,
    pub symbols: u64,
    pub errors: u64,
    pub decode_none: u64,
    pub decode_ambiguous: u64,
    pub decode_wrong: u64,
    pub ds_sum: f64,
    pub ds_sq_sum: f64,
    /// Sensing distortion accumulated over trials with a decoding error.
    pub ds_sum_on_error: f64,
    pub du_sum: f64,
    pub du_sq_sum: f64,
}

impl Counters {
    pub(crate) fn merge(&mut self, other: &Counters) {
        self.trials += other.trials;
        self.symbols += other.symbols;
        self.errors += other.errors;
        self.decode_none += other.decode_none;
        self.decode_ambiguous += other.decode_ambiguous;
        self.decode_wrong += other.decode_wrong;
        self.ds_sum += other.ds_sum;
        self.ds_sq_sum += other.ds_sq_sum;
        self.ds_sum_on_error += other.ds_sum_on_error;
        self.du_sum += other.du_sum;
        self.du_sq_sum += other.du_sq_sum;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub trial: usize,
    pub w: Option<usize>,
    pub w_hat: Option<usize>,
    pub err: bool,
    pub ds: f64,
    pub du: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimConfig,
    pub trials: usize,
    pub codebook_bits: Option<u32>,
    pub delta_s: Option<f64>,
    pub delta_s_half_width: Option<f64>,
    pub delta_u: Option<f64>,
    pub delta_u_half_width: Option<f64>,
    pub p_e: Option<f64>,
    pub p_e_half_width: Option<f64>,
    pub analytic_delta_s: f64,
    /// Expected sensing distortion given the codebook, with uniform messages.
    pub codebook_delta_s: Option<f64>,
    pub analytic_delta_u: Option<f64>,
    pub d_max_s: f64,
    pub d_max_u: Option<f64>,
    pub counters: Counters,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

/// Mean and a `3 sigma` normal-approximation half-width from a sum and a sum of squares.
fn mean_and_width(sum: f64, sq_sum: f64, count: u64) -> (Option<f64>, Option<f64>) {
    if count == 0 {
        return (None, None);
    }
    let n = count as f64;
    let mean = sum / n;
    let var = (sq_sum / n - mean * mean).max(0.0);
    (Some(mean), Some(3.0 * (var / n).sqrt()))
}

pub(crate) struct ReportParts {
    pub config: SimConfig,
    pub codebook_bits: Option<u32>,
    /// `(mean, variance / symbol count)` of `c(x)` over the codebook.
    pub codebook_sensing: Option<(f64, f64)>,
    pub counters: Counters,
    pub analytic_delta_s: f64,
    pub analytic_delta_u: Option<f64>,
    pub d_max_s: f64,
    pub d_max_u: Option<f64>,
    pub trace: Vec<TraceRow>,
}

impl SimulationReport {
    pub(crate) fn assemble(parts: ReportParts) -> Self {
        let c = &parts.counters;
        let (delta_s, mut delta_s_half_width) = mean_and_width(c.ds_sum, c.ds_sq_sum, c.symbols);
        // One shared codebook adds its own sampling spread around the analytic value.
        if let (Some(hw), Some((_, var_mean))) = (delta_s_half_width, parts.codebook_sensing) {
            delta_s_half_width = Some(((hw / 3.0).powi(2) + var_mean).sqrt() * 3.0);
        }
        let (delta_u, delta_u_half_width) = if parts.config.mode == SimMode::Symbolwise {
            mean_and_width(c.du_sum, c.du_sq_sum, c.symbols)
        } else {
            (None, None)
        };
        let (p_e, p_e_half_width) = if parts.config.mode == SimMode::RandomCoding && c.trials > 0 {
            let t = c.trials as f64;
            let pe = c.errors as f64 / t;
            (Some(pe), Some(3.0 * (pe * (1.0 - pe) / t).sqrt()))
        } else {
            (None, None)
        };
        Self {
            trials: parts.config.trials,
            config: parts.config,
            codebook_bits: parts.codebook_bits,
            delta_s,
            delta_s_half_width,
            delta_u,
            delta_u_half_width,
            p_e,
            p_e_half_width,
            analytic_delta_s: parts.analytic_delta_s,
            codebook_delta_s: parts.codebook_sensing.map(|(m, _)| m),
            analytic_delta_u: parts.analytic_delta_u,
            d_max_s: parts.d_max_s,
            d_max_u: parts.d_max_u,
            counters: parts.counters,
            trace: parts.trace,
        }
    }

    /// Average sensing distortion over trials decoded correctly.
    pub fn conditional_delta_s(&self) -> Option<f64> {
        let c = &self.counters;
        let ok = c.trials - c.errors;
        (ok > 0).then(|| (c.ds_sum - c.ds_sum_on_error) / (ok as f64 * self.config.n as f64))
    }

    /// `Delta_s <= d_max P_e + Delta_s|correct (1 - P_e)` on the accumulated counters.
    pub fn error_decomposition_holds(&self) -> bool {
        let (Some(ds), Some(pe)) = (self.delta_s, self.p_e) else {
            return true;
        };
        let cond = self.conditional_delta_s().unwrap_or(0.0);
        ds <= self.d_max_s * pe + cond * (1.0 - pe) + 1e-12
    }

    /// Violated invariants, empty when the report is consistent.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let in_range = |v: Option<f64>, top: f64| v.is_none_or(|v| (0.0..=top + 1e-12).contains(&v));
        if !in_range(self.delta_s, self.d_max_s) {
            out.push(format!("delta_s {:?} outside [0, {}]", self.delta_s, self.d_max_s));
        }
        if let Some(top) = self.d_max_u {
            if !in_range(self.delta_u, top) {
                out.push(format!("delta_u {:?} outside [0, {top}]", self.delta_u));
            }
        }
        if !in_range(self.p_e, 1.0) {
            out.push(format!("p_e {:?} outside [0, 1]", self.p_e));
        }
        let c = &self.counters;
        if c.errors != c.decode_none + c.decode_ambiguous + c.decode_wrong {
            out.push("error counts do not add up".into());
        }
        if !self.error_decomposition_holds() {
            out.push("error decomposition bound fails".into());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-trial CSV: `trial,w,w_hat,err,ds,du`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("trial,w,w_hat,err,ds,du\n");
        let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.trace {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.trial,
                opt(r.w),
                opt(r.w_hat),
                u8::from(r.err),
                sig(r.ds, 12),
                r.du.map(|v| sig(v, 12)).unwrap_or_default()
            );
        }
        out
    }
}
