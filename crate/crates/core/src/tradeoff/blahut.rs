use crate::info::log2_sum_exp2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaOptions {
    /// Stop once the upper and lower bounds on the tilted objective are this close.
    pub gap_tol: f64,
    pub max_iters: usize,
}

impl Default for BaOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-9,
            max_iters: 10_000,
        }
    }
}

/// Maximizer of `I(P) - sum_x P(x) penalty(x)` over input distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedSolution {
    pub p: Vec<f64>,
    /// Lower bound: the tilted objective at `p`.
    pub lower: f64,
    /// Upper bound: `max_x [D(W_x || q) - penalty(x)]`.
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

const KAPPA_MAX: f64 = 1099511627776.0;
/// Log-masses are kept above this so no input is lost for good.
const LOG_FLOOR: f64 = -300.0;

/// `next = log_p + kappa t`, normalized and floored.
fn advance(log_p: &[f64], t: &[f64], kappa: f64, next: &mut [f64]) {
    for ((n, lp), ti) in next.iter_mut().zip(log_p).zip(t) {
        *n = lp + kappa * ti;
    }
    let norm = log2_sum_exp2(next.iter().copied());
    for n in next.iter_mut() {
        *n = (*n - norm).max(LOG_FLOOR);
    }
}

/// Channel with precomputed `log2 W(y|x)`; `-inf` marks impossible outputs.
#[derive(Debug, Clone)]
pub(crate) struct LogChannel {
    w: Vec<Vec<f64>>,
    log_w: Vec<Vec<f64>>,
}

impl LogChannel {
    pub(crate) fn new(w: Vec<Vec<f64>>) -> Self {
        let log_w = w
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| if v > 0.0 { v.log2() } else { f64::NEG_INFINITY })
                    .collect()
            })
            .collect();
        Self { w, log_w }
    }

    pub(crate) fn rows(&self) -> &[Vec<f64>] {
        &self.w
    }

    /// Tilted information densities `t(x) = D(W_x || q) - penalty(x)` from log-masses.
    fn densities(&self, log_p: &[f64], penalty: &[f64], out: &mut [f64], log_q: &mut [f64]) {
        let ny = log_q.len();
        for (y, lq) in log_q.iter_mut().enumerate() {
            *lq = log2_sum_exp2(
                log_p
                    .iter()
                    .zip(&self.log_w)
                    .map(move |(lp, lw)| lp + lw[y]),
            );
        }
        for (x, t) in out.iter_mut().enumerate() {
            let mut d = 0.0;
            for y in 0..ny {
                let w = self.w[x][y];
                if w > 0.0 {
                    d += w * (self.log_w[x][y] - log_q[y]);
                }
            }
            *t = d - penalty[x];
        }
    }

    /// Tilted densities at `log_p`, the objective `sum_x P(x) t(x)` and its
    /// information part `sum_x P(x) D(W_x || q)`.
    fn evaluate(&self, log_p: &[f64], penalty: &[f64], t: &mut [f64], log_q: &mut [f64]) -> (f64, f64) {
        self.densities(log_p, penalty, t, log_q);
        let (mut objective, mut info) = (0.0, 0.0);
        for ((lp, ti), pen) in log_p.iter().zip(t.iter()).zip(penalty) {
            let p = lp.exp2();
            if p > 0.0 {
                objective += p * ti;
                info += p * (ti + pen);
            }
        }
        (objective, info)
    }

    /// Blahut-Arimoto in the log domain, started from the uniform input.
    ///
    /// Each iteration also tries the over-relaxed update `P 2^{kappa t}` and
    /// keeps it when it beats the plain update. This matters where the
    /// objective is flat along some direction (more inputs than the channel
    /// has rank), where the plain update only creeps toward the face that the
    /// penalty selects.
    pub(crate) fn solve(&self, penalty: &[f64], opts: &BaOptions) -> PenalizedSolution {
        let nx = self.w.len();
        let ny = self.w.first().map_or(0, Vec::len);
        let mut log_p = vec![-(nx as f64).log2(); nx];
        let mut t = vec![0.0; nx];
        let mut log_q = vec![0.0; ny];
        let (mut lower, _) = self.evaluate(&log_p, penalty, &mut t, &mut log_q);

        let mut plain = (vec![0.0; nx], vec![0.0; nx]);
        let mut relaxed = (vec![0.0; nx], vec![0.0; nx]);
        let mut kappa = 1.0;
        let mut iterations = 0;
        loop {
            let upper = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let converged = upper - lower < opts.gap_tol;
            if converged || iterations >= opts.max_iters {
                return PenalizedSolution {
                    // Masses still pinned at the floor are reported as zero.
                    p: log_p
                        .iter()
                        .map(|&lp| if lp <= LOG_FLOOR { 0.0 } else { lp.exp2() })
                        .collect(),
                    lower,
                    upper,
                    iterations,
                    converged,
                };
            }
            advance(&log_p, &t, 1.0, &mut plain.0);
            let (plain_value, plain_info) = self.evaluate(&plain.0, penalty, &mut plain.1, &mut log_q);
            let trial = 2.0 * kappa;
            let mut relaxed_value = f64::NEG_INFINITY;
            let mut gain = f64::NEG_INFINITY;
            if trial <= KAPPA_MAX {
                advance(&log_p, &t, trial, &mut relaxed.0);
                let (value, info) = self.evaluate(&relaxed.0, penalty, &mut relaxed.1, &mut log_q);
                relaxed_value = value;
                // Differencing the two objectives directly loses the gain to
                // rounding when penalties nearly tie; the penalty part is
                // differenced term by term instead.
                let shifted: f64 = relaxed
                    .0
                    .iter()
                    .zip(&plain.0)
                    .zip(penalty)
                    .map(|((r, p), pen)| (r.exp2() - p.exp2()) * pen)
                    .sum();
                gain = (info - plain_info) - shifted;
            }
            if gain > 0.0 {
                kappa = trial;
                std::mem::swap(&mut log_p, &mut relaxed.0);
                std::mem::swap(&mut t, &mut relaxed.1);
                lower = relaxed_value;
            } else {
                kappa = (kappa / 2.0).max(1.0);
                std::mem::swap(&mut log_p, &mut plain.0);
                std::mem::swap(&mut t, &mut plain.1);
                lower = plain_value;
            }
            iterations += 1;
        }
    }

    /// One update `P(x) <- P(x) 2^{t(x)} / Z` applied to `p`.
    pub(crate) fn step(&self, p: &[f64], penalty: &[f64]) -> Vec<f64> {
        let log_p: Vec<f64> = p
            .iter()
            .map(|&v| if v > 0.0 { v.log2() } else { f64::NEG_INFINITY })
            .collect();
        let mut t = vec![0.0; p.len()];
        let mut log_q = vec![0.0; self.w.first().map_or(0, Vec::len)];
        self.densities(&log_p, penalty, &mut t, &mut log_q);
        let next: Vec<f64> = log_p.iter().zip(&t).map(|(lp, ti)| lp + ti).collect();
        let norm = log2_sum_exp2(next.iter().copied());
        next.iter().map(|v| (v - norm).exp2()).collect()
    }
}
