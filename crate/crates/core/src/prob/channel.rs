use serde::{Deserialize, Serialize};

use super::{
    check_distribution, check_labels, check_nonnegative, Alphabet, Distribution, ValidationErrors,
    ValidationIssue, STOCHASTIC_TOL,
};
use crate::error::{Error, Result};

/// Unvalidated channel description, as read from or written to a spec file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChannel {
    pub state_prior: Vec<f64>,
    /// `law[s][x][y][z] = P(y, z | s, x)`.
    pub law: Vec<Vec<Vec<Vec<f64>>>>,
    /// Input cost `b(x)`; all zeros when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<Vec<f64>>,
    /// `state_distortion[s][s_hat]`.
    pub state_distortion: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<ChannelLabels>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelLabels {
    #[serde(default)]
    pub state: Option<Vec<String>>,
    #[serde(default)]
    pub input: Option<Vec<String>>,
    #[serde(default)]
    pub output: Option<Vec<String>>,
    #[serde(default)]
    pub feedback: Option<Vec<String>>,
}

/// A validated state-dependent memoryless channel with generalized feedback.
///
/// The joint law `P(y, z | s, x)` is the only stored kernel; the output and
/// feedback marginals are summed out on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    state_alphabet: Alphabet,
    input_alphabet: Alphabet,
    output_alphabet: Alphabet,
    feedback_alphabet: Alphabet,
    estimate_alphabet: Alphabet,
    state_prior: Distribution,
    law: Vec<f64>,
    cost: Vec<f64>,
    state_distortion: Vec<f64>,
    raw_labels: Option<ChannelLabels>,
}

/// Checks every invariant of `raw` and returns the validated channel, or every
/// violation found.
pub fn validate_channel(raw: RawChannel) -> std::result::Result<ChannelSpec, ValidationErrors> {
    let mut errors = ValidationErrors::default();
    let ns = raw.law.len();
    if ns == 0 {
        errors.push(ValidationIssue::Empty {
            field: "law".into(),
        });
        return Err(errors);
    }
    let nx = raw.law[0].len();
    let ny = raw.law[0].first().map_or(0, Vec::len);
    let nz = raw.law[0]
        .first()
        .and_then(|r| r.first())
        .map_or(0, Vec::len);
    for (field, n) in [("law[0]", nx), ("law[0][0]", ny), ("law[0][0][0]", nz)] {
        if n == 0 {
            errors.push(ValidationIssue::Empty {
                field: field.into(),
            });
        }
    }
    if !errors.0.is_empty() {
        return Err(errors);
    }

    if raw.state_prior.len() != ns {
        errors.push(ValidationIssue::DimensionMismatch {
            field: "state_prior".into(),
            expected: ns,
            found: raw.state_prior.len(),
        });
    } else {
        check_distribution("state_prior", &raw.state_prior, &mut errors);
    }

    let mut law = Vec::with_capacity(ns * nx * ny * nz);
    let mut shaped = true;
    for (s, by_x) in raw.law.iter().enumerate() {
        if by_x.len() != nx {
            errors.push(ValidationIssue::DimensionMismatch {
                field: format!("law[{s}]"),
                expected: nx,
                found: by_x.len(),
            });
            shaped = false;
            continue;
        }
        for (x, by_y) in by_x.iter().enumerate() {
            if by_y.len() != ny {
                errors.push(ValidationIssue::DimensionMismatch {
                    field: format!("law[{s}][{x}]"),
                    expected: ny,
                    found: by_y.len(),
                });
                shaped = false;
                continue;
            }
            let mut row_ok = true;
            let mut total = 0.0;
            for (y, by_z) in by_y.iter().enumerate() {
                if by_z.len() != nz {
                    errors.push(ValidationIssue::DimensionMismatch {
                        field: format!("law[{s}][{x}][{y}]"),
                        expected: nz,
                        found: by_z.len(),
                    });
                    shaped = false;
                    row_ok = false;
                    continue;
                }
                for (z, &v) in by_z.iter().enumerate() {
                    if !v.is_finite() {
                        errors.push(ValidationIssue::NonFinite {
                            field: "law".into(),
                            index: vec![s, x, y, z],
                        });
                        row_ok = false;
                    } else if v < 0.0 {
                        errors.push(ValidationIssue::NegativeProbability {
                            field: "law".into(),
                            index: vec![s, x, y, z],
                        });
                        row_ok = false;
                    }
                    total += v;
                    law.push(v);
                }
            }
            let deficit = 1.0 - total;
            if row_ok && deficit.abs() > STOCHASTIC_TOL {
                errors.push(ValidationIssue::NonStochasticRow { s, x, deficit });
            }
        }
    }

    let cost = raw.cost.clone().unwrap_or_else(|| vec![0.0; nx]);
    if cost.len() != nx {
        errors.push(ValidationIssue::DimensionMismatch {
            field: "cost".into(),
            expected: nx,
            found: cost.len(),
        });
    }
    for (x, &b) in cost.iter().enumerate() {
        check_nonnegative("cost", &[x], b, &mut errors);
    }

    if raw.state_distortion.len() != ns {
        errors.push(ValidationIssue::DimensionMismatch {
            field: "state_distortion".into(),
            expected: ns,
            found: raw.state_distortion.len(),
        });
    }
    let n_est = raw.state_distortion.first().map_or(0, Vec::len);
    if n_est == 0 {
        errors.push(ValidationIssue::Empty {
            field: "state_distortion[0]".into(),
        });
    }
    let mut state_distortion = Vec::with_capacity(ns * n_est);
    for (s, row) in raw.state_distortion.iter().enumerate() {
        if row.len() != n_est {
            errors.push(ValidationIssue::DimensionMismatch {
                field: format!("state_distortion[{s}]"),
                expected: n_est,
                found: row.len(),
            });
            continue;
        }
        for (t, &d) in row.iter().enumerate() {
            check_nonnegative("state_distortion", &[s, t], d, &mut errors);
            state_distortion.push(d);
        }
    }

    let mut alphabets = [ns, nx, ny, nz].map(Alphabet::new);
    if let Some(labels) = &raw.labels {
        let fields = [
            ("labels.state", &labels.state),
            ("labels.input", &labels.input),
            ("labels.output", &labels.output),
            ("labels.feedback", &labels.feedback),
        ];
        for (a, (field, l)) in alphabets.iter_mut().zip(fields) {
            let Some(l) = l else { continue };
            if l.len() != a.size() {
                errors.push(ValidationIssue::DimensionMismatch {
                    field: field.into(),
                    expected: a.size(),
                    found: l.len(),
                });
                continue;
            }
            check_labels(field, l, &mut errors);
            a.labels = Some(l.clone());
        }
    }

    if !shaped || !errors.0.is_empty() {
        return Err(errors);
    }
    let [state_alphabet, input_alphabet, output_alphabet, feedback_alphabet] = alphabets;
    Ok(ChannelSpec {
        state_alphabet,
        input_alphabet,
        output_alphabet,
        feedback_alphabet,
        estimate_alphabet: Alphabet::new(n_est),
        state_prior: Distribution(raw.state_prior),
        law,
        cost,
        state_distortion,
        raw_labels: raw.labels,
    })
}

/// Binary channel `Y = S X` with perfect output feedback `Z = Y`,
/// `S ~ Bernoulli(q)`, Hamming state distortion and zero input cost.
pub fn build_binary_isac_channel(q: f64) -> Result<ChannelSpec> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain("q", q, "[0, 1]"));
    }
    let mut law = vec![vec![vec![vec![0.0; 2]; 2]; 2]; 2];
    for (s, by_x) in law.iter_mut().enumerate() {
        for (x, by_y) in by_x.iter_mut().enumerate() {
            let y = s * x;
            by_y[y][y] = 1.0;
        }
    }
    let raw = RawChannel {
        state_prior: vec![1.0 - q, q],
        law,
        cost: Some(vec![0.0, 0.0]),
        state_distortion: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        labels: None,
    };
    Ok(validate_channel(raw)?)
}

impl ChannelSpec {
    pub fn state_alphabet(&self) -> &Alphabet {
        &self.state_alphabet
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output_alphabet
    }

    pub fn feedback_alphabet(&self) -> &Alphabet {
        &self.feedback_alphabet
    }

    pub fn n_states(&self) -> usize {
        self.state_alphabet.size()
    }

    pub fn n_inputs(&self) -> usize {
        self.input_alphabet.size()
    }

    pub fn n_outputs(&self) -> usize {
        self.output_alphabet.size()
    }

    pub fn n_feedback(&self) -> usize {
        self.feedback_alphabet.size()
    }

    /// Size of the state-estimate alphabet (columns of the state distortion).
    pub fn n_estimates(&self) -> usize {
        self.estimate_alphabet.size()
    }

    pub fn state_prior(&self) -> &Distribution {
        &self.state_prior
    }

    /// `P(y, z | s, x)`.
    #[inline]
    pub fn law(&self, s: usize, x: usize, y: usize, z: usize) -> f64 {
        let (nx, ny, nz) = (self.n_inputs(), self.n_outputs(), self.n_feedback());
        self.law[((s * nx + x) * ny + y) * nz + z]
    }

    /// `P(y | s, x)`, summed over the feedback.
    pub fn p_y_given_sx(&self, y: usize, s: usize, x: usize) -> f64 {
        (0..self.n_feedback()).map(|z| self.law(s, x, y, z)).sum()
    }

    /// `P(z | s, x)`, summed over the output.
    pub fn p_z_given_sx(&self, z: usize, s: usize, x: usize) -> f64 {
        (0..self.n_outputs()).map(|y| self.law(s, x, y, z)).sum()
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn state_distortion(&self, s: usize, s_hat: usize) -> f64 {
        self.state_distortion[s * self.n_estimates() + s_hat]
    }

    pub fn max_state_distortion(&self) -> f64 {
        self.state_distortion.iter().copied().fold(0.0, f64::max)
    }

    /// The equivalent channel `x -> (s, y)` seen by a receiver that knows the
    /// state: `W[x][s * |Y| + y] = P_S(s) P(y | s, x)`. Its mutual information
    /// equals `I(X; Y | S)` because the input is independent of the state.
    pub fn state_augmented_channel(&self) -> Vec<Vec<f64>> {
        let ny = self.n_outputs();
        (0..self.n_inputs())
            .map(|x| {
                let mut row = vec![0.0; self.n_states() * ny];
                for s in 0..self.n_states() {
                    let ps = self.state_prior.probs()[s];
                    for y in 0..ny {
                        row[s * ny + y] = ps * self.p_y_given_sx(y, s, x);
                    }
                }
                row
            })
            .collect()
    }

    /// `I(X; Y | S)` for the given input distribution.
    pub fn conditional_mutual_information(&self, p_x: &Distribution) -> f64 {
        crate::info::mutual_information(p_x.probs(), &self.state_augmented_channel())
    }

    pub fn to_raw(&self) -> RawChannel {
        let (ns, nx, ny, nz) = (
            self.n_states(),
            self.n_inputs(),
            self.n_outputs(),
            self.n_feedback(),
        );
        let law = (0..ns)
            .map(|s| {
                (0..nx)
                    .map(|x| {
                        (0..ny)
                            .map(|y| (0..nz).map(|z| self.law(s, x, y, z)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let state_distortion = (0..ns)
            .map(|s| {
                (0..self.n_estimates())
                    .map(|t| self.state_distortion(s, t))
                    .collect()
            })
            .collect();
        RawChannel {
            state_prior: self.state_prior.probs().to_vec(),
            law,
            cost: Some(self.cost.clone()),
            state_distortion,
            labels: self.raw_labels.clone(),
        }
    }
}
