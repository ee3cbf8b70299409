//! Finite-alphabet probability model: alphabets, distributions, kernels, the
//! state-dependent channel and the source, with validation.

mod channel;
mod file;
mod source;
pub mod random;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use channel::{build_binary_isac_channel, validate_channel, ChannelSpec, RawChannel};
pub use file::{SpecFile, CHANNEL_SCHEMA};
pub use source::{validate_source, RawSource, SourceSpec};

/// Absolute tolerance for every stochasticity check.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// One violated invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    NonStochasticRow { s: usize, x: usize, deficit: f64 },
    NonStochastic { field: String, deficit: f64 },
    NegativeProbability { field: String, index: Vec<usize> },
    NonFinite { field: String, index: Vec<usize> },
    Negative { field: String, index: Vec<usize> },
    DimensionMismatch { field: String, expected: usize, found: usize },
    Empty { field: String },
    DuplicateLabel { field: String, label: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::NonStochasticRow { s, x, deficit } => {
                write!(f, "law[{s}][{x}] sums to {}, not 1", 1.0 - deficit)
            }
            ValidationIssue::NonStochastic { field, deficit } => {
                write!(f, "{field} sums to {}, not 1", 1.0 - deficit)
            }
            ValidationIssue::NegativeProbability { field, index } => {
                write!(f, "{field}{} is a negative probability", fmt_index(index))
            }
            ValidationIssue::NonFinite { field, index } => {
                write!(f, "{field}{} is not finite", fmt_index(index))
            }
            ValidationIssue::Negative { field, index } => {
                write!(f, "{field}{} is negative", fmt_index(index))
            }
            ValidationIssue::DimensionMismatch {
                field,
                expected,
                found,
            } => write!(f, "{field} has length {found}, expected {expected}"),
            ValidationIssue::Empty { field } => write!(f, "{field} is empty"),
            ValidationIssue::DuplicateLabel { field, label } => {
                write!(f, "{field} repeats the label {label:?}")
            }
        }
    }
}

fn fmt_index(index: &[usize]) -> String {
    index.iter().map(|i| format!("[{i}]")).collect()
}

/// Every invariant a specification violates, in discovery order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationErrors(pub Vec<ValidationIssue>);

impl ValidationErrors {
    pub fn issues(&self) -> &[ValidationIssue] {
        &self.0
    }

    pub(crate) fn push(&mut self, issue: ValidationIssue) {
        self.0.push(issue);
    }

    pub(crate) fn into_result<T>(self, ok: T) -> std::result::Result<T, ValidationErrors> {
        if self.0.is_empty() {
            Ok(ok)
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation issue(s)", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

/// A finite index set `0..size` with optional display labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Self {
        assert!(size >= 1, "alphabets are non-empty");
        Self { size, labels: None }
    }

    pub fn with_labels(labels: Vec<String>) -> std::result::Result<Self, ValidationErrors> {
        let mut errors = ValidationErrors::default();
        check_labels("labels", &labels, &mut errors);
        if labels.is_empty() {
            errors.push(ValidationIssue::Empty {
                field: "labels".into(),
            });
        }
        errors.into_result(Self {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }
}

pub(crate) fn check_labels(field: &str, labels: &[String], errors: &mut ValidationErrors) {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            errors.push(ValidationIssue::DuplicateLabel {
                field: field.to_string(),
                label: l.clone(),
            });
        }
    }
}

/// Checks entries are finite probabilities that sum to one.
pub(crate) fn check_distribution(field: &str, p: &[f64], errors: &mut ValidationErrors) {
    if p.is_empty() {
        errors.push(ValidationIssue::Empty {
            field: field.to_string(),
        });
        return;
    }
    let mut ok = true;
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() {
            ok = false;
            errors.push(ValidationIssue::NonFinite {
                field: field.to_string(),
                index: vec![i],
            });
        } else if v < 0.0 {
            ok = false;
            errors.push(ValidationIssue::NegativeProbability {
                field: field.to_string(),
                index: vec![i],
            });
        }
    }
    let deficit = 1.0 - p.iter().sum::<f64>();
    if ok && deficit.abs() > STOCHASTIC_TOL {
        errors.push(ValidationIssue::NonStochastic {
            field: field.to_string(),
            deficit,
        });
    }
}

/// Finite, non-negative entries (distortions and costs).
pub(crate) fn check_nonnegative(
    field: &str,
    index: &[usize],
    v: f64,
    errors: &mut ValidationErrors,
) {
    if !v.is_finite() {
        errors.push(ValidationIssue::NonFinite {
            field: field.to_string(),
            index: index.to_vec(),
        });
    } else if v < 0.0 {
        errors.push(ValidationIssue::Negative {
            field: field.to_string(),
            index: index.to_vec(),
        });
    }
}

/// A probability vector over an index alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probabilities: Vec<f64>) -> std::result::Result<Self, ValidationErrors> {
        let mut errors = ValidationErrors::default();
        check_distribution("distribution", &probabilities, &mut errors);
        errors.into_result(Self(probabilities))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut p = vec![0.0; n];
        p[at] = 1.0;
        Self(p)
    }

    /// Two-point distribution `(p0, 1 - p0)`.
    pub fn bernoulli_zero(p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::domain("P(0)", p0, "[0, 1]"));
        }
        Ok(Self(vec![p0, 1.0 - p0]))
    }

    /// Caller guarantees the vector is a distribution up to rounding; used for
    /// solver iterates that are normalized by construction.
    pub(crate) fn from_normalized(mut p: Vec<f64>) -> Self {
        for v in &mut p {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total: f64 = p.iter().sum();
        if total > 0.0 && total != 1.0 {
            for v in &mut p {
                *v /= total;
            }
        }
        Self(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn expect(&self, f: &[f64]) -> f64 {
        self.0.iter().zip(f).map(|(p, v)| p * v).sum()
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Distribution::new(v).map_err(serde::de::Error::custom)
    }
}

/// Row-stochastic kernel: rows indexed by the conditioning alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ConditionalDistribution {
    pub fn new(kernel: Vec<Vec<f64>>) -> std::result::Result<Self, ValidationErrors> {
        let mut errors = ValidationErrors::default();
        let rows = kernel.len();
        let cols = kernel.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            errors.push(ValidationIssue::Empty {
                field: "kernel".into(),
            });
        }
        for (i, row) in kernel.iter().enumerate() {
            if row.len() != cols {
                errors.push(ValidationIssue::DimensionMismatch {
                    field: format!("kernel[{i}]"),
                    expected: cols,
                    found: row.len(),
                });
                continue;
            }
            check_distribution(&format!("kernel[{i}]"), row, &mut errors);
        }
        let data = kernel.into_iter().flatten().collect();
        errors.into_result(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    /// Every row equal to `row`.
    pub fn constant(rows: usize, row: &Distribution) -> Self {
        Self {
            rows,
            cols: row.len(),
            data: (0..rows).flat_map(|_| row.probs().iter().copied()).collect(),
        }
    }

    /// The binary encoder `P(X=0|U=0) = a`, `P(X=0|U=1) = b`.
    pub fn binary(a: f64, b: f64) -> Result<Self> {
        for (what, v) in [("a", a), ("b", b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(what, v, "[0, 1]"));
            }
        }
        Ok(Self {
            rows: 2,
            cols: 2,
            data: vec![a, 1.0 - a, b, 1.0 - b],
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// `P_X(x) = sum_u P_U(u) P_{X|U}(x|u)`.
pub fn marginal_input(
    p_u: &Distribution,
    p_x_given_u: &ConditionalDistribution,
) -> Result<Distribution> {
    if p_u.len() != p_x_given_u.rows() {
        return Err(Error::DimensionMismatch(format!(
            "kernel has {} rows but the source has {} symbols",
            p_x_given_u.rows(),
            p_u.len()
        )));
    }
    let mut p_x = vec![0.0; p_x_given_u.cols()];
    for (u, pu) in p_u.probs().iter().enumerate() {
        for (px, k) in p_x.iter_mut().zip(p_x_given_u.row(u)) {
            *px += pu * k;
        }
    }
    Ok(Distribution::new(p_x)?)
}
