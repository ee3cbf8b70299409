use serde::{Deserialize, Serialize};

use super::{
    check_distribution, check_nonnegative, Alphabet, Distribution, ValidationErrors,
    ValidationIssue,
};

/// Unvalidated i.i.d. source with a reconstruction distortion.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSource {
    pub prior: Vec<f64>,
    /// `distortion[u][u_hat]`.
    pub distortion: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    source_alphabet: Alphabet,
    reconstruction_alphabet: Alphabet,
    prior: Distribution,
    distortion: Vec<f64>,
}

pub fn validate_source(raw: RawSource) -> Result<SourceSpec, ValidationErrors> {
    let mut errors = ValidationErrors::default();
    check_distribution("source.prior", &raw.prior, &mut errors);
    let nu = raw.prior.len();
    if raw.distortion.len() != nu {
        errors.push(ValidationIssue::DimensionMismatch {
            field: "source.distortion".into(),
            expected: nu,
            found: raw.distortion.len(),
        });
    }
    let nr = raw.distortion.first().map_or(0, Vec::len);
    if nr == 0 {
        errors.push(ValidationIssue::Empty {
            field: "source.distortion[0]".into(),
        });
    }
    let mut distortion = Vec::with_capacity(nu * nr);
    for (u, row) in raw.distortion.iter().enumerate() {
        if row.len() != nr {
            errors.push(ValidationIssue::DimensionMismatch {
                field: format!("source.distortion[{u}]"),
                expected: nr,
                found: row.len(),
            });
            continue;
        }
        for (r, &d) in row.iter().enumerate() {
            check_nonnegative("source.distortion", &[u, r], d, &mut errors);
            distortion.push(d);
        }
    }
    if !errors.0.is_empty() {
        return Err(errors);
    }
    Ok(SourceSpec {
        source_alphabet: Alphabet::new(nu),
        reconstruction_alphabet: Alphabet::new(nr),
        prior: Distribution(raw.prior),
        distortion,
    })
}

impl SourceSpec {
    /// Source `U ~ P_U` reconstructed over the same alphabet under Hamming distortion.
    pub fn hamming(prior: Distribution) -> Self {
        let n = prior.len();
        let distortion = (0..n * n)
            .map(|i| if i / n == i % n { 0.0 } else { 1.0 })
            .collect();
        Self {
            source_alphabet: Alphabet::new(n),
            reconstruction_alphabet: Alphabet::new(n),
            prior,
            distortion,
        }
    }

    pub fn source_alphabet(&self) -> &Alphabet {
        &self.source_alphabet
    }

    pub fn reconstruction_alphabet(&self) -> &Alphabet {
        &self.reconstruction_alphabet
    }

    pub fn n_symbols(&self) -> usize {
        self.source_alphabet.size()
    }

    pub fn n_reconstructions(&self) -> usize {
        self.reconstruction_alphabet.size()
    }

    pub fn prior(&self) -> &Distribution {
        &self.prior
    }

    #[inline]
    pub fn distortion(&self, u: usize, u_hat: usize) -> f64 {
        self.distortion[u * self.n_reconstructions() + u_hat]
    }

    pub fn max_distortion(&self) -> f64 {
        self.distortion.iter().copied().fold(0.0, f64::max)
    }

    /// `min_{u_hat} E[d(U, u_hat)]`: the distortion reachable at zero rate.
    pub fn zero_rate_distortion(&self) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for r in 0..self.n_reconstructions() {
            let e: f64 = (0..self.n_symbols())
                .map(|u| self.prior.probs()[u] * self.distortion(u, r))
                .sum();
            if e < best.1 {
                best = (r, e);
            }
        }
        best
    }

    /// `sum_u P_U(u) min_{u_hat} d(u, u_hat)`: the smallest achievable distortion.
    pub fn min_distortion(&self) -> f64 {
        (0..self.n_symbols())
            .map(|u| {
                let m = (0..self.n_reconstructions())
                    .map(|r| self.distortion(u, r))
                    .fold(f64::INFINITY, f64::min);
                self.prior.probs()[u] * m
            })
            .sum()
    }

    pub fn to_raw(&self) -> RawSource {
        RawSource {
            prior: self.prior.probs().to_vec(),
            distortion: (0..self.n_symbols())
                .map(|u| {
                    (0..self.n_reconstructions())
                        .map(|r| self.distortion(u, r))
                        .collect()
                })
                .collect(),
        }
    }
}
