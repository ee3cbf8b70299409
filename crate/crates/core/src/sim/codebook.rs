use super::{sample_iid, stream, Role};
use crate::error::{Error, Result};
use crate::prob::{ChannelSpec, Distribution};

/// Desk-scale guard on `ceil(n R)`.
pub const MAX_CODEBOOK_BITS: u32 = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub rate: f64,
    pub n: usize,
    pub bits: u32,
    pub seed: u64,
    pub input: Distribution,
    /// Row-major, `2^bits` rows of length `n`.
    symbols: Vec<usize>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        1 << self.bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn codeword(&self, w: usize) -> &[usize] {
        &self.symbols[w * self.n..(w + 1) * self.n]
    }

    /// Mean and variance of `f(x)` over every codeword symbol.
    pub fn symbol_moments(&self, f: &[f64]) -> (f64, f64) {
        let count = self.symbols.len() as f64;
        if count == 0.0 {
            return (0.0, 0.0);
        }
        let mean = self.symbols.iter().map(|&x| f[x]).sum::<f64>() / count;
        let var = self.symbols.iter().map(|&x| (f[x] - mean).powi(2)).sum::<f64>() / count;
        (mean, var)
    }

    /// A codebook with explicit codewords, for constructed cases.
    pub fn from_codewords(input: Distribution, codewords: Vec<Vec<usize>>) -> Result<Self> {
        let count = codewords.len();
        if !count.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!("{count} codewords is not a power of two")));
        }
        let n = codewords[0].len();
        if codewords.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch("codewords differ in length".into()));
        }
        if codewords.iter().flatten().any(|&x| x >= input.len()) {
            return Err(Error::DimensionMismatch("codeword symbol is not an input".into()));
        }
        let bits = count.trailing_zeros();
        Ok(Self {
            rate: if n == 0 { 0.0 } else { bits as f64 / n as f64 },
            n,
            bits,
            seed: 0,
            input,
            symbols: codewords.concat(),
        })
    }
}

/// `ceil(n R)`, forgiving rounding noise just above an integer.
pub(crate) fn codebook_bits(rate: f64, n: usize) -> Result<u32> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::domain("rate", rate, "[0, inf)"));
    }
    let bits = (rate * n as f64 - 1e-9).ceil().max(0.0);
    if bits > MAX_CODEBOOK_BITS as f64 {
        return Err(Error::TooLarge {
            bits: bits.min(u32::MAX as f64) as u32,
            limit: MAX_CODEBOOK_BITS,
        });
    }
    Ok(bits as u32)
}

pub fn generate_codebook(spec: &ChannelSpec, p_x: &Distribution, rate: f64, n: usize, seed: u64) -> Result<Codebook> {
    if p_x.len() != spec.n_inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input distribution has {} entries, channel has {} inputs",
            p_x.len(),
            spec.n_inputs()
        )));
    }
    let bits = codebook_bits(rate, n)?;
    let mut symbols = Vec::with_capacity(n << bits);
    for w in 0..1u64 << bits {
        symbols.extend(sample_iid(p_x, n, &mut stream(seed, Role::Codeword, w)));
    }
    Ok(Codebook {
        rate,
        n,
        bits,
        seed,
        input: p_x.clone(),
        symbols,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("no codeword is jointly typical")]
    None,
    #[error("{0} codewords are jointly typical")]
    Ambiguous(usize),
}

/// Robust typicality test of `(s, x(w), y)` against `P_S P_X P(y|s,x)`: each
/// triple count must lie within `(1 +- epsilon)` of `n P`, and zero-probability
/// triples must not occur.
pub fn typicality_decode(
    spec: &ChannelSpec,
    codebook: &Codebook,
    y: &[usize],
    s: &[usize],
    epsilon: f64,
) -> std::result::Result<usize, DecodeError> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let (nx, ny) = (spec.n_inputs(), spec.n_outputs());
    let n = codebook.n;
    assert!(y.len() == n && s.len() == n, "sequence length differs from blocklength");
    let p_s = spec.state_prior().probs();
    let p_x = codebook.input.probs();
    let cells = spec.n_states() * nx * ny;
    let mut lower = vec![0.0; cells];
    let mut upper = vec![0.0; cells];
    for (i, (lo, hi)) in lower.iter_mut().zip(upper.iter_mut()).enumerate() {
        let (sx, yv) = (i / ny, i % ny);
        let (sv, xv) = (sx / nx, sx % nx);
        let mass = n as f64 * p_s[sv] * p_x[xv] * spec.p_y_given_sx(yv, sv, xv);
        *lo = (1.0 - epsilon) * mass;
        *hi = (1.0 + epsilon) * mass;
    }
    // Position i contributes to cell (s_i, x_i, y_i); precompute the x-free part.
    let base: Vec<usize> = s.iter().zip(y).map(|(&sv, &yv)| sv * nx * ny + yv).collect();

    let mut counts = vec![0u32; cells];
    let mut found = None;
    let mut matches = 0;
    for w in 0..codebook.len() {
        counts.iter_mut().for_each(|c| *c = 0);
        let x = codebook.codeword(w);
        let mut ok = true;
        for (b, &xv) in base.iter().zip(x) {
            let cell = b + xv * ny;
            counts[cell] += 1;
            if counts[cell] as f64 > upper[cell] {
                ok = false;
                break;
            }
        }
        if ok && counts.iter().zip(&lower).all(|(&c, &lo)| c as f64 >= lo) {
            matches += 1;
            found = Some(w);
        }
    }
    match (matches, found) {
        (1, Some(w)) => Ok(w),
        (0, _) => Err(DecodeError::None),
        (k, _) => Err(DecodeError::Ambiguous(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::build_binary_isac_channel;

    fn binary() -> (ChannelSpec, Distribution) {
        (build_binary_isac_channel(0.4).unwrap(), Distribution::bernoulli_zero(0.4).unwrap())
    }

    #[test]
    fn codebook_size() {
        let (spec, px) = binary();
        let cb = generate_codebook(&spec, &px, 0.3, 30, 7).unwrap();
        assert_eq!(cb.len(), 512);
        assert_eq!(cb.codeword(511).len(), 30);
        assert_eq!(generate_codebook(&spec, &px, 0.0, 30, 7).unwrap().len(), 1);
        // 0.25 * 20 = 5 exactly.
        assert_eq!(generate_codebook(&spec, &px, 0.25, 20, 7).unwrap().bits, 5);
    }

    #[test]
    fn codebook_is_deterministic() {
        let (spec, px) = binary();
        let a = generate_codebook(&spec, &px, 0.3, 30, 11).unwrap();
        assert_eq!(a, generate_codebook(&spec, &px, 0.3, 30, 11).unwrap());
        assert_ne!(a, generate_codebook(&spec, &px, 0.3, 30, 12).unwrap());
    }

    #[test]
    fn guard_rejects_large_codebooks() {
        let (spec, px) = binary();
        assert!(matches!(
            generate_codebook(&spec, &px, 1.0, 25, 0),
            Err(Error::TooLarge { bits: 25, limit: 24 })
        ));
    }

    #[test]
    fn identical_codewords_are_ambiguous() {
        let spec = build_binary_isac_channel(0.5).unwrap();
        let px = Distribution::uniform(2);
        let word = vec![0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1];
        let cb = Codebook::from_codewords(px, vec![word.clone(), word.clone()]).unwrap();
        // States chosen so the joint type is exactly n P.
        let s = vec![0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1];
        let y: Vec<usize> = s.iter().zip(&word).map(|(a, b)| a * b).collect();
        assert_eq!(typicality_decode(&spec, &cb, &y, &s, 0.01), Err(DecodeError::Ambiguous(2)));
    }

    #[test]
    fn unique_typical_codeword_is_decoded() {
        let spec = build_binary_isac_channel(0.5).unwrap();
        let px = Distribution::uniform(2);
        let word = vec![0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1];
        let other: Vec<usize> = vec![0; 16];
        let cb = Codebook::from_codewords(px, vec![other, word.clone()]).unwrap();
        let s = vec![0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1];
        let y: Vec<usize> = s.iter().zip(&word).map(|(a, b)| a * b).collect();
        assert_eq!(typicality_decode(&spec, &cb, &y, &s, 0.01), Ok(1));
        // Flipping one output makes the true codeword atypical.
        let mut bad = y.clone();
        let i = s.iter().zip(&word).position(|(&a, &b)| a == 1 && b == 1).unwrap();
        bad[i] = 0;
        assert_eq!(typicality_decode(&spec, &cb, &bad, &s, 0.01), Err(DecodeError::None));
    }
}
