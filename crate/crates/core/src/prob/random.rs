//! Random channels and sources for property tests and benchmarks.

use rand::Rng;

use super::{validate_channel, validate_source, ChannelSpec, RawChannel, RawSource, SourceSpec};

/// Alphabet sizes `(|S|, |X|, |Y|, |Z|)`.
pub type Dims = (usize, usize, usize, usize);

/// A probability vector with roughly one entry in five set to zero.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() + 1e-3 })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[rng.random_range(0..len)] = 1.0;
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

pub fn random_dims<R: Rng + ?Sized>(rng: &mut R, max: usize) -> Dims {
    (
        rng.random_range(1..=max),
        rng.random_range(2..=max),
        rng.random_range(1..=max),
        rng.random_range(1..=max),
    )
}

/// A channel with a positive-mass state prior, random law, costs in `[0, 1)`
/// and a state distortion with zero diagonal.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, (ns, nx, ny, nz): Dims) -> ChannelSpec {
    let mut state_prior: Vec<f64> = (0..ns).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = state_prior.iter().sum();
    state_prior.iter_mut().for_each(|p| *p /= total);
    let law = (0..ns)
        .map(|_| {
            (0..nx)
                .map(|_| {
                    random_simplex(rng, ny * nz)
                        .chunks(nz)
                        .map(<[f64]>::to_vec)
                        .collect()
                })
                .collect()
        })
        .collect();
    let cost = Some((0..nx).map(|_| rng.random::<f64>()).collect());
    let state_distortion = (0..ns)
        .map(|s| (0..ns).map(|t| if s == t { 0.0 } else { rng.random::<f64>() + 0.1 }).collect())
        .collect();
    validate_channel(RawChannel {
        state_prior,
        law,
        cost,
        state_distortion,
        labels: None,
    })
    .expect("random channel is valid")
}

/// A source with `n_symbols` letters, `n_reconstructions` estimates and
/// distortions in `[0, 1)`.
pub fn random_source<R: Rng + ?Sized>(rng: &mut R, n_symbols: usize, n_reconstructions: usize) -> SourceSpec {
    let mut prior: Vec<f64> = (0..n_symbols).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = prior.iter().sum();
    prior.iter_mut().for_each(|p| *p /= total);
    let distortion = (0..n_symbols)
        .map(|_| (0..n_reconstructions).map(|_| rng.random::<f64>()).collect())
        .collect();
    validate_source(RawSource { prior, distortion }).expect("random source is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_specs_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let d = random_dims(&mut rng, 4);
            let c = random_channel(&mut rng, d);
            assert_eq!((c.n_states(), c.n_inputs(), c.n_outputs(), c.n_feedback()), d);
            random_source(&mut rng, d.0 + 1, d.1);
        }
    }
}
