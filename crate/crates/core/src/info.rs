//! Entropy and mutual-information helpers. Base-2 logarithms, `0 log 0 = 0`.

/// `-t log2 t`, zero at `t = 0`.
#[inline]
pub fn plogp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -t * t.log2()
    }
}

/// Binary entropy in bits, exact at the endpoints. The smaller mass is always
/// evaluated first so that `h_b(t)` and `h_b(1 - t)` agree whenever `1 - (1 - t) == t`.
pub fn binary_entropy(t: f64) -> f64 {
    let (lo, hi) = if t <= 0.5 { (t, 1.0 - t) } else { (1.0 - t, t) };
    plogp(lo) + plogp(hi)
}

/// Shannon entropy of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().map(|&t| plogp(t)).sum()
}

/// `I(X;Y)` for input distribution `p` and row-stochastic channel `w[x][y]`.
pub fn mutual_information(p: &[f64], w: &[Vec<f64>]) -> f64 {
    let ny = w.first().map_or(0, Vec::len);
    let mut q = vec![0.0; ny];
    for (px, row) in p.iter().zip(w) {
        for (qy, wy) in q.iter_mut().zip(row) {
            *qy += px * wy;
        }
    }
    let mut mi = 0.0;
    for (px, row) in p.iter().zip(w) {
        if *px <= 0.0 {
            continue;
        }
        for (qy, wy) in q.iter().zip(row) {
            if *wy > 0.0 {
                mi += px * wy * (wy / qy).log2();
            }
        }
    }
    mi.max(0.0)
}

/// Numerically stable `log2(sum 2^v)`; returns `-inf` for an empty or all `-inf` input.
pub fn log2_sum_exp2(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = values.into_iter().map(|v| (v - max).exp2()).sum();
    max + sum.log2()
}
