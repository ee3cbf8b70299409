use isac_core::info::{binary_entropy, entropy};
use isac_core::prob::random::random_source;
use isac_core::tradeoff::{rate_distortion, rd_sweep};
use isac_core::{Distribution, SourceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bernoulli_hamming_closed_form() {
    for p in [0.1, 0.3, 0.5] {
        let src = SourceSpec::hamming(Distribution::bernoulli_zero(p).unwrap());
        for k in 0..=20 {
            let d = 0.5 * k as f64 / 20.0;
            let r = rate_distortion(&src, d).unwrap().value;
            let expected = if d < p.min(1.0 - p) { binary_entropy(p) - binary_entropy(d) } else { 0.0 };
            assert!((r - expected).abs() < 1e-6, "p={p} d={d}: {r} vs {expected}");
        }
    }
}

#[test]
fn random_sources_are_convex_and_non_increasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..8 {
        let nu = rng.random_range(2..=4);
        let nr = rng.random_range(2..=4);
        let src = random_source(&mut rng, nu, nr);
        let lo = src.min_distortion();
        let hi = src.zero_rate_distortion().1;
        let grid: Vec<f64> = (0..=12).map(|i| lo + (hi - lo) * 1.1 * i as f64 / 12.0).collect();
        let curve = rd_sweep(&src, &grid);
        assert!(curve.points.iter().all(|p| p.result.is_ok()), "case {case}: {:?}", curve.points);
        assert!(curve.monotonicity_violations(1e-6).is_empty(), "case {case}");
        assert!(curve.convexity_violations(1e-6).is_empty(), "case {case}");
        for p in &curve.points {
            let r = p.result.as_ref().unwrap();
            assert!(r.achieved_du <= p.d_u + 1e-6);
            assert!(r.value >= 0.0 && r.value <= entropy(src.prior().probs()) + 1e-9);
        }
    }
}

#[test]
fn csv_has_empty_sensing_column() {
    let src = SourceSpec::hamming(Distribution::uniform(2));
    let csv = rd_sweep(&src, &[0.1, 0.2]).to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("d_u,d_s,r_bits"));
    assert!(lines.next().unwrap().starts_with("0.1,,"));
}
