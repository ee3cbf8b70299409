use isac_core::info::mutual_information;
use isac_core::prob::random::{random_channel, random_dims};
use isac_core::tradeoff::{CapacitySolver, ConstraintSet};
use isac_core::{build_binary_isac_channel, sensing_estimator, ChannelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `{t in [0, 1] : f1 + t (f0 - f1) <= budget}` for `P_X = (t, 1 - t)`.
fn feasible_interval(f: &[f64], budget: f64) -> Option<(f64, f64)> {
    let (f0, f1) = (f[0], f[1]);
    let slope = f0 - f1;
    if slope == 0.0 {
        return (f1 <= budget + 1e-12).then_some((0.0, 1.0));
    }
    // Budgets are met up to rounding, as the solver meets them.
    let root = (budget + 1e-12 - f1) / slope;
    let (lo, hi) = if slope > 0.0 { (0.0, root.min(1.0)) } else { (root.max(0.0), 1.0) };
    (lo <= hi).then_some((lo, hi))
}

/// Brute-force `max I(X;Y|S)` over `P_X = (t, 1 - t)` on `steps + 1` values of
/// `t` spanning the feasible interval, endpoints included.
fn line_search(spec: &ChannelSpec, d_s: f64, budget: f64, steps: usize) -> Option<f64> {
    let w = spec.state_augmented_channel();
    let c = sensing_estimator(spec).cost().to_vec();
    let (a0, a1) = feasible_interval(&c, d_s)?;
    let (b0, b1) = feasible_interval(spec.cost(), budget)?;
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    if lo > hi {
        return None;
    }
    (0..=steps)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / steps as f64;
            mutual_information(&[t, 1.0 - t], &w)
        })
        .reduce(f64::max)
}

#[test]
fn binary_input_channels_match_line_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..40 {
        let (ns, _, ny, nz) = random_dims(&mut rng, 3);
        let spec = random_channel(&mut rng, (ns, 2, ny, nz));
        let solver = CapacitySolver::new(&spec);
        let floor = solver.floors(f64::INFINITY, None).unwrap().ds_min;
        let top = solver.saturation_distortion(f64::INFINITY).unwrap();
        let budget = if case % 2 == 0 { f64::INFINITY } else { spec.cost().iter().sum::<f64>() / 2.0 };
        let d_s = floor + rng.random::<f64>() * (top - floor).max(0.0);
        let Some(oracle) = line_search(&spec, d_s, budget, 10_000) else {
            continue;
        };
        let solved = solver.capacity_distortion_cost(ConstraintSet::new(d_s, budget).unwrap()).unwrap();
        assert!((solved.value - oracle).abs() <= 1e-5, "case {case}: {} vs {oracle}", solved.value);
        assert!(solved.achieved_ds <= d_s + 1e-6 && solved.achieved_b <= budget + 1e-6);
    }
}

#[test]
fn binary_example_line_search() {
    let spec = build_binary_isac_channel(0.4).unwrap();
    let solver = CapacitySolver::new(&spec);
    for d_s in [0.02, 0.08, 0.16] {
        let oracle = line_search(&spec, d_s, f64::INFINITY, 10_000).unwrap();
        let v = solver.capacity_distortion_cost(ConstraintSet::new(d_s, f64::INFINITY).unwrap()).unwrap().value;
        assert!((v - oracle).abs() < 1e-4, "{d_s}: {v} vs {oracle}");
    }
}

#[test]
fn curves_are_monotone_concave_and_saturate() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..5 {
        let dims = random_dims(&mut rng, 4);
        let spec = random_channel(&mut rng, dims);
        let solver = CapacitySolver::new(&spec);
        let costs = spec.cost();
        let (lo, hi) = costs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
        let budget = lo + 0.6 * (hi - lo);
        let floor = solver.floors(budget, None).unwrap().ds_min;
        let top = solver.saturation_distortion(budget).unwrap();
        let grid: Vec<f64> = (0..=10).map(|i| floor + (top - floor) * 1.2 * i as f64 / 10.0).collect();
        let curve = solver.sweep_curve(budget, &grid);
        assert!(curve.points.iter().all(|p| p.result.is_ok()), "case {case}");
        assert!(curve.monotonicity_violations(1e-6).is_empty(), "case {case}");
        assert!(curve.concavity_violations(1e-6).is_empty(), "case {case}");
        let c_noest = solver.capacity_unconstrained(budget).unwrap().value;
        for p in curve.points.iter().filter(|p| p.d_s >= top) {
            assert!((p.value().unwrap() - c_noest).abs() <= 1e-6, "case {case}");
        }
    }
}

#[test]
fn below_floor_is_infeasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spec = random_channel(&mut rng, (3, 3, 2, 2));
    let solver = CapacitySolver::new(&spec);
    let floor = solver.floors(f64::INFINITY, None).unwrap().ds_min;
    if floor > 1e-6 {
        let err = solver.capacity_distortion_cost(ConstraintSet::new(floor - 1e-6, f64::INFINITY).unwrap());
        assert!(matches!(err, Err(isac_core::Error::Infeasible { .. })));
    }
    assert!(solver.capacity_distortion_cost(ConstraintSet::new(floor, f64::INFINITY).unwrap()).is_ok());
}
