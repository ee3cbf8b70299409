use isac_core::binary::{
    binary_curves, closed_form_c, closed_form_r, find_intersection, in_region, parametric_oracle, BinaryParams,
    Coupling,
};
use isac_core::info::binary_entropy;
use isac_core::tradeoff::{CapacitySolver, ConstraintSet};
use isac_core::{build_binary_isac_channel, Error};

/// `R(0.4, 0.4; D_u = 0.3, D_s = 0.16)`, frozen from [`bisection_oracle`].
const R_04_03_016: f64 = 0.146_530_809_794;
/// Intersection value for `p = q = 1/4`, frozen from [`bisection_oracle`] at the corner.
const CORNER_025: f64 = 0.202_819_531_115;

/// Solves the parametric system directly: `alpha = D_s / q`, then bisects on
/// `a` (with `b` tied to `alpha`) until the communication distortion hits `D_u`.
fn bisection_oracle(p: f64, q: f64, d_u: f64, d_s: f64) -> Option<f64> {
    let alpha = d_s / q;
    let b_of = |a: f64| (alpha - p * a) / (1.0 - p);
    let du_of = |a: f64| (1.0 - q) * p + q * (1.0 - p) * b_of(a) + q * p * (1.0 - a);
    // du_of is decreasing in a.
    let (mut lo, mut hi) = (0.0, 1.0);
    if du_of(lo) < d_u - 1e-12 || du_of(hi) > d_u + 1e-12 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if du_of(mid) > d_u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let b = b_of(a);
    (-1e-12..=1.0 + 1e-12).contains(&b).then(|| {
        q * binary_entropy(alpha) - p * q * binary_entropy(a) - (1.0 - p) * q * binary_entropy(b.clamp(0.0, 1.0))
    })
}

fn params(p: f64, q: f64) -> BinaryParams {
    BinaryParams::new(p, q).unwrap()
}

#[test]
fn frozen_values_match_oracle() {
    let oracle = bisection_oracle(0.4, 0.4, 0.3, 0.16).unwrap();
    assert!((oracle - R_04_03_016).abs() < 1e-11);
    let corner = bisection_oracle(0.25, 0.25, 0.1875, 0.0625).unwrap();
    assert!((corner - CORNER_025).abs() < 1e-11);
}

#[test]
fn closed_form_r_derived_point() {
    let r = closed_form_r(&params(0.4, 0.4), 0.3, 0.16).unwrap();
    assert!((r - R_04_03_016).abs() < 1e-11);
    let grid = parametric_oracle(&params(0.4, 0.4), 0.3, 0.16, 1000).unwrap();
    assert!((grid - R_04_03_016).abs() < 5e-3);
}

#[test]
fn intersection_examples() {
    let x = find_intersection(&params(0.4, 0.4), 1e-10).unwrap();
    assert!((x.d_s - 0.16).abs() < 1e-3 && (x.d_u - 0.24).abs() < 1e-3 && (x.value - 0.3884).abs() < 1e-3);

    let y = find_intersection(&params(0.25, 0.25), 1e-10).unwrap();
    assert!((y.d_s - 0.0625).abs() < 1e-9 && (y.d_u - 0.1875).abs() < 1e-9);
    assert!((y.value - CORNER_025).abs() < 1e-9);
    let grid = parametric_oracle(&params(0.25, 0.25), y.d_u, y.d_s, 1000).unwrap();
    assert!((grid - CORNER_025).abs() < 2e-3);

    let z = find_intersection(&params(0.0, 0.4), 1e-10).unwrap();
    assert_eq!((z.d_s, z.d_u, z.value), (0.0, 0.0, 0.0));
    assert!(matches!(find_intersection(&params(0.4, 0.0), 1e-10), Err(Error::Domain { .. })));
}

#[test]
fn corner_point_oracle() {
    let v = parametric_oracle(&params(0.4, 0.4), 0.24, 0.16, 1000).unwrap();
    assert!((v - 0.3884).abs() < 2e-3);
}

#[test]
fn no_transmission_has_zero_rate() {
    let v = parametric_oracle(&params(0.4, 0.4), 0.4, 0.0, 1000).unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn unreachable_pair_has_no_feasible_point() {
    assert!(matches!(
        parametric_oracle(&params(0.4, 0.4), 0.0, 0.16, 200),
        Err(Error::NoFeasiblePoint)
    ));
    assert!(parametric_oracle(&params(0.4, 0.4), 0.3, 0.16, 50).is_err());
}

#[test]
fn oracle_never_undercuts_closed_form() {
    let b = params(0.25, 0.4);
    let n = 400;
    for i in 1..10 {
        for j in 1..10 {
            let d_s = 0.2 * i as f64 / 10.0;
            let d_u = 0.5 * j as f64 / 10.0;
            if let Ok(r) = closed_form_r(&b, d_u, d_s) {
                if let Ok(v) = parametric_oracle(&b, d_u, d_s, n) {
                    assert!(v >= r - 5.0 / n as f64, "({d_u}, {d_s}): {v} < {r}");
                }
            }
        }
    }
}

#[test]
fn symmetric_entropy_arguments() {
    // Reflecting a = 1 - a' and b = 1 - b' for the swapped source labels gives the same rate.
    let b = params(0.4, 0.4);
    let direct = b.parametric_rate(0.8125, 0.125);
    let h = |t: f64| binary_entropy(1.0 - t);
    let reflected = 0.4 * binary_entropy(b.alpha(0.8125, 0.125)) - 0.16 * h(0.8125) - 0.24 * h(0.125);
    assert!((direct - reflected).abs() < 1e-15);
    for k in 0..=16 {
        let t = k as f64 / 16.0;
        assert_eq!(binary_entropy(t), binary_entropy(1.0 - t));
    }
}

#[test]
fn solver_matches_capacity_closed_form() {
    let spec = build_binary_isac_channel(0.4).unwrap();
    let solver = CapacitySolver::new(&spec);
    let b = params(0.4, 0.4);
    for i in 0..=10 {
        let d_s = 0.2 * i as f64 / 10.0;
        let v = solver.capacity_distortion_cost(ConstraintSet::new(d_s, f64::INFINITY).unwrap()).unwrap().value;
        assert!((v - closed_form_c(&b, d_s).unwrap()).abs() < 1e-4);
    }
}

#[test]
fn curves_respect_converse_ordering() {
    for (p, q) in [(0.1, 0.1), (0.25, 0.25), (0.4, 0.25)] {
        let c = binary_curves(&params(p, q), 101, Coupling::Boundary).unwrap();
        assert!(c.ordering_violations(1e-9).is_empty());
        assert!(c.points.iter().all(|pt| pt.r.is_some()));
    }
    let fixed = binary_curves(&params(0.4, 0.4), 21, Coupling::Fixed { d_u: 0.3 }).unwrap();
    assert!(fixed.points.iter().any(|pt| pt.r.is_none()));
    assert!(fixed.points.iter().any(|pt| pt.r.is_some()));
    assert!(in_region(&params(0.4, 0.4), 0.3, 0.16));
}
