//! Bisection on a single Lagrange multiplier with endpoint mixing.

/// Largest multiplier tried before a budget is declared unreachable.
pub(crate) const LAMBDA_MAX: f64 = 1e15;
const GROWTH: f64 = 8.0;
const MAX_BISECTIONS: usize = 200;
const REL_WIDTH: f64 = 1e-10;

/// A penalized solution that can be mixed with another to interpolate a budget.
pub(crate) trait Mixable: Sized {
    /// `theta * self + (1 - theta) * other`.
    fn mix(&self, other: &Self, theta: f64) -> Self;
}

#[derive(Debug)]
pub(crate) enum Search<C> {
    /// The budget holds with multiplier `lambda`; equality when `lambda > 0`.
    Met { candidate: C, lambda: f64 },
    /// Even `LAMBDA_MAX` leaves the measure above the budget.
    Saturated { candidate: C, lambda: f64 },
}

/// Finds the smallest multiplier whose penalized optimum keeps `measure` within
/// `budget`, assuming `measure` is non-increasing in the multiplier. An
/// inactive budget gets multiplier zero. When the budget is active, the two
/// iterates bracketing the root are mixed so that the measure lands on the
/// budget.
pub(crate) fn meet_budget<C: Mixable, E>(
    mut solve: impl FnMut(f64) -> Result<C, E>,
    measure: impl Fn(&C) -> f64,
    budget: f64,
) -> Result<Search<C>, E> {
    let c0 = solve(0.0)?;
    if measure(&c0) <= budget {
        return Ok(Search::Met {
            candidate: c0,
            lambda: 0.0,
        });
    }
    let mut lo = (0.0, c0);
    let mut lambda = 1.0;
    let mut hi = loop {
        let c = solve(lambda)?;
        if measure(&c) <= budget {
            break (lambda, c);
        }
        if lambda * GROWTH > LAMBDA_MAX {
            return Ok(Search::Saturated {
                candidate: c,
                lambda,
            });
        }
        lo = (lambda, c);
        lambda *= GROWTH;
    };

    for _ in 0..MAX_BISECTIONS {
        if hi.0 - lo.0 <= REL_WIDTH * hi.0 {
            break;
        }
        let mid = 0.5 * (lo.0 + hi.0);
        let c = solve(mid)?;
        let m = measure(&c);
        if m <= budget {
            if budget - m <= 1e-15 * budget.abs().max(1.0) {
                return Ok(Search::Met {
                    candidate: c,
                    lambda: mid,
                });
            }
            hi = (mid, c);
        } else {
            lo = (mid, c);
        }
    }

    let (m_lo, m_hi) = (measure(&lo.1), measure(&hi.1));
    let theta = if m_lo > m_hi {
        ((budget - m_hi) / (m_lo - m_hi)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(Search::Met {
        candidate: lo.1.mix(&hi.1, theta),
        lambda: theta * lo.0 + (1.0 - theta) * hi.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    struct Point(f64);

    impl Mixable for Point {
        fn mix(&self, other: &Self, theta: f64) -> Self {
            Point(theta * self.0 + (1.0 - theta) * other.0)
        }
    }

    #[test]
    fn inactive_budget_has_zero_multiplier() {
        let out = meet_budget(|l| Ok::<_, ()>(Point(1.0 / (1.0 + l))), |p| p.0, 2.0).unwrap();
        assert!(matches!(out, Search::Met { lambda, .. } if lambda == 0.0));
    }

    #[test]
    fn discontinuous_measure_is_interpolated() {
        // A jump at lambda = 3 cannot be hit by any single multiplier.
        let out = meet_budget(
            |l| Ok::<_, ()>(Point(if l < 3.0 { 1.0 } else { 0.0 })),
            |p| p.0,
            0.25,
        )
        .unwrap();
        match out {
            Search::Met { candidate, lambda } => {
                assert!((candidate.0 - 0.25).abs() < 1e-15);
                assert!((lambda - 3.0).abs() < 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unreachable_budget_saturates() {
        let out = meet_budget(|l| Ok::<_, ()>(Point(1.0 + 1.0 / (1.0 + l))), |p| p.0, 0.5).unwrap();
        assert!(matches!(out, Search::Saturated { .. }));
    }
}
