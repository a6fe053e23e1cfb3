//! Gini concentration of per-entity interaction counts.

/// Gini coefficient of the given counts:
///
/// ```text
/// G = 1 − 2·Σ_{j=1..n} ((n+1−j)/(n+1)) · (count_j / total)
/// ```
///
/// with counts sorted ascending. 0 for perfectly uniform counts; approaches
/// 1 − 2/(n+1) when a single entity holds everything. Scale-invariant.
///
/// # Panics
/// On an empty slice or a non-positive total (cannot occur after k-core
/// filtering, where every entity has at least one interaction).
pub fn gini(counts: &[f64]) -> f64 {
    assert!(!counts.is_empty(), "gini of empty counts");
    let total: f64 = counts.iter().sum();
    assert!(total > 0.0, "gini of all-zero counts");

    let mut sorted = counts.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let sum: f64 = sorted
        .iter()
        .enumerate()
        .map(|(idx, &c)| {
            let j = (idx + 1) as f64;
            (n + 1.0 - j) / (n + 1.0) * (c / total)
        })
        .sum();
    1.0 - 2.0 * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn uniform_counts_give_zero() {
        for n in [1, 2, 5, 40] {
            let counts = vec![7.0; n];
            assert_abs_diff_eq!(gini(&counts), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_holder_of_four() {
        // One entity holds everything among 4: 1 − 2/(n+1) = 0.6.
        assert_abs_diff_eq!(gini(&[0.0, 0.0, 0.0, 10.0]), 0.6, epsilon = 1e-12);
    }

    #[test]
    fn known_vector() {
        assert_abs_diff_eq!(gini(&[1.0, 1.0, 2.0, 4.0]), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn moving_mass_upward_increases_gini() {
        // Exhaustive small vectors: shifting one unit from a strictly poorer
        // to a strictly richer entity must increase concentration.
        for a in 1..6u32 {
            for b in (a + 1)..7u32 {
                let before = gini(&[f64::from(a), f64::from(b)]);
                let after = gini(&[f64::from(a) - 0.5, f64::from(b) + 0.5]);
                assert!(after > before, "({a},{b})");
            }
        }
    }

    proptest! {
        #[test]
        fn scale_invariant(
            counts in proptest::collection::vec(1u32..1000, 1..50),
            scale in 1u32..1000,
        ) {
            let base: Vec<f64> = counts.iter().map(|&c| f64::from(c)).collect();
            let scaled: Vec<f64> = base.iter().map(|c| c * f64::from(scale)).collect();
            prop_assert!((gini(&base) - gini(&scaled)).abs() < 1e-12);
        }

        #[test]
        fn bounded_below_one(counts in proptest::collection::vec(0u32..1000, 2..50)) {
            prop_assume!(counts.iter().any(|&c| c > 0));
            let v: Vec<f64> = counts.iter().map(|&c| f64::from(c)).collect();
            let g = gini(&v);
            prop_assert!((0.0..1.0).contains(&g) || g.abs() < 1e-12);
        }
    }
}
