//! Distribution summary used by every per-user EV family.

/// Five-number moment summary of a real sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub mean: f64,
    /// Midpoint of the two central values for even-sized samples.
    pub median: f64,
    /// Population standard deviation (÷n).
    pub std: f64,
    /// Moment skewness g1 = m3 / m2^1.5; 0 for zero-variance samples.
    pub skewness: f64,
    /// Moment (non-excess) kurtosis g2 = m4 / m2²; 0 for zero-variance
    /// samples — the substitution keeps regression inputs finite.
    pub kurtosis: f64,
}

/// Computes [`AggregateStats`] of a non-empty sample.
pub fn aggregate(sample: &[f64]) -> AggregateStats {
    assert!(!sample.is_empty(), "aggregate of empty sample");
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;

    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    let std = m2.sqrt();
    // Variance that is zero up to accumulation noise: report shape moments
    // as 0 rather than amplifying rounding error through the division.
    let eps = 1e-12 * (1.0 + mean.abs());
    let (skewness, kurtosis) = if m2 <= eps * eps {
        (0.0, 0.0)
    } else {
        (m3 / (m2 * std), m4 / (m2 * m2))
    };

    AggregateStats {
        mean,
        median,
        std,
        skewness,
        kurtosis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_sample() {
        let s = aggregate(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.median, 2.0);
        assert_abs_diff_eq!(s.skewness, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_sample_uses_substitution() {
        let s = aggregate(&[5.0, 5.0, 5.0]);
        assert_eq!(s.std, 0.0);
        assert_eq!(s.skewness, 0.0);
        assert_eq!(s.kurtosis, 0.0);
    }

    #[test]
    fn skewed_sample_matches_direct_moments() {
        // [1,1,1,9]: m2 = 12, m3 = 48, m4 = 336.
        let s = aggregate(&[1.0, 1.0, 1.0, 9.0]);
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.median, 1.0);
        assert_abs_diff_eq!(s.std, 12f64.sqrt(), epsilon = 1e-12); // ≈ 3.4641
        assert_abs_diff_eq!(s.skewness, 48.0 / 12f64.powf(1.5), epsilon = 1e-12); // ≈ 1.1547
        assert_abs_diff_eq!(s.kurtosis, 336.0 / 144.0, epsilon = 1e-12); // ≈ 2.3333
    }

    #[test]
    fn even_sample_median_is_midpoint() {
        let s = aggregate(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!(s.median, 2.5);
    }

    #[test]
    fn near_constant_float_sample_does_not_blow_up() {
        let s = aggregate(&[0.1, 0.1, 0.1]);
        assert_eq!(s.skewness, 0.0);
        assert_eq!(s.kurtosis, 0.0);
    }
}
