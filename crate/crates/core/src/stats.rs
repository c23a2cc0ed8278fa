//! Interval estimates and gain arithmetic for Monte Carlo results.

/// Two-sided 95% standard normal quantile.
pub const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `failures` out of `trials`. With no trials the
/// interval is `[0, 1]`.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures >= trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// `log10(baseline) - log10(lead)`; `None` unless both rates are positive.
pub fn delta_log(baseline: f64, lead: f64) -> Option<f64> {
    (baseline > 0.0 && lead > 0.0).then(|| libm::log10(baseline) - libm::log10(lead))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gain_examples() {
        let d = delta_log(7.2e-4, 1.7e-5).unwrap();
        assert!((d - 1.6268).abs() < 1e-4, "{d}");
        assert_eq!(delta_log(0.01, 0.01), Some(0.0));
        assert!((delta_log(0.001, 0.01).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(delta_log(0.0, 0.01), None);
        assert_eq!(delta_log(0.01, 0.0), None);
    }

    #[test]
    fn wilson_edges() {
        assert_eq!(wilson_interval(0, 0, WILSON_Z95), (0.0, 1.0));
        let (lo, hi) = wilson_interval(0, 100, WILSON_Z95);
        assert_eq!(lo, 0.0);
        // z²/(n+z²) for zero failures.
        assert!((hi - WILSON_Z95 * WILSON_Z95 / (100.0 + WILSON_Z95 * WILSON_Z95)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(100, 100, WILSON_Z95);
        assert!((lo - 100.0 / (100.0 + WILSON_Z95 * WILSON_Z95)).abs() < 1e-12);
        assert_eq!(hi, 1.0);
    }

    proptest! {
        /// Against the quadratic-root form: the interval endpoints solve
        /// (p̂ - π)² = z² π (1 - π) / n.
        #[test]
        fn wilson_matches_quadratic_roots(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
            let failures = ((trials as f64) * frac) as u64;
            let (lo, hi) = wilson_interval(failures, trials, WILSON_Z95);
            let n = trials as f64;
            let p = failures as f64 / n;
            let z2 = WILSON_Z95 * WILSON_Z95;
            let a = 1.0 + z2 / n;
            let b = -(2.0 * p + z2 / n);
            let c = p * p;
            let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
            let r1 = (-b - disc) / (2.0 * a);
            let r2 = (-b + disc) / (2.0 * a);
            prop_assert!((lo - r1.max(0.0)).abs() < 1e-9);
            prop_assert!((hi - r2.min(1.0)).abs() < 1e-9);
            prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
        }
    }
}
