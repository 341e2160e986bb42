//! Statistical comparison primitives: the two-sample Kolmogorov-Smirnov
//! test and z-score comparison of point estimates.

use crate::error::{Error, Result};
use crate::montecarlo::Measurement;

/// Result of a two-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2)`, truncated when terms
/// drop below 1e-12.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=1000 {
        let term = (-2.0 * (j as f64).powi(2) * x * x).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Exact two-sample KS statistic by a merged sweep over both sorted samples,
/// with tied values processed jointly before the ECDF gap is read off. The
/// p-value uses the asymptotic Kolmogorov distribution at the effective
/// sample size with the standard finite-sample correction.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let (n1, n2) = (a.len(), b.len());
    if n1 < 5 || n2 < 5 {
        return Err(Error::Domain(format!(
            "ks_two_sample requires at least 5 samples per side, got {n1} and {n2}"
        )));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Domain("ks_two_sample input contains NaN".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());

    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0f64;
    while i < n1 || j < n2 {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < n1 && xs[i] == v {
            i += 1;
        }
        while j < n2 && ys[j] == v {
            j += 1;
        }
        let gap = (i as f64 / n1 as f64 - j as f64 / n2 as f64).abs();
        d = d.max(gap);
    }

    let en = ((n1 * n2) as f64 / (n1 + n2) as f64).sqrt();
    let p_value = kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
    Ok(KsResult { statistic: d, p_value, n1, n2 })
}

/// `z = (lhs - rhs) / sqrt(se_lhs^2 + se_rhs^2)`, with zero standard error
/// for exact sides. Two unequal exact values give an infinite z.
pub fn z_compare(lhs: &Measurement, rhs: &Measurement) -> f64 {
    let diff = lhs.value() - rhs.value();
    let se = (lhs.stderr().powi(2) + rhs.stderr().powi(2)).sqrt();
    if se == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    } else {
        diff / se
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::EstimateReport;
    use crate::sampling::RandomStream;
    use rand::Rng;

    #[test]
    fn identical_samples_have_zero_statistic() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn disjoint_supports_have_statistic_one() {
        let a = [0.0; 6];
        let b = [1.0; 6];
        let r = ks_two_sample(&a, &b).unwrap();
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn interleaved_samples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [1.5, 2.5, 3.5, 4.5, 5.5];
        let r = ks_two_sample(&a, &b).unwrap();
        assert!((r.statistic - 0.2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ks_two_sample(&[], &[1.0; 8]).is_err());
        assert!(ks_two_sample(&[1.0; 4], &[1.0; 8]).is_err());
        let with_nan = [1.0, 2.0, f64::NAN, 3.0, 4.0];
        assert!(ks_two_sample(&with_nan, &[1.0; 8]).is_err());
    }

    #[test]
    fn symmetric_in_arguments() {
        let mut s = RandomStream::new(1);
        let a: Vec<f64> = (0..500).map(|_| s.random::<f64>()).collect();
        let b: Vec<f64> = (0..700).map(|_| s.random::<f64>() * 1.1).collect();
        let r1 = ks_two_sample(&a, &b).unwrap();
        let r2 = ks_two_sample(&b, &a).unwrap();
        assert_eq!(r1.statistic, r2.statistic);
        assert_eq!(r1.p_value, r2.p_value);
    }

    #[test]
    fn invariant_under_monotone_transform() {
        let mut s = RandomStream::new(2);
        let a: Vec<f64> = (0..400).map(|_| s.random::<f64>()).collect();
        let b: Vec<f64> = (0..400).map(|_| s.random::<f64>().powi(2)).collect();
        let r1 = ks_two_sample(&a, &b).unwrap();
        let ta: Vec<f64> = a.iter().map(|&x| (3.0 * x).exp()).collect();
        let tb: Vec<f64> = b.iter().map(|&x| (3.0 * x).exp()).collect();
        let r2 = ks_two_sample(&ta, &tb).unwrap();
        assert_eq!(r1.statistic, r2.statistic);
    }

    #[test]
    fn null_calibration_at_one_percent() {
        // 200 independent null repetitions at n = 1e4 per side; the
        // rejection rate at alpha = 0.01 must stay inside the binomial
        // 99% envelope [0, 0.04].
        let n = 10_000usize;
        let mut rejections = 0;
        for rep in 0..200u64 {
            let mut s = RandomStream::new(1000 + rep);
            let a: Vec<f64> = (0..n).map(|_| s.random::<f64>()).collect();
            let b: Vec<f64> = (0..n).map(|_| s.random::<f64>()).collect();
            if ks_two_sample(&a, &b).unwrap().p_value < 0.01 {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / 200.0;
        assert!(rate <= 0.04, "false rejection rate {rate}");
    }

    #[test]
    fn z_compare_cases() {
        let est = |v: f64, se: f64| {
            Measurement::Estimated(EstimateReport::new("t".into(), v, se, 100, 0))
        };
        assert_eq!(z_compare(&est(1.0, 0.1), &Measurement::exact(1.0)), 0.0);
        assert!((z_compare(&est(1.4, 0.1), &Measurement::exact(1.0)) - 4.0).abs() < 1e-12);
        assert!((z_compare(&est(1.0, 0.3), &est(0.5, 0.4)) - 1.0).abs() < 1e-12);
        assert_eq!(z_compare(&Measurement::exact(2.0), &Measurement::exact(2.0)), 0.0);
        assert!(z_compare(&Measurement::exact(2.0), &Measurement::exact(1.0)).is_infinite());
    }
}
