//! Ratio-method estimators and their period-2 variants.

use super::{AnalysisError, LogSeries};

/// Estimators indexed by `n`; entries are `None` where predecessors or the
/// optional inputs are missing.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioEstimators {
    pub n: Vec<usize>,
    /// `c_n / c_{n-1}`.
    pub ratio: Vec<f64>,
    /// Linear intercepts `n r_n - (n-1) r_{n-1}`.
    pub intercept: Vec<Option<f64>>,
    /// Exponent estimates needing no critical point.
    pub exponent_unbiased: Vec<Option<f64>>,
    /// Exponent estimates `n (z_c r_n - 1) + 1`.
    pub exponent_biased: Vec<Option<f64>>,
    /// Growth estimates `n r_n / (n + γ - 1)`.
    pub growth_biased: Vec<Option<f64>>,
}

pub fn ratio_estimators(
    series: &LogSeries,
    critical_point: Option<f64>,
    exponent: Option<f64>,
) -> Result<RatioEstimators, AnalysisError> {
    series.require(3)?;
    let mut est = RatioEstimators {
        n: Vec::new(),
        ratio: Vec::new(),
        intercept: Vec::new(),
        exponent_unbiased: Vec::new(),
        exponent_biased: Vec::new(),
        growth_biased: Vec::new(),
    };
    for n in series.start + 1..=series.end() {
        let r = (series.log(n).unwrap() - series.log(n - 1).unwrap()).exp();
        let nf = n as f64;
        let prev = est.ratio.last().copied();
        est.n.push(n);
        est.ratio.push(r);
        est.intercept.push(prev.map(|p| nf * r - (nf - 1.0) * p));
        est.exponent_unbiased.push(prev.map(|p| 1.0 + nf * nf * (1.0 - r / p)));
        est.exponent_biased.push(critical_point.map(|z| nf * (z * r - 1.0) + 1.0));
        est.growth_biased.push(exponent.map(|g| nf * r / (nf + g - 1.0)));
    }
    Ok(est)
}

/// Period-2 ratios `r*_L = sqrt(C_L / C_{L-2})` and ratio-of-ratios
/// `(C_{L-2} C_{L+2} / C_L^2)^{1/4}`, each as `(L, value)`.
pub fn parity_adjusted_ratios(series: &LogSeries) -> Result<(Vec<(usize, f64)>, Vec<(usize, f64)>), AnalysisError> {
    series.require(5)?;
    let log = |n| series.log(n).unwrap();
    let ratios = (series.start + 2..=series.end()).map(|l| (l, (0.5 * (log(l) - log(l - 2))).exp())).collect();
    let second = (series.start + 2..=series.end() - 2)
        .map(|l| (l, (0.25 * (log(l - 2) + log(l + 2) - 2.0 * log(l))).exp()))
        .collect();
    Ok((ratios, second))
}

/// `(x_L + x_{L-1}) / 2` for consecutive entries.
pub fn average_consecutive(seq: &[(usize, f64)]) -> Vec<(usize, f64)> {
    seq.windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| (w[1].0, 0.5 * (w[0].1 + w[1].1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric() {
        let s = LogSeries::from_fn(0..=20, |n| n as f64 * 2f64.ln());
        let e = ratio_estimators(&s, Some(0.5), Some(1.0)).unwrap();
        for i in 0..e.n.len() {
            assert!((e.ratio[i] - 2.0).abs() < 1e-13);
            if i > 0 {
                assert!((e.intercept[i].unwrap() - 2.0).abs() < 1e-11);
                assert!((e.exponent_unbiased[i].unwrap() - 1.0).abs() < 1e-10);
            }
            assert!((e.exponent_biased[i].unwrap() - 1.0).abs() < 1e-11);
            assert!((e.growth_biased[i].unwrap() - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_times_geometric() {
        let s = LogSeries::from_fn(0..=30, |n| ((n + 1) as f64).ln() + n as f64 * 2f64.ln());
        let e = ratio_estimators(&s, None, None).unwrap();
        for (i, &n) in e.n.iter().enumerate() {
            if n >= 2 {
                assert!((e.exponent_unbiased[i].unwrap() - 2.0).abs() < 1e-9, "n={n}");
            }
        }
        assert!(e.exponent_biased.iter().all(Option::is_none));
    }

    #[test]
    fn triangle_second_ratio() {
        let s = LogSeries::from_values(1, &[2.0, 7.0, 44.0]).unwrap();
        let e = ratio_estimators(&s, None, None).unwrap();
        assert_eq!(e.n[0], 2);
        assert!((e.ratio[0] - 3.5).abs() < 1e-14);
    }

    #[test]
    fn parity_identity() {
        let s = LogSeries::from_fn(1..=12, |l| (l * l) as f64 * 0.3 + (l as f64).ln());
        let (rs, _) = parity_adjusted_ratios(&s).unwrap();
        let e = ratio_estimators(&s, None, None).unwrap();
        for &(l, r) in &rs {
            let i = e.n.iter().position(|&n| n == l).unwrap();
            assert!((r * r - e.ratio[i] * e.ratio[i - 1]).abs() < 1e-9 * r * r);
        }
    }

    #[test]
    fn hex_square_third() {
        let s = LogSeries::from_values(1, &[2.0, 14.0, 264.0, 21512.0, 5663596.0]).unwrap();
        let (rs, _) = parity_adjusted_ratios(&s).unwrap();
        assert_eq!(rs[0].0, 3);
        assert!((rs[0].1 - 11.489125).abs() < 1e-5);
    }
}
