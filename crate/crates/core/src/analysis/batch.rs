//! Batches of differential approximants: critical-point estimates with
//! defective rejection, biased exponent scans and coefficient prediction.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::approximant::{
    biased_terms_needed, fit_biased_da, fit_da, singularities, terms_needed, DiffApprox, Singularity,
};
use super::{ratio_series, rational_to_f64, AnalysisError};

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOptions {
    /// Differential order `M`.
    pub order: usize,
    /// Degrees `K` of the inhomogeneous polynomial to try.
    pub inhomogeneous: Vec<usize>,
    /// Largest `|N_k - N_M|`.
    pub spread: usize,
    /// Approximants matching fewer coefficients than this are skipped.
    pub min_terms: usize,
    /// Approximants matching more coefficients than this are skipped.
    pub max_terms: Option<usize>,
    /// Real singularities closer than this fraction of the consensus
    /// radius mark an approximant defective.
    pub defect_factor: f64,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions { order: 3, inhomogeneous: (0..=6).collect(), spread: 2, min_terms: 0, max_terms: None, defect_factor: 0.9 }
    }
}

impl BatchOptions {
    /// Second-order approximants using all but at most two of `available`
    /// coefficients, as used for extending a series.
    pub fn for_prediction(available: usize) -> Self {
        BatchOptions { order: 2, min_terms: available.saturating_sub(2), ..Default::default() }
    }

    /// `(degrees, K)` pairs ordered by `(degrees, K)`.
    pub fn schedule(&self, available: usize, bias_order: Option<usize>) -> Vec<(Vec<usize>, usize)> {
        let max_terms = self.max_terms.unwrap_or(available).min(available);
        let m = self.order;
        let mut out = Vec::new();
        for base in 0..=available {
            let lo = base.saturating_sub(self.spread);
            let width = base + self.spread - lo + 1;
            let combos = width.pow(m as u32);
            for code in 0..combos {
                let mut degrees = Vec::with_capacity(m + 1);
                let mut c = code;
                for _ in 0..m {
                    degrees.push(lo + c % width);
                    c /= width;
                }
                degrees.push(base);
                for &k in &self.inhomogeneous {
                    let terms = match bias_order {
                        None => Some(terms_needed(&degrees, k)),
                        Some(q) => biased_terms_needed(&degrees, k, q),
                    };
                    if let Some(t) = terms {
                        if t >= self.min_terms.max(1) && t <= max_terms {
                            out.push((degrees.clone(), k));
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// One fitted approximant and its physical singularity.
#[derive(Debug, Clone)]
pub struct Approximant {
    pub da: DiffApprox,
    pub singularities: Vec<Singularity>,
    /// Smallest positive real singularity, or the bias point.
    pub critical: Option<f64>,
    pub exponent: Option<f64>,
    pub defective: bool,
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub approximants: Vec<Approximant>,
    /// Median of the critical points.
    pub consensus: f64,
    pub mean_critical: f64,
    pub std_critical: f64,
    pub mean_exponent: f64,
    pub std_exponent: f64,
}

impl BatchResult {
    pub fn usable(&self) -> impl Iterator<Item = &Approximant> {
        self.approximants.iter().filter(|a| !a.defective)
    }

    pub fn usable_count(&self) -> usize {
        self.usable().count()
    }
}

fn real_part(s: &Singularity) -> Option<f64> {
    s.real.as_ref().map(|x| x.to_f64())
}

fn analyse(da: DiffApprox) -> Option<Approximant> {
    let sings = singularities(&da).ok()?;
    let (critical, exponent) = match &da.bias {
        Some(b) => {
            let z = &b.point;
            let qm = &da.q[da.order];
            let den = z * qm.derivative().eval(z);
            let exponent = (!den.is_zero()).then(|| {
                da.order as f64 - 1.0 - rational_to_f64(&(da.q[da.order - 1].eval(z) / den))
            });
            (Some(rational_to_f64(z)), exponent)
        }
        None => {
            let s = sings.iter().find(|s| s.real.as_ref().is_some_and(|x| x.0.is_positive()));
            (s.and_then(real_part), s.and_then(|s| s.exponent.map(|e| e.re)))
        }
    };
    Some(Approximant { da, singularities: sings, critical, exponent, defective: false })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

fn run_batch(fits: Vec<DiffApprox>, factor: f64) -> BatchResult {
    let mut approximants: Vec<Approximant> = fits.into_par_iter().filter_map(analyse).collect();
    let mut crit: Vec<f64> = approximants.iter().filter_map(|a| a.critical).collect();
    let consensus = median(&mut crit);
    for a in &mut approximants {
        let spurious = a.singularities.iter().any(|s| {
            real_part(s).is_some_and(|x| x.abs() < factor * consensus && a.critical.map_or(true, |c| (x - c).abs() > 1e-12 * c))
        });
        a.defective = spurious || a.critical.is_none() || a.exponent.is_none();
    }
    let pairs: Vec<(f64, f64)> =
        approximants.iter().filter(|a| !a.defective).filter_map(|a| Some((a.critical?, a.exponent?))).collect();
    let (lo, hi) = outlier_bounds(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let (zs, es): (Vec<f64>, Vec<f64>) = pairs.into_iter().filter(|p| p.0 >= lo && p.0 <= hi).unzip();
    let (mean_critical, std_critical) = mean_std(&zs);
    let (mean_exponent, std_exponent) = mean_std(&es);
    BatchResult { approximants, consensus, mean_critical, std_critical, mean_exponent, std_exponent }
}

/// Unbiased approximants over the schedule, sorted by `(M, degrees, K)`.
pub fn da_batch(coefficients: &[BigRational], opts: &BatchOptions) -> BatchResult {
    let specs = opts.schedule(coefficients.len(), None);
    let fits: Vec<DiffApprox> = specs.par_iter().filter_map(|(d, k)| fit_da(coefficients, d, *k).ok()).collect();
    run_batch(fits, opts.defect_factor)
}

/// Biased approximants at a single point.
pub fn biased_batch(coefficients: &[BigRational], point: &BigRational, order: usize, opts: &BatchOptions) -> BatchResult {
    let specs = opts.schedule(coefficients.len(), Some(order));
    let fits: Vec<DiffApprox> =
        specs.par_iter().filter_map(|(d, k)| fit_biased_da(coefficients, d, *k, point, order).ok()).collect();
    run_batch(fits, opts.defect_factor)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub bias: f64,
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
    /// Fewer than the required number of usable approximants.
    pub unreliable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub batch: BatchOptions,
    /// Fraction discarded on each side before averaging.
    pub trim: f64,
    /// Least number of coefficients, both available and used per approximant.
    pub min_coefficients: usize,
    pub min_approximants: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { batch: BatchOptions::default(), trim: 0.1, min_coefficients: 22, min_approximants: 10 }
    }
}

/// Trimmed mean and spread of biased first-order exponents at each point.
pub fn biased_exponent_scan(
    coefficients: &[BigRational],
    points: &[f64],
    opts: &ScanOptions,
) -> Result<Vec<ScanPoint>, AnalysisError> {
    if coefficients.len() < opts.min_coefficients {
        return Err(AnalysisError::TooFewTerms { needed: opts.min_coefficients, have: coefficients.len() });
    }
    // every approximant in the scan uses at least `min_coefficients` terms
    let scan_batch = BatchOptions { min_terms: opts.batch.min_terms.max(opts.min_coefficients), ..opts.batch.clone() };
    Ok(points
        .iter()
        .map(|&z| {
            let point = BigRational::from_float(z).expect("finite bias point");
            let batch = biased_batch(coefficients, &point, 1, &scan_batch);
            let mut es: Vec<f64> = batch.usable().filter_map(|a| a.exponent).collect();
            es.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let cut = (es.len() as f64 * opts.trim).floor() as usize;
            let kept = if es.len() > 2 * cut { &es[cut..es.len() - cut] } else { &es[..] };
            let (mean, stderr) = mean_std(kept);
            ScanPoint { bias: z, mean, stderr, count: es.len(), unreliable: es.len() < opts.min_approximants }
        })
        .collect())
}

/// Interpolated bias value where the mean exponent crosses `target`.
pub fn scan_crossing(scan: &[ScanPoint], target: f64) -> Option<f64> {
    scan.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        let (fa, fb) = (a.mean - target, b.mean - target);
        (fa.is_finite() && fb.is_finite() && fa * fb <= 0.0 && fa != fb)
            .then(|| a.bias + (b.bias - a.bias) * fa / (fa - fb))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictedTerm {
    pub size: usize,
    pub value: BigUint,
    /// Relative standard deviation over the approximants kept.
    pub rel_spread: f64,
    /// Predicted `C_L / C_{L-1}`.
    pub ratio: f64,
    pub ratio_rel_spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub terms: Vec<PredictedTerm>,
    pub approximants: usize,
    pub diagnostic: Option<String>,
}

/// Values further than 3 scaled MADs from the median are outliers.
fn outlier_bounds(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    let med = median(&mut sorted);
    let mut dev: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    let mad = 1.4826 * median(&mut dev);
    if mad == 0.0 || !mad.is_finite() {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    (med - 3.0 * mad, med + 3.0 * mad)
}

fn without_outliers(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = outlier_bounds(values);
    values.iter().copied().filter(|v| *v >= lo && *v <= hi).collect()
}

/// Predict `C_{n+1}, …` from exact `C_1..C_n` by extending the ratio series
/// with every usable approximant.
pub fn predict_coefficients(
    counts: &[BigUint],
    extra: usize,
    cutoff: f64,
    opts: &BatchOptions,
) -> Result<Prediction, AnalysisError> {
    let ratios = ratio_series(counts);
    let batch = da_batch(&ratios, opts);
    let usable: Vec<&Approximant> = batch.usable().collect();
    if usable.len() < 20 {
        return Err(AnalysisError::TooFewApproximants(usable.len()));
    }
    let total = ratios.len() + extra;
    let extended: Vec<Vec<f64>> = usable
        .par_iter()
        .filter_map(|a| {
            let s = a.da.series(&ratios, total)?;
            Some(s[ratios.len()..].iter().map(rational_to_f64).collect())
        })
        .collect();
    let last = counts.last().cloned().unwrap_or_else(BigUint::one);
    let n = counts.len();
    let mut terms = Vec::new();
    let mut products = vec![1.0f64; extended.len()];
    let mut diagnostic = None;
    for j in 0..extra {
        for (p, e) in products.iter_mut().zip(&extended) {
            *p *= e[j];
        }
        let kept = without_outliers(&products);
        let (mean, std) = mean_std(&kept);
        let rs: Vec<f64> = extended.iter().map(|e| e[j]).collect();
        let (rmean, rstd) = mean_std(&without_outliers(&rs));
        let rel = std / mean.abs();
        if !(rel <= cutoff) || !(mean > 0.0) {
            diagnostic = Some(format!("L={}: relative spread {rel:.3e} exceeds cutoff {cutoff:.1e}", n + j + 1));
            break;
        }
        let factor = BigRational::from_float(mean).expect("finite mean");
        let value = (BigRational::from_integer(BigInt::from(last.clone())) * factor).round();
        terms.push(PredictedTerm {
            size: n + j + 1,
            value: value.numer().abs().to_biguint().unwrap(),
            rel_spread: rel,
            ratio: rmean,
            ratio_rel_spread: rstd / rmean.abs(),
        });
    }
    Ok(Prediction { terms, approximants: extended.len(), diagnostic })
}
