//! Extrapolation fits in inverse powers of `L`: the direct root `C^{1/L²}`,
//! ratio-of-ratios, and the sub-dominant parameter fits.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::ratio::{average_consecutive, parity_adjusted_ratios};
use super::{AnalysisError, LogSeries};

/// How an estimator sequence is extrapolated.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSpec {
    /// Inverse powers of `L` fitted besides the constant.
    pub powers: Vec<u32>,
    /// Points per least-squares window; `None` means parameters + 3.
    pub window: Option<usize>,
    /// Use every second point in a window (period-2 series).
    pub stride: usize,
}

impl FitSpec {
    pub fn new(powers: &[u32]) -> Self {
        FitSpec { powers: powers.to_vec(), window: None, stride: 1 }
    }

    pub fn window_len(&self) -> usize {
        self.window.unwrap_or(self.powers.len() + 4)
    }
}

/// One least-squares window ending at `last`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFit {
    pub last: usize,
    /// Constant term followed by one coefficient per fitted power.
    pub coefficients: Vec<f64>,
}

impl WindowFit {
    pub fn constant(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn coefficient(&self, spec: &FitSpec, power: u32) -> Option<f64> {
        spec.powers.iter().position(|&p| p == power).map(|i| self.coefficients[i + 1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub spec: FitSpec,
    /// Raw estimator sequence `(L, value)`.
    pub raw: Vec<(usize, f64)>,
    pub windows: Vec<WindowFit>,
    /// Extrapolated limit of the raw sequence from the last window.
    pub limit: f64,
    /// Growth constant implied by `limit`.
    pub lambda: f64,
}

impl FitResult {
    pub fn constants(&self) -> Vec<(usize, f64)> {
        self.windows.iter().map(|w| (w.last, w.constant())).collect()
    }

    /// Fitted coefficient of `L^{-power}` in the last window.
    pub fn last_coefficient(&self, power: u32) -> Option<f64> {
        self.windows.last()?.coefficient(&self.spec, power)
    }
}

/// Ordinary least squares of `y` on `1, L^{-p}…`.
pub fn least_squares(points: &[(usize, f64)], powers: &[u32]) -> Result<Vec<f64>, AnalysisError> {
    let cols = powers.len() + 1;
    if points.len() < cols {
        return Err(AnalysisError::TooFewTerms { needed: cols, have: points.len() });
    }
    let a = DMatrix::from_fn(points.len(), cols, |i, j| {
        let l = points[i].0 as f64;
        if j == 0 {
            1.0
        } else {
            l.powi(-(powers[j - 1] as i32))
        }
    });
    let b = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let qr = a.clone().qr();
    let r = qr.r();
    if (0..cols).any(|i| r[(i, i)].abs() < 1e-300) {
        return Err(AnalysisError::Singular);
    }
    let rhs = qr.q().transpose() * b;
    let x = r.solve_upper_triangular(&rhs).ok_or(AnalysisError::Singular)?;
    Ok(x.iter().copied().collect())
}

/// Least squares over every window of the sequence.
pub fn sliding_fit(points: &[(usize, f64)], spec: &FitSpec) -> Result<Vec<WindowFit>, AnalysisError> {
    let w = spec.window_len();
    let stride = spec.stride.max(1);
    let span = (w - 1) * stride + 1;
    if points.len() < span {
        return Err(AnalysisError::TooFewTerms { needed: span, have: points.len() });
    }
    let mut out = Vec::new();
    for end in span - 1..points.len() {
        let window: Vec<(usize, f64)> = (0..w).rev().map(|k| points[end - k * stride]).collect();
        out.push(WindowFit { last: points[end].0, coefficients: least_squares(&window, &spec.powers)? });
    }
    Ok(out)
}

/// `C_L^{1/L²}` extrapolated; the limit is `κ` and `λ = κ^{1/vertex_factor}`.
pub fn m1_lambda(series: &LogSeries, vertex_factor: u32, spec: &FitSpec) -> Result<FitResult, AnalysisError> {
    let raw: Vec<(usize, f64)> = (series.start.max(1)..=series.end())
        .map(|l| (l, (series.log(l).unwrap() / (l * l) as f64).exp()))
        .collect();
    finish(raw, spec, |limit| limit.powf(1.0 / vertex_factor as f64))
}

/// `C_{L+1} C_{L-1} / C_L²` extrapolated; the limit is `κ²`.
pub fn m2_ratio_of_ratios(series: &LogSeries, vertex_factor: u32, spec: &FitSpec) -> Result<FitResult, AnalysisError> {
    series.require(4)?;
    let log = |n| series.log(n).unwrap();
    let raw: Vec<(usize, f64)> =
        (series.start + 1..series.end()).map(|l| (l, (log(l + 1) + log(l - 1) - 2.0 * log(l)).exp())).collect();
    finish(raw, spec, |limit| limit.powf(1.0 / (2 * vertex_factor) as f64))
}

/// Period-2 version of [`m2_ratio_of_ratios`]: `(C_{L-2} C_{L+2} / C_L²)^{1/4}`
/// averaged over consecutive `L`, then extrapolated. The limit is `κ²` and
/// the `L^{-2}` coefficient `-g κ²`.
pub fn parity_ratio_of_ratios(series: &LogSeries, vertex_factor: u32, spec: &FitSpec) -> Result<FitResult, AnalysisError> {
    let (_, second) = parity_adjusted_ratios(series)?;
    finish(average_consecutive(&second), spec, |limit| limit.powf(1.0 / (2 * vertex_factor) as f64))
}

/// Extrapolate an arbitrary estimator sequence.
pub fn extrapolate(raw: Vec<(usize, f64)>, spec: &FitSpec) -> Result<FitResult, AnalysisError> {
    finish(raw, spec, |limit| limit)
}

fn finish(raw: Vec<(usize, f64)>, spec: &FitSpec, lambda_of: impl Fn(f64) -> f64) -> Result<FitResult, AnalysisError> {
    let windows = sliding_fit(&raw, spec)?;
    let limit = windows.last().unwrap().constant();
    Ok(FitResult { spec: spec.clone(), raw, windows, limit, lambda: lambda_of(limit) })
}

/// The exponent estimate `g = -c₂ / c₀` from a ratio-of-ratios fit.
pub fn p3_exponent(fit: &FitResult) -> Option<f64> {
    Some(-fit.last_coefficient(2)? / fit.limit)
}

/// Output of the `d_L = C_L / κ^{L²}` analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdominant {
    /// `d_L / d_{L-1}` and its extrapolation (→ `α = κ^b`).
    pub alpha: FitResult,
    /// `d_L / (α^L L^g)` and its extrapolation (→ `C = κ^c`).
    pub amplitude: FitResult,
    pub b: f64,
    pub c: f64,
}

pub fn p1_subdominant(
    series: &LogSeries,
    kappa: f64,
    g: f64,
    alpha_spec: &FitSpec,
    amplitude_spec: &FitSpec,
) -> Result<Subdominant, AnalysisError> {
    if !(kappa > 1.0) {
        return Err(AnalysisError::BadLambda(kappa));
    }
    let ln_k = kappa.ln();
    let log_d = |l: usize| series.log(l).unwrap() - (l * l) as f64 * ln_k;
    let first = series.start.max(1);
    let ratios = (first + 1..=series.end()).map(|l| (l, (log_d(l) - log_d(l - 1)).exp())).collect();
    let alpha = extrapolate(ratios, alpha_spec)?;
    let ln_a = alpha.limit.ln();
    let amp = (first..=series.end())
        .map(|l| (l, (log_d(l) - l as f64 * ln_a - g * (l as f64).ln()).exp()))
        .collect();
    let amplitude = extrapolate(amp, amplitude_spec)?;
    let (b, c) = (ln_a / ln_k, amplitude.limit.ln() / ln_k);
    Ok(Subdominant { alpha, amplitude, b, c })
}

/// Per-triple solution of `log d_L = B L + C + g log L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    /// Middle size `k` of `(k-1, k, k+1)`.
    pub k: usize,
    pub b_log: f64,
    pub c_log: f64,
    pub g: f64,
}

pub fn p2_triple_fit(series: &LogSeries, kappa: f64) -> Result<Vec<Triple>, AnalysisError> {
    series.require(3)?;
    let ln_k = kappa.ln();
    let first = series.start.max(1);
    let log_d = |l: usize| series.log(l).unwrap() - (l * l) as f64 * ln_k;
    let mut out = Vec::new();
    for k in first + 1..series.end() {
        let ls = [k - 1, k, k + 1].map(|l| l as f64);
        let a = Matrix3::from_fn(|i, j| match j {
            0 => ls[i],
            1 => 1.0,
            _ => ls[i].ln(),
        });
        let y = Vector3::new(log_d(k - 1), log_d(k), log_d(k + 1));
        let x = a.lu().solve(&y).ok_or(AnalysisError::Singular)?;
        out.push(Triple { k, b_log: x[0], c_log: x[1], g: x[2] });
    }
    Ok(out)
}
