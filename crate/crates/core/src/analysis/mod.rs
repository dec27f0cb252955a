//! Asymptotic analysis of count sequences: ratio estimators, extrapolation
//! fits, Padé and differential approximants, coefficient prediction.

pub mod approximant;
pub mod batch;
pub mod fit;
pub mod linear;
pub mod poly;
pub mod ratio;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{big_ln, Kind, Series};

pub use approximant::{fit_biased_da, fit_da, pade, singularities, DiffApprox, Pade, Singularity};
pub use batch::{
    biased_exponent_scan, da_batch, predict_coefficients, scan_crossing, BatchOptions, BatchResult, Prediction,
    ScanOptions, ScanPoint,
};
pub use fit::{
    extrapolate, m1_lambda, m2_ratio_of_ratios, p1_subdominant, p2_triple_fit, p3_exponent, parity_ratio_of_ratios,
    FitResult, FitSpec,
};
pub use ratio::{average_consecutive, parity_adjusted_ratios, ratio_estimators, RatioEstimators};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("need at least {needed} terms, have {have}")]
    TooFewTerms { needed: usize, have: usize },
    #[error("coefficient at index {0} is not positive")]
    NonPositive(usize),
    #[error("sizes must be consecutive (gap after {0})")]
    Gap(usize),
    #[error("growth constant must exceed 1, got {0}")]
    BadLambda(f64),
    #[error("singular linear system")]
    Singular,
    #[error("degree {degree} below bias order {order}")]
    BiasTooStrong { degree: usize, order: usize },
    #[error("root finder did not converge")]
    NoConvergence,
    #[error("leading polynomial is constant")]
    ConstantPolynomial,
    #[error("only {0} usable approximants")]
    TooFewApproximants(usize),
}

/// Positive coefficients stored as natural logarithms, `logs[i]` being the
/// term of index `start + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSeries {
    pub start: usize,
    pub logs: Vec<f64>,
}

impl LogSeries {
    pub fn new(start: usize, logs: Vec<f64>) -> Result<Self, AnalysisError> {
        if let Some(i) = logs.iter().position(|x| !x.is_finite()) {
            return Err(AnalysisError::NonPositive(start + i));
        }
        Ok(LogSeries { start, logs })
    }

    pub fn from_values(start: usize, values: &[f64]) -> Result<Self, AnalysisError> {
        if let Some(i) = values.iter().position(|&v| !(v > 0.0)) {
            return Err(AnalysisError::NonPositive(start + i));
        }
        Self::new(start, values.iter().map(|v| v.ln()).collect())
    }

    pub fn from_fn(range: std::ops::RangeInclusive<usize>, log_of: impl Fn(usize) -> f64) -> Self {
        let start = *range.start();
        LogSeries { start, logs: range.map(log_of).collect() }
    }

    pub fn from_big(start: usize, values: &[BigUint]) -> Result<Self, AnalysisError> {
        if let Some(i) = values.iter().position(|v| v.is_zero()) {
            return Err(AnalysisError::NonPositive(start + i));
        }
        Self::new(start, values.iter().map(big_ln).collect())
    }

    /// Exact entries followed by at most `predicted_cap` predicted ones.
    pub fn from_series(series: &Series, predicted_cap: Option<usize>) -> Result<Self, AnalysisError> {
        let mut predicted = 0;
        let mut values = Vec::new();
        let mut start = None;
        for e in &series.entries {
            if e.kind == Kind::Predicted {
                if predicted_cap.is_some_and(|cap| predicted >= cap) {
                    break;
                }
                predicted += 1;
            }
            match start {
                None => start = Some(e.size),
                Some(s) if s + values.len() != e.size => return Err(AnalysisError::Gap(s + values.len() - 1)),
                _ => {}
            }
            values.push(e.value.clone());
        }
        Self::from_big(start.unwrap_or(1), &values)
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    /// Index of the last term.
    pub fn end(&self) -> usize {
        self.start + self.logs.len() - 1
    }

    pub fn log(&self, n: usize) -> Option<f64> {
        n.checked_sub(self.start).and_then(|i| self.logs.get(i)).copied()
    }

    pub fn require(&self, needed: usize) -> Result<(), AnalysisError> {
        if self.len() < needed {
            Err(AnalysisError::TooFewTerms { needed, have: self.len() })
        } else {
            Ok(())
        }
    }
}

/// Ratio series `R_0, R_1, …` with `R_L = C_L / C_{L-1}`, taking
/// `C_0 = 1` and `R_0 = 1`. `counts[i]` is `C_{i+1}`.
pub fn ratio_series(counts: &[BigUint]) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(counts.len() + 1);
    out.push(BigRational::one());
    let mut prev = BigInt::one();
    for c in counts {
        let c = BigInt::from(c.clone());
        out.push(BigRational::new(c.clone(), prev));
        prev = c;
    }
    out
}

/// Nearest double to a rational.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::{Signed, ToPrimitive};
    if x.is_zero() {
        return 0.0;
    }
    let (n, d) = (x.numer().abs(), x.denom().abs());
    let shift = n.bits() as i64 - d.bits() as i64 - 64;
    let q = if shift >= 0 { n / (d << shift as u64) } else { (n << (-shift) as u64) / d };
    let v = ldexp(q.to_f64().unwrap(), shift);
    if x.is_negative() {
        -v
    } else {
        v
    }
}

/// Ratio of two big integers as a double.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    rational_to_f64(&BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone())))
}

fn ldexp(mut x: f64, mut exp: i64) -> f64 {
    while exp > 512 {
        x *= 2f64.powi(512);
        exp -= 512;
    }
    while exp < -512 {
        x *= 2f64.powi(-512);
        exp += 512;
    }
    x * 2f64.powi(exp as i32)
}
