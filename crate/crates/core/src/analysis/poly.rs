//! Polynomial roots: simultaneous Aberth iteration in double precision, then
//! Newton polishing of real roots in 256-bit fixed point.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{rational_to_f64, AnalysisError};

/// Fractional bits of [`Fixed`] (about 77 decimal digits).
pub const FRAC_BITS: u64 = 256;

/// Real number `raw / 2^FRAC_BITS`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed(pub BigInt);

impl Fixed {
    pub fn from_rational(x: &BigRational) -> Fixed {
        Fixed((x.numer() << FRAC_BITS) / x.denom())
    }

    pub fn from_f64(x: f64) -> Fixed {
        Fixed::from_rational(&BigRational::from_float(x).unwrap_or_default())
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.to_rational())
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.0.clone(), BigInt::from(1) << FRAC_BITS)
    }

    pub fn mul(&self, other: &Fixed) -> Fixed {
        Fixed((&self.0 * &other.0) >> FRAC_BITS)
    }

    pub fn div(&self, other: &Fixed) -> Option<Fixed> {
        if other.0.is_zero() {
            None
        } else {
            Some(Fixed((&self.0 << FRAC_BITS) / &other.0))
        }
    }

    /// Decimal expansion with `digits` places after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let half = BigInt::from(1) << (FRAC_BITS - 1);
        let scaled = (self.0.abs() * BigInt::from(10).pow(digits as u32) + half) >> FRAC_BITS;
        let s = format!("{:0>width$}", scaled.to_string(), width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        format!("{}{int}.{frac}", if self.0.is_negative() { "-" } else { "" })
    }
}

/// Polynomial with exact coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    pub fn trimmed(mut coeffs: Vec<BigRational>) -> Poly {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::trimmed(
            self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(i.into())).collect(),
        )
    }

    pub fn eval_f64(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + rational_to_f64(c))
    }

    /// Coefficients as fixed point after dividing by a power of two near the
    /// largest magnitude, so the scaled values are at most 1.
    fn scaled_fixed(&self) -> Vec<Fixed> {
        let shift = self.0.iter().filter(|c| !c.is_zero()).map(|c| magnitude_bits(c)).max().unwrap_or(0);
        self.0
            .iter()
            .map(|c| {
                let scaled = if shift >= 0 {
                    c / BigRational::from_integer(BigInt::from(1) << shift as u64)
                } else {
                    c * BigRational::from_integer(BigInt::from(1) << (-shift) as u64)
                };
                Fixed::from_rational(&scaled)
            })
            .collect()
    }

    pub fn eval_fixed(coeffs: &[Fixed], x: &Fixed) -> (Fixed, Fixed) {
        let mut p = Fixed(BigInt::zero());
        let mut dp = Fixed(BigInt::zero());
        for c in coeffs.iter().rev() {
            dp = Fixed(dp.mul(x).0 + &p.0);
            p = Fixed(p.mul(x).0 + &c.0);
        }
        (p, dp)
    }
}

fn magnitude_bits(c: &BigRational) -> i64 {
    c.numer().bits() as i64 - c.denom().bits() as i64
}

/// A root with its extended-precision value when real.
#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub real: Option<Fixed>,
    /// Another root lies within a relative distance of `1e-7`.
    pub multiple: bool,
}

impl Root {
    pub fn is_real(&self) -> bool {
        self.real.is_some()
    }
}

/// All roots of a polynomial of degree at least one.
pub fn roots(p: &Poly) -> Result<Vec<Root>, AnalysisError> {
    let n = p.degree();
    if n == 0 {
        return Err(AnalysisError::ConstantPolynomial);
    }
    let lead = rational_to_f64(&p.0[n]);
    let coeffs: Vec<Complex64> = p.0.iter().map(|c| Complex64::new(rational_to_f64(c) / lead, 0.0)).collect();
    let approx = aberth(&coeffs)?;
    let fixed = p.scaled_fixed();
    let scale = approx.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut out: Vec<Root> = approx
        .iter()
        .map(|&z| {
            let real = if z.im.abs() <= 1e-7 * z.norm().max(1e-300) {
                polish_real(&fixed, z.re)
            } else {
                None
            };
            let value = match &real {
                Some(x) => Complex64::new(x.to_f64(), 0.0),
                None => newton_complex(&coeffs, z),
            };
            Root { value, real, multiple: false }
        })
        .collect();
    for i in 0..out.len() {
        out[i].multiple =
            (0..out.len()).any(|j| j != i && (out[i].value - out[j].value).norm() <= 1e-7 * scale.max(out[i].value.norm()));
    }
    out.sort_by(|a, b| a.value.norm().partial_cmp(&b.value.norm()).unwrap());
    Ok(out)
}

/// Smallest positive real root.
pub fn smallest_positive_root(p: &Poly) -> Result<Option<Root>, AnalysisError> {
    Ok(roots(p)?.into_iter().find(|r| r.real.as_ref().is_some_and(|x| x.0.is_positive())))
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Aberth-Ehrlich iteration on a monic polynomial.
fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>, AnalysisError> {
    let n = coeffs.len() - 1;
    // Cauchy-type radius for the starting circle
    let radius = coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max).min(1e12) + 1.0;
    let mean_log: f64 = {
        let lo = coeffs[0].norm();
        if lo > 0.0 {
            (lo.ln() / n as f64).exp().min(radius)
        } else {
            radius / 2.0
        }
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(mean_log, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // accept if residuals are small relative to the coefficient scale
    let ok = z.iter().all(|&zi| {
        let (p, _) = horner(coeffs, zi);
        let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.norm() * zi.norm().powi(k as i32)).sum();
        p.norm() <= 1e-9 * scale
    });
    if ok {
        Ok(z)
    } else {
        Err(AnalysisError::NoConvergence)
    }
}

fn newton_complex(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..5 {
        let (p, dp) = horner(coeffs, z);
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
    }
    z
}

fn polish_real(coeffs: &[Fixed], start: f64) -> Option<Fixed> {
    let mut x = Fixed::from_f64(start);
    let tolerance = BigInt::from(1) << (FRAC_BITS - 200);
    for _ in 0..200 {
        let (p, dp) = Poly::eval_fixed(coeffs, &x);
        let step = p.div(&dp)?;
        x = Fixed(&x.0 - &step.0);
        if step.0.abs() <= tolerance {
            return Some(x);
        }
    }
    // a real double root converges only linearly; keep the last iterate
    (x.to_f64() - start).abs().le(&(1e-6 * start.abs().max(1e-12))).then_some(x)
}

/// Root value rounded to `digits` significant decimal digits.
pub fn significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let e = x.abs().log10().floor() as i32;
    let f = 10f64.powi(digits as i32 - 1 - e);
    (x * f).round() / f
}

/// Evaluate at a real fixed-point argument, returning a double.
pub fn eval_at(p: &Poly, x: &Fixed) -> f64 {
    let coeffs: Vec<Fixed> = p.0.iter().map(Fixed::from_rational).collect();
    Poly::eval_fixed(&coeffs, x).0.to_f64()
}
