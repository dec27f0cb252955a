//! Synthetic-model exactness checks shared by the property tests and the
//! acceptance target.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use sawtm::analysis::{
    fit_biased_da, fit_da, m1_lambda, m2_ratio_of_ratios, p1_subdominant, p2_triple_fit, pade, predict_coefficients,
    ratio_estimators, singularities, BatchOptions, FitSpec, LogSeries,
};

pub type Check = (&'static str, Result<(), String>);

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol * want.abs().max(1.0) {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, want {want}"))
    }
}

/// `log(C μ^n (γ)_n / n!)` for n in range.
pub fn binomial_model(mu: f64, gamma: f64, amp: f64, max: usize) -> LogSeries {
    let mut acc = amp.ln();
    let mut logs = vec![acc];
    for n in 1..=max {
        acc += mu.ln() + ((n as f64 + gamma - 1.0) / n as f64).ln();
        logs.push(acc);
    }
    LogSeries::new(0, logs).unwrap()
}

/// `log(λ^{L² + bL + c} L^g)` for L in 1..=max.
pub fn square_model(lambda: f64, b: f64, c: f64, g: f64, max: usize) -> LogSeries {
    LogSeries::from_fn(1..=max, |l| {
        let l = l as f64;
        (l * l + b * l + c) * lambda.ln() + g * l.ln()
    })
}

/// Taylor coefficients of `(1 - z/zc)^{-e}` with rational `zc`, `e`.
pub fn power_series(zc: &BigRational, e: &BigRational, len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for n in 1..len {
        let nn = BigRational::from_integer(BigInt::from(n));
        let prev = out[n - 1].clone();
        out.push(prev * (e + &nn - BigRational::one()) / (nn * zc));
    }
    out
}

fn ratio_check() -> Result<(), String> {
    let (mu, gamma) = (2.5, 1.75);
    let s = binomial_model(mu, gamma, 3.0, 30);
    let e = ratio_estimators(&s, Some(1.0 / mu), Some(gamma)).map_err(|e| e.to_string())?;
    for i in 0..e.n.len() {
        if let Some(l) = e.intercept[i] {
            close("intercept", l, mu, 1e-11)?;
        }
        close("biased exponent", e.exponent_biased[i].unwrap(), gamma, 1e-11)?;
        close("biased growth", e.growth_biased[i].unwrap(), mu, 1e-12)?;
    }
    let s = binomial_model(mu, 2.0, 3.0, 30);
    let e = ratio_estimators(&s, None, None).map_err(|e| e.to_string())?;
    for d in e.exponent_unbiased.iter().flatten() {
        close("unbiased exponent", *d, 2.0, 1e-9)?;
    }
    Ok(())
}

fn m1_check() -> Result<(), String> {
    let fit = m1_lambda(&square_model(1.6, 0.0, 0.0, 0.0, 16), 1, &FitSpec::new(&[1, 2, 3])).map_err(|e| e.to_string())?;
    for &(_, v) in fit.raw.iter().chain(&fit.constants()) {
        close("M1", v, 1.6, 1e-12)?;
    }
    close("M1 lambda", fit.lambda, 1.6, 1e-12)
}

fn m2_check() -> Result<(), String> {
    let fit =
        m2_ratio_of_ratios(&square_model(1.6, 0.4, -0.7, 0.0, 16), 2, &FitSpec::new(&[2, 3])).map_err(|e| e.to_string())?;
    for &(_, v) in fit.raw.iter().chain(&fit.constants()) {
        close("M2", v, 2.56, 1e-12)?;
    }
    close("M2 lambda", fit.lambda, 1.6f64.sqrt(), 1e-12)
}

fn p1_check() -> Result<(), String> {
    let (b, c) = (-0.35, 0.8);
    let r = p1_subdominant(&square_model(1.6, b, c, 0.0, 16), 1.6, 0.0, &FitSpec::new(&[1]), &FitSpec::new(&[1]))
        .map_err(|e| e.to_string())?;
    for &(_, v) in &r.alpha.raw {
        close("P1 alpha", v, 1.6f64.powf(b), 1e-12)?;
    }
    close("P1 b", r.b, b, 1e-11)?;
    close("P1 c", r.c, c, 1e-11)
}

fn p2_check() -> Result<(), String> {
    let (b, c, g) = (-0.04, 0.56, -0.5);
    let ln = 1.7f64.ln();
    for t in p2_triple_fit(&square_model(1.7, b, c, g, 16), 1.7).map_err(|e| e.to_string())? {
        close("P2 b", t.b_log / ln, b, 1e-8)?;
        close("P2 c", t.c_log / ln, c, 1e-8)?;
        close("P2 g", t.g, g, 1e-8)?;
    }
    Ok(())
}

fn pade_check() -> Result<(), String> {
    // (1 + z) / ((1 - 3z)(1 - z/2)) has a Padé [1/2] equal to itself
    let mut coeffs = Vec::new();
    let (a, b) = (power_series(&q(1, 3), &q(1, 1), 12), power_series(&q(2, 1), &q(1, 1), 12));
    for n in 0..12 {
        let f: BigRational = (0..=n).map(|i| &a[i] * &b[n - i]).sum();
        let g = if n > 0 { (0..n).map(|i| &a[i] * &b[n - 1 - i]).sum() } else { BigRational::zero() };
        coeffs.push(f + g);
    }
    let p = pade(&coeffs, 1, 2).map_err(|e| e.to_string())?;
    if p.denominator.0 != vec![q(1, 1), q(-7, 2), q(3, 2)] || p.numerator.0 != vec![q(1, 1), q(1, 1)] {
        return Err(format!("Padé [1/2] is {:?} / {:?}", p.numerator.0, p.denominator.0));
    }
    // the root itself is refined in fixed point, so 1/3 is only approximated
    let root = p.root.and_then(|r| r.real).ok_or("no real root")?.to_rational();
    if (root - q(1, 3)).abs() < BigRational::new(BigInt::one(), BigInt::from(10).pow(60)) {
        Ok(())
    } else {
        Err("Padé root is not 1/3".into())
    }
}

fn da_check() -> Result<(), String> {
    // (1 - 4z)^{-1/2} satisfies a first-order equation exactly
    let s = power_series(&q(1, 4), &q(1, 2), 20);
    let da = fit_da(&s[..8], &[1, 1], 1).map_err(|e| e.to_string())?;
    if da.series(&s, 20).as_deref() != Some(&s[..]) {
        return Err("formal solution differs from the generating function".into());
    }
    let sing = singularities(&da).map_err(|e| e.to_string())?;
    let at = sing.iter().find(|x| x.z.im == 0.0 && (x.z.re - 0.25).abs() < 1e-14).ok_or("no singularity at 1/4")?;
    close("DA exponent", at.exponent.ok_or("no exponent")?.re, -0.5, 1e-12)
}

fn biased_check() -> Result<(), String> {
    let s = power_series(&q(1, 3), &q(3, 2), 16);
    let da = fit_biased_da(&s, &[2, 2], 0, &q(1, 3), 1).map_err(|e| e.to_string())?;
    let sing = singularities(&da).map_err(|e| e.to_string())?;
    let at = sing.iter().find(|x| x.z.im == 0.0 && (x.z.re - 1.0 / 3.0).abs() < 1e-14).ok_or("bias point lost")?;
    close("biased exponent", at.exponent.ok_or("no exponent")?.re, -1.5, 1e-12)
}

fn prediction_check() -> Result<(), String> {
    // ratios 2^L give the D-finite ratio series 1 / (1 - 2z)
    let counts: Vec<BigUint> = (1..=16u32).map(|l| BigUint::from(2u32).pow(l * (l + 1) / 2)).collect();
    let known = 12;
    let opts = BatchOptions { order: 1, inhomogeneous: vec![0, 1, 2], spread: 2, min_terms: 5, ..Default::default() };
    let pred = predict_coefficients(&counts[..known], 4, 1e-5, &opts).map_err(|e| e.to_string())?;
    if pred.terms.len() != 4 {
        return Err(format!("{} predicted terms", pred.terms.len()));
    }
    for t in &pred.terms {
        if t.value != counts[t.size - 1] || t.rel_spread != 0.0 {
            return Err(format!("L={}: predicted {} (spread {})", t.size, t.value, t.rel_spread));
        }
    }
    Ok(())
}

fn scale_check() -> Result<(), String> {
    let base = power_series(&q(2, 7), &q(5, 4), 14);
    let scaled: Vec<BigRational> = base.iter().map(|x| x * q(-9, 5)).collect();
    let zs = |s: &[BigRational]| -> Result<Vec<(f64, f64)>, String> {
        let da = fit_da(s, &[2, 2, 2], 1).map_err(|e| e.to_string())?;
        let mut v: Vec<(f64, f64)> = singularities(&da)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|x| (x.z.re, x.exponent.map_or(f64::NAN, |e| e.re)))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(v)
    };
    let (a, b) = (zs(&base)?, zs(&scaled)?);
    if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| (x.0 - y.0).abs() > 1e-14 || (x.1 - y.1).abs() > 1e-10) {
        return Err(format!("{a:?} vs {b:?}"));
    }
    Ok(())
}

pub fn exactness_checks() -> Vec<Check> {
    vec![
        ("ratio estimators on binomial models", ratio_check()),
        ("M1 on pure growth", m1_check()),
        ("M2 on quadratic exponent", m2_check()),
        ("P1 subdominant recovery", p1_check()),
        ("P2 triples", p2_check()),
        ("Padé of a rational function", pade_check()),
        ("DA on an algebraic function", da_check()),
        ("biased DA exponent", biased_check()),
        ("prediction on D-finite ratios", prediction_check()),
        ("singularities under rescaling", scale_check()),
    ]
}
