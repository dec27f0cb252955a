//! Padé approximants and (biased) inhomogeneous differential approximants,
//! fitted exactly in rational arithmetic.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::linear::solve_rational;
use super::poly::{roots, smallest_positive_root, Fixed, Poly, Root};
use super::AnalysisError;

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `P_m / Q_n` with `Q_n(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pade {
    pub numerator: Poly,
    pub denominator: Poly,
    /// Smallest positive real zero of the denominator.
    pub root: Option<Root>,
}

/// Padé approximant with numerator degree `m` and denominator degree `n`.
pub fn pade(coefficients: &[BigRational], m: usize, n: usize) -> Result<Pade, AnalysisError> {
    let needed = m + n + 1;
    if coefficients.len() < needed {
        return Err(AnalysisError::TooFewTerms { needed, have: coefficients.len() });
    }
    let a = |i: isize| if i < 0 { BigRational::zero() } else { coefficients[i as usize].clone() };
    // Σ_{j=1..n} q_j a_{k-j} = -a_k for k = m+1..m+n
    let matrix: Vec<Vec<BigRational>> =
        (m + 1..=m + n).map(|k| (1..=n).map(|j| a(k as isize - j as isize)).collect()).collect();
    let rhs: Vec<BigRational> = (m + 1..=m + n).map(|k| -a(k as isize)).collect();
    let mut q = vec![BigRational::one()];
    if n > 0 {
        q.extend(solve_rational(&matrix, &rhs)?.x);
    }
    let p: Vec<BigRational> = (0..=m)
        .map(|i| (0..=i.min(n)).map(|j| &q[j] * a(i as isize - j as isize)).sum())
        .collect();
    let denominator = Poly::trimmed(q);
    let root = if denominator.degree() > 0 { smallest_positive_root(&denominator)? } else { None };
    Ok(Pade { numerator: Poly::trimmed(p), denominator, root })
}

/// Bias of a differential approximant toward a prescribed singular point.
#[derive(Debug, Clone, PartialEq)]
pub struct Bias {
    pub point: BigRational,
    pub order: usize,
}

/// `Σ_k Q_k(z) θ^k F(z) = P(z)` with `θ = z d/dz` and `Q_M(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffApprox {
    pub order: usize,
    /// Nominal degrees `N_0..N_M`.
    pub degrees: Vec<usize>,
    /// Degree `K` of the inhomogeneous polynomial.
    pub inhomogeneous: usize,
    /// `Q_0..Q_M` including any biasing factors.
    pub q: Vec<Poly>,
    pub p: Poly,
    /// Number of input coefficients matched.
    pub terms: usize,
    pub bias: Option<Bias>,
    /// The fitting system was singular but consistent.
    pub degenerate: bool,
}

/// Coefficients needed by an unbiased approximant: `K + Σ (N_k + 1)`.
pub fn terms_needed(degrees: &[usize], k: usize) -> usize {
    k + degrees.iter().map(|d| d + 1).sum::<usize>()
}

/// Coefficients needed by a biased approximant: `K + Σ (N_k - q_k + 1)`.
pub fn biased_terms_needed(degrees: &[usize], k: usize, order: usize) -> Option<usize> {
    let m = degrees.len() - 1;
    let mut total = k;
    for (i, &d) in degrees.iter().enumerate() {
        total += (d + 1).checked_sub(bias_power(order, i, m))?;
    }
    Some(total)
}

fn bias_power(q: usize, k: usize, m: usize) -> usize {
    (q + k).saturating_sub(m)
}

/// Coefficients of `θ^k F`.
fn theta_power(coefficients: &[BigRational], k: usize) -> Vec<BigRational> {
    coefficients.iter().enumerate().map(|(n, a)| a * int(n).pow(k as i32)).collect()
}

/// `(1 - z/zc)^q` as a polynomial.
fn bias_factor(point: &BigRational, q: usize) -> Vec<BigRational> {
    let step = -BigRational::one() / point;
    let mut out = vec![BigRational::one()];
    for _ in 0..q {
        let mut next = vec![BigRational::zero(); out.len() + 1];
        for (i, c) in out.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c * &step;
        }
        out = next;
    }
    out
}

fn convolve(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    (0..len).map(|j| (0..=j.min(a.len() - 1)).filter(|&i| j - i < b.len()).map(|i| &a[i] * &b[j - i]).sum()).collect()
}

/// Unbiased differential approximant of order `degrees.len() - 1`.
pub fn fit_da(coefficients: &[BigRational], degrees: &[usize], k: usize) -> Result<DiffApprox, AnalysisError> {
    fit_general(coefficients, degrees, k, None)
}

/// Differential approximant forced to be singular at `point` with order `q`.
pub fn fit_biased_da(
    coefficients: &[BigRational],
    degrees: &[usize],
    k: usize,
    point: &BigRational,
    q: usize,
) -> Result<DiffApprox, AnalysisError> {
    fit_general(coefficients, degrees, k, Some(Bias { point: point.clone(), order: q }))
}

fn fit_general(
    coefficients: &[BigRational],
    degrees: &[usize],
    k_inh: usize,
    bias: Option<Bias>,
) -> Result<DiffApprox, AnalysisError> {
    assert!(degrees.len() >= 2, "order must be at least one");
    let m = degrees.len() - 1;
    let powers: Vec<usize> = (0..=m).map(|k| bias.as_ref().map_or(0, |b| bias_power(b.order, k, m))).collect();
    for (&d, &q) in degrees.iter().zip(&powers) {
        if d < q {
            return Err(AnalysisError::BiasTooStrong { degree: d, order: q });
        }
    }
    let free: Vec<usize> = degrees.iter().zip(&powers).map(|(d, q)| d - q + 1).collect();
    let terms = k_inh + free.iter().sum::<usize>();
    if coefficients.len() < terms {
        return Err(AnalysisError::TooFewTerms { needed: terms, have: coefficients.len() });
    }
    let a = &coefficients[..terms];
    // G_k = (1 - z/zc)^{q_k} θ^k F, truncated to `terms`
    let g: Vec<Vec<BigRational>> = (0..=m)
        .map(|k| {
            let f = theta_power(a, k);
            match &bias {
                Some(b) if powers[k] > 0 => convolve(&bias_factor(&b.point, powers[k]), &f, terms),
                _ => f,
            }
        })
        .collect();

    // unknowns: Q̂_0 .. Q̂_M (without Q̂_M[0]) then P
    let unknowns = terms;
    let mut matrix = vec![vec![BigRational::zero(); unknowns]; terms];
    let mut rhs = vec![BigRational::zero(); terms];
    for j in 0..terms {
        let mut col = 0;
        for k in 0..=m {
            for i in 0..free[k] {
                let v = if i <= j { g[k][j - i].clone() } else { BigRational::zero() };
                if k == m && i == 0 {
                    rhs[j] = -v;
                    continue;
                }
                matrix[j][col] = v;
                col += 1;
            }
        }
        if j <= k_inh {
            matrix[j][col + j] = -BigRational::one();
        }
    }
    let solution = solve_rational(&matrix, &rhs)?;
    let x = solution.x;

    let mut col = 0;
    let mut q = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let mut hat = Vec::with_capacity(free[k]);
        for i in 0..free[k] {
            if k == m && i == 0 {
                hat.push(BigRational::one());
            } else {
                hat.push(x[col].clone());
                col += 1;
            }
        }
        let full = match &bias {
            Some(b) if powers[k] > 0 => {
                let f = bias_factor(&b.point, powers[k]);
                convolve(&f, &hat, hat.len() + f.len() - 1)
            }
            _ => hat,
        };
        q.push(Poly::trimmed(full));
    }
    let p = Poly::trimmed(x[col..].to_vec());
    Ok(DiffApprox {
        order: m,
        degrees: degrees.to_vec(),
        inhomogeneous: k_inh,
        q,
        p,
        terms,
        bias,
        degenerate: solution.deficient,
    })
}

impl DiffApprox {
    /// Formal power-series solution through `len` terms, seeded with the
    /// input coefficients wherever the recurrence leaves a term undetermined.
    pub fn series(&self, seed: &[BigRational], len: usize) -> Option<Vec<BigRational>> {
        let mut out: Vec<BigRational> = Vec::with_capacity(len);
        for j in 0..len {
            let mut lead = BigRational::zero();
            for (k, qk) in self.q.iter().enumerate() {
                if let Some(c) = qk.0.first() {
                    lead += c * int(j).pow(k as i32);
                }
            }
            let mut acc = self.p.0.get(j).cloned().unwrap_or_else(BigRational::zero);
            for (k, qk) in self.q.iter().enumerate() {
                for (i, c) in qk.0.iter().enumerate().skip(1) {
                    if i > j {
                        break;
                    }
                    if !c.is_zero() {
                        acc -= c * int(j - i).pow(k as i32) * &out[j - i];
                    }
                }
            }
            if lead.is_zero() {
                out.push(seed.get(j)?.clone());
            } else {
                out.push(acc / lead);
            }
        }
        Some(out)
    }
}

/// Singular point of an approximant with its exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Singularity {
    pub z: Complex64,
    /// Extended-precision location for real roots.
    pub real: Option<Fixed>,
    /// Exponent from the indicial equation; `None` at multiple roots.
    pub exponent: Option<Complex64>,
    pub multiple: bool,
}

/// Zeros of `Q_M` with exponents `M - 1 - Q_{M-1}(z) / (z Q_M'(z))`.
pub fn singularities(da: &DiffApprox) -> Result<Vec<Singularity>, AnalysisError> {
    let qm = &da.q[da.order];
    let qm1 = &da.q[da.order - 1];
    let dqm = qm.derivative();
    let m = da.order as f64;
    let rs = roots(qm)?;
    Ok(rs
        .into_iter()
        .map(|r| {
            let exponent = if r.multiple {
                None
            } else if let Some(x) = &r.real {
                let xr = x.to_rational();
                let den = &xr * dqm.eval(&xr);
                (!den.is_zero())
                    .then(|| Complex64::new(m - 1.0 - super::rational_to_f64(&(qm1.eval(&xr) / den)), 0.0))
            } else {
                let den = r.value * dqm.eval_f64(r.value);
                Some(Complex64::new(m - 1.0, 0.0) - qm1.eval_f64(r.value) / den)
            };
            Singularity { z: r.value, real: r.real, exponent, multiple: r.multiple }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn geometric(len: usize) -> Vec<BigRational> {
        (0..len).map(|n| BigRational::from_integer(BigInt::from(2).pow(n as u32))).collect()
    }

    #[test]
    fn pade_of_pole() {
        let p = pade(&geometric(4), 0, 1).unwrap();
        assert_eq!(p.denominator.0, vec![q(1, 1), q(-2, 1)]);
        assert_eq!(p.root.unwrap().real.unwrap().to_rational(), q(1, 2));
    }

    #[test]
    fn first_order_pole() {
        let da = fit_da(&geometric(8), &[1, 1], 0).unwrap();
        assert_eq!(da.terms, 4);
        assert_eq!(da.q[1].0, vec![q(1, 1), q(-2, 1)]);
        assert_eq!(da.q[0].0, vec![q(0, 1), q(-2, 1)]);
        assert!(da.p.0.iter().all(Zero::is_zero));
        let s = singularities(&da).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].z.re - 0.5).abs() < 1e-15);
        assert!((s[0].exponent.unwrap().re + 1.0).abs() < 1e-12);
        // the exact operator reproduces all later terms
        assert_eq!(da.series(&geometric(4), 12).unwrap(), geometric(12));
    }

    #[test]
    fn biased_pole() {
        let da = fit_biased_da(&geometric(10), &[2, 2], 0, &q(1, 2), 1).unwrap();
        let s = singularities(&da).unwrap();
        let at = s.iter().find(|s| (s.z.re - 0.5).abs() < 1e-12 && s.z.im == 0.0).unwrap();
        assert!((at.exponent.unwrap().re + 1.0).abs() < 1e-10);
    }
}
