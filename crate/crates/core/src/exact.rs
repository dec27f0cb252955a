//! Primes below 2^62, Chinese remaindering and the text stores for series
//! and residues.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::tm::{
    engine::{SweepOptions, Sweeper, DEFAULT_MEMORY_LIMIT},
    PathKind, ProblemSpec, TmError,
};

pub const PRIME_CEILING: u64 = 1 << 62;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("{residues} residues for {primes} primes")]
    LengthMismatch { residues: usize, primes: usize },
    #[error("residue {residue} not reduced modulo {prime}")]
    Unreduced { residue: u64, prime: u64 },
    #[error("moduli are not pairwise coprime")]
    NotCoprime,
    #[error("L={size}: {primes} primes insufficient, extra prime changed the value")]
    InsufficientPrimes { size: usize, primes: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("entries must have strictly increasing L (saw {0} after {1})")]
    NotIncreasing(usize, usize),
    #[error("residue files disagree on {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Tm(#[from] TmError),
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `k` largest primes below 2^62, in decreasing order.
pub fn generate_primes(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut n = PRIME_CEILING - 1;
    while out.len() < k {
        if is_prime(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// The unique `x` in `[0, Π p)` with `x ≡ r_k (mod p_k)`.
pub fn crt_combine(residues: &[u64], primes: &[u64]) -> Result<BigUint, ExactError> {
    if residues.len() != primes.len() {
        return Err(ExactError::LengthMismatch { residues: residues.len(), primes: primes.len() });
    }
    let mut x = BigInt::zero();
    let mut modulus = BigInt::one();
    for (&r, &p) in residues.iter().zip(primes) {
        if r >= p {
            return Err(ExactError::Unreduced { residue: r, prime: p });
        }
        let p_big = BigInt::from(p);
        // x + modulus * t ≡ r (mod p)
        let ext = modulus.extended_gcd(&p_big);
        if !ext.gcd.is_one() {
            return Err(ExactError::NotCoprime);
        }
        let diff = (BigInt::from(r) - &x).mod_floor(&p_big);
        let t = (diff * ext.x).mod_floor(&p_big);
        x += &modulus * t;
        modulus *= p_big;
    }
    Ok(x.to_biguint().expect("nonnegative"))
}

/// Upper estimate of log2 of the count, from the growth constants with
/// generous sub-dominant allowances.
pub fn magnitude_bits(problem: &ProblemSpec, size: usize) -> f64 {
    let l = size as f64;
    let kappa = problem.growth_reference();
    // b and c in the exponent are O(1); allow |b| <= 1 and 4 * (|c| + 1) with |c| <= 1
    let exponent = l * l + l + 8.0;
    let poly = if problem.path == PathKind::SawSpanning { 2.0 * (l + 1.0).log2() } else { 0.0 };
    exponent * kappa.log2() + poly + 2.0 * (l + 1.0).log2() + 8.0
}

/// Number of ~62-bit primes whose product certainly exceeds the count.
pub fn primes_needed(problem: &ProblemSpec, size: usize) -> usize {
    ((magnitude_bits(problem, size) + 1.0) / 61.9).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Exact,
    Predicted,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Exact => "exact",
            Kind::Predicted => "predicted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub size: usize,
    pub value: BigUint,
    pub kind: Kind,
    /// Relative standard error of a predicted value.
    pub stderr: Option<f64>,
}

/// A coefficient sequence indexed by domain size.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    pub problem: String,
    pub entries: Vec<Entry>,
    /// Free-form `# key: value` lines preserved on output.
    pub config: Vec<(String, String)>,
}

impl Series {
    pub fn new(problem: impl Into<String>) -> Self {
        Series { problem: problem.into(), ..Default::default() }
    }

    pub fn push(&mut self, entry: Entry) -> Result<(), ExactError> {
        if let Some(last) = self.entries.last() {
            if entry.size <= last.size {
                return Err(ExactError::NotIncreasing(entry.size, last.size));
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn push_exact(&mut self, size: usize, value: BigUint) -> Result<(), ExactError> {
        self.push(Entry { size, value, kind: Kind::Exact, stderr: None })
    }

    pub fn exact(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.kind == Kind::Exact)
    }

    /// Exact values in order of size.
    pub fn exact_values(&self) -> Vec<BigUint> {
        self.exact().map(|e| e.value.clone()).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.size).collect()
    }

    /// Copy keeping exact entries with size `<= max_size`.
    pub fn truncated(&self, max_size: usize) -> Series {
        Series {
            problem: self.problem.clone(),
            entries: self.exact().filter(|e| e.size <= max_size).cloned().collect(),
            config: self.config.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# problem: {}", self.problem).unwrap();
        for (k, v) in &self.config {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        let mut current = None;
        for e in &self.entries {
            if current != Some(e.kind) {
                writeln!(out, "# kind: {}", e.kind.as_str()).unwrap();
                current = Some(e.kind);
            }
            match e.stderr {
                Some(s) => writeln!(out, "{}\t{}\t{:.6e}", e.size, e.value, s).unwrap(),
                None => writeln!(out, "{}\t{}", e.size, e.value).unwrap(),
            }
        }
        if current.is_none() {
            writeln!(out, "# kind: exact").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Series, ExactError> {
        let mut series = Series::default();
        let mut kind = Kind::Exact;
        let mut saw_problem = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |message: &str| ExactError::Parse { line: i + 1, message: message.to_string() };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let Some((key, value)) = rest.split_once(':') else { continue };
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "problem" => {
                        series.problem = value.to_string();
                        saw_problem = true;
                    }
                    "kind" => {
                        kind = match value {
                            "exact" => Kind::Exact,
                            "predicted" => Kind::Predicted,
                            _ => return Err(err("kind must be exact or predicted")),
                        }
                    }
                    _ => series.config.push((key.to_string(), value.to_string())),
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(err("expected L<TAB>value[<TAB>stderr]"));
            }
            let size = fields[0].parse().map_err(|_| err("bad L"))?;
            let value = fields[1].parse().map_err(|_| err("bad value"))?;
            let stderr = match fields.get(2) {
                Some(s) => Some(s.parse().map_err(|_| err("bad stderr"))?),
                None => None,
            };
            series.push(Entry { size, value, kind, stderr }).map_err(|e| err(&e.to_string()))?;
        }
        if !saw_problem {
            return Err(ExactError::Parse { line: 0, message: "missing # problem header".into() });
        }
        Ok(series)
    }

    pub fn read(path: &Path) -> Result<Series, ExactError> {
        Series::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), ExactError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Residues of a series modulo one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueFile {
    pub problem: String,
    pub prime: u64,
    pub residues: Vec<(usize, u64)>,
    /// Extra `# key: value` lines.
    pub config: Vec<(String, String)>,
}

impl ResidueFile {
    pub fn to_text(&self) -> String {
        let mut out = format!("# problem: {}\n# prime: {}\n", self.problem, self.prime);
        for (k, v) in &self.config {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        for (l, r) in &self.residues {
            writeln!(out, "{l}\t{r}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<ResidueFile, ExactError> {
        let mut problem = None;
        let mut prime = None;
        let mut residues = Vec::new();
        let mut config = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |message: &str| ExactError::Parse { line: i + 1, message: message.to_string() };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((key, value)) = rest.split_once(':') {
                    match key.trim() {
                        "problem" => problem = Some(value.trim().to_string()),
                        "prime" => prime = Some(value.trim().parse().map_err(|_| err("bad prime"))?),
                        key => config.push((key.to_string(), value.trim().to_string())),
                    }
                }
                continue;
            }
            let (l, r) = line.split_once('\t').ok_or_else(|| err("expected L<TAB>residue"))?;
            residues.push((l.parse().map_err(|_| err("bad L"))?, r.parse().map_err(|_| err("bad residue"))?));
        }
        Ok(ResidueFile {
            problem: problem.ok_or(ExactError::Parse { line: 0, message: "missing # problem".into() })?,
            prime: prime.ok_or(ExactError::Parse { line: 0, message: "missing # prime".into() })?,
            residues,
            config,
        })
    }
}

/// Combine residue files for the same problem into a series; sizes present
/// in every file are reconstructed.
pub fn combine_residues(files: &[ResidueFile]) -> Result<Series, ExactError> {
    let first = files.first().ok_or(ExactError::LengthMismatch { residues: 0, primes: 0 })?;
    if files.iter().any(|f| f.problem != first.problem) {
        return Err(ExactError::Inconsistent("problem".into()));
    }
    let primes: Vec<u64> = files.iter().map(|f| f.prime).collect();
    let mut series = Series::new(first.problem.clone());
    for &(l, _) in &first.residues {
        let mut rs = Vec::new();
        for f in files {
            match f.residues.iter().find(|(m, _)| *m == l) {
                Some((_, r)) => rs.push(*r),
                None => break,
            }
        }
        if rs.len() == files.len() {
            series.push_exact(l, crt_combine(&rs, &primes)?)?;
        }
    }
    Ok(series)
}

/// Options for [`enumerate_exact`].
#[derive(Debug, Clone)]
pub struct EnumerateOptions {
    /// Fixed prime count; `None` derives it from the magnitude bound.
    pub primes: Option<usize>,
    pub workers: usize,
    /// Run one extra prime and require the value to be unchanged.
    pub verify: bool,
    pub memory_limit: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { primes: None, workers: 1, verify: true, memory_limit: DEFAULT_MEMORY_LIMIT }
    }
}

/// Exact counts for `L = 1..=max_size` with the residues used.
pub fn enumerate_exact(
    problem: &ProblemSpec,
    max_size: usize,
    opts: &EnumerateOptions,
) -> Result<(Series, Vec<ResidueFile>), ExactError> {
    enumerate_range(problem, 1..=max_size, opts)
}

pub fn enumerate_range(
    problem: &ProblemSpec,
    sizes: std::ops::RangeInclusive<usize>,
    opts: &EnumerateOptions,
) -> Result<(Series, Vec<ResidueFile>), ExactError> {
    let max_size = *sizes.end();
    let most = opts.primes.unwrap_or_else(|| primes_needed(problem, max_size)) + usize::from(opts.verify);
    let all_primes = generate_primes(most);
    let mut files: Vec<ResidueFile> = all_primes
        .iter()
        .map(|&p| ResidueFile { problem: problem.id().to_string(), prime: p, residues: Vec::new(), config: Vec::new() })
        .collect();
    let mut series = Series::new(problem.id());
    let sweep_opts = SweepOptions { workers: opts.workers, check_order: false, memory_limit: opts.memory_limit };
    for size in sizes {
        let k = opts.primes.unwrap_or_else(|| primes_needed(problem, size));
        let run = k + usize::from(opts.verify);
        let sweeper = Sweeper::new(*problem, size, opts.memory_limit)?;
        let mut residues = Vec::with_capacity(run);
        for (i, &p) in all_primes[..run].iter().enumerate() {
            let counts = sweeper.run(p, &sweep_opts)?;
            let r = sweeper.accepted(&counts);
            residues.push(r);
            files[i].residues.push((size, r));
        }
        let value = crt_combine(&residues[..k], &all_primes[..k])?;
        if opts.verify {
            let check = crt_combine(&residues, &all_primes[..run])?;
            if check != value {
                return Err(ExactError::InsufficientPrimes { size, primes: k });
            }
        }
        series.push_exact(size, value)?;
    }
    Ok((series, files))
}

/// Natural log of a big integer, accurate to double precision.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn prime_set() {
        let ps = generate_primes(3);
        assert_eq!(ps.len(), 3);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&p| p % 2 == 1 && p < PRIME_CEILING));
        assert_eq!(ps[0], PRIME_CEILING - 57);
    }

    #[test]
    fn crt_small() {
        assert_eq!(crt_combine(&[2, 3], &[3, 5]).unwrap(), BigUint::from(8u32));
        assert_eq!(crt_combine(&[4], &[7]).unwrap(), BigUint::from(4u32));
        assert!(matches!(crt_combine(&[9], &[7]), Err(ExactError::Unreduced { .. })));
        assert!(matches!(crt_combine(&[1, 2], &[7]), Err(ExactError::LengthMismatch { .. })));
    }

    #[test]
    fn series_round_trip() {
        let text = "# problem: demo\n# kind: exact\n1\t2\n2\t14\n# kind: predicted\n3\t316\t1.000000e0\n";
        let s = Series::parse(text).unwrap();
        assert_eq!(s.entries.len(), 3);
        assert_eq!(s.entries[2].kind, Kind::Predicted);
        assert_eq!(s.to_text(), text);
        assert!(Series::parse("# problem: x\n2\t1\n1\t1\n").is_err());
    }

    #[test]
    fn residue_round_trip() {
        let f = ResidueFile { problem: "demo".into(), prime: 7, residues: vec![(1, 2), (2, 0)], config: vec![("workers".into(), "2".into())] };
        assert_eq!(ResidueFile::parse(&f.to_text()).unwrap(), f);
    }
}
