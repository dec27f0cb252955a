//! Motzkin numbers, height-resolved path counts and lexicographic ranking.
//!
//! A path is a sequence of [`Step`]s that never drops below height zero.
//! Paths are ordered lexicographically with `Flat < Up < Down`, which is the
//! glyph order `∘ < ( < )` when a signature is read from the bottom edge.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MotzkinError {
    #[error("64-bit overflow computing {0}; use arbitrary precision")]
    Overflow(&'static str),
    #[error("path dips below height zero at step {0}")]
    NegativeHeight(usize),
    #[error("path ends at height {found}, class expects {expected}")]
    WrongEndHeight { found: usize, expected: usize },
    #[error("index {index} outside 1..={count}")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("length {0} exceeds table size {1}")]
    TooLong(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Flat,
    Up,
    Down,
}

impl Step {
    pub const ALL: [Step; 3] = [Step::Flat, Step::Up, Step::Down];

    /// Height after taking this step, `None` if it would go negative.
    pub fn apply(self, height: usize) -> Option<usize> {
        match self {
            Step::Flat => Some(height),
            Step::Up => Some(height + 1),
            Step::Down => height.checked_sub(1),
        }
    }
}

/// `M_0..=M_{n_max}` from the three-term recurrence, with checked 64-bit arithmetic.
pub fn motzkin_numbers(n_max: usize) -> Result<Vec<u64>, MotzkinError> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1u64);
    if n_max >= 1 {
        out.push(1);
    }
    for n in 2..=n_max {
        let n64 = n as u64;
        let a = (2 * n64 + 1)
            .checked_mul(out[n - 1])
            .ok_or(MotzkinError::Overflow("Motzkin number"))?;
        let b = (3 * (n64 - 1))
            .checked_mul(out[n - 2])
            .ok_or(MotzkinError::Overflow("Motzkin number"))?;
        let sum = a.checked_add(b).ok_or(MotzkinError::Overflow("Motzkin number"))?;
        debug_assert_eq!(sum % (n64 + 2), 0);
        out.push(sum / (n64 + 2));
    }
    Ok(out)
}

/// Arbitrary-precision Motzkin numbers.
pub fn motzkin_numbers_big(n_max: usize) -> Vec<BigUint> {
    let mut out: Vec<BigUint> = vec![BigUint::from(1u32)];
    if n_max >= 1 {
        out.push(BigUint::from(1u32));
    }
    for n in 2..=n_max {
        let sum = BigUint::from(2 * n + 1) * &out[n - 1] + BigUint::from(3 * (n - 1)) * &out[n - 2];
        out.push(sum / BigUint::from(n + 2));
    }
    out
}

/// Counts of nonnegative paths between arbitrary heights.
///
/// `walks(r, a, b)` is the number of `r`-step paths from height `a` to `b`.
#[derive(Debug, Clone)]
pub struct MotzkinTables {
    n_max: usize,
    stride: usize,
    counts: Vec<u64>,
}

impl MotzkinTables {
    pub fn new(n_max: usize) -> Result<Self, MotzkinError> {
        // heights reachable from start 0 or 1 within n_max steps
        let stride = n_max + 2;
        let mut counts = vec![0u64; (n_max + 1) * stride * stride];
        let idx = |r: usize, a: usize, b: usize| (r * stride + a) * stride + b;
        for a in 0..stride {
            counts[idx(0, a, a)] = 1;
        }
        for r in 1..=n_max {
            for a in 0..stride {
                for b in 0..stride {
                    // first step from a, then r-1 steps to b
                    let mut total = counts[idx(r - 1, a, b)];
                    if a + 1 < stride {
                        total = total
                            .checked_add(counts[idx(r - 1, a + 1, b)])
                            .ok_or(MotzkinError::Overflow("path count"))?;
                    }
                    if a > 0 {
                        total = total
                            .checked_add(counts[idx(r - 1, a - 1, b)])
                            .ok_or(MotzkinError::Overflow("path count"))?;
                    }
                    counts[idx(r, a, b)] = total;
                }
            }
        }
        Ok(MotzkinTables { n_max, stride, counts })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of `steps`-step paths from `from` to `to`; zero when out of range.
    ///
    /// Heights close to the table edge are truncated, so callers keep
    /// `from + steps` within `n_max + 1`.
    pub fn walks(&self, steps: usize, from: usize, to: usize) -> u64 {
        if steps > self.n_max || from >= self.stride || to >= self.stride {
            return 0;
        }
        self.counts[(steps * self.stride + from) * self.stride + to]
    }

    /// Paths of length `n` from height 0 to `h` (the `m0` table).
    pub fn m0(&self, n: usize, h: usize) -> u64 {
        self.walks(n, 0, h)
    }

    /// Paths of length `n` from height 1 to `h` (the `m1` table).
    pub fn m1(&self, n: usize, h: usize) -> u64 {
        self.walks(n, 1, h)
    }

    /// Size of the class `(start_height, n, end_height)`.
    pub fn class_size(&self, start_height: usize, n: usize, end_height: usize) -> u64 {
        self.walks(n, start_height, end_height)
    }

    /// Height-resolved table for a fixed start height: entry `[n][h]`.
    pub fn path_counts(&self, start_height: usize) -> Vec<Vec<u64>> {
        (0..=self.n_max)
            .map(|n| (0..self.stride).map(|h| self.walks(n, start_height, h)).collect())
            .collect()
    }

    /// 1-based lexicographic rank of `path` within its `(start, len, end)` class.
    pub fn rank(&self, path: &[Step], start_height: usize) -> Result<u64, MotzkinError> {
        let n = path.len();
        if n > self.n_max {
            return Err(MotzkinError::TooLong(n, self.n_max));
        }
        let mut heights = Vec::with_capacity(n + 1);
        let mut h = start_height;
        heights.push(h);
        for (i, step) in path.iter().enumerate() {
            h = step.apply(h).ok_or(MotzkinError::NegativeHeight(i))?;
            heights.push(h);
        }
        let end = h;
        let mut rank = 1u64;
        for (i, step) in path.iter().enumerate() {
            let here = heights[i];
            let remaining = n - i - 1;
            for smaller in Step::ALL.iter().take_while(|s| *s < step) {
                if let Some(next) = smaller.apply(here) {
                    rank += self.walks(remaining, next, end);
                }
            }
        }
        Ok(rank)
    }

    /// Inverse of [`rank`](Self::rank).
    pub fn unrank(
        &self,
        start_height: usize,
        n: usize,
        end_height: usize,
        index: u64,
    ) -> Result<Vec<Step>, MotzkinError> {
        if n > self.n_max {
            return Err(MotzkinError::TooLong(n, self.n_max));
        }
        let count = self.class_size(start_height, n, end_height);
        if index == 0 || index > count {
            return Err(MotzkinError::IndexOutOfRange { index, count });
        }
        let mut left = index - 1;
        let mut h = start_height;
        let mut path = Vec::with_capacity(n);
        for i in 0..n {
            let remaining = n - i - 1;
            for step in Step::ALL {
                let Some(next) = step.apply(h) else { continue };
                let block = self.walks(remaining, next, end_height);
                if left < block {
                    path.push(step);
                    h = next;
                    break;
                }
                left -= block;
            }
        }
        Ok(path)
    }
}

/// Height profile check: returns the final height or the first offending step.
pub fn end_height(path: &[Step], start_height: usize) -> Result<usize, MotzkinError> {
    let mut h = start_height;
    for (i, step) in path.iter().enumerate() {
        h = step.apply(h).ok_or(MotzkinError::NegativeHeight(i))?;
    }
    Ok(h)
}
