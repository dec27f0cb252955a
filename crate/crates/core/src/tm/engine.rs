//! In-place transfer-matrix sweep over a dense residue array.
//!
//! Each cell move visits every signature once. The visiting order is fixed
//! by a processing divider that never separates the two kink edges:
//! signatures are ordered by the height at the divider, then by the lower
//! half, then by the upper half, halves compared from their top edge down
//! with `∘ < ( < )`. Every join target precedes its source in this order,
//! so a count is always read before anything is added to it. The pair
//! `X∘`/`∘X` only feeds itself and is updated together.
//!
//! Work is split between threads by the occupation pattern of the half that
//! does not contain the kink; moves never change that pattern, so each
//! thread owns its sources and targets.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use super::problem::{CellKind, Move, Plan, ProblemError, ProblemSpec};
use super::rules::{targets, RuleError};
use crate::hash::{halves, HashError, HashFunction};
use crate::signature::{code_at, edge_mask, occupation, partner_above, partner_below, with_code, EMPTY, LOWER, UPPER};

/// Default cap on the residue array plus its inverse table.
pub const DEFAULT_MEMORY_LIMIT: usize = 6 << 30;

#[derive(Debug, Error)]
pub enum TmError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("needs {needed} bytes, limit is {limit}")]
    Memory { needed: usize, limit: usize },
    #[error("modulus {0} must be odd and below 2^62")]
    BadModulus(u64),
    #[error("move {step}: signature {bits:#x} read after being written")]
    OrderViolation { step: usize, bits: u64 },
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub workers: usize,
    /// Track reads and writes and fail on an unsafe access order.
    pub check_order: bool,
    pub memory_limit: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { workers: 1, check_order: false, memory_limit: DEFAULT_MEMORY_LIMIT }
    }
}

/// Residues of every signature count after a sweep.
#[derive(Debug)]
pub struct CountVector {
    pub prime: u64,
    pub size: usize,
    pub problem: ProblemSpec,
    pub data: Vec<u64>,
    /// Processing divider used for each cell move, in order.
    pub dividers: Vec<usize>,
}

/// Visiting order for one processing divider.
struct PhaseOrder {
    divider: usize,
    lower: Vec<Vec<u64>>,
    upper: Vec<Vec<u64>>,
    lower_occ: Vec<Vec<u64>>,
    upper_occ: Vec<Vec<u64>>,
}

fn glyph_key(bits: u64, len: usize) -> u64 {
    let mut key = 0u64;
    for p in (0..len).rev() {
        let g = match code_at(bits, p) {
            EMPTY => 0,
            LOWER => 1,
            _ => 2,
        };
        key = key * 3 + g;
    }
    key
}

impl PhaseOrder {
    fn new(width: usize, start_height: usize, divider: usize) -> Self {
        let upper_len = width - divider;
        let max_h = upper_len;
        let mut lower = vec![Vec::new(); max_h + 1];
        for (bits, h) in halves(divider, start_height, max_h, false) {
            lower[h].push(bits);
        }
        let mut upper = vec![Vec::new(); max_h + 1];
        for (bits, h) in halves(upper_len, 0, max_h, true) {
            upper[h].push(bits);
        }
        for list in lower.iter_mut() {
            list.sort_by_key(|&b| glyph_key(b, divider));
        }
        for list in upper.iter_mut() {
            list.sort_by_key(|&b| glyph_key(b, upper_len));
        }
        let lower_occ = lower.iter().map(|v| v.iter().map(|&b| occupation(b, divider)).collect()).collect();
        let upper_occ = upper.iter().map(|v| v.iter().map(|&b| occupation(b, upper_len)).collect()).collect();
        PhaseOrder { divider, lower, upper, lower_occ, upper_occ }
    }
}

fn owner(pattern: u64, workers: usize) -> usize {
    ((pattern.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 32) % workers as u64) as usize
}

/// Compiled sweep for one problem and size; reusable across primes.
pub struct Sweeper {
    problem: ProblemSpec,
    size: usize,
    plan: Plan,
    hash: HashFunction,
    phases: HashMap<usize, PhaseOrder>,
    divider_top: usize,
    divider_bottom: usize,
}

impl Sweeper {
    pub fn new(problem: ProblemSpec, size: usize, memory_limit: usize) -> Result<Self, TmError> {
        let plan = problem.plan(size)?;
        let width = plan.width;
        let hash = HashFunction::new(width, HashFunction::default_divider(width), plan.start_height)?;
        let needed = hash.len() * 8 + hash.table_entries() * 8;
        if needed > memory_limit {
            return Err(TmError::Memory { needed, limit: memory_limit });
        }
        let divider_top = hash.divider().saturating_sub(1);
        let divider_bottom = divider_top.saturating_sub(1);
        let mut sweeper = Sweeper { problem, size, plan, hash, phases: HashMap::new(), divider_top, divider_bottom };
        for m in sweeper.plan.moves.clone() {
            if let Move::Cell { low, .. } = m {
                let d = sweeper.divider_for(low);
                if !sweeper.phases.contains_key(&d) {
                    let order = PhaseOrder::new(width, sweeper.plan.start_height, d);
                    sweeper.phases.insert(d, order);
                }
            }
        }
        Ok(sweeper)
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    pub fn hash(&self) -> &HashFunction {
        &self.hash
    }

    /// Processing divider for a kink at `(low, low + 1)`.
    pub fn divider_for(&self, low: usize) -> usize {
        let splits = |d: usize| d == low + 1;
        if !splits(self.divider_top) {
            self.divider_top
        } else if !splits(self.divider_bottom) {
            self.divider_bottom
        } else {
            self.divider_top + 1
        }
    }

    /// Run the in-place sweep modulo `prime`.
    pub fn run(&self, prime: u64, opts: &SweepOptions) -> Result<CountVector, TmError> {
        if prime % 2 == 0 || prime >= 1 << 62 {
            return Err(TmError::BadModulus(prime));
        }
        let n = self.hash.len();
        let counts: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
        for &s in &self.plan.initial {
            counts[self.hash.slot(s)].store(1 % prime, Ordering::Relaxed);
        }
        let mut dividers = Vec::new();
        let workers = opts.workers.max(1);
        let mut inverse: Option<Vec<u64>> = None;
        for (step, m) in self.plan.moves.iter().enumerate() {
            match *m {
                Move::Cell { low, kind } => {
                    let d = self.divider_for(low);
                    dividers.push(d);
                    let phase = &self.phases[&d];
                    if opts.check_order {
                        self.checked_cell(&counts, phase, low, kind, prime, step)?;
                    } else if workers == 1 {
                        self.cell(&counts, phase, low, kind, prime, 0, 1);
                    } else {
                        std::thread::scope(|scope| {
                            for w in 0..workers {
                                let counts = &counts;
                                scope.spawn(move || self.cell(counts, phase, low, kind, prime, w, workers));
                            }
                        });
                    }
                }
                Move::Require { edge, occupied } => {
                    let inv = inverse.get_or_insert_with(|| inverse_table(&self.hash));
                    for (slot, &bits) in inv.iter().enumerate() {
                        if (code_at(bits, edge) != EMPTY) != occupied {
                            counts[slot].store(0, Ordering::Relaxed);
                        }
                    }
                }
            }
        }
        let data = counts.into_iter().map(AtomicU64::into_inner).collect();
        Ok(CountVector { prime, size: self.size, problem: self.problem, data, dividers })
    }

    /// Residue of the total count over accepting signatures.
    pub fn accepted(&self, counts: &CountVector) -> u64 {
        self.plan
            .accepting
            .iter()
            .fold(0u64, |acc, &s| add_mod(acc, counts.data[self.hash.slot(s)], counts.prime))
    }

    #[allow(clippy::too_many_arguments)]
    fn cell(&self, counts: &[AtomicU64], phase: &PhaseOrder, low: usize, kind: CellKind, p: u64, worker: usize, workers: usize) {
        let d = phase.divider;
        let kink_above = low >= d;
        let width = self.plan.width;
        let hash = &self.hash;
        let load = |s: usize| counts[s].load(Ordering::Relaxed);
        let store = |s: usize, v: u64| counts[s].store(v, Ordering::Relaxed);
        for h in 0..phase.lower.len() {
            let uppers = &phase.upper[h];
            for (li, &lb) in phase.lower[h].iter().enumerate() {
                if kink_above && workers > 1 && owner(phase.lower_occ[h][li], workers) != worker {
                    continue;
                }
                for (ui, &ub) in uppers.iter().enumerate() {
                    if !kink_above && workers > 1 && owner(phase.upper_occ[h][ui], workers) != worker {
                        continue;
                    }
                    let bits = lb | (ub << (2 * d));
                    let a = code_at(bits, low);
                    let b = code_at(bits, low + 1);
                    match (a, b) {
                        (EMPTY, EMPTY) => {
                            let c = load(hash.slot(bits));
                            if c == 0 && kind == CellKind::Hex {
                                continue;
                            }
                            let t = hash.slot(bits | (LOWER << (2 * low)) | (UPPER << (2 * (low + 1))));
                            match kind {
                                CellKind::Hex => store(t, add_mod(load(t), c, p)),
                                CellKind::Square => store(t, c),
                            }
                        }
                        (EMPTY, _) => {}
                        (x, EMPTY) => {
                            let s = hash.slot(bits);
                            let t = hash.slot(with_code(with_code(bits, low, EMPTY), low + 1, x));
                            let (cs, ct) = (load(s), load(t));
                            if cs == 0 && ct == 0 {
                                continue;
                            }
                            let v = add_mod(cs, ct, p);
                            store(s, v);
                            store(t, v);
                        }
                        (LOWER, UPPER) => {}
                        _ => {
                            let s = hash.slot(bits);
                            let c = load(s);
                            if c == 0 {
                                continue;
                            }
                            let t = hash.slot(join(bits, low, a, b, width));
                            store(t, add_mod(load(t), c, p));
                            if kind == CellKind::Square {
                                store(s, 0);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Single-threaded cell move that records reads and writes.
    fn checked_cell(
        &self,
        counts: &[AtomicU64],
        phase: &PhaseOrder,
        low: usize,
        kind: CellKind,
        p: u64,
        step: usize,
    ) -> Result<(), TmError> {
        let d = phase.divider;
        let width = self.plan.width;
        let hash = &self.hash;
        let mut written = vec![false; hash.len()];
        let load = |s: usize| counts[s].load(Ordering::Relaxed);
        let store = |s: usize, v: u64| counts[s].store(v, Ordering::Relaxed);
        let read = |s: usize, bits: u64, written: &Vec<bool>| {
            if written[s] {
                Err(TmError::OrderViolation { step, bits })
            } else {
                Ok(load(s))
            }
        };
        for h in 0..phase.lower.len() {
            for &lb in &phase.lower[h] {
                for &ub in &phase.upper[h] {
                    let bits = lb | (ub << (2 * d));
                    let a = code_at(bits, low);
                    let b = code_at(bits, low + 1);
                    match (a, b) {
                        (EMPTY, EMPTY) => {
                            let c = read(hash.slot(bits), bits, &written)?;
                            let t = hash.slot(bits | (LOWER << (2 * low)) | (UPPER << (2 * (low + 1))));
                            match kind {
                                CellKind::Hex => store(t, add_mod(load(t), c, p)),
                                CellKind::Square => store(t, c),
                            }
                            written[t] = true;
                        }
                        (EMPTY, _) | (LOWER, UPPER) => {}
                        (x, EMPTY) => {
                            let s = hash.slot(bits);
                            let moved = with_code(with_code(bits, low, EMPTY), low + 1, x);
                            let t = hash.slot(moved);
                            let cs = read(s, bits, &written)?;
                            let ct = read(t, moved, &written)?;
                            let v = add_mod(cs, ct, p);
                            store(s, v);
                            store(t, v);
                            written[s] = true;
                            written[t] = true;
                        }
                        _ => {
                            let s = hash.slot(bits);
                            let c = read(s, bits, &written)?;
                            let t = hash.slot(join(bits, low, a, b, width));
                            store(t, add_mod(load(t), c, p));
                            written[t] = true;
                            if kind == CellKind::Square {
                                store(s, 0);
                                written[s] = true;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Double-buffered sweep with any accumulator; no in-place updates.
    pub fn run_reference<A: Accumulator>(&self, acc: &A) -> Result<A::Value, TmError> {
        let inv = inverse_table(&self.hash);
        let n = self.hash.len();
        let mut counts = vec![acc.zero(); n];
        for &s in &self.plan.initial {
            counts[self.hash.slot(s)] = acc.one();
        }
        for m in &self.plan.moves {
            match *m {
                Move::Cell { low, kind } => {
                    let mut next = vec![acc.zero(); n];
                    for (slot, value) in counts.iter().enumerate() {
                        if acc.is_zero(value) {
                            continue;
                        }
                        for (t, _) in targets(inv[slot], self.plan.width, low, kind)? {
                            let ts = self.hash.slot(t);
                            acc.add_into(&mut next[ts], value);
                        }
                    }
                    counts = next;
                }
                Move::Require { edge, occupied } => {
                    for (slot, value) in counts.iter_mut().enumerate() {
                        if (code_at(inv[slot], edge) != EMPTY) != occupied {
                            *value = acc.zero();
                        }
                    }
                }
            }
        }
        let mut total = acc.zero();
        for &s in &self.plan.accepting {
            acc.add_into(&mut total, &counts[self.hash.slot(s)]);
        }
        Ok(total)
    }
}

/// Join the occupied pair `(a, b)` at `(low, low + 1)`.
#[inline(always)]
fn join(bits: u64, low: usize, a: u64, b: u64, width: usize) -> u64 {
    let cleared = bits & !(0b1111 << (2 * low));
    match (a, b) {
        (LOWER, LOWER) => {
            let p = partner_above(bits, low + 1, width).expect("valid signature");
            with_code(cleared, p, LOWER)
        }
        (UPPER, UPPER) => {
            let p = partner_below(bits, low).expect("valid signature");
            with_code(cleared, p, UPPER)
        }
        _ => cleared,
    }
}

fn inverse_table(hash: &HashFunction) -> Vec<u64> {
    let width = hash.width();
    let d = hash.divider();
    let mut inv = vec![0u64; hash.len()];
    let max_h = width - d;
    let lows = halves(d, hash.start_height(), max_h, false);
    let highs = halves(width - d, 0, max_h, true);
    for &(lb, h) in &lows {
        for &(ub, h2) in &highs {
            if h == h2 {
                let bits = lb | (ub << (2 * d));
                inv[hash.slot(bits)] = bits;
            }
        }
    }
    debug_assert!(inv.iter().all(|&b| b & !edge_mask(width) == 0));
    inv
}

#[inline(always)]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

/// Counting domain for the reference sweep.
pub trait Accumulator {
    type Value: Clone;
    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn is_zero(&self, v: &Self::Value) -> bool;
    fn add_into(&self, target: &mut Self::Value, v: &Self::Value);
}

/// Residues modulo a prime.
pub struct Modular(pub u64);

impl Accumulator for Modular {
    type Value = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0
    }
    fn is_zero(&self, v: &u64) -> bool {
        *v == 0
    }
    fn add_into(&self, target: &mut u64, v: &u64) {
        *target = add_mod(*target, *v, self.0);
    }
}

/// Exact big-integer counts.
pub struct Exact;

impl Accumulator for Exact {
    type Value = BigUint;
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::from(1u32)
    }
    fn is_zero(&self, v: &BigUint) -> bool {
        v.is_zero()
    }
    fn add_into(&self, target: &mut BigUint, v: &BigUint) {
        *target += v;
    }
}

/// In-place sweep: the residue of the count modulo `prime`.
pub fn sweep(problem: &ProblemSpec, size: usize, prime: u64, workers: usize) -> Result<u64, TmError> {
    let opts = SweepOptions { workers, ..SweepOptions::default() };
    let sweeper = Sweeper::new(*problem, size, opts.memory_limit)?;
    let counts = sweeper.run(prime, &opts)?;
    Ok(sweeper.accepted(&counts))
}

/// Double-buffered sweep modulo `prime`.
pub fn reference_sweep(problem: &ProblemSpec, size: usize, prime: u64) -> Result<u64, TmError> {
    let sweeper = Sweeper::new(*problem, size, DEFAULT_MEMORY_LIMIT)?;
    if prime % 2 == 0 || prime >= 1 << 62 {
        return Err(TmError::BadModulus(prime));
    }
    sweeper.run_reference(&Modular(prime))
}

/// Double-buffered sweep in exact integers.
pub fn reference_sweep_exact(problem: &ProblemSpec, size: usize) -> Result<BigUint, TmError> {
    let sweeper = Sweeper::new(*problem, size, DEFAULT_MEMORY_LIMIT)?;
    sweeper.run_reference(&Exact)
}
