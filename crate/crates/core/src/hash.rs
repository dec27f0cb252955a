//! Minimal perfect hash from signatures onto dense array positions.
//!
//! A signature is cut at the hash divider `l_h`. The lower half is a path
//! from the start height to some `h`; the upper half read from the top edge
//! downwards is a path from 0 to the same `h`. Signatures are grouped into
//! sections by `h`, and inside a section by the rank of the lower half and
//! then the rank of the reversed upper half.

use thiserror::Error;

use crate::motzkin::{MotzkinError, MotzkinTables};
use crate::signature::{code_at, edge_mask, Signature, LOWER, MAX_WIDTH, UPPER};

const NONE: u64 = u64::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HashError {
    #[error("width {0} exceeds {MAX_WIDTH}")]
    TooWide(usize),
    #[error("divider {divider} outside 0..={width}")]
    BadDivider { divider: usize, width: usize },
    #[error("start height must be 0 or 1, got {0}")]
    BadStartHeight(usize),
    #[error("signature does not belong to this table")]
    Foreign,
    #[error(transparent)]
    Motzkin(#[from] MotzkinError),
}

#[derive(Debug, Clone)]
pub struct HashFunction {
    width: usize,
    divider: usize,
    start_height: usize,
    /// Section offsets `b_0..=b_{max}`; the last entry is the total.
    offsets: Vec<u64>,
    left: Vec<u64>,
    right: Vec<u64>,
}

/// Hash for domain size `l` (boundary width `l + 1`).
pub fn build_hash(l: usize, divider: usize, start_height: usize) -> Result<HashFunction, HashError> {
    HashFunction::new(l + 1, divider, start_height)
}

impl HashFunction {
    /// The halfway split used by default: `⌊width / 2⌋`.
    pub fn default_divider(width: usize) -> usize {
        width / 2
    }

    pub fn new(width: usize, divider: usize, start_height: usize) -> Result<Self, HashError> {
        if width > MAX_WIDTH {
            return Err(HashError::TooWide(width));
        }
        if divider > width {
            return Err(HashError::BadDivider { divider, width });
        }
        if start_height > 1 {
            return Err(HashError::BadStartHeight(start_height));
        }
        let upper = width - divider;
        let tables = MotzkinTables::new(width.max(1))?;
        let max_h = upper;
        let mut offsets = vec![0u64; max_h + 2];
        for h in 0..=max_h {
            let section = tables
                .class_size(start_height, divider, h)
                .checked_mul(tables.class_size(0, upper, h))
                .ok_or(MotzkinError::Overflow("section size"))?;
            offsets[h + 1] = offsets[h] + section;
        }

        let mut left = vec![NONE; 1usize << (2 * divider)];
        let mut next_rank = vec![0u64; max_h + 1];
        enumerate_halves(divider, start_height, max_h, false, &mut |bits, h| {
            let rank = next_rank[h];
            next_rank[h] += 1;
            left[bits as usize] = offsets[h] + rank * tables.class_size(0, upper, h);
        });

        let mut right = vec![NONE; 1usize << (2 * upper)];
        let mut next_rank = vec![0u64; max_h + 1];
        enumerate_halves(upper, 0, max_h, true, &mut |bits, h| {
            right[bits as usize] = next_rank[h];
            next_rank[h] += 1;
        });

        Ok(HashFunction { width, divider, start_height, offsets, left, right })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn divider(&self) -> usize {
        self.divider
    }

    pub fn start_height(&self) -> usize {
        self.start_height
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    /// Number of signatures covered.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Size in entries of the two lookup tables.
    pub fn table_entries(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// Zero-based position of a packed signature assumed valid.
    #[inline(always)]
    pub fn slot(&self, bits: u64) -> usize {
        let lo = self.left[(bits & edge_mask(self.divider)) as usize];
        let hi = self.right[(bits >> (2 * self.divider)) as usize];
        (lo + hi) as usize
    }

    /// Checked zero-based position; `None` for patterns outside the table.
    pub fn try_slot(&self, bits: u64) -> Option<usize> {
        if bits & !edge_mask(self.width) != 0 {
            return None;
        }
        let lo = *self.left.get((bits & edge_mask(self.divider)) as usize)?;
        let hi = *self.right.get((bits >> (2 * self.divider)) as usize)?;
        if lo == NONE || hi == NONE {
            return None;
        }
        Signature::from_bits(self.width, bits, self.start_height).ok()?;
        Some((lo + hi) as usize)
    }

    /// One-based hash value Φ.
    pub fn index_of(&self, sig: &Signature) -> Result<u64, HashError> {
        if sig.width() != self.width || sig.start_height() != self.start_height {
            return Err(HashError::Foreign);
        }
        self.try_slot(sig.bits()).map(|s| s as u64 + 1).ok_or(HashError::Foreign)
    }

    /// Section `h` of a signature: `offsets[h] < Φ <= offsets[h + 1]`.
    pub fn section_of(&self, sig: &Signature) -> usize {
        sig.split_height(self.divider).height
    }
}

/// Visit every half of `len` edges from `start` with end height `<= max_h`,
/// in lexicographic step order. `reversed` reads the half from its top edge
/// down, where an upper arc end is an up step.
fn enumerate_halves(len: usize, start: usize, max_h: usize, reversed: bool, visit: &mut impl FnMut(u64, usize)) {
    let (up, down) = if reversed { (UPPER, LOWER) } else { (LOWER, UPPER) };
    fn rec(
        i: usize,
        len: usize,
        h: usize,
        bits: u64,
        up: u64,
        down: u64,
        max_h: usize,
        reversed: bool,
        visit: &mut impl FnMut(u64, usize),
    ) {
        if i == len {
            if h <= max_h {
                visit(bits, h);
            }
            return;
        }
        let pos = if reversed { len - 1 - i } else { i };
        rec(i + 1, len, h, bits, up, down, max_h, reversed, visit);
        rec(i + 1, len, h + 1, bits | (up << (2 * pos)), up, down, max_h, reversed, visit);
        if h > 0 {
            rec(i + 1, len, h - 1, bits | (down << (2 * pos)), up, down, max_h, reversed, visit);
        }
    }
    rec(0, len, start, 0, up, down, max_h, reversed, visit);
}

/// All halves of `len` edges as `(bits, h)`; see [`enumerate_halves`].
pub(crate) fn halves(len: usize, start: usize, max_h: usize, reversed: bool) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    enumerate_halves(len, start, max_h, reversed, &mut |bits, h| out.push((bits, h)));
    out
}

/// Height after reading the lower `edges` edges from `start`.
#[inline]
pub fn height_after(bits: u64, edges: usize, start: usize) -> usize {
    let mut h = start as isize;
    for p in 0..edges {
        match code_at(bits, p) {
            LOWER => h += 1,
            UPPER => h -= 1,
            _ => {}
        }
    }
    h as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motzkin::Step;
    use crate::signature::all_signatures;

    #[test]
    fn tiny_tables() {
        let h = build_hash(2, 1, 1).unwrap();
        assert_eq!(h.len(), 5);
        let h = build_hash(0, 0, 1).unwrap();
        assert_eq!(h.len(), 1);
        let only = Signature::parse(")", 1).unwrap();
        assert_eq!(h.index_of(&only), Ok(1));
        let h = build_hash(3, 2, 0).unwrap();
        assert_eq!(h.len(), 9);
    }

    #[test]
    fn ranks_agree_with_motzkin_ranking() {
        let width = 9;
        let divider = 4;
        let hf = HashFunction::new(width, divider, 1).unwrap();
        let t = MotzkinTables::new(width).unwrap();
        for sig in all_signatures(width, 1) {
            let split = sig.split_height(divider);
            let h = split.height;
            let lower: Vec<Step> = sig.steps()[..divider].to_vec();
            let upper: Vec<Step> = sig.unpack()[divider..]
                .iter()
                .rev()
                .map(|s| match s.step() {
                    Step::Up => Step::Down,
                    Step::Down => Step::Up,
                    Step::Flat => Step::Flat,
                })
                .collect();
            let il = t.rank(&lower, 1).unwrap();
            let ir = t.rank(&upper, 0).unwrap();
            let expect = hf.offsets()[h] + (il - 1) * t.class_size(0, width - divider, h) + ir;
            assert_eq!(hf.index_of(&sig).unwrap(), expect);
        }
    }

    #[test]
    fn smallest_signature_maps_to_one() {
        let hf = build_hash(4, 2, 1).unwrap();
        let sig = Signature::parse("∘)∘∘∘", 1).unwrap();
        assert_eq!(hf.section_of(&sig), 0);
        assert_eq!(hf.index_of(&sig), Ok(1));
    }

    #[test]
    fn figure_signature_lands_in_section_three() {
        let sig = Signature::parse("((∘(∘)∘∘∘∘(∘)∘∘)∘∘)∘∘∘∘", 0).unwrap();
        let hf = HashFunction::new(23, 11, 0).unwrap();
        let phi = hf.index_of(&sig).unwrap();
        let b = hf.offsets();
        assert!(b[3] < phi && phi <= b[4]);
    }

    #[test]
    fn rejects_foreign_signatures() {
        let hf = build_hash(3, 2, 1).unwrap();
        let poly = Signature::parse("()∘∘", 0).unwrap();
        assert_eq!(hf.index_of(&poly), Err(HashError::Foreign));
        assert!(matches!(build_hash(40, 20, 1), Err(HashError::TooWide(41))));
    }
}
