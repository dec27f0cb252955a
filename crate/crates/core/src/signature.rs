//! Boundary signatures packed two bits per edge.
//!
//! Edge 0 is the bottom of the boundary and sits in the least significant
//! bits. Codes: empty `00`, lower arc end `10`, upper arc end `01`. A walk's
//! free end is stored as an unmatched upper arc end, so a walk signature
//! read bottom to top is a Motzkin path from height 1 to height 0.

use std::fmt;

use thiserror::Error;

use crate::motzkin::Step;

/// Widest boundary that fits in one `u64`.
pub const MAX_WIDTH: usize = 31;

pub const EMPTY: u64 = 0b00;
pub const LOWER: u64 = 0b10;
pub const UPPER: u64 = 0b01;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("width {0} exceeds {MAX_WIDTH}")]
    TooWide(usize),
    #[error("height drops below zero at edge {0}")]
    NegativeHeight(usize),
    #[error("final height {0} is not zero")]
    Unbalanced(usize),
    #[error("edge {0} is empty")]
    EmptyEdge(usize),
    #[error("edge {0} has no partner")]
    Unmatched(usize),
    #[error("polygon signatures have no free end")]
    NoFreeEnd,
    #[error("invalid bit pattern 11 at edge {0}")]
    BadCode(usize),
    #[error("unknown glyph {0:?}")]
    BadGlyph(char),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeState {
    Empty,
    LowerArcEnd,
    UpperArcEnd,
}

impl EdgeState {
    pub fn code(self) -> u64 {
        match self {
            EdgeState::Empty => EMPTY,
            EdgeState::LowerArcEnd => LOWER,
            EdgeState::UpperArcEnd => UPPER,
        }
    }

    pub fn from_code(code: u64) -> Option<Self> {
        match code {
            EMPTY => Some(EdgeState::Empty),
            LOWER => Some(EdgeState::LowerArcEnd),
            UPPER => Some(EdgeState::UpperArcEnd),
            _ => None,
        }
    }

    pub fn glyph(self) -> char {
        match self {
            EdgeState::Empty => '∘',
            EdgeState::LowerArcEnd => '(',
            EdgeState::UpperArcEnd => ')',
        }
    }

    pub fn from_glyph(c: char) -> Result<Self, SignatureError> {
        match c {
            '∘' | 'o' | '.' => Ok(EdgeState::Empty),
            '(' => Ok(EdgeState::LowerArcEnd),
            ')' => Ok(EdgeState::UpperArcEnd),
            other => Err(SignatureError::BadGlyph(other)),
        }
    }

    /// Step of the bottom-to-top Motzkin path.
    pub fn step(self) -> Step {
        match self {
            EdgeState::Empty => Step::Flat,
            EdgeState::LowerArcEnd => Step::Up,
            EdgeState::UpperArcEnd => Step::Down,
        }
    }
}

/// Two-bit code at edge `pos`.
#[inline(always)]
pub fn code_at(bits: u64, pos: usize) -> u64 {
    (bits >> (2 * pos)) & 0b11
}

/// Replace the code at edge `pos`.
#[inline(always)]
pub fn with_code(bits: u64, pos: usize, code: u64) -> u64 {
    (bits & !(0b11 << (2 * pos))) | (code << (2 * pos))
}

/// Partner of the lower arc end at `pos`, scanning upwards.
#[inline]
pub fn partner_above(bits: u64, pos: usize, width: usize) -> Option<usize> {
    let mut depth = 1i32;
    for p in pos + 1..width {
        match code_at(bits, p) {
            LOWER => depth += 1,
            UPPER => {
                depth -= 1;
                if depth == 0 {
                    return Some(p);
                }
            }
            _ => {}
        }
    }
    None
}

/// Partner of the upper arc end at `pos`, scanning downwards.
#[inline]
pub fn partner_below(bits: u64, pos: usize) -> Option<usize> {
    let mut depth = 1i32;
    for p in (0..pos).rev() {
        match code_at(bits, p) {
            UPPER => depth += 1,
            LOWER => {
                depth -= 1;
                if depth == 0 {
                    return Some(p);
                }
            }
            _ => {}
        }
    }
    None
}

/// Mask covering the low `edges` edges.
#[inline(always)]
pub fn edge_mask(edges: usize) -> u64 {
    if edges >= 32 {
        u64::MAX
    } else {
        (1u64 << (2 * edges)) - 1
    }
}

/// Bitmask of occupied edges, one bit per edge.
#[inline]
pub fn occupation(bits: u64, edges: usize) -> u64 {
    let mut out = 0;
    for p in 0..edges {
        if code_at(bits, p) != EMPTY {
            out |= 1 << p;
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    width: usize,
    bits: u64,
    start_height: usize,
}

/// Result of cutting a signature at a divider.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub height: usize,
    /// Edges below the divider, packed from bit 0.
    pub left: u64,
    /// Edges at and above the divider, packed from bit 0.
    pub right: u64,
}

impl Signature {
    pub fn pack(states: &[EdgeState], start_height: usize) -> Result<Self, SignatureError> {
        if states.len() > MAX_WIDTH {
            return Err(SignatureError::TooWide(states.len()));
        }
        let bits = states
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, s)| acc | (s.code() << (2 * i)));
        Self::from_bits(states.len(), bits, start_height)
    }

    pub fn from_bits(width: usize, bits: u64, start_height: usize) -> Result<Self, SignatureError> {
        if width > MAX_WIDTH {
            return Err(SignatureError::TooWide(width));
        }
        if bits & !edge_mask(width) != 0 {
            return Err(SignatureError::BadCode(width));
        }
        let mut h = start_height;
        for p in 0..width {
            match code_at(bits, p) {
                EMPTY => {}
                LOWER => h += 1,
                UPPER => h = h.checked_sub(1).ok_or(SignatureError::NegativeHeight(p))?,
                _ => return Err(SignatureError::BadCode(p)),
            }
        }
        if h != 0 {
            return Err(SignatureError::Unbalanced(h));
        }
        Ok(Signature { width, bits, start_height })
    }

    pub fn parse(glyphs: &str, start_height: usize) -> Result<Self, SignatureError> {
        let states = glyphs
            .chars()
            .filter(|c| *c != '|')
            .map(EdgeState::from_glyph)
            .collect::<Result<Vec<_>, _>>()?;
        Self::pack(&states, start_height)
    }

    pub fn unpack(&self) -> Vec<EdgeState> {
        (0..self.width).map(|p| self.state(p)).collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn start_height(&self) -> usize {
        self.start_height
    }

    pub fn state(&self, pos: usize) -> EdgeState {
        EdgeState::from_code(code_at(self.bits, pos)).expect("validated on construction")
    }

    pub fn steps(&self) -> Vec<Step> {
        self.unpack().into_iter().map(EdgeState::step).collect()
    }

    /// Partner of the arc end at `pos`.
    pub fn matching_arc(&self, pos: usize) -> Result<usize, SignatureError> {
        let found = match self.state(pos) {
            EdgeState::Empty => return Err(SignatureError::EmptyEdge(pos)),
            EdgeState::LowerArcEnd => partner_above(self.bits, pos, self.width),
            EdgeState::UpperArcEnd => partner_below(self.bits, pos),
        };
        found.ok_or(SignatureError::Unmatched(pos))
    }

    /// Position of the free end: the first return of the path to height zero.
    pub fn free_end_position(&self) -> Result<usize, SignatureError> {
        if self.start_height != 1 {
            return Err(SignatureError::NoFreeEnd);
        }
        let mut h = 1usize;
        for p in 0..self.width {
            match code_at(self.bits, p) {
                LOWER => h += 1,
                UPPER => {
                    h -= 1;
                    if h == 0 {
                        return Ok(p);
                    }
                }
                _ => {}
            }
        }
        unreachable!("validated signatures end at height zero")
    }

    /// Cut below edge `divider`.
    pub fn split_height(&self, divider: usize) -> Split {
        let divider = divider.min(self.width);
        let mut h = self.start_height;
        for p in 0..divider {
            match code_at(self.bits, p) {
                LOWER => h += 1,
                UPPER => h -= 1,
                _ => {}
            }
        }
        let left = self.bits & edge_mask(divider);
        let right = if divider >= 32 { 0 } else { self.bits >> (2 * divider) };
        Split { height: h, left, right }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.unpack() {
            write!(f, "{}", s.glyph())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({self}, start {})", self.start_height)
    }
}

/// Every valid signature of the given width, in increasing bit order.
pub fn all_signatures(width: usize, start_height: usize) -> Vec<Signature> {
    fn rec(pos: usize, width: usize, h: usize, bits: u64, start: usize, out: &mut Vec<Signature>) {
        if h > width - pos {
            return;
        }
        if pos == width {
            if h == 0 {
                out.push(Signature { width, bits, start_height: start });
            }
            return;
        }
        rec(pos + 1, width, h, bits, start, out);
        rec(pos + 1, width, h + 1, bits | (LOWER << (2 * pos)), start, out);
        if h > 0 {
            rec(pos + 1, width, h - 1, bits | (UPPER << (2 * pos)), start, out);
        }
    }
    let mut out = Vec::new();
    rec(0, width, start_height, 0, start_height, &mut out);
    out.sort_by_key(|s| s.bits);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for s in [EdgeState::Empty, EdgeState::LowerArcEnd, EdgeState::UpperArcEnd] {
            assert_eq!(EdgeState::from_code(s.code()), Some(s));
        }
        assert_eq!(EdgeState::from_code(0b11), None);
    }

    #[test]
    fn initial_walk_state_round_trips() {
        let s = Signature::parse("∘∘∘∘)", 1).unwrap();
        assert_eq!(Signature::from_bits(5, s.bits(), 1).unwrap(), s);
        assert_eq!(s.to_string(), "∘∘∘∘)");
        assert_eq!(s.free_end_position().unwrap(), 4);
    }

    #[test]
    fn empty_word() {
        let s = Signature::pack(&[], 0).unwrap();
        assert_eq!(s.bits(), 0);
    }

    #[test]
    fn matching_examples() {
        assert_eq!(Signature::parse("()", 0).unwrap().matching_arc(0), Ok(1));
        assert_eq!(Signature::parse("(())", 0).unwrap().matching_arc(0), Ok(3));
        let s = Signature::parse("(()())", 0).unwrap();
        assert_eq!(s.matching_arc(1), Ok(2));
        assert_eq!(s.matching_arc(3), Ok(4));
        assert_eq!(s.matching_arc(0), Ok(5));
        assert_eq!(
            Signature::parse("∘()", 0).unwrap().matching_arc(0),
            Err(SignatureError::EmptyEdge(0))
        );
    }

    #[test]
    fn free_end_examples() {
        assert_eq!(Signature::parse(")∘∘", 1).unwrap().free_end_position(), Ok(0));
        assert_eq!(Signature::parse("())", 1).unwrap().free_end_position(), Ok(2));
        // walk seen as "(∘)|()∘" with its free end inserted at the bar
        let s = Signature::parse("(∘))()∘", 1).unwrap();
        assert_eq!(s.free_end_position(), Ok(3));
        assert_eq!(
            Signature::parse("()", 0).unwrap().free_end_position(),
            Err(SignatureError::NoFreeEnd)
        );
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(Signature::parse(")", 0), Err(SignatureError::NegativeHeight(0)));
        assert_eq!(Signature::parse("(", 0), Err(SignatureError::Unbalanced(1)));
        assert_eq!(Signature::from_bits(1, 0b11, 0), Err(SignatureError::BadCode(0)));
    }

    #[test]
    fn split_extremes_and_figure_instance() {
        let s = Signature::parse("(∘)∘", 0).unwrap();
        let at0 = s.split_height(0);
        assert_eq!((at0.height, at0.left), (0, 0));
        let end = s.split_height(4);
        assert_eq!((end.height, end.right), (0, 0));
        // 23 edges, height 3 after the first 11
        let fig = Signature::parse("((∘(∘)∘∘∘∘(|∘)∘∘)∘∘)∘∘∘∘", 0).unwrap();
        assert_eq!(fig.width(), 23);
        assert_eq!(fig.split_height(11).height, 3);
    }

    #[test]
    fn enumeration_counts_match_motzkin() {
        let m = crate::motzkin::motzkin_numbers(12).unwrap();
        for w in 0..=10 {
            assert_eq!(all_signatures(w, 0).len() as u64, m[w]);
            assert_eq!(all_signatures(w + 1, 1).len() as u64, m[w + 2] - m[w + 1]);
        }
    }
}
