//! Local transfer-matrix moves on the two boundary edges at a kink.
//!
//! Inputs are the edge states at `low` and `low + 1`; outputs replace them.
//! A hexagonal cell adds two vertices joined by a rung, so each input may
//! also pass straight through. A square cell adds one degree-4 vertex, so
//! two occupied inputs must be joined.

use thiserror::Error;

use super::problem::CellKind;
use crate::signature::{code_at, partner_above, partner_below, with_code, Signature, EMPTY, LOWER, UPPER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    /// Target equals the source.
    Keep,
    /// `∘∘ → ()`: a new arc starts at the kink.
    NewArc,
    /// `X∘ ↔ ∘X`: the occupied edge moves to the other output.
    Swap,
    /// `((` joined; the partner of the upper `(` becomes `(`.
    JoinLower,
    /// `))` joined; the partner of the lower `)` becomes `)`.
    JoinUpper,
    /// `)(` joined straight through.
    JoinThrough,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("kink at {low} does not fit width {width}")]
    KinkOutOfRange { low: usize, width: usize },
    #[error("arc end at {0} has no partner")]
    Unmatched(usize),
}

/// Targets of a packed source; `()` at the kink yields only `Keep` for
/// hexagonal cells and nothing for square cells.
#[inline]
pub fn targets(bits: u64, width: usize, low: usize, kind: CellKind) -> Result<Vec<(u64, Transition)>, RuleError> {
    if low + 1 >= width {
        return Err(RuleError::KinkOutOfRange { low, width });
    }
    let hi = low + 1;
    let a = code_at(bits, low);
    let b = code_at(bits, hi);
    let cleared = with_code(with_code(bits, low, EMPTY), hi, EMPTY);
    let mut out = Vec::with_capacity(2);
    match (a, b) {
        (EMPTY, EMPTY) => {
            out.push((bits, Transition::Keep));
            out.push((with_code(with_code(bits, low, LOWER), hi, UPPER), Transition::NewArc));
        }
        (x, EMPTY) | (EMPTY, x) => {
            out.push((bits, Transition::Keep));
            let moved = if a == EMPTY { with_code(cleared, low, x) } else { with_code(cleared, hi, x) };
            out.push((moved, Transition::Swap));
        }
        (LOWER, UPPER) => {
            if kind == CellKind::Hex {
                out.push((bits, Transition::Keep));
            }
        }
        (LOWER, LOWER) => {
            if kind == CellKind::Hex {
                out.push((bits, Transition::Keep));
            }
            let p = partner_above(bits, hi, width).ok_or(RuleError::Unmatched(hi))?;
            out.push((with_code(cleared, p, LOWER), Transition::JoinLower));
        }
        (UPPER, UPPER) => {
            if kind == CellKind::Hex {
                out.push((bits, Transition::Keep));
            }
            let p = partner_below(bits, low).ok_or(RuleError::Unmatched(low))?;
            out.push((with_code(cleared, p, UPPER), Transition::JoinUpper));
        }
        _ => {
            if kind == CellKind::Hex {
                out.push((bits, Transition::Keep));
            }
            out.push((cleared, Transition::JoinThrough));
        }
    }
    Ok(out)
}

/// Apply the move at kink `(low, low + 1)` to a signature.
pub fn apply_update(source: &Signature, low: usize, kind: CellKind) -> Result<Vec<(Signature, Transition)>, RuleError> {
    let list = targets(source.bits(), source.width(), low, kind)?;
    Ok(list
        .into_iter()
        .map(|(bits, t)| {
            let sig = Signature::from_bits(source.width(), bits, source.start_height())
                .expect("moves preserve the Motzkin shape");
            (sig, t)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(s: &str, start: usize, low: usize, kind: CellKind) -> Vec<(String, Transition)> {
        let sig = Signature::parse(s, start).unwrap();
        apply_update(&sig, low, kind).unwrap().into_iter().map(|(t, k)| (t.to_string(), k)).collect()
    }

    #[test]
    fn empty_pair_spawns_arc() {
        assert_eq!(
            run("∘∘", 0, 0, CellKind::Hex),
            vec![("∘∘".into(), Transition::Keep), ("()".into(), Transition::NewArc)]
        );
    }

    #[test]
    fn swap_pairs() {
        assert_eq!(
            run("∘)∘", 1, 0, CellKind::Hex),
            vec![("∘)∘".into(), Transition::Keep), (")∘∘".into(), Transition::Swap)]
        );
        assert_eq!(
            run("(∘)", 0, 0, CellKind::Square),
            vec![("(∘)".into(), Transition::Keep), ("∘()".into(), Transition::Swap)]
        );
    }

    #[test]
    fn non_local_relabelling() {
        // two lower ends joined: the inner partner turns into a lower end
        assert_eq!(run("(∘)(())", 0, 3, CellKind::Hex)[1], ("(∘)∘∘()".into(), Transition::JoinLower));
        assert_eq!(run("(())", 0, 2, CellKind::Square), vec![("()∘∘".into(), Transition::JoinUpper)]);
    }

    #[test]
    fn through_join_and_free_end() {
        assert_eq!(run(")(∘)", 1, 0, CellKind::Hex)[1], ("∘∘∘)".into(), Transition::JoinThrough));
        // an arc's upper end meets the free end: the arc's lower end becomes free
        assert_eq!(run("∘())", 1, 2, CellKind::Hex)[1], ("∘)∘∘".into(), Transition::JoinUpper));
    }

    #[test]
    fn closing_an_arc_is_forbidden() {
        assert_eq!(run("()", 0, 0, CellKind::Hex), vec![("()".into(), Transition::Keep)]);
        assert!(run("()", 0, 0, CellKind::Square).is_empty());
    }
}
