//! Exact extraction of eventual linear growth from integer-valued or
//! rational sequences.

use crate::error::{Error, Result};
use crate::{fmt_q, Rational};

/// Consecutive equal first differences required to accept a slope.
pub const WINDOW: usize = 3;

/// Default iteration cap.
pub const DEFAULT_CAP: usize = 64;

/// A sequence that became exactly affine: `s_n = value + slope * (n - steps)`
/// for the last [`WINDOW`] steps before `steps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilized {
    pub slope: Rational,
    /// Last computed term.
    pub value: Rational,
    /// Index of the last computed term.
    pub steps: usize,
    pub sequence: Vec<Rational>,
}

/// Evaluates `term(0), term(1), ...` until [`WINDOW`] consecutive first
/// differences agree. Only terms with index `>= transient` take part in the
/// window; `cap` bounds the largest index evaluated.
pub fn eventual_slope<F>(subject: &str, transient: usize, cap: usize, mut term: F) -> Result<Stabilized>
where
    F: FnMut(usize) -> Result<Rational>,
{
    let mut sequence: Vec<Rational> = Vec::new();
    for n in 0..=cap {
        sequence.push(term(n)?);
        if n < transient + WINDOW {
            continue;
        }
        let tail = &sequence[n - WINDOW..=n];
        let first = &tail[1] - &tail[0];
        if tail.windows(2).all(|p| p[1].clone() - &p[0] == first) {
            return Ok(Stabilized {
                slope: first,
                value: sequence[n].clone(),
                steps: n,
                sequence,
            });
        }
    }
    Err(Error::NotStabilized {
        subject: subject.to_string(),
        cap,
        sequence: sequence.iter().map(fmt_q).collect::<Vec<_>>().join(", "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qi;

    #[test]
    fn linear_sequence() {
        let s = eventual_slope("lin", 0, 10, |n| Ok(qi(2 * n as i64 + 1))).unwrap();
        assert_eq!(s.slope, qi(2));
        assert_eq!(s.steps, 3);
    }

    #[test]
    fn transient_is_skipped() {
        // |n - 6|: three equal differences -1 appear early, true slope is 1
        let s = eventual_slope("abs", 7, 30, |n| Ok(qi((n as i64 - 6).abs()))).unwrap();
        assert_eq!(s.slope, qi(1));
        let early = eventual_slope("abs", 0, 30, |n| Ok(qi((n as i64 - 6).abs()))).unwrap();
        assert_eq!(early.slope, qi(-1));
    }

    #[test]
    fn quadratic_never_stabilises() {
        let err = eventual_slope("sq", 0, 12, |n| Ok(qi((n * n) as i64))).unwrap_err();
        assert!(matches!(err, Error::NotStabilized { cap: 12, .. }));
    }
}
