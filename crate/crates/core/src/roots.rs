//! Bracketing and bisection for monotone scalar equations.

use crate::error::{Error, Result};

/// Stopping rule for [`bisect_increasing`].
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub max_iter: usize,
    /// Stop once `hi - lo ≤ rel_width · hi`.
    pub rel_width: f64,
}

impl Default for Bisection {
    fn default() -> Self {
        Self {
            max_iter: 200,
            rel_width: 1e-13,
        }
    }
}

/// Doubles `start > 0` until `f(t) ≥ 0`, returning `(t/2, t)`, or `(start,
/// start)` if `f(start) ≥ 0` already. `f` must be increasing.
pub fn bracket_upward<F>(f: &F, start: f64, max_doublings: u32) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut hi = start;
    for _ in 0..=max_doublings {
        if !hi.is_finite() {
            break;
        }
        if f(hi) >= 0.0 {
            return Ok(if hi == start {
                (start, start)
            } else {
                (hi / 2.0, hi)
            });
        }
        hi *= 2.0;
    }
    Err(Error::NumericalRange(format!(
        "no sign change found within {max_doublings} doublings of {start}"
    )))
}

/// Halves `start > 0` until `f(t) < 0`, returning `(t, 2t)`.
pub fn bracket_downward<F>(f: &F, start: f64, max_halvings: u32) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut lo = start;
    for _ in 0..=max_halvings {
        if lo == 0.0 {
            break;
        }
        if f(lo) < 0.0 {
            return Ok((lo, if lo == start { start } else { 2.0 * lo }));
        }
        lo /= 2.0;
    }
    Err(Error::NumericalRange(format!(
        "no sign change found within {max_halvings} halvings of {start}"
    )))
}

/// Brackets the root of an increasing `f` starting from `start > 0`,
/// searching upward or downward as the sign of `f(start)` dictates.
pub fn bracket<F>(f: &F, start: f64, max_steps: u32) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if f(start) < 0.0 {
        bracket_upward(f, start, max_steps)
    } else {
        bracket_downward(f, start, max_steps)
    }
}

/// Root of an increasing `f` on `[lo, hi]` with `f(lo) < 0 ≤ f(hi)`.
pub fn bisect_increasing<F>(f: &F, mut lo: f64, mut hi: f64, rule: Bisection) -> f64
where
    F: Fn(f64) -> f64,
{
    for _ in 0..rule.max_iter {
        if hi - lo <= rule.rel_width * hi {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let f = |t: f64| t * t - 2.0;
        let (lo, hi) = bracket_upward(&f, 0.1, 64).unwrap();
        let r = bisect_increasing(&f, lo, hi, Bisection::default());
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bracket_failures() {
        let never = |_: f64| -1.0;
        assert!(matches!(
            bracket_upward(&never, 1.0, 10),
            Err(Error::NumericalRange(_))
        ));
        let always = |_: f64| 1.0;
        assert!(bracket_downward(&always, 1.0, 10).is_err());
    }

    #[test]
    fn downward_bracket() {
        let f = |t: f64| t.ln() + 20.0;
        let (lo, hi) = bracket_downward(&f, 1.0, 100).unwrap();
        assert!(f(lo) < 0.0 && f(hi) >= 0.0);
    }
}
