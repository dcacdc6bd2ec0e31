//! Bisection on a monotone predicate `η ↦ holds(η)` (true on `[0, λ)`).

use num_traits::{One, Zero};

use crate::error::Result;
use crate::rational::{ratio, Rat};

/// Largest cap tried before the supremum is declared infinite.
pub const CAP_EXPONENT: u32 = 20;

/// Default bracket width, `1e-6`.
pub fn default_tol() -> Rat {
    ratio(1, 1_000_000)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BisectOutcome {
    /// Largest value at which the predicate was verified.
    pub lo: Rat,
    /// Smallest value at which it failed; `None` when it held up to the cap.
    pub hi: Option<Rat>,
    pub evaluations: usize,
}

impl BisectOutcome {
    pub fn is_infinite(&self) -> bool {
        self.hi.is_none()
    }
}

/// Doubles a cap from 1 up to `2^20` while the predicate holds, then halves
/// the bracket until it is narrower than `tol`. The predicate is assumed to
/// hold at 0.
pub fn bisect(tol: &Rat, mut holds: impl FnMut(&Rat) -> Result<bool>) -> Result<BisectOutcome> {
    let two = Rat::from_integer(2.into());
    let mut evaluations = 0;
    let mut cap = Rat::one();
    let mut lo = Rat::zero();
    let mut exponent = 0;
    loop {
        evaluations += 1;
        if !holds(&cap)? {
            break;
        }
        lo = cap.clone();
        if exponent == CAP_EXPONENT {
            return Ok(BisectOutcome {
                lo,
                hi: None,
                evaluations,
            });
        }
        cap = &cap * &two;
        exponent += 1;
    }
    let mut hi = cap;
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        evaluations += 1;
        if holds(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BisectOutcome {
        lo,
        hi: Some(hi),
        evaluations,
    })
}
