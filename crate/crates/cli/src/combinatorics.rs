//! Exact state-space counting for ordered versus unordered object slots.
//!
//! A fixed-arity observation distinguishes the m! orderings of the same m
//! objects; a set representation does not. These counts quantify the gap:
//! `ordered` is the number of injective slot assignments n!/(n−m)!,
//! `unordered` the number of m-subsets, and their quotient is exactly 1/m!.
//! Everything runs in arbitrary-precision integers, so no n is too large.

use num_bigint::BigUint;
use num_integer::Integer;

use crate::error::{HarnessError, Result};

/// An exact non-negative rational in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRatio {
    pub numerator: BigUint,
    pub denominator: BigUint,
}

impl ExactRatio {
    fn reduced(numerator: BigUint, denominator: BigUint) -> Self {
        let g = numerator.gcd(&denominator);
        Self { numerator: numerator / &g, denominator: denominator / &g }
    }
}

impl std::fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Counts for choosing m of n distinct values with and without slot order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSizes {
    /// n!/(n−m)!: ordered, injective slot assignments.
    pub ordered: BigUint,
    /// Binomial n-choose-m: unordered subsets.
    pub unordered: BigUint,
    /// unordered/ordered, reduced; always equals 1/m!.
    pub ratio: ExactRatio,
}

fn falling_factorial(n: u64, m: u64) -> BigUint {
    let mut acc = BigUint::from(1u8);
    for k in 0..m {
        acc *= BigUint::from(n - k);
    }
    acc
}

pub fn factorial(m: u64) -> BigUint {
    falling_factorial(m, m)
}

/// Ordered and unordered counts plus their exact quotient.
pub fn state_space_sizes(n: u64, m: u64) -> Result<SpaceSizes> {
    if m == 0 || m > n {
        return Err(HarnessError::InvalidArgument(format!(
            "need 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    let ordered = falling_factorial(n, m);
    let unordered = &ordered / factorial(m);
    let ratio = ExactRatio::reduced(unordered.clone(), ordered.clone());
    Ok(SpaceSizes { ordered, unordered, ratio })
}
