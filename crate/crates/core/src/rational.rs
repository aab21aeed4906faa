//! Exact rationals and the small combinatorial helpers used throughout.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary precision rational, always stored in lowest terms.
pub type ExactRational = BigRational;

pub fn int(n: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> ExactRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> ExactRational {
    ExactRational::zero()
}

pub fn one() -> ExactRational {
    ExactRational::one()
}

pub fn factorial(n: u64) -> ExactRational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    BigRational::from_integer(acc)
}

/// `(2n-1)!!`, with `(-1)!! = 1`.
pub fn odd_double_factorial(n: u64) -> ExactRational {
    let mut acc = BigInt::one();
    let mut j = 1u64;
    while j < 2 * n {
        acc *= j;
        j += 2;
    }
    BigRational::from_integer(acc)
}

/// Binomial coefficient; zero when `k < 0` or `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> ExactRational {
    if n < 0 || k < 0 || k > n {
        return zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    BigRational::from_integer(acc)
}

/// Machine sized binomial for multiset weights.
pub fn binomial_u64(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k as u64 {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc
}

/// Multinomial `n! / prod(k_i!)`; zero if any part is negative or the parts
/// do not sum to `n`.
pub fn multinomial(n: i64, parts: &[i64]) -> ExactRational {
    if parts.iter().any(|&p| p < 0) || parts.iter().sum::<i64>() != n || n < 0 {
        return zero();
    }
    let mut acc = factorial(n as u64);
    for &p in parts {
        acc /= factorial(p as u64);
    }
    acc
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(text: &str) -> Option<ExactRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}
