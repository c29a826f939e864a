//! Small integer helpers shared by the structural modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// `ord_ell(n)`: the exponent of `ell` in `n`. Zero maps to `u32::MAX`.
pub fn valuation(n: &BigInt, ell: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let ell = BigInt::from(ell);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&ell);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

pub fn ell_power(ell: u64, k: u32) -> BigInt {
    Pow::pow(BigInt::from(ell), k)
}

/// The `ell`-primary part of a nonzero integer, as a positive number.
pub fn ell_primary(n: &BigInt, ell: u64) -> BigInt {
    ell_power(ell, valuation(n, ell))
}

pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn require_prime(ell: u64) -> Result<()> {
    if is_prime(ell) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{ell} is not prime")))
    }
}

/// Inverse of `a` modulo `m` (`m > 0`, `gcd(a, m) = 1`).
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}
