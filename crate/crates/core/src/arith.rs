//! Exact integer kernels: square and fourth roots, square and power-of-4
//! recognition, 2-adic valuation.
//!
//! Every routine is exact. Magnitudes derived from `n` (such as `10n - m^4`)
//! are carried in 128-bit intermediates so that all `n <= MAX_N` are safe.

use crate::error::{Error, Result};

/// Largest supported `n` (2^60). `10 * MAX_N` still fits in a `u64`.
pub const MAX_N: u64 = 1 << 60;

/// Rejects zero and values above [`MAX_N`].
pub fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if n > MAX_N {
        return Err(Error::OutOfRange {
            value: n as u128,
            max: MAX_N as u128,
        });
    }
    Ok(())
}

/// `floor(sqrt(n))`.
#[inline]
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

/// `floor(sqrt(n))` for 128-bit inputs.
#[inline]
pub fn isqrt_u128(n: u128) -> u128 {
    n.isqrt()
}

/// Largest `r` with `r^4 <= n`.
pub fn ifourth_root_floor(n: u64) -> u64 {
    isqrt(isqrt(n))
}

/// Smallest `r` with `r^4 >= n`.
pub fn ifourth_root_ceil(n: u64) -> u64 {
    let r = ifourth_root_floor(n);
    if pow4(r) == n as u128 {
        r
    } else {
        r + 1
    }
}

/// `r^4` without overflow for any `u64` root that can arise here.
#[inline]
pub fn pow4(r: u64) -> u128 {
    let sq = (r as u128) * (r as u128);
    sq * sq
}

// Bit i set iff i is a square mod 64.
const SQUARES_MOD_64: u64 = {
    let mut mask = 0u64;
    let mut i = 0u64;
    while i < 64 {
        mask |= 1 << ((i * i) % 64);
        i += 1;
    }
    mask
};

/// Square root of `n` if `n` is a perfect square.
#[inline]
pub fn exact_sqrt(n: u64) -> Option<u64> {
    if SQUARES_MOD_64 >> (n & 63) & 1 == 0 {
        return None;
    }
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

/// Square root of `n` if `n` is a perfect square; negative input is never
/// a square.
pub fn is_square(n: i128) -> Option<u64> {
    if n < 0 {
        return None;
    }
    let n = n as u128;
    if SQUARES_MOD_64 >> (n & 63) & 1 == 0 {
        return None;
    }
    let r = isqrt_u128(n);
    (r * r == n).then_some(r as u64)
}

/// Exponent `k` if `n = 4^k` with `k >= 0`.
pub fn is_power_of_4(n: i128) -> Option<u32> {
    if n <= 0 || n & (n - 1) != 0 {
        return None;
    }
    let tz = n.trailing_zeros();
    (tz % 2 == 0).then_some(tz / 2)
}

/// `4^k` as a 128-bit value.
#[inline]
pub fn power_of_4(k: u32) -> u128 {
    1u128 << (2 * k)
}

/// Largest `e` with `2^e | n`.
pub fn ord2(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::Precondition("2-adic order of 0 is undefined".into()));
    }
    Ok(n.trailing_zeros())
}

/// Removes every factor of 4 from `n > 0`.
pub fn strip_fours(mut n: u64) -> u64 {
    debug_assert!(n > 0);
    while n % 4 == 0 {
        n /= 4;
    }
    n
}

/// Floor division for signed 128-bit integers.
#[inline]
pub(crate) fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// Ceiling division for signed 128-bit integers.
#[inline]
pub(crate) fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(99), 9);
        assert_eq!(isqrt(1_000_000_000_000_000_000), 1_000_000_000);
        assert_eq!(isqrt(u64::MAX), u32::MAX as u64);
    }

    #[test]
    fn isqrt_exhaustive_to_a_million() {
        for n in 0..=1_000_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n = {n}");
        }
    }

    #[test]
    fn fourth_roots() {
        assert_eq!(ifourth_root_floor(16), 2);
        assert_eq!(ifourth_root_ceil(17), 3);
        assert_eq!(ifourth_root_ceil(16), 2);
        assert_eq!(ifourth_root_floor(0), 0);
        assert_eq!(ifourth_root_ceil(0), 0);
        for n in 0..=1_000_000u64 {
            let f = ifourth_root_floor(n);
            assert!(pow4(f) <= n as u128 && pow4(f + 1) > n as u128);
            let c = ifourth_root_ceil(n);
            assert!(pow4(c) >= n as u128 && (c == 0 || pow4(c - 1) < n as u128));
        }
    }

    #[test]
    fn squares() {
        assert_eq!(is_square(2401), Some(49));
        assert_eq!(is_square(7), None);
        assert_eq!(is_square(0), Some(0));
        assert_eq!(is_square(-4), None);
        for n in 0..=200_000u64 {
            let r = isqrt(n);
            assert_eq!(is_square(n as i128).is_some(), r * r == n);
            assert_eq!(exact_sqrt(n).is_some(), r * r == n);
        }
        let big = (3_000_000_019u128).pow(2);
        assert_eq!(is_square(big as i128), Some(3_000_000_019));
        assert_eq!(is_square(big as i128 + 1), None);
    }

    #[test]
    fn powers_of_four() {
        assert_eq!(is_power_of_4(1), Some(0));
        assert_eq!(is_power_of_4(64), Some(3));
        assert_eq!(is_power_of_4(8), None);
        assert_eq!(is_power_of_4(0), None);
        assert_eq!(is_power_of_4(-4), None);
        for k in 0..=30u32 {
            let p = power_of_4(k) as i128;
            assert_eq!(is_power_of_4(p), Some(k));
            assert_eq!(is_power_of_4(2 * p), None);
        }
    }

    #[test]
    fn two_adic_order() {
        assert_eq!(ord2(28).unwrap(), 2);
        assert_eq!(ord2(1).unwrap(), 0);
        assert_eq!(ord2(96).unwrap(), 5);
        assert!(ord2(0).is_err());
    }

    #[test]
    fn range_checks() {
        assert!(check_n(0).is_err());
        assert!(check_n(1).is_ok());
        assert!(check_n(MAX_N).is_ok());
        assert!(check_n(MAX_N + 1).is_err());
        assert!(10u64.checked_mul(MAX_N).is_some());
    }

    #[test]
    fn floor_ceil_division() {
        assert_eq!(div_floor(7, 2), 3);
        assert_eq!(div_floor(-7, 2), -4);
        assert_eq!(div_ceil(-7, 2), -3);
        assert_eq!(div_ceil(7, 2), 4);
        assert_eq!(div_floor(-6, 3), -2);
    }
}
