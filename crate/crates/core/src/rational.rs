//! Exact rational helpers shared by every layer.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

/// Integer constant as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den` in lowest terms. Panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `1 / n!`
pub fn inv_factorial(n: u32) -> Rational {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    Rational::new(BigInt::one(), f)
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn render(r: &Rational) -> String {
    r.to_string()
}

/// Parse the canonical text form back.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Convert to `i64` if the value is an integer that fits.
pub fn to_i64(r: &Rational) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    let n = r.to_integer();
    if n.abs() > BigInt::from(i64::MAX) {
        return None;
    }
    i64::try_from(n).ok()
}

/// `r^k` for a non-negative exponent.
pub fn pow(r: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

/// Binomial coefficient `C(n, k)` for a possibly negative integer `n`.
pub fn binomial(n: i64, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k as i64 {
        acc *= int(n - i);
        acc /= int(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        for r in [frac(-3, 6), int(7), frac(5, -15), int(0)] {
            assert_eq!(parse(&render(&r)).unwrap(), r);
        }
        assert_eq!(render(&frac(2, -4)), "-1/2");
        assert_eq!(render(&int(-24)), "-24");
        assert!(parse("1/0").is_none());
    }

    #[test]
    fn negative_binomial() {
        // (1 - t)^{-2} = 1 + 2t + 3t^2 + ...
        assert_eq!(binomial(-2, 3) * int(-1), int(4));
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(inv_factorial(4), frac(1, 24));
    }
}
