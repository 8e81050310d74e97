//! Shared exact-arithmetic helpers: primality, binomial coefficients,
//! canonical `num/den` text encoding, and directed rational bounds for ln.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational, the coefficient type used throughout the crate.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_int<T: Into<BigInt>>(n: T) -> Q {
    Q::from_integer(n.into())
}

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

/// Deterministic trial-division primality test, sufficient for the 64-bit
/// inputs this crate handles (p stays below 2^40 in practice).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for d in [2u64, 3, 5] {
        if n % d == 0 {
            return n == d;
        }
    }
    let mut d = 7u64;
    // wheel over 6k±1
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 4) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Primes in the closed range [lo, hi], ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Primes up to and including `n`, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    primes_in(2, n)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Canonical text form `num/den`, lowest terms, positive denominator.
/// `BigRational` maintains both invariants, so formatting is direct.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse `num/den` or a bare integer.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator: {s:?}"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational denominator: {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in rational: {s:?}"));
    }
    Ok(Q::new(n, d))
}

fn atanh_series_bounds(z: &Q, terms: usize) -> (Q, Q) {
    // 2·atanh(z) = 2·sum z^(2j+1)/(2j+1); positive decreasing terms for
    // 0 < z < 1, tail below 2 z^(2T+1) / ((2T+1)(1-z^2)).
    let z2 = z * z;
    let mut power = z.clone();
    let mut lo = Q::zero();
    for j in 0..terms {
        lo += &power / q_int(2 * j as i64 + 1);
        power *= &z2;
    }
    lo *= q_int(2);
    let tail = q_int(2) * &power / (q_int(2 * terms as i64 + 1) * (q_one() - &z2));
    let hi = &lo + tail;
    (lo, hi)
}

fn ln2_bounds(terms: usize) -> (Q, Q) {
    // ln 2 = 2 atanh(1/3)
    atanh_series_bounds(&q(1, 3), terms)
}

/// Rational lower/upper bounds for ln(x), x ≥ 1. Used wherever a log enters
/// an otherwise exact bound: directed rounding keeps upper bounds honest.
pub fn ln_bounds(x: &Q, terms: usize) -> (Q, Q) {
    assert!(*x >= q_one(), "ln_bounds requires x >= 1");
    if x.is_one() {
        return (Q::zero(), Q::zero());
    }
    // Reduce to m = x / 2^k with 1 <= m < 2.
    let mut k: i64 = 0;
    let mut m = x.clone();
    let two = q_int(2);
    while m >= two {
        m /= &two;
        k += 1;
    }
    let z = (&m - q_one()) / (&m + q_one());
    let (m_lo, m_hi) = if z.is_zero() {
        (Q::zero(), Q::zero())
    } else {
        atanh_series_bounds(&z, terms)
    };
    let (l2_lo, l2_hi) = ln2_bounds(terms);
    let kq = q_int(k);
    (&kq * l2_lo + m_lo, &kq * l2_hi + m_hi)
}

/// Rational over-approximation of ln(p) used by the bound pipeline.
pub fn ln_upper(p: u64) -> Q {
    ln_bounds(&q_int(p as i64), 48).1
}

/// Rational under-approximation of ln(p).
pub fn ln_lower(p: u64) -> Q {
    ln_bounds(&q_int(p as i64), 48).0
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapters encoding rationals as canonical `num/den` strings.
pub mod qserde {
    use super::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let known: Vec<u64> = vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
        assert_eq!(primes_up_to(37), known);
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001)); // 101 * 9901
        assert!(is_prime(999_999_937));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::from(0));
        assert_eq!(binomial(40, 20), "137846528820".parse::<BigInt>().unwrap());
    }

    #[test]
    fn rational_round_trip() {
        let x = q(-22, 8);
        assert_eq!(format_q(&x), "-11/4");
        assert_eq!(parse_q("-11/4").unwrap(), x);
        assert_eq!(parse_q("7").unwrap(), q(7, 1));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn ln_bounds_bracket_true_value() {
        for &p in &[2u64, 19, 97, 1_000_003] {
            let (lo, hi) = ln_bounds(&q_int(p as i64), 48);
            let truth = (p as f64).ln();
            assert!(q_to_f64(&lo) <= truth + 1e-12, "lo too big at {p}");
            assert!(q_to_f64(&hi) >= truth - 1e-12, "hi too small at {p}");
            assert!(q_to_f64(&(&hi - &lo)) < 1e-20, "bracket too wide at {p}");
        }
    }
}
