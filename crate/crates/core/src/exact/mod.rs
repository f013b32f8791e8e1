//! Exact scalar arithmetic: rationals, p-adic valuations, primality,
//! modular square roots and CRT assembly.
//!
//! Rationals are `num_rational::BigRational`, which already keeps
//! `gcd(num, den) = 1` with a positive denominator and `0 = 0/1`.

mod basis;
mod factor;

pub use basis::{is_perfect_power, CoprimeBasis};
pub use factor::{factor_bounded, pollard_rho, Factorization};

use crate::error::{invalid, Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

pub type BigRat = BigRational;

pub fn rat(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: BigInt) -> BigRat {
    BigRat::from_integer(n)
}

/// `"a/b"`, with `/b` omitted when the denominator is one.
pub fn format_rat(x: &BigRat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<BigRat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRat::new(n, d))
}

/// Serde adapter storing a rational as its `"a/b"` string.
pub mod rat_serde {
    use super::{format_rat, parse_rat, BigRat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter storing an integer as a decimal string.
pub mod int_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bit length of the larger of numerator and denominator.
pub fn height_bits(x: &BigRat) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

/// p-adic valuation; `Infinite` only for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Valuation of a product.
    pub fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Equal,
            (Valuation::Infinite, _) => Greater,
            (_, Valuation::Infinite) => Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in the nonzero integer `n`. Strips `p^(2^j)` blocks first
/// so that large valuations cost O(log v) divisions.
pub fn val_int_unchecked(n: &BigInt, p: u64) -> u64 {
    if n.is_zero() {
        return u64::MAX;
    }
    let p = BigUint::from(p);
    let mut m = n.magnitude().clone();
    let mut total = 0u64;
    let mut powers = vec![p.clone()];
    loop {
        let last = powers.last().unwrap();
        if !m.is_multiple_of(last) {
            break;
        }
        let (q, _) = m.div_rem(last);
        m = q;
        total += 1u64 << (powers.len() - 1);
        let next = last * last;
        if next.bits() > m.bits() + 1 {
            break;
        }
        powers.push(next);
    }
    while let Some(pw) = powers.pop() {
        let k = powers.len();
        while m.is_multiple_of(&pw) && !m.is_zero() {
            m /= &pw;
            total += 1u64 << k;
        }
    }
    total
}

pub fn val_p(x: &BigRat, p: u64) -> Result<Valuation> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(val_p_unchecked(x, p))
}

pub(crate) fn val_p_unchecked(x: &BigRat, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let a = val_int_unchecked(x.numer(), p) as i64;
    let b = val_int_unchecked(x.denom(), p) as i64;
    Valuation::Finite(a - b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        (a % m) * (b % m) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime (or any modulus coprime to `a`).
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    if t < 0 {
        t += m as i128;
    }
    Some(t as u64)
}

/// Residue of a rational modulo a prime, `None` when `p` divides the denominator.
pub fn rat_mod(x: &BigRat, p: u64) -> Option<u64> {
    let inv = inv_mod(int_mod(x.denom(), p), p)?;
    let n = int_mod(x.numer(), p);
    Some(mul_mod(n, inv, p))
}

pub fn int_mod(x: &BigInt, p: u64) -> u64 {
    let r = (x.magnitude() % p).to_u64().unwrap();
    if x.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

/// Legendre symbol for an odd prime: `0`, `1` or `-1`.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn miller_rabin_u64(n: u64, a: u64) -> bool {
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mut x = pow_mod(a % n, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .all(|&a| miller_rabin_u64(n, a))
}

const MR_BASES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Miller–Rabin with twenty fixed bases; exact below 3.3e24, probabilistic above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'bases: for &a in MR_BASES.iter() {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub fn next_prime_u64(mut n: u64) -> u64 {
    loop {
        n += 1;
        if is_prime_u64(n) {
            return n;
        }
    }
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

/// Square root modulo a prime `l ≡ 3 (mod 4)`, or `None` for a nonresidue.
pub fn sqrt_mod(a: &BigInt, l: u64) -> Result<Option<u64>> {
    if !is_prime_u64(l) {
        return Err(Error::NotPrime(l.to_string()));
    }
    if l % 4 != 3 {
        return invalid(format!("sqrt_mod needs a prime congruent to 3 mod 4, got {l}"));
    }
    let a = int_mod(a, l);
    if a == 0 {
        return Ok(Some(0));
    }
    if legendre(a, l) != 1 {
        return Ok(None);
    }
    let r = pow_mod(a, (l + 1) / 4, l);
    debug_assert_eq!(mul_mod(r, r, l), a);
    Ok(Some(r))
}

/// Smallest prime `p` with `d/2 + 5 <= p <= d - 3`.
pub fn prime_in_window(d: u64) -> Result<u64> {
    if d % 2 != 0 || d < 20 {
        return invalid(format!("degree must be even and at least 20, got {d}"));
    }
    let lo = d / 2 + 5;
    let hi = d - 3;
    (lo..=hi)
        .find(|&p| is_prime_u64(p))
        .ok_or(Error::NoPrimeInWindow { lo, hi })
}

/// Least non-negative solution of the simultaneous congruences.
pub fn crt_assemble(congruences: &[(BigInt, BigInt)]) -> Result<BigInt> {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (r, n) in congruences {
        if n.sign() != Sign::Plus {
            return invalid(format!("modulus must be positive, got {n}"));
        }
        let g = m.gcd(n);
        if !g.is_one() {
            return Err(Error::NonCoprimeModuli(m.to_string(), n.to_string()));
        }
        // x + m*k ≡ r (mod n)
        let ext = m.extended_gcd(n);
        let inv = ext.x.mod_floor(n);
        let k = ((r - &x) * inv).mod_floor(n);
        x += &m * k;
        m *= n;
        x = x.mod_floor(&m);
    }
    Ok(x)
}

/// Prime factors of a `u64` by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative order of `a` modulo the prime `p`.
pub fn multiplicative_order(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    let mut ord = p - 1;
    for (q, _) in factor_u64(p - 1) {
        while ord % q == 0 && pow_mod(a, ord / q, p) == 1 {
            ord /= q;
        }
    }
    Some(ord)
}

/// Exact square test for a rational.
pub fn is_rational_square(x: &BigRat) -> bool {
    if x.is_negative() {
        return false;
    }
    is_square_int(x.numer()) && is_square_int(&BigInt::from(x.denom().clone()))
}

pub fn is_square_int(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(val_p(&rat(12), 2).unwrap(), Valuation::Finite(2));
        assert_eq!(val_p(&rat_frac(4, 9), 3).unwrap(), Valuation::Finite(-2));
        assert_eq!(val_p(&rat(0), 5).unwrap(), Valuation::Infinite);
        assert!(matches!(val_p(&rat(12), 4), Err(Error::NotPrime(_))));
    }

    #[test]
    fn large_valuation() {
        let x = BigInt::from(3u32).pow(1000u32) * BigInt::from(7);
        assert_eq!(val_int_unchecked(&x, 3), 1000);
        assert_eq!(val_int_unchecked(&x, 7), 1);
        assert_eq!(val_int_unchecked(&x, 5), 0);
    }

    #[test]
    fn sqrt_mod_examples() {
        let r = sqrt_mod(&BigInt::from(4), 7).unwrap().unwrap();
        assert!(r == 2 || r == 5);
        assert_eq!(sqrt_mod(&BigInt::from(0), 11).unwrap(), Some(0));
        assert_eq!(sqrt_mod(&BigInt::from(3), 7).unwrap(), None);
        assert!(sqrt_mod(&BigInt::from(3), 13).is_err());
    }

    #[test]
    fn window_primes() {
        assert_eq!(prime_in_window(20).unwrap(), 17);
        assert_eq!(prime_in_window(22).unwrap(), 17);
        assert_eq!(prime_in_window(24).unwrap(), 17);
        assert!(prime_in_window(18).is_err());
        assert!(prime_in_window(21).is_err());
        for d in (20..400).step_by(2) {
            prime_in_window(d).unwrap();
        }
    }

    #[test]
    fn crt_examples() {
        let c = |v: &[(i64, i64)]| {
            crt_assemble(
                &v.iter()
                    .map(|&(r, m)| (BigInt::from(r), BigInt::from(m)))
                    .collect::<Vec<_>>(),
            )
        };
        assert_eq!(c(&[(1, 2), (2, 3)]).unwrap(), BigInt::from(5));
        assert_eq!(c(&[(0, 5)]).unwrap(), BigInt::from(0));
        assert_eq!(c(&[(3, 4), (4, 5), (1, 3)]).unwrap(), BigInt::from(19));
        assert!(matches!(c(&[(1, 4), (1, 6)]), Err(Error::NonCoprimeModuli(..))));
    }

    #[test]
    fn rational_text_format() {
        assert_eq!(format_rat(&rat_frac(-6, 4)), "-3/2");
        assert_eq!(format_rat(&rat(7)), "7");
        assert_eq!(parse_rat("-3/2").unwrap(), rat_frac(-3, 2));
        assert_eq!(parse_rat("10/5").unwrap(), rat(2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn primality() {
        let primes = primes_up_to(10_000);
        for n in 0..10_000u64 {
            assert_eq!(is_prime_u64(n), primes.binary_search(&n).is_ok(), "{n}");
        }
        assert!(is_prime_u64(18446744073709551557));
        let m61 = (BigUint::one() << 127u32) - BigUint::one();
        assert!(is_probable_prime(&m61));
        assert!(!is_probable_prime(&(&m61 * BigUint::from(3u32))));
    }

    #[test]
    fn orders() {
        assert_eq!(multiplicative_order(2, 7), Some(3));
        assert_eq!(multiplicative_order(3, 7), Some(6));
        assert_eq!(multiplicative_order(7, 7), None);
    }

    fn small_rat() -> impl Strategy<Value = BigRat> {
        (-5000i64..5000, 1i64..5000).prop_map(|(n, d)| rat_frac(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn valuation_laws(x in small_rat(), y in small_rat(), pi in 0usize..6) {
            let p = [2u64, 3, 5, 7, 11, 13][pi];
            let vx = val_p(&x, p).unwrap();
            let vy = val_p(&y, p).unwrap();
            prop_assert_eq!(val_p(&(&x * &y), p).unwrap(), vx.add(vy));
            let vs = val_p(&(&x + &y), p).unwrap();
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }

        #[test]
        fn sqrt_mod_squares(a in 0i64..100_000, li in 0usize..5) {
            let l = [7u64, 11, 19, 3_200_003, 1_000_003][li];
            if l % 4 == 3 && is_prime_u64(l) {
                if let Some(r) = sqrt_mod(&BigInt::from(a), l).unwrap() {
                    prop_assert_eq!(mul_mod(r, r, l), (a as u64) % l);
                } else {
                    prop_assert_eq!(legendre(a as u64, l), -1);
                }
            }
        }
    }
}
