use super::fp::FpPoly;
use crate::exact::{int_mod, inv_mod, is_prime_u64};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Primes descending from `2^31`.
pub fn primes_below_2_31() -> impl Iterator<Item = u64> {
    (0..(1u64 << 30)).map(|k| (1u64 << 31) - 1 - 2 * k).filter(|&n| is_prime_u64(n))
}

/// `log2` of the Euclidean norm of a coefficient vector, rounded up.
fn log2_norm(v: &[BigInt]) -> f64 {
    let max_bits = v.iter().map(|c| c.bits()).max().unwrap_or(0) as f64;
    max_bits + 0.5 * (v.len().max(1) as f64).log2()
}

/// Exact resultant of integer polynomials (little-endian coefficient
/// vectors with nonzero leading entries) by CRT over 31-bit primes under
/// the Hadamard bound.
pub fn integer_resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (da, db) = (a.len().saturating_sub(1), b.len().saturating_sub(1));
    if a.is_empty() || b.is_empty() {
        return BigInt::zero();
    }
    let bound_bits = (db as f64) * log2_norm(a) + (da as f64) * log2_norm(b) + 2.0;
    let (la, lb) = (a.last().unwrap(), b.last().unwrap());
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for p in primes_below_2_31() {
        if (m.bits() as f64) > bound_bits {
            break;
        }
        if int_mod(la, p) == 0 || int_mod(lb, p) == 0 {
            continue;
        }
        let fa = FpPoly::new(p, a.iter().map(|c| int_mod(c, p)).collect());
        let fb = FpPoly::new(p, b.iter().map(|c| int_mod(c, p)).collect());
        let r = fa.resultant(&fb);
        let xm = int_mod(&x, p);
        let mi = inv_mod(int_mod(&m, p), p).expect("distinct primes");
        let k = ((r + p - xm) % p) * mi % p;
        x += &m * BigInt::from(k);
        m *= BigInt::from(p);
    }
    // symmetric representative
    let half = &m >> 1;
    if x > half {
        x -= &m;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_resultants() {
        assert_eq!(integer_resultant(&v(&[-1, 1]), &v(&[-2, 1])), BigInt::from(-1));
        // Res(x^2+1, 2x) = 4
        assert_eq!(integer_resultant(&v(&[1, 0, 1]), &v(&[0, 2])), BigInt::from(4));
        assert_eq!(integer_resultant(&v(&[3]), &v(&[1, 1, 1])), BigInt::from(9));
        let big = vec![BigInt::from(10).pow(40), BigInt::from(-7), BigInt::from(3).pow(50)];
        let r = integer_resultant(&big, &v(&[5, 1]));
        // Res(P, x + 5) = (-1)^deg P * P(-5) with lc 1
        let p_at = &big[0] + BigInt::from(35) + &big[2] * 25;
        assert_eq!(r, p_at);
    }
}
