//! Polynomials over `F_p` for primes `p < 2^32`.

use super::RatPoly;
use crate::exact::{inv_mod, pow_mod, rat_mod};
use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

#[inline]
fn mm(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        assert!(p >= 2 && p < (1 << 32), "modulus must fit in 32 bits");
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn zero(p: u64) -> Self {
        FpPoly::new(p, Vec::new())
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn from_i64s(p: u64, v: &[i64]) -> Self {
        FpPoly::new(p, v.iter().map(|&a| a.rem_euclid(p as i64) as u64).collect())
    }

    /// Reduction of a rational polynomial; `None` if a denominator vanishes.
    pub fn from_ratpoly(f: &RatPoly, p: u64) -> Option<Self> {
        let c = f
            .coeffs()
            .iter()
            .map(|a| rat_mod(a, p))
            .collect::<Option<Vec<_>>>()?;
        Some(FpPoly::new(p, c))
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &a| (mm(acc, x, self.p) + a) % self.p)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| (self.c.get(i).unwrap_or(&0) + o.c.get(i).unwrap_or(&0)) % self.p)
            .collect();
        FpPoly::new(self.p, v)
    }

    pub fn neg(&self) -> Self {
        FpPoly::new(self.p, self.c.iter().map(|&a| (self.p - a) % self.p).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: u64) -> Self {
        FpPoly::new(self.p, self.c.iter().map(|&a| mm(a, s % self.p, self.p)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mm(a, b, p)) % p;
            }
        }
        FpPoly::new(p, out)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), self.p).expect("prime modulus"))
    }

    pub fn div_rem(&self, b: &Self) -> (Self, Self) {
        let p = self.p;
        let db = b.degree().expect("division by zero polynomial");
        if self.c.len() <= db {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = inv_mod(b.lc(), p).expect("prime modulus");
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - db];
        for i in (0..q.len()).rev() {
            let c = mm(r[i + db], inv, p);
            if c != 0 {
                for (j, &bc) in b.c.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - mm(c, bc, p)) % p;
                }
            }
            q[i] = c;
        }
        r.truncate(db);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, b: &Self) -> Self {
        self.div_rem(b).1
    }

    pub fn gcd(&self, b: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        FpPoly::new(
            p,
            self.c.iter().enumerate().skip(1).map(|(i, &a)| mm(a, i as u64 % p, p)).collect(),
        )
    }

    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = FpPoly::zero(self.p);
        for &a in self.c.iter().rev() {
            acc = acc.mul(inner).add(&FpPoly::new(self.p, vec![a]));
        }
        acc
    }

    /// `self^e mod m`.
    pub fn powmod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = FpPoly::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).deg() == 0
    }

    /// Resultant over `F_p` by the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Self) -> u64 {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return 0;
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut acc = 1u64;
        loop {
            let (da, db) = (a.deg(), b.deg());
            if db == 0 {
                return mm(acc, pow_mod(b.lc(), da as u64, p), p);
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return 0;
            }
            if da % 2 == 1 && db % 2 == 1 {
                acc = (p - acc) % p;
            }
            acc = mm(acc, pow_mod(b.lc(), (da - r.deg()) as u64, p), p);
            a = b;
            b = r;
        }
    }

    /// Discriminant `(-1)^(n(n-1)/2) Res(f, f') / lc(f)`; `None` for
    /// constants.
    pub fn discriminant(&self) -> Option<u64> {
        let n = self.degree().filter(|&n| n >= 1)?;
        let p = self.p;
        let mut r = mm(self.resultant(&self.derivative()), inv_mod(self.lc(), p)?, p);
        if (n * (n - 1) / 2) % 2 == 1 {
            r = (p - r) % p;
        }
        Some(r)
    }

    /// Distinct-degree factorization of a squarefree polynomial: pairs
    /// `(k, g_k)` where `g_k` is the product of the irreducible factors of
    /// degree `k`.
    pub fn distinct_degree(&self) -> Vec<(usize, FpPoly)> {
        let p = self.p;
        let pe = BigUint::from(p);
        let mut f = self.monic();
        let mut out = Vec::new();
        let x = FpPoly::x(p);
        let mut h = x.rem(&f);
        let mut k = 0;
        while f.deg() >= 2 * (k + 1) {
            k += 1;
            h = h.powmod(&pe, &f);
            let g = h.sub(&x).gcd(&f);
            if g.deg() > 0 {
                f = f.div_rem(&g).0;
                h = h.rem(&f);
                out.push((k, g));
            }
        }
        if f.deg() > 0 {
            out.push((f.deg(), f));
        }
        out
    }

    /// Multiset of irreducible factor degrees of a squarefree polynomial,
    /// sorted ascending.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for (k, g) in self.distinct_degree() {
            v.extend(std::iter::repeat(k).take(g.deg() / k));
        }
        v.sort_unstable();
        v
    }

    /// Cantor–Zassenhaus splitting of a product of distinct irreducibles of
    /// degree `k` (odd `p`).
    pub fn equal_degree<R: Rng>(&self, k: usize, rng: &mut R) -> Vec<FpPoly> {
        let p = self.p;
        let f = self.monic();
        if f.deg() <= k {
            return vec![f];
        }
        assert!(p % 2 == 1, "equal-degree splitting needs odd p");
        let e = (BigUint::from(p).pow(k as u32) - BigUint::one()) >> 1;
        loop {
            let a = FpPoly::new(p, (0..f.deg()).map(|_| rng.gen_range(0..p)).collect());
            if a.deg() == 0 {
                continue;
            }
            let g = a.gcd(&f);
            let split = if g.deg() > 0 && g.deg() < f.deg() {
                Some(g)
            } else {
                let b = a.powmod(&e, &f).sub(&FpPoly::one(p)).gcd(&f);
                (b.deg() > 0 && b.deg() < f.deg()).then_some(b)
            };
            if let Some(g) = split {
                let h = f.div_rem(&g).0;
                let mut out = g.equal_degree(k, rng);
                out.extend(h.equal_degree(k, rng));
                return out;
            }
        }
    }

    /// Full factorization of a squarefree polynomial into monic irreducibles.
    pub fn factor_squarefree<R: Rng>(&self, rng: &mut R) -> Vec<FpPoly> {
        let mut out = Vec::new();
        for (k, g) in self.distinct_degree() {
            if self.p == 2 {
                out.push(g);
            } else {
                out.extend(g.equal_degree(k, rng));
            }
        }
        out
    }

    pub fn roots(&self) -> Vec<u64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.p);
        let f = self.gcd(&FpPoly::x(self.p).powmod(&BigUint::from(self.p), self).sub(&FpPoly::x(self.p)));
        if f.is_zero() || f.deg() == 0 {
            return Vec::new();
        }
        let mut out: Vec<u64> = if self.p == 2 {
            (0..2).filter(|&r| f.eval(r) == 0).collect()
        } else {
            f.equal_degree(1, &mut rng).iter().map(|g| (self.p - g.c[0]) % self.p).collect()
        };
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn resultant_and_discriminant() {
        let f = FpPoly::from_i64s(101, &[1, 0, 1]);
        assert_eq!(f.discriminant(), Some(101 - 4));
        let g = FpPoly::from_i64s(101, &[2, 0, 2, 0, 1]);
        assert_eq!(g.discriminant(), Some(512 % 101));
        let a = FpPoly::from_i64s(7, &[-1, 1]);
        let b = FpPoly::from_i64s(7, &[-2, 1]);
        assert_eq!(a.resultant(&b), 6);
    }

    #[test]
    fn factor_patterns() {
        // x^4 + 1 splits into quadratics mod 3
        let f = FpPoly::from_i64s(3, &[1, 0, 0, 0, 1]);
        assert_eq!(f.factor_degrees(), vec![2, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let parts = f.factor_squarefree(&mut rng);
        assert_eq!(parts.len(), 2);
        let prod = parts.iter().fold(FpPoly::one(3), |acc, g| acc.mul(g));
        assert_eq!(prod, f);
        // x^2 + 1 mod 5 has roots 2, 3
        assert_eq!(FpPoly::from_i64s(5, &[1, 0, 1]).roots(), vec![2, 3]);
        assert!(FpPoly::from_i64s(7, &[1, 0, 1]).roots().is_empty());
    }

    #[test]
    fn distinct_degree_product() {
        let p = 13;
        let f = FpPoly::from_i64s(p, &[3, 1, 0, 5, 0, 0, 1]);
        if f.is_squarefree() {
            let total: usize = f.factor_degrees().iter().sum();
            assert_eq!(total, 6);
        }
    }
}
