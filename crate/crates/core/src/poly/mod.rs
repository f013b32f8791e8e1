//! Dense univariate polynomials over the rationals, over `Q[t]`, and over
//! prime fields.
//!
//! [`Poly<R>`] is generic over a small [`Ring`] trait so that the same
//! subresultant code runs over `Q` ([`RatPoly`]) and over `Q[t]`
//! ([`TPoly`]). Coefficient vectors are little-endian with trailing zeros
//! trimmed; the zero polynomial has no degree.

pub mod fp;
mod modular;
mod parse;
mod resultant;

pub use modular::{integer_resultant, primes_below_2_31};
pub use parse::{format_poly_list, parse_poly, parse_poly_human, parse_poly_list};
pub use resultant::{
    check_products_identity, discriminant, discriminant_subresultant, resultant,
    resultant_subresultant,
};

use crate::error::{Error, Result};
use crate::exact::{format_rat, BigRat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Commutative ring with exact division where it is defined.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64(n: i64) -> Self;
    /// `self / o`, assuming the quotient exists in the ring.
    fn exact_div(&self, o: &Self) -> Self;

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one_elem();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl Ring for BigRat {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        BigRat::from_integer(BigInt::from(n))
    }
    fn exact_div(&self, o: &Self) -> Self {
        self / o
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

pub type RatPoly = Poly<BigRat>;
/// Polynomial in `x` whose coefficients are polynomials in `t`.
pub type TPoly = Poly<RatPoly>;

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero_elem()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(R::one_elem())
    }

    pub fn x() -> Self {
        Poly::new(vec![R::zero_elem(), R::one_elem()])
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: R, deg: usize) -> Self {
        let mut v = vec![R::zero_elem(); deg + 1];
        v[deg] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `0` for the zero polynomial; only for call sites that
    /// have already excluded zero.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero_elem)
    }

    pub fn lc(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero_elem)
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero_elem();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                    (Some(a), Some(b)) => a.add(b),
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![R::zero_elem(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_elem() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero_elem() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn exact_div_scalar(&self, c: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.exact_div(c)).collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&R::from_i64(i as i64)))
                .collect(),
        )
    }

    /// `self(inner(x))` by Horner's rule.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// The `n`-fold composite, with `f^0 = x`.
    pub fn iterate(&self, n: usize) -> Self {
        let mut acc = Poly::x();
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        acc
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.degree().expect("pseudo_rem by zero");
        let Some(da) = self.degree() else {
            return Poly::zero();
        };
        if da < db {
            return self.clone();
        }
        let lb = b.lc();
        let mut r = self.coeffs.clone();
        let mut e = da - db + 1;
        while let Some(dr) = Poly::new(r.clone()).degree() {
            if dr < db {
                break;
            }
            let lr = r[dr].clone();
            for c in r.iter_mut() {
                *c = c.mul(&lb);
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                let k = dr - db + j;
                r[k] = r[k].sub(&lr.mul(bc));
            }
            r.truncate(dr);
            while r.last().map_or(false, |c| c.is_zero_elem()) {
                r.pop();
            }
            e -= 1;
        }
        let scale = lb.pow(e as u64);
        Poly::new(r).scale(&scale)
    }

    /// Exact quotient `self / b`, assuming `b` divides `self` over `R`.
    pub fn exact_div_poly(&self, b: &Self) -> Self {
        let db = b.degree().expect("division by zero polynomial");
        let Some(da) = self.degree() else {
            return Poly::zero();
        };
        if da < db {
            return Poly::zero();
        }
        let lb = b.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![R::zero_elem(); da - db + 1];
        for i in (0..=da - db).rev() {
            let c = r[i + db].exact_div(&lb);
            if !c.is_zero_elem() {
                for (j, bc) in b.coeffs.iter().enumerate() {
                    r[i + j] = r[i + j].sub(&c.mul(bc));
                }
            }
            q[i] = c;
        }
        Poly::new(q)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero_elem() -> Self {
        Poly::zero()
    }
    fn one_elem() -> Self {
        Poly::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Poly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn from_i64(n: i64) -> Self {
        Poly::constant(R::from_i64(n))
    }
    fn exact_div(&self, o: &Self) -> Self {
        self.exact_div_poly(o)
    }
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if Zero::is_zero(c) {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{}", format_rat(&a))?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for RatPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_poly_list(self))
    }
}

impl<'de> serde::Deserialize<'de> for RatPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_poly_list(&s).map_err(serde::de::Error::custom)
    }
}

impl RatPoly {
    pub fn from_ints(v: &[i64]) -> Self {
        Poly::new(v.iter().map(|&c| BigRat::from_integer(BigInt::from(c))).collect())
    }

    pub fn from_rats(v: &[BigRat]) -> Self {
        Poly::new(v.to_vec())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.lc();
        Poly::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    /// Quotient and remainder over `Q`.
    pub fn div_rem(&self, b: &Self) -> Result<(Self, Self)> {
        let db = b.degree().ok_or(Error::ZeroPolynomial)?;
        let Some(da) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if da < db {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv = <BigRat as One>::one() / b.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![<BigRat as Zero>::zero(); da - db + 1];
        for i in (0..=da - db).rev() {
            let c = &r[i + db] * &inv;
            if !Zero::is_zero(&c) {
                for (j, bc) in b.coeffs.iter().enumerate() {
                    r[i + j] -= &c * bc;
                }
            }
            q[i] = c;
        }
        r.truncate(db);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, b: &Self) -> Result<Self> {
        Ok(self.div_rem(b)?.1)
    }

    /// Monic gcd over `Q`; `gcd(0, 0) = 0`.
    pub fn gcd(&self, b: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Yun's decomposition: monic squarefree, pairwise coprime `a_1, a_2, ...`
    /// with `P = lc(P) · ∏ a_i^i`.
    pub fn squarefree_decomposition(&self) -> Result<Vec<RatPoly>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let f = self.monic();
        if f.is_constant() {
            return Ok(Vec::new());
        }
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.div_rem(&a)?.0;
        let mut c = fp.div_rem(&a)?.0;
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        loop {
            let ai = b.gcd(&d);
            b = b.div_rem(&ai)?.0;
            c = d.div_rem(&ai)?.0;
            out.push(ai);
            if b.is_constant() {
                break;
            }
            d = c.sub(&b.derivative());
        }
        while out.last().map_or(false, |p| p.is_constant()) {
            out.pop();
        }
        Ok(out)
    }

    /// Monic product of the irreducible factors of odd multiplicity.
    pub fn squarefree_part(&self) -> Result<RatPoly> {
        let parts = self.squarefree_decomposition()?;
        Ok(parts
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .fold(RatPoly::one(), |acc, (_, p)| acc.mul(p)))
    }

    /// Newton interpolation through points with distinct abscissae.
    pub fn interpolate(points: &[(BigRat, BigRat)]) -> Result<RatPoly> {
        let xs: Vec<&BigRat> = points.iter().map(|(x, _)| x).collect();
        let mut dd: Vec<BigRat> = points.iter().map(|(_, y)| y.clone()).collect();
        let n = points.len();
        for level in 1..n {
            for i in (level..n).rev() {
                let den = xs[i] - xs[i - level];
                if Zero::is_zero(&den) {
                    return Err(Error::InvalidInput("repeated interpolation node".into()));
                }
                dd[i] = (&dd[i] - &dd[i - 1]) / den;
            }
        }
        let mut acc = RatPoly::zero();
        for i in (0..n).rev() {
            let lin = RatPoly::new(vec![-xs[i].clone(), <BigRat as One>::one()]);
            acc = acc.mul(&lin).add(&RatPoly::constant(dd[i].clone()));
        }
        Ok(acc)
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_constant()
    }

    /// Common denominator `L > 0` and integer coefficients of `L · self`.
    pub fn integer_form(&self) -> (BigInt, Vec<BigInt>) {
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self
            .coeffs
            .iter()
            .map(|c| (c * BigRat::from_integer(l.clone())).to_integer())
            .collect();
        (l, ints)
    }

    pub fn max_height_bits(&self) -> u64 {
        self.coeffs.iter().map(crate::exact::height_bits).max().unwrap_or(0)
    }

    /// Lift to a polynomial in `x` over `Q[t]` with constant coefficients.
    pub fn to_tpoly(&self) -> TPoly {
        self.map(|c| RatPoly::constant(c.clone()))
    }

    /// The polynomial `self(x) - t` over `Q[t]`.
    pub fn minus_t(&self) -> TPoly {
        let mut p = self.to_tpoly().into_coeffs();
        if p.is_empty() {
            p.push(RatPoly::zero());
        }
        p[0] = p[0].sub(&RatPoly::x());
        Poly::new(p)
    }

    /// Evaluates the homogenized integer form at `a/b` without reducing:
    /// returns `(N, Dn)` with `self(a/b) = N / Dn` and `Dn > 0`.
    pub fn eval_unreduced(&self, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        let (l, ints) = self.integer_form();
        let d = ints.len().saturating_sub(1);
        let mut bpow = Vec::with_capacity(d + 1);
        bpow.push(BigInt::one());
        for i in 0..d {
            let next = &bpow[i] * b;
            bpow.push(next);
        }
        let mut acc = BigInt::zero();
        for (i, c) in ints.iter().enumerate().rev() {
            acc = acc * a + c * &bpow[d - i];
        }
        let mut den = l * &bpow[d];
        let mut num = acc;
        if den.is_negative() {
            den = -den;
            num = -num;
        }
        (num, den)
    }
}

impl TPoly {
    /// Specializes `t` to a rational value.
    pub fn specialize(&self, t: &BigRat) -> RatPoly {
        self.map(|c| c.eval(t))
    }

    pub fn t_degree(&self) -> usize {
        self.coeffs().iter().map(|c| c.deg()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_frac};
    use proptest::prelude::*;

    #[test]
    fn iterate_examples() {
        let f = RatPoly::from_ints(&[1, 0, 1]);
        assert_eq!(f.iterate(0), RatPoly::x());
        assert_eq!(f.iterate(2), RatPoly::from_ints(&[2, 0, 2, 0, 1]));
        let g = RatPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(g.iterate(3).eval(&rat(0)), rat(2));
        assert_eq!(f.iterate(3).deg(), 8);
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = RatPoly::new(vec![rat_frac(1, 3), rat(-2), rat(0), rat(5)]);
        let pts: Vec<_> = (0..4).map(|i| (rat(i), f.eval(&rat(i)))).collect();
        assert_eq!(RatPoly::interpolate(&pts).unwrap(), f);
        assert!(RatPoly::interpolate(&[(rat(1), rat(1)), (rat(1), rat(2))]).is_err());
    }

    #[test]
    fn squarefree_examples() {
        let xm1 = RatPoly::from_ints(&[-1, 1]);
        let xm2 = RatPoly::from_ints(&[-2, 1]);
        let p = xm1.mul(&xm1).mul(&xm2);
        assert_eq!(p.squarefree_part().unwrap(), xm2);
        let p3 = xm1.mul(&xm1).mul(&xm1);
        assert_eq!(p3.squarefree_part().unwrap(), xm1);
        let q = RatPoly::from_ints(&[1, 0, 1]);
        assert_eq!(q.squarefree_part().unwrap(), q);
        assert!(RatPoly::zero().squarefree_part().is_err());
        assert_eq!(RatPoly::from_ints(&[4]).squarefree_part().unwrap(), RatPoly::one());
    }

    #[test]
    fn unreduced_evaluation() {
        let f = RatPoly::from_rats(&[rat_frac(1, 3), rat(0), rat_frac(-5, 2)]);
        let (n, d) = f.eval_unreduced(&BigInt::from(-7), &BigInt::from(4));
        assert_eq!(BigRat::new(n, d), f.eval(&rat_frac(-7, 4)));
    }

    #[test]
    fn display() {
        assert_eq!(RatPoly::from_ints(&[1, 0, 1]).to_string(), "x^2 + 1");
        assert_eq!(RatPoly::from_ints(&[-2, 3, -1]).to_string(), "-x^2 + 3*x - 2");
    }

    fn small_poly(max_deg: usize) -> impl Strategy<Value = RatPoly> {
        proptest::collection::vec(-6i64..=6, 1..=max_deg + 1)
            .prop_map(|v| RatPoly::from_ints(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn iterate_composes(f in small_poly(3), m in 0usize..=2, n in 0usize..=2) {
            prop_assume!(m + n <= 4);
            prop_assert_eq!(f.iterate(m + n), f.iterate(m).compose(&f.iterate(n)));
            prop_assert_eq!(f.iterate(m + n), f.iterate(n).compose(&f.iterate(m)));
            prop_assume!(m * n <= 4);
            prop_assert_eq!(f.iterate(m * n), f.iterate(m).iterate(n));
        }

        #[test]
        fn squarefree_round_trip(s in small_poly(3), u in small_poly(2)) {
            // P = s · u^2; the odd-multiplicity part divides s and P / sqfree is a square
            let p = s.mul(&u).mul(&u);
            prop_assume!(!p.is_zero());
            let sp = p.squarefree_part().unwrap();
            prop_assert!(p.rem(&sp).unwrap().is_zero());
            let rest = p.monic().div_rem(&sp).unwrap().0;
            let parts = rest.squarefree_decomposition().unwrap();
            for (i, q) in parts.iter().enumerate() {
                if i % 2 == 0 {
                    prop_assert!(q.is_constant());
                }
            }
            prop_assert!(sp.is_squarefree() || sp.is_constant());
        }
    }
}
