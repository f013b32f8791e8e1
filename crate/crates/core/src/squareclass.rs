//! Square classes in `K^×/K^×2` for `K = Q` and `K = Q(t)`, as F2 vectors
//! over refined coprime bases.
//!
//! A class is stored as a sign bit plus a set of *atoms*, each appearing to
//! odd exponent: pairwise-distinct integers `>= 2` and monic squarefree
//! polynomials in `t`. The class represented is `±∏ atoms`. Atoms from
//! different classes need not be coprime; [`align`] refines all atoms in a
//! list to a common coprime basis before any linear algebra.

use crate::error::{Error, Result};
use crate::exact::{BigRat, CoprimeBasis};
use crate::poly::RatPoly;
use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassMode {
    Arithmetic,
    /// Constants are squares over an algebraically closed constant field.
    Geometric,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "ClassRepr", try_from = "ClassRepr")]
pub struct SquareClass {
    pub negative: bool,
    pub atoms: BTreeSet<BigUint>,
    pub poly_atoms: BTreeSet<RatPoly>,
}

#[derive(Serialize, Deserialize)]
struct ClassRepr {
    sign: i8,
    parities: Vec<(String, u8)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    polys: Vec<RatPoly>,
}

impl From<SquareClass> for ClassRepr {
    fn from(c: SquareClass) -> Self {
        ClassRepr {
            sign: if c.negative { -1 } else { 1 },
            parities: c.atoms.iter().map(|a| (a.to_string(), 1)).collect(),
            polys: c.poly_atoms.into_iter().collect(),
        }
    }
}

impl TryFrom<ClassRepr> for SquareClass {
    type Error = Error;
    fn try_from(r: ClassRepr) -> Result<Self> {
        let mut c = SquareClass { negative: r.sign < 0, ..Default::default() };
        for (a, par) in r.parities {
            let v: BigUint = a.parse().map_err(|_| Error::Parse(format!("bad atom {a:?}")))?;
            if par % 2 == 1 {
                c.toggle_atom(v);
            }
        }
        for p in r.polys {
            c.toggle_poly(p);
        }
        Ok(c)
    }
}

impl SquareClass {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn minus_one() -> Self {
        SquareClass { negative: true, ..Default::default() }
    }

    fn toggle_atom(&mut self, a: BigUint) {
        if a <= BigUint::one() {
            return;
        }
        if !self.atoms.remove(&a) {
            self.atoms.insert(a);
        }
    }

    fn toggle_poly(&mut self, p: RatPoly) {
        if p.is_constant() {
            return;
        }
        if !self.poly_atoms.remove(&p) {
            self.poly_atoms.insert(p);
        }
    }

    /// Formal product: xor of signs and of atom sets.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let mut out = self.clone();
        out.negative ^= other.negative;
        for a in &other.atoms {
            out.toggle_atom(a.clone());
        }
        for p in &other.poly_atoms {
            out.toggle_poly(p.clone());
        }
        out
    }

    /// Class of a nonzero rational, over a basis refined from its own
    /// numerator and denominator.
    pub fn of_rational(x: &BigRat) -> Result<SquareClass> {
        if x.is_zero() {
            return Err(Error::InvalidInput("square class of zero".into()));
        }
        let basis = CoprimeBasis::refine(&[x.numer().clone(), x.denom().clone()]);
        class_of_rational(x, &basis)
    }

    /// Drops the constant part.
    pub fn geometric(&self) -> SquareClass {
        SquareClass { negative: false, atoms: BTreeSet::new(), poly_atoms: self.poly_atoms.clone() }
    }

    pub fn is_formally_trivial(&self) -> bool {
        !self.negative && self.atoms.is_empty() && self.poly_atoms.is_empty()
    }

    /// True iff the represented element is a square (aligns first).
    pub fn is_trivial(&self) -> bool {
        let (vecs, _) = align(std::slice::from_ref(self));
        vecs[0].iter().all(|b| !b)
    }

    pub fn same_class(&self, other: &SquareClass) -> bool {
        self.mul(other).is_trivial()
    }

    /// Small human form such as `-1*2*5` or `(t - 1)`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.negative {
            parts.push("-1".into());
        }
        parts.extend(self.atoms.iter().map(|a| a.to_string()));
        parts.extend(self.poly_atoms.iter().map(|p| format!("({})", p.to_string().replace('x', "t"))));
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Class of `x` with parities read over `basis`, refining a copy of the
/// basis first if it does not cover `x`.
pub fn class_of_rational(x: &BigRat, basis: &CoprimeBasis) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::InvalidInput("square class of zero".into()));
    }
    let covered = |b: &CoprimeBasis| {
        Some((b.exponents(x.numer().magnitude())?, b.exponents(x.denom().magnitude())?))
    };
    let refined;
    let (b, (en, ed)) = match covered(basis) {
        Some(e) => (basis, e),
        None => {
            let mut r = basis.clone();
            r.insert(x.numer().magnitude());
            r.insert(x.denom().magnitude());
            refined = r;
            let e = covered(&refined).ok_or_else(|| Error::Internal("refinement does not cover input".into()))?;
            (&refined, e)
        }
    };
    let mut c = SquareClass { negative: x.is_negative(), ..Default::default() };
    for (i, el) in b.elements().iter().enumerate() {
        if (en[i] + ed[i]) % 2 == 1 {
            c.toggle_atom(el.clone());
        }
    }
    Ok(c)
}

/// Class of a nonzero polynomial in `t`. The representative is
/// `lc(P) · monic(P)`: the odd-index Yun factors become polynomial atoms and,
/// in arithmetic mode, the leading coefficient contributes its rational
/// class.
pub fn class_of_tpolynomial(p: &RatPoly, mode: ClassMode) -> Result<SquareClass> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut c = match mode {
        ClassMode::Geometric => SquareClass::trivial(),
        ClassMode::Arithmetic => SquareClass::of_rational(&p.lc())?,
    };
    for (i, part) in p.squarefree_decomposition()?.into_iter().enumerate() {
        if i % 2 == 0 {
            c.toggle_poly(part);
        }
    }
    Ok(c)
}

/// Pairwise coprime monic polynomials covering a set of monic squarefree
/// inputs.
fn refine_polys(inputs: impl IntoIterator<Item = RatPoly>) -> Vec<RatPoly> {
    let mut basis: Vec<RatPoly> = Vec::new();
    let mut queue: Vec<RatPoly> = inputs.into_iter().collect();
    while let Some(y) = queue.pop() {
        if y.is_constant() {
            continue;
        }
        let hit = basis.iter().enumerate().find_map(|(i, e)| {
            let g = e.gcd(&y);
            (!g.is_constant()).then_some((i, g))
        });
        match hit {
            Some((i, g)) => {
                let e = basis.swap_remove(i);
                queue.push(e.div_rem(&g).expect("nonzero").0.monic());
                queue.push(y.div_rem(&g).expect("nonzero").0.monic());
                queue.push(g);
            }
            None => basis.push(y),
        }
    }
    basis.sort();
    basis
}

/// Coordinates shared by a list of aligned classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedBasis {
    pub integers: CoprimeBasis,
    pub polys: Vec<RatPoly>,
}

/// Re-expresses every class as an F2 vector `[sign, integer parities...,
/// polynomial parities...]` over a common refined basis.
pub fn align(classes: &[SquareClass]) -> (Vec<Vec<bool>>, AlignedBasis) {
    let ints: Vec<BigUint> = classes.iter().flat_map(|c| c.atoms.iter().cloned()).collect();
    let integers = CoprimeBasis::refine_unsigned(&ints);
    let polys = refine_polys(classes.iter().flat_map(|c| c.poly_atoms.iter().cloned()));
    let width = 1 + integers.len() + polys.len();
    let vecs = classes
        .iter()
        .map(|c| {
            let mut v = vec![false; width];
            v[0] = c.negative;
            for a in &c.atoms {
                let e = integers.exponents(a).expect("basis covers atoms");
                for (i, ei) in e.iter().enumerate() {
                    v[1 + i] ^= ei % 2 == 1;
                }
            }
            for pa in &c.poly_atoms {
                let mut rest = pa.clone();
                for (j, b) in polys.iter().enumerate() {
                    while !rest.is_constant() {
                        let (q, r) = rest.div_rem(b).expect("nonzero");
                        if !r.is_zero() {
                            break;
                        }
                        rest = q;
                        v[1 + integers.len() + j] ^= true;
                    }
                }
            }
            v
        })
        .collect();
    (vecs, AlignedBasis { integers, polys })
}

/// Nonzero F2 combination of `rows` summing to zero, if any.
pub fn f2_kernel_vector(rows: &[Vec<bool>]) -> Option<Vec<bool>> {
    let k = rows.len();
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    // each working row carries its combination of inputs
    let mut work: Vec<(Vec<bool>, Vec<bool>)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.resize(width, false);
            let mut comb = vec![false; k];
            comb[i] = true;
            (v, comb)
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..width {
        let Some(sel) = (pivot_row..k).find(|&r| work[r].0[col]) else { continue };
        work.swap(pivot_row, sel);
        let (pv, pc) = work[pivot_row].clone();
        for r in 0..k {
            if r != pivot_row && work[r].0[col] {
                for c in 0..width {
                    work[r].0[c] ^= pv[c];
                }
                for c in 0..k {
                    work[r].1[c] ^= pc[c];
                }
            }
        }
        pivot_row += 1;
    }
    work.into_iter().find(|(v, _)| v.iter().all(|b| !b)).map(|(_, c)| c)
}

/// Subset of `gens` (by index) whose sum is `target`, if one exists.
pub fn f2_solve(target: &[bool], gens: &[Vec<bool>]) -> Option<Vec<usize>> {
    let width = gens.iter().map(|r| r.len()).chain([target.len()]).max().unwrap_or(0);
    let mut basis: Vec<(Vec<bool>, Vec<bool>)> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let mut v = g.clone();
        v.resize(width, false);
        let mut comb = vec![false; gens.len()];
        comb[i] = true;
        reduce(&mut v, &mut comb, &basis);
        if v.iter().any(|&b| b) {
            basis.push((v, comb));
        }
    }
    let mut t = target.to_vec();
    t.resize(width, false);
    let mut comb = vec![false; gens.len()];
    reduce(&mut t, &mut comb, &basis);
    t.iter().all(|b| !b).then(|| (0..gens.len()).filter(|&i| comb[i]).collect())
}

fn reduce(v: &mut [bool], comb: &mut [bool], basis: &[(Vec<bool>, Vec<bool>)]) {
    for (bv, bc) in basis {
        let lead = bv.iter().position(|&b| b).expect("nonzero basis row");
        if v[lead] {
            for (x, y) in v.iter_mut().zip(bv) {
                *x ^= y;
            }
            for (x, y) in comb.iter_mut().zip(bc) {
                *x ^= y;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Independence {
    pub independent: bool,
    /// Indicator of a nonempty subset with square product.
    pub witness: Option<Vec<u8>>,
}

pub fn independent(classes: &[SquareClass]) -> Independence {
    let (vecs, _) = align(classes);
    match f2_kernel_vector(&vecs) {
        Some(w) => Independence {
            independent: false,
            witness: Some(w.into_iter().map(u8::from).collect()),
        },
        None => Independence { independent: true, witness: None },
    }
}

/// Indices of generators whose product is `target`, if it lies in their span.
pub fn in_span(target: &SquareClass, generators: &[SquareClass]) -> Option<Vec<usize>> {
    let mut all = vec![target.clone()];
    all.extend(generators.iter().cloned());
    let (vecs, _) = align(&all);
    f2_solve(&vecs[0], &vecs[1..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{is_rational_square, rat, rat_frac};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn cls(x: i64) -> SquareClass {
        SquareClass::of_rational(&rat(x)).unwrap()
    }

    #[test]
    fn rational_examples() {
        assert_eq!(cls(8), cls(2));
        assert_eq!(cls(-1), SquareClass::minus_one());
        assert!(SquareClass::of_rational(&rat_frac(4, 9)).unwrap().is_formally_trivial());
        assert!(SquareClass::of_rational(&rat(0)).is_err());
        let b = CoprimeBasis::refine(&[BigInt::from(6), BigInt::from(10)]);
        let c = class_of_rational(&rat(15), &b).unwrap();
        assert_eq!(c.describe(), "3*5");
        // basis that does not cover the input is refined
        let c = class_of_rational(&rat(14), &b).unwrap();
        assert_eq!(c.describe(), "2*7");
    }

    #[test]
    fn polynomial_examples() {
        let p = RatPoly::from_ints(&[-4, 4]);
        let g = class_of_tpolynomial(&p, ClassMode::Geometric).unwrap();
        assert_eq!(g.poly_atoms.iter().next().unwrap(), &RatPoly::from_ints(&[-1, 1]));
        assert!(!g.negative && g.atoms.is_empty());
        let sq = RatPoly::from_ints(&[1, -2, 1]);
        assert!(class_of_tpolynomial(&sq, ClassMode::Geometric).unwrap().is_formally_trivial());
        let a = class_of_tpolynomial(&p, ClassMode::Arithmetic).unwrap();
        assert_eq!(a.geometric(), g);
        assert!(!a.negative);
        let m = class_of_tpolynomial(&RatPoly::from_ints(&[4, -4]), ClassMode::Arithmetic).unwrap();
        assert!(m.negative);
        assert!(class_of_tpolynomial(&RatPoly::zero(), ClassMode::Geometric).is_err());
    }

    #[test]
    fn independence_examples() {
        let r = independent(&[cls(2), cls(3), cls(6)]);
        assert!(!r.independent);
        assert_eq!(r.witness, Some(vec![1, 1, 1]));
        assert!(independent(&[cls(-1), cls(2), cls(5)]).independent);
        assert_eq!(independent(&[cls(2), cls(2)]).witness, Some(vec![1, 1]));
        assert_eq!(in_span(&cls(6), &[cls(2), cls(3)]), Some(vec![0, 1]));
        assert_eq!(in_span(&cls(5), &[cls(2), cls(3)]), None);
        assert_eq!(in_span(&SquareClass::trivial(), &[]), Some(vec![]));
        // atoms that are not coprime across classes
        assert!(!independent(&[cls(12), cls(18), cls(6)]).independent);
        assert!(cls(12).same_class(&cls(3)));
    }

    #[test]
    fn class_json_shape() {
        let j = serde_json::to_value(cls(-10)).unwrap();
        assert_eq!(j, serde_json::json!({"sign": -1, "parities": [["10", 1]]}));
        let back: SquareClass = serde_json::from_value(j).unwrap();
        assert_eq!(back, cls(-10));
    }

    fn small_rat() -> impl Strategy<Value = BigRat> {
        (prop_oneof![-300i64..-1, 1i64..300], 1i64..60).prop_map(|(n, d)| rat_frac(n, d))
    }

    /// Odd-exponent primes of a small integer by trial division.
    fn odd_primes(mut n: u64) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        let mut p = 2;
        while p * p <= n {
            while n % p == 0 {
                n /= p;
                if !out.remove(&p) {
                    out.insert(p);
                }
            }
            p += 1;
        }
        if n > 1 && !out.remove(&n) {
            out.insert(n);
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn class_is_multiplicative(x in small_rat(), y in small_rat()) {
            let cx = SquareClass::of_rational(&x).unwrap();
            let cy = SquareClass::of_rational(&y).unwrap();
            let cxy = SquareClass::of_rational(&(&x * &y)).unwrap();
            prop_assert!(cx.mul(&cy).same_class(&cxy));
            let z = &x * &y * &y;
            prop_assert!(SquareClass::of_rational(&z).unwrap().same_class(&cx));
        }

        #[test]
        fn equal_iff_ratio_square(x in small_rat(), y in small_rat()) {
            let cx = SquareClass::of_rational(&x).unwrap();
            let cy = SquareClass::of_rational(&y).unwrap();
            prop_assert_eq!(cx.same_class(&cy), is_rational_square(&(&x / &y)));
        }

        #[test]
        fn independence_matches_brute_force(v in proptest::collection::vec(prop_oneof![-200i64..-1, 2i64..200], 1..=12)) {
            let classes: Vec<SquareClass> = v.iter().map(|&x| cls(x)).collect();
            let k = v.len();
            let mut dependent = false;
            for mask in 1u32..(1 << k) {
                let mut neg = false;
                let mut odd = BTreeSet::new();
                for (i, &x) in v.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        neg ^= x < 0;
                        odd = odd.symmetric_difference(&odd_primes(x.unsigned_abs())).cloned().collect();
                    }
                }
                if !neg && odd.is_empty() {
                    dependent = true;
                    break;
                }
            }
            let r = independent(&classes);
            prop_assert_eq!(r.independent, !dependent);
            if let Some(w) = r.witness {
                let sub: Vec<SquareClass> = classes.iter().zip(&w).filter(|(_, &b)| b == 1).map(|(c, _)| c.clone()).collect();
                prop_assert!(!sub.is_empty());
                let prod = sub.iter().fold(SquareClass::trivial(), |a, c| a.mul(c));
                prop_assert!(prod.is_trivial());
            }
        }
    }
}
