use super::{integer_resultant, Poly, RatPoly, Ring};
use crate::error::{invalid, Error, Result};
use crate::exact::BigRat;

fn sign_ring<R: Ring>(negative: bool, x: R) -> R {
    if negative {
        x.neg()
    } else {
        x
    }
}

/// Sylvester resultant by the subresultant PRS, exact over any integral
/// domain implementing [`Ring`].
pub fn resultant_subresultant<R: Ring>(p: &Poly<R>, q: &Poly<R>) -> R {
    if p.is_zero() || q.is_zero() {
        return R::zero_elem();
    }
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut neg = false;
    if a.deg() < b.deg() {
        std::mem::swap(&mut a, &mut b);
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            neg = true;
        }
    }
    if b.deg() == 0 {
        return sign_ring(neg, b.lc().pow(a.deg() as u64));
    }
    let mut g = R::one_elem();
    let mut h = R::one_elem();
    loop {
        let delta = a.deg() - b.deg();
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            neg = !neg;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        let div = g.mul(&h.pow(delta as u64));
        b = r.exact_div_scalar(&div);
        if b.is_zero() {
            return R::zero_elem();
        }
        g = a.lc();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta as u64).exact_div(&h.pow(delta as u64 - 1))
        };
        if b.deg() == 0 {
            let da = a.deg() as u64;
            let hh = b.lc().pow(da).exact_div(&h.pow(da - 1));
            return sign_ring(neg, hh);
        }
    }
}

/// `(-1)^(n(n-1)/2) Res(P, P') / lc(P)` over any integral domain.
pub fn discriminant_subresultant<R: Ring>(p: &Poly<R>) -> Result<R> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return invalid("discriminant of a constant polynomial");
    }
    let r = resultant_subresultant(p, &p.derivative()).exact_div(&p.lc());
    Ok(sign_ring((n * (n - 1) / 2) % 2 == 1, r))
}

/// Exact resultant over `Q`, via multi-modular reconstruction of the
/// integer resultant of the denominator-cleared inputs.
pub fn resultant(p: &RatPoly, q: &RatPoly) -> Result<BigRat> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (lp, ip) = p.integer_form();
    let (lq, iq) = q.integer_form();
    let r = integer_resultant(&ip, &iq);
    let den = num_traits::pow(lp, q.deg()) * num_traits::pow(lq, p.deg());
    Ok(BigRat::new(r, den))
}

pub fn discriminant(p: &RatPoly) -> Result<BigRat> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return invalid("discriminant of a constant polynomial");
    }
    let r = resultant(p, &p.derivative())? / p.lc();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -r } else { r })
}

/// Checks `disc(PQ) = disc(P) disc(Q) Res(P, Q)^2` exactly.
///
/// Errors when a precondition fails (a factor is constant, or `PQ` is not
/// separable).
pub fn check_products_identity(p: &RatPoly, q: &RatPoly) -> Result<bool> {
    if p.is_constant() || q.is_constant() {
        return invalid("both factors need degree at least 1");
    }
    let pq = p.mul(q);
    if !pq.is_squarefree() {
        return invalid("P*Q is not separable");
    }
    let lhs = discriminant(&pq)?;
    let r = resultant(p, q)?;
    let rhs = discriminant(p)? * discriminant(q)? * &r * &r;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::poly::TPoly;
    use proptest::prelude::*;

    #[test]
    fn resultant_examples() {
        let a = RatPoly::from_ints(&[-1, 1]);
        let b = RatPoly::from_ints(&[-2, 1]);
        assert_eq!(resultant(&a, &b).unwrap(), rat(-1));
        assert_eq!(resultant_subresultant(&a, &b), rat(-1));
        assert!(resultant(&RatPoly::zero(), &b).is_err());

        // (2x, x^2 + 1 - t) over Q[t]
        let p: TPoly = RatPoly::from_ints(&[0, 2]).to_tpoly();
        let q: TPoly = RatPoly::from_ints(&[1, 0, 1]).minus_t();
        let r = resultant_subresultant(&p, &q);
        assert_eq!(r, RatPoly::from_ints(&[4, -4]));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&RatPoly::from_ints(&[1, 0, 1])).unwrap(), rat(-4));
        assert_eq!(discriminant(&RatPoly::from_ints(&[2, 0, 2, 0, 1])).unwrap(), rat(512));
        assert_eq!(discriminant(&RatPoly::from_ints(&[1, -2, 1])).unwrap(), rat(0));
        assert!(discriminant(&RatPoly::from_ints(&[3])).is_err());
        assert_eq!(
            discriminant_subresultant(&RatPoly::from_ints(&[2, 0, 2, 0, 1])).unwrap(),
            rat(512)
        );
        // cubic: -4p^3 - 27q^2 for x^3 + px + q
        let c = RatPoly::from_ints(&[5, -3, 0, 1]);
        assert_eq!(discriminant(&c).unwrap(), rat(4 * 27 - 27 * 25));
    }

    #[test]
    fn products_identity_examples() {
        let a = RatPoly::from_ints(&[-1, 1]);
        let b = RatPoly::from_ints(&[-2, 1]);
        assert!(check_products_identity(&a, &b).unwrap());
        assert_eq!(discriminant(&a.mul(&b)).unwrap(), rat(1));
        let x = RatPoly::x();
        assert!(check_products_identity(&x, &x).is_err());
    }

    fn poly_strategy(max_deg: usize) -> impl Strategy<Value = RatPoly> {
        (proptest::collection::vec(-9i64..=9, max_deg), 1i64..=5, prop_oneof![Just(1i64), Just(-1)])
            .prop_map(|(mut v, top, s)| {
                v.push(top * s);
                RatPoly::from_ints(&v)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn resultant_is_multiplicative(p in poly_strategy(3), q in poly_strategy(2), r in poly_strategy(2)) {
            let lhs = resultant(&p, &q.mul(&r)).unwrap();
            prop_assert_eq!(lhs, resultant(&p, &q).unwrap() * resultant(&p, &r).unwrap());
        }

        #[test]
        fn modular_matches_subresultant(p in poly_strategy(4), q in poly_strategy(3)) {
            prop_assert_eq!(resultant(&p, &q).unwrap(), resultant_subresultant(&p, &q));
        }

        #[test]
        fn antisymmetry(p in poly_strategy(4), q in poly_strategy(3)) {
            let s = if (p.deg() * q.deg()) % 2 == 1 { rat(-1) } else { rat(1) };
            prop_assert_eq!(resultant(&p, &q).unwrap(), s * resultant(&q, &p).unwrap());
        }

        #[test]
        fn products_identity_random(p in poly_strategy(5), q in poly_strategy(4)) {
            prop_assume!(p.mul(&q).is_squarefree());
            prop_assert!(check_products_identity(&p, &q).unwrap());
        }
    }
}
