//! Newton polygons, Eisenstein tests and the two-segment local certificate
//! that forces the Galois group of every `f(x) - α` over `Q(α)` to be `A_d`
//! or `S_d`.

use crate::error::{invalid, Error, Result};
use crate::exact::{is_prime_u64, val_p_unchecked, BigRat, Valuation};
use crate::poly::RatPoly;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Lower convex hull of `(i, v_p(a_i))` over the nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub prime: u64,
    pub vertices: Vec<(usize, i64)>,
}

/// A segment of the polygon: slope as a reduced fraction and its horizontal
/// length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub num: i64,
    pub den: i64,
    pub length: usize,
}

impl NewtonPolygon {
    pub fn slopes(&self) -> Vec<Slope> {
        self.vertices
            .windows(2)
            .map(|w| {
                let (dx, dy) = ((w[1].0 - w[0].0) as i64, w[1].1 - w[0].1);
                let g = num_integer::gcd(dx, dy.abs()).max(1);
                Slope { num: dy / g, den: dx / g, length: (w[1].0 - w[0].0) }
            })
            .collect()
    }

    /// Slopes with equal values merged, sorted ascending.
    pub fn slope_multiset(&self) -> Vec<Slope> {
        let mut out: Vec<Slope> = Vec::new();
        for s in self.slopes() {
            match out.iter_mut().find(|o| o.num == s.num && o.den == s.den) {
                Some(o) => o.length += s.length,
                None => out.push(s),
            }
        }
        out.sort_by(|a, b| (a.num * b.den).cmp(&(b.num * a.den)));
        out
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.vertices.iter().map(|(i, v)| format!("({i},{v})")).collect();
        write!(f, "NP_{}[{}]", self.prime, pts.join(" "))
    }
}

pub fn newton_polygon(f: &RatPoly, p: u64) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let pts: Vec<(usize, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match val_p_unchecked(c, p) {
            Valuation::Finite(v) => (i, v),
            Valuation::Infinite => unreachable!(),
        })
        .collect();
    // monotone chain, lower hull
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as i128 - a.0 as i128) * (pt.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (pt.0 as i128 - a.0 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    Ok(NewtonPolygon { prime: p, vertices: hull })
}

pub fn is_eisenstein(f: &RatPoly, q: u64) -> bool {
    let Some(d) = f.degree() else { return false };
    if d < 2 || !is_prime_u64(q) {
        return false;
    }
    let v = |c: &BigRat| val_p_unchecked(c, q);
    v(&f.lc()) == Valuation::Finite(0)
        && f.coeffs()[..d].iter().all(|c| v(c) >= Valuation::Finite(1))
        && v(&f.coeff(0)) == Valuation::Finite(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalCheck {
    /// `d/2 < p < d - 2`, strict.
    PrimeWindow,
    /// Eisenstein at `q`.
    Eisenstein,
    /// Polygon at `p` is exactly `(0,2)-(p,0)-(d,0)`.
    TwoSegmentPolygon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigLocalEvidence {
    pub degree: usize,
    pub p: u64,
    pub q: u64,
    pub polygon_at_p: NewtonPolygon,
    pub eisenstein_at_q: bool,
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum BigLocalOutcome {
    Certified(BigLocalEvidence),
    Refused { check: LocalCheck, reason: String },
}

impl BigLocalOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, BigLocalOutcome::Certified(_))
    }
}

/// Checks the wild-ramification shape at `p` and the Eisenstein shape at `q`.
/// A positive outcome is uniform in the level: it covers every `α` in every
/// backward orbit of 0.
pub fn big_local_certificate(f: &RatPoly, p: u64, q: u64) -> Result<BigLocalOutcome> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d % 2 == 1 {
        return invalid(format!("degree {d} is odd"));
    }
    if p == q {
        return invalid("p and q must differ");
    }
    for r in [p, q] {
        if !is_prime_u64(r) {
            return Err(Error::NotPrime(r.to_string()));
        }
    }
    let refuse = |check, reason: String| Ok(BigLocalOutcome::Refused { check, reason });
    let (d64, p64) = (d as u64, p);
    if !(2 * p64 > d64 && p64 + 2 < d64) {
        return refuse(
            LocalCheck::PrimeWindow,
            format!("need d/2 < p < d-2 with d = {d}, p = {p}"),
        );
    }
    if !is_eisenstein(f, q) {
        return refuse(LocalCheck::Eisenstein, format!("not Eisenstein at {q}"));
    }
    let np = newton_polygon(f, p)?;
    let want = vec![(0usize, 2i64), (p as usize, 0), (d, 0)];
    if np.vertices != want {
        return refuse(
            LocalCheck::TwoSegmentPolygon,
            format!("polygon at {p} is {np}, need (0,2) (p,0) (d,0)"),
        );
    }
    Ok(BigLocalOutcome::Certified(BigLocalEvidence {
        degree: d,
        p,
        q,
        polygon_at_p: np,
        eisenstein_at_q: true,
        justification: format!(
            "d/2 < {p} < d-2 (d = {d}); Eisenstein at {q}; polygon at {p} is (0,2)-({p},0)-({d},0)"
        ),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    #[test]
    fn polygon_examples() {
        let f = RatPoly::from_ints(&[-2, 0, 0, 1]);
        assert_eq!(newton_polygon(&f, 2).unwrap().vertices, vec![(0, 1), (3, 0)]);
        let g = RatPoly::from_ints(&[1, 0, 1]);
        assert_eq!(newton_polygon(&g, 2).unwrap().vertices, vec![(0, 0), (2, 0)]);
        assert!(newton_polygon(&RatPoly::zero(), 2).is_err());
        assert!(newton_polygon(&g, 4).is_err());
        // leading zeros: x^2 (x + 3)
        let h = RatPoly::from_ints(&[0, 0, 3, 1]);
        assert_eq!(newton_polygon(&h, 3).unwrap().vertices, vec![(2, 1), (3, 0)]);
    }

    #[test]
    fn eisenstein_examples() {
        assert!(is_eisenstein(&RatPoly::from_ints(&[-2, 0, 0, 1]), 2));
        for q in [2, 3, 5, 7, 11] {
            assert!(!is_eisenstein(&RatPoly::from_ints(&[1, 0, 1]), q));
        }
        assert!(!is_eisenstein(&RatPoly::from_ints(&[4, 0, 1]), 2));
    }

    /// Degree 20 with v_17 = 2 at the constant, 0 at x^17 and x^20, and
    /// every other coefficient above the two segments; Eisenstein at 3.
    fn two_segment_example() -> RatPoly {
        let mut c = vec![rat(0); 21];
        c[0] = rat(3 * 17 * 17);
        c[1] = rat(3 * 17 * 17);
        c[5] = rat(3 * 17 * 17);
        c[17] = rat(3);
        c[19] = rat(3 * 17);
        c[20] = rat(1);
        RatPoly::new(c)
    }

    #[test]
    fn big_local_examples() {
        let f = two_segment_example();
        assert!(big_local_certificate(&f, 17, 3).unwrap().is_certified());
        let out = big_local_certificate(&RatPoly::from_ints(&[1, 0, 1]), 3, 5).unwrap();
        assert!(matches!(out, BigLocalOutcome::Refused { check: LocalCheck::PrimeWindow, .. }));
        assert!(big_local_certificate(&RatPoly::from_ints(&[1, 0, 0, 1]), 3, 5).is_err());
        // Eisenstein at 3 but flat at 17
        let mut c = f.coeffs().to_vec();
        c[0] = rat(3);
        c[1] = rat(3);
        let flat = RatPoly::new(c);
        let out = big_local_certificate(&flat, 17, 3).unwrap();
        assert!(matches!(
            out,
            BigLocalOutcome::Refused { check: LocalCheck::TwoSegmentPolygon, .. }
        ));
    }

    #[test]
    fn window_is_strict() {
        // d = 20 admits p in (10, 18): 11, 13, 17; p = 19 is outside
        let f = two_segment_example();
        let out = big_local_certificate(&f, 19, 3).unwrap();
        assert!(matches!(out, BigLocalOutcome::Refused { check: LocalCheck::PrimeWindow, .. }));
    }

    fn poly_at(p: i64) -> impl Strategy<Value = RatPoly> {
        proptest::collection::vec((1i64..=4, 0u32..=3), 1..=5).prop_map(move |v| {
            RatPoly::new(v.iter().map(|&(u, e)| rat(u * p.pow(e))).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn eisenstein_iff_single_segment(c in proptest::collection::vec((1i64..=4, 0u32..=2), 3..=6)) {
            let f = RatPoly::new(c.iter().map(|&(u, e)| rat(u * 5i64.pow(e))).collect());
            let d = f.deg();
            let np = newton_polygon(&f, 5).unwrap();
            let single = np.vertices == vec![(0, 1), (d, 0)];
            prop_assert_eq!(is_eisenstein(&f, 5), single);
        }

        #[test]
        fn product_merges_slopes(f in poly_at(3), g in poly_at(3)) {
            let a = newton_polygon(&f, 3).unwrap();
            let b = newton_polygon(&g, 3).unwrap();
            let ab = newton_polygon(&f.mul(&g), 3).unwrap();
            let mut merged = a.slopes();
            merged.extend(b.slopes());
            let mut expect: Vec<Slope> = Vec::new();
            for s in merged {
                match expect.iter_mut().find(|o| o.num == s.num && o.den == s.den) {
                    Some(o) => o.length += s.length,
                    None => expect.push(s),
                }
            }
            expect.sort_by(|x, y| (x.num * y.den).cmp(&(y.num * x.den)));
            prop_assert_eq!(ab.slope_multiset(), expect);
        }

        #[test]
        fn certificate_never_survives_mutation(idx in 0usize..21, bump in 1u32..=2) {
            let base = two_segment_example();
            let mut c = base.coeffs().to_vec();
            let factor = if bump == 1 { rat(17) } else { rat(1) / rat(3) };
            if c[idx].is_zero() { c[idx] = rat(1); } else { c[idx] *= factor; }
            let g = RatPoly::new(c);
            prop_assume!(g.deg() == 20);
            let np = newton_polygon(&g, 17).unwrap();
            let ok = is_eisenstein(&g, 3) && np.vertices == vec![(0, 2), (17, 0), (20, 0)];
            prop_assert_eq!(big_local_certificate(&g, 17, 3).unwrap().is_certified(), ok);
        }
    }
}
