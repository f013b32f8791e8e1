//! Iterated monodromy over `Q(t)`: `t` is an indeterminate and the
//! representation is surjective through level `N` when the little Galois
//! group of `f(x) - t` is `A_d` or `S_d` and each odd-multiplicity support
//! `Γ'_n` of critical images is fresh.
//!
//! `Γ'_n` is read off `D_n(t) = disc(f^n(x) - t)`: its odd-multiplicity
//! roots are exactly the points of `Γ'_n`, so no root-finding is needed.

use crate::certify::Verdict;
use crate::discseq::{disc_poly, disc_poly_sequence, DiscPolyEntry};
use crate::error::{Error, Result};
use crate::poly::RatPoly;
use crate::squareclass::{align, SquareClass};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    /// Established by [`morse_check`].
    Morse,
    Assumed,
}

impl std::str::FromStr for Hypothesis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "morse" => Ok(Hypothesis::Morse),
            "assumed" => Ok(Hypothesis::Assumed),
            _ => Err(Error::Parse(format!("unknown hypothesis mode {s:?}"))),
        }
    }
}

/// Product of the distinct monic irreducible factors.
fn radical(p: &RatPoly) -> Result<RatPoly> {
    Ok(p.squarefree_decomposition()?.iter().fold(RatPoly::one(), |acc, q| acc.mul(q)))
}

/// Sufficient test for full symmetric geometric monodromy of `f(x) - t`:
/// simple critical points with pairwise distinct critical values.
pub fn morse_check(f: &RatPoly) -> Result<bool> {
    let d = f.degree().filter(|&d| d >= 2).ok_or_else(|| Error::InvalidInput(format!("need deg f >= 2, got {f}")))?;
    let fp = f.derivative();
    if !fp.gcd(&fp.derivative()).is_constant() {
        return Ok(false);
    }
    let disc = disc_poly(f, 1)?;
    Ok(radical(&disc)?.deg() == d - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PcfVerdict {
    InfiniteOrbitDetected { level: usize },
    PcfDetected { level: usize },
    UndeterminedAtCap { cap: usize },
}

/// Odd-multiplicity supports of `D_1, ..., D_N` over one coprime basis.
struct Supports {
    basis: Vec<RatPoly>,
    rows: Vec<Vec<bool>>,
}

fn supports(entries: &[DiscPolyEntry]) -> Supports {
    let classes: Vec<SquareClass> = entries.iter().map(|e| e.geometric.clone()).collect();
    let (vecs, basis) = align(&classes);
    let offset = 1 + basis.integers.elements().len();
    let rows = vecs.into_iter().map(|v| v[offset..].to_vec()).collect();
    Supports { basis: basis.polys, rows }
}

fn pcf_from(entries: &[DiscPolyEntry]) -> PcfVerdict {
    let s = supports(entries);
    let mut seen = vec![false; s.basis.len()];
    let (mut max_deg, mut max_height) = (0usize, 0u64);
    let mut quiet = 0;
    for (i, row) in s.rows.iter().enumerate() {
        let level = i + 1;
        let fresh: Vec<usize> = (0..row.len()).filter(|&j| row[j] && !seen[j]).collect();
        if level > 1 {
            let exceeds = fresh.iter().any(|&j| s.basis[j].deg() > max_deg || s.basis[j].max_height_bits() > max_height);
            if exceeds {
                return PcfVerdict::InfiniteOrbitDetected { level };
            }
        }
        quiet = if fresh.is_empty() && level > 1 { quiet + 1 } else { 0 };
        for j in (0..row.len()).filter(|&j| row[j]) {
            seen[j] = true;
            max_deg = max_deg.max(s.basis[j].deg());
            max_height = max_height.max(s.basis[j].max_height_bits());
        }
        if quiet >= 2 && entries[i].squarefree.max_height_bits() <= max_height {
            return PcfVerdict::PcfDetected { level };
        }
    }
    PcfVerdict::UndeterminedAtCap { cap: entries.len() }
}

/// Heuristic post-critical finiteness test from the supports of `D_n`,
/// `n <= cap`.
pub fn pcf_detect(f: &RatPoly, cap: usize) -> Result<PcfVerdict> {
    if cap < 2 {
        return Err(Error::InvalidInput(format!("pcf cap must be at least 2, got {cap}")));
    }
    Ok(pcf_from(&disc_poly_sequence(f, cap)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisEvidence {
    pub mode: Hypothesis,
    /// Result of [`morse_check`] when it was run.
    pub morse: Option<bool>,
    pub established: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Freshness {
    pub level: usize,
    /// Odd-multiplicity part of `D_n`, monic.
    pub squarefree: RatPoly,
    pub support: Vec<RatPoly>,
    pub new_factors: Vec<RatPoly>,
    pub fresh: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MonodromyReport {
    pub poly: RatPoly,
    pub levels: usize,
    pub hypothesis: HypothesisEvidence,
    pub pcf: PcfVerdict,
    pub freshness: Vec<Freshness>,
    /// Classes of `D_n` over `Q(t)` with constants kept; informational.
    pub arithmetic_classes: Vec<SquareClass>,
    pub verdict: Verdict,
}

/// `s` divides the radical of the product of `earlier`.
fn covered_by(s: &RatPoly, earlier: &[RatPoly]) -> Result<bool> {
    if s.is_constant() {
        return Ok(true);
    }
    let prod = earlier.iter().fold(RatPoly::one(), |acc, q| acc.mul(q));
    if prod.is_constant() {
        return Ok(false);
    }
    Ok(radical(&prod)?.rem(s)?.is_zero())
}

pub fn certify_monodromy(f: &RatPoly, levels: usize, hypothesis: Hypothesis) -> Result<MonodromyReport> {
    let d = f.degree().unwrap_or(0);
    if d < 2 || d % 2 == 1 {
        return Err(Error::InvalidInput(format!("need even degree >= 2, got {d}")));
    }
    if levels == 0 {
        return Err(Error::InvalidInput("levels must be at least 1".into()));
    }
    let morse = match hypothesis {
        Hypothesis::Morse => Some(morse_check(f)?),
        Hypothesis::Assumed => None,
    };
    let evidence = HypothesisEvidence { mode: hypothesis, morse, established: morse.unwrap_or(true) };

    let entries = disc_poly_sequence(f, levels)?;
    let s = supports(&entries);
    let mut freshness = Vec::new();
    let mut seen = vec![false; s.basis.len()];
    for (i, e) in entries.iter().enumerate() {
        let row = &s.rows[i];
        let earlier: Vec<RatPoly> = entries[..i].iter().map(|x| x.squarefree.clone()).collect();
        let fresh = !covered_by(&e.squarefree, &earlier)?;
        let new_idx: Vec<usize> = (0..row.len()).filter(|&j| row[j] && !seen[j]).collect();
        if fresh != !new_idx.is_empty() {
            return Err(Error::Internal(format!("freshness routes disagree at level {}", i + 1)));
        }
        freshness.push(Freshness {
            level: i + 1,
            squarefree: e.squarefree.clone(),
            support: (0..row.len()).filter(|&j| row[j]).map(|j| s.basis[j].clone()).collect(),
            new_factors: new_idx.iter().map(|&j| s.basis[j].clone()).collect(),
            fresh,
        });
        for j in (0..row.len()).filter(|&j| row[j]) {
            seen[j] = true;
        }
    }
    let pcf = if levels >= 2 { pcf_from(&entries) } else { PcfVerdict::UndeterminedAtCap { cap: levels } };
    let verdict = match freshness.iter().find(|r| !r.fresh) {
        Some(r) => Verdict::CriterionFailedAtLevel(r.level),
        None if evidence.established => Verdict::SurjectiveThroughLevel(levels),
        None => Verdict::Unknown,
    };
    Ok(MonodromyReport {
        poly: f.clone(),
        levels,
        hypothesis: evidence,
        pcf,
        freshness,
        arithmetic_classes: entries.iter().map(|e| e.arithmetic.clone()).collect(),
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discseq::t_minus;
    use crate::exact::{rat, rat_frac, BigRat};
    use crate::squareclass::{class_of_tpolynomial, ClassMode};
    use proptest::prelude::*;

    fn p(v: &[i64]) -> RatPoly {
        RatPoly::from_ints(v)
    }

    #[test]
    fn morse_examples() {
        assert!(morse_check(&p(&[0, 1, 0, 0, 1])).unwrap());
        assert!(morse_check(&p(&[7, 0, 1])).unwrap());
        // x^4 - 2x^2: critical values -1, 0, -1
        assert!(!morse_check(&p(&[0, 0, -2, 0, 1])).unwrap());
        // f' = 20 (x - C) g^2 has a repeated factor
        let f = crate::family::build_family_poly(9, 6, &rat(1), &rat(2), &rat(3), &rat(4)).unwrap();
        assert!(!morse_check(&f).unwrap());
        assert!(morse_check(&p(&[1])).is_err());
    }

    #[test]
    fn pcf_examples() {
        assert!(matches!(pcf_detect(&p(&[-2, 0, 1]), 4).unwrap(), PcfVerdict::PcfDetected { .. }));
        assert!(matches!(pcf_detect(&p(&[0, 0, 1]), 3).unwrap(), PcfVerdict::PcfDetected { .. }));
        assert_eq!(pcf_detect(&p(&[1, 0, 1]), 3).unwrap(), PcfVerdict::InfiniteOrbitDetected { level: 2 });
        assert!(matches!(pcf_detect(&p(&[-2, 0, 1]), 2).unwrap(), PcfVerdict::UndeterminedAtCap { cap: 2 }));
        assert!(pcf_detect(&p(&[1, 0, 1]), 1).is_err());
    }

    #[test]
    fn stoll_monodromy() {
        let r = certify_monodromy(&p(&[1, 0, 1]), 3, Hypothesis::Morse).unwrap();
        assert_eq!(r.verdict, Verdict::SurjectiveThroughLevel(3));
        let sup: Vec<Vec<RatPoly>> = r.freshness.iter().map(|x| x.support.clone()).collect();
        assert_eq!(sup, vec![vec![t_minus(&rat(1))], vec![t_minus(&rat(2))], vec![t_minus(&rat(5))]]);
    }

    #[test]
    fn degenerate_monodromy() {
        let r = certify_monodromy(&p(&[-2, 0, 1]), 3, Hypothesis::Morse).unwrap();
        assert_eq!(r.verdict, Verdict::CriterionFailedAtLevel(3));
        assert!(r.freshness[1].fresh && !r.freshness[2].fresh);
        assert_eq!(r.freshness[2].support, vec![t_minus(&rat(2))]);
    }

    #[test]
    fn assumed_hypothesis() {
        // x^4 + x^2 + 1 is not Morse (critical values 1, 3/4, 3/4), but with
        // the group hypothesis assumed the remaining test is freshness
        let f = p(&[1, 0, 1, 0, 1]);
        assert!(!morse_check(&f).unwrap());
        let m = certify_monodromy(&f, 2, Hypothesis::Morse).unwrap();
        assert_eq!(m.verdict, Verdict::Unknown);
        let a = certify_monodromy(&f, 2, Hypothesis::Assumed).unwrap();
        assert!(a.freshness.iter().all(|r| r.fresh));
        assert_eq!(a.verdict, Verdict::SurjectiveThroughLevel(2));
    }

    #[test]
    fn odd_degree_rejected() {
        assert!(certify_monodromy(&p(&[0, 1, 0, 1]), 2, Hypothesis::Assumed).is_err());
    }

    fn orbit(c: &BigRat, n: usize) -> Vec<BigRat> {
        let mut v = vec![rat(0)];
        for _ in 0..n {
            let x = v.last().unwrap();
            v.push(x * x + c);
        }
        v
    }

    #[test]
    fn freshness_matches_orbit_comparison() {
        let mut cs: Vec<BigRat> = vec![rat(0), rat(-1), rat(-2)];
        let mut s = 12345u64;
        while cs.len() < 20 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let num = (s >> 33) as i64 % 13 - 6;
            let den = ((s >> 20) % 3 + 1) as i64;
            cs.push(rat_frac(num, den));
        }
        for c in cs {
            let f = RatPoly::new(vec![c.clone(), rat(0), rat(1)]);
            let r = certify_monodromy(&f, 4, Hypothesis::Morse).unwrap();
            let o = orbit(&c, 4);
            for n in 1..=4 {
                let direct = !o[1..n].contains(&o[n]);
                assert_eq!(r.freshness[n - 1].fresh, direct, "c = {c}, level {n}");
            }
        }
    }

    fn quartic() -> impl Strategy<Value = RatPoly> {
        proptest::collection::vec(-4i64..=4, 4).prop_map(|mut v| {
            v.push(1);
            RatPoly::from_ints(&v)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn morse_implies_squarefree_disc(f in quartic()) {
            if morse_check(&f).unwrap() {
                let disc = disc_poly(&f, 1).unwrap();
                prop_assert!(disc.gcd(&disc.derivative()).is_constant());
            }
        }

        #[test]
        fn squarefree_part_round_trip(c in (-6i64..=6, 1i64..=3), n in 1usize..=3) {
            let f = RatPoly::new(vec![rat_frac(c.0, c.1), rat(0), rat(1)]);
            let dn = disc_poly(&f, n).unwrap();
            let sn = dn.squarefree_part().unwrap();
            let (quo, rem) = dn.div_rem(&sn).unwrap();
            prop_assert!(rem.is_zero());
            prop_assert!(class_of_tpolynomial(&quo, ClassMode::Geometric).unwrap().is_trivial());
        }
    }
}
