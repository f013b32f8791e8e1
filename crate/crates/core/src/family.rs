//! Explicit polynomials of even degree `d >= 20` whose arboreal
//! representation at `t = 0` is surjective at every level.
//!
//! With `k = d/2 - 1`, a prime `p` in `[d/2 + 5, d - 3]` and `u = p - k - 2`,
//! the polynomial is the monic `f` with
//! `f' = (2k+2)(x - C)(x^k + A x^u + B)^2` and `f(0) = D`. Parameters are
//! chosen by weak approximation so that `D` is a fixed point, the Newton
//! polygon at `p` has two segments, `f` is Eisenstein at a prime `q`, and
//! the critical orbit `f^n(C)` carries enough sign and residue information
//! to keep the discriminant classes independent at all levels.
//!
//! For `d ≡ 2 (mod 4)` no prime in the window keeps `f` 2-integral while
//! `A` and `B` are odd, so construction only succeeds for `4 | d`.

use crate::certify::{
    certify_surjective_with, replay, upgrade_all_levels, Certificate, ClassSource, CertifyOptions,
    LittleGaloisMode, Verdict,
};
use crate::discseq::DEFAULT_RAW_BIT_CAP;
use crate::error::{Error, Result};
use crate::exact::{
    factor_u64, int_serde, inv_mod, is_prime_u64, next_prime_u64, prime_in_window, primes_up_to, rat,
    rat_int, rat_mod, rat_serde, sqrt_mod, val_p, BigRat, Valuation,
};
use crate::localval::{big_local_certificate, BigLocalOutcome};
use crate::poly::RatPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const MAX_ELL_CANDIDATES: usize = 50;
pub const TWO_ADIC_CAP: u32 = 64;
pub const TWO_ADIC_WITNESSES: usize = 10;
/// Orbit values above this many bits are not computed in the rigidity test.
pub const RIGID_BIT_CAP: u64 = 1 << 21;
pub const DEFAULT_CERT_LEVELS: usize = 3;
pub const CHARACTER_PRIMES: usize = 64;

fn check_shape(k: usize, u: usize) -> Result<()> {
    // first four monomials strictly above the middle five, which are
    // strictly above the last four
    if !(u >= 2 && k >= u + 2) {
        return Err(Error::InvalidInput(format!("need k >= u + 2 and u >= 2, got k = {k}, u = {u}")));
    }
    Ok(())
}

fn frac(n: usize, d: usize) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

/// The thirteen `(coefficient, degree)` terms of `f`.
pub fn family_terms(k: usize, u: usize, a: &BigRat, b: &BigRat, c: &BigRat, d: &BigRat) -> Vec<(BigRat, usize)> {
    let k2 = 2 * k + 2;
    let two = rat(2);
    vec![
        (rat(1), k2),
        (-frac(k2, 2 * k + 1) * c, 2 * k + 1),
        (frac(k2, k + u + 2) * &two * a, k + u + 2),
        (-frac(k2, k + u + 1) * &two * a * c, k + u + 1),
        (frac(k2, 2 * u + 2) * a * a, 2 * u + 2),
        (-frac(k2, 2 * u + 1) * c * a * a, 2 * u + 1),
        (frac(k2, k + 2) * &two * b, k + 2),
        (-frac(k2, k + 1) * &two * b * c, k + 1),
        (frac(k2, u + 2) * &two * a * b, u + 2),
        (-frac(k2, u + 1) * &two * a * b * c, u + 1),
        (rat(k as i64 + 1) * b * b, 2),
        (-rat(k2 as i64) * b * b * c, 1),
        (d.clone(), 0),
    ]
}

/// Exponent of a C-free term whose 2-adic valuation is negative for odd `A`, `B`.
pub fn two_adic_obstruction(k: usize, u: usize) -> Option<usize> {
    let v2 = |n: usize| n.trailing_zeros() as i64;
    let k2 = 2 * k + 2;
    [(k + u + 2, 1), (2 * u + 2, 0), (k + 2, 1), (u + 2, 1)]
        .into_iter()
        .find(|&(e, two)| v2(k2) + two < v2(e))
        .map(|(e, _)| e)
}

fn sum_terms(terms: Vec<(BigRat, usize)>) -> RatPoly {
    let deg = terms.iter().map(|t| t.1).max().unwrap_or(0);
    let mut c = vec![BigRat::zero(); deg + 1];
    for (x, e) in terms {
        c[e] += x;
    }
    RatPoly::new(c)
}

/// `(2k+2)(x - C)(x^k + A x^u + B)^2`.
pub fn expected_derivative(k: usize, u: usize, a: &BigRat, b: &BigRat, c: &BigRat) -> RatPoly {
    let mut g = vec![BigRat::zero(); k + 1];
    g[k] += rat(1);
    g[u] += a;
    g[0] += b;
    let g = RatPoly::new(g);
    RatPoly::new(vec![-c.clone(), rat(1)]).mul(&g).mul(&g).scale(&rat(2 * k as i64 + 2))
}

pub fn build_family_poly(k: usize, u: usize, a: &BigRat, b: &BigRat, c: &BigRat, d: &BigRat) -> Result<RatPoly> {
    check_shape(k, u)?;
    let f = sum_terms(family_terms(k, u, a, b, c, d));
    if f.derivative() != expected_derivative(k, u, a, b, c) || f.coeff(0) != *d {
        return Err(Error::Internal("family polynomial fails its derivative identity".into()));
    }
    Ok(f)
}

/// A term `coef · A^i B^j D^e` of `U` or `V`.
struct UvTerm {
    coef: BigRat,
    a_pow: u32,
    b_pow: u32,
    d_pow: usize,
}

fn uv_term(coef: BigRat, a_pow: u32, b_pow: u32, d_pow: usize) -> UvTerm {
    UvTerm { coef, a_pow, b_pow, d_pow }
}

fn u_terms(k: usize, u: usize) -> Vec<UvTerm> {
    let k2 = 2 * k + 2;
    vec![
        uv_term(rat(1), 0, 0, k2),
        uv_term(frac(k2, k + u + 2) * rat(2), 1, 0, k + u + 2),
        uv_term(frac(k2, 2 * u + 2), 2, 0, 2 * u + 2),
        uv_term(frac(k2, k + 2) * rat(2), 0, 1, k + 2),
        uv_term(frac(k2, u + 2) * rat(2), 1, 1, u + 2),
        uv_term(rat(k as i64 + 1), 0, 2, 2),
    ]
}

fn v_terms(k: usize, u: usize) -> Vec<UvTerm> {
    let k2 = 2 * k + 2;
    vec![
        uv_term(frac(k2, 2 * k + 1), 0, 0, 2 * k + 1),
        uv_term(frac(k2, k + u + 1) * rat(2), 1, 0, k + u + 1),
        uv_term(frac(k2, 2 * u + 1), 2, 0, 2 * u + 1),
        uv_term(frac(k2, k + 1) * rat(2), 0, 1, k + 1),
        uv_term(frac(k2, u + 1) * rat(2), 1, 1, u + 1),
        uv_term(rat(k2 as i64), 0, 2, 1),
    ]
}

fn eval_terms(terms: &[UvTerm], a: &BigRat, b: &BigRat, d: &BigRat) -> BigRat {
    terms
        .iter()
        .map(|t| &t.coef * num_traits::pow(a.clone(), t.a_pow as usize) * num_traits::pow(b.clone(), t.b_pow as usize) * num_traits::pow(d.clone(), t.d_pow))
        .sum()
}

pub fn eval_u(k: usize, u: usize, a: &BigRat, b: &BigRat, d: &BigRat) -> BigRat {
    eval_terms(&u_terms(k, u), a, b, d)
}

pub fn eval_v(k: usize, u: usize, a: &BigRat, b: &BigRat, d: &BigRat) -> BigRat {
    eval_terms(&v_terms(k, u), a, b, d)
}

/// Coefficients of a quadratic in `(A, B)` on the monomials
/// `[1, A, A^2, B, AB, B^2]`.
pub type Quadric = [BigRat; 6];

fn quadric_of(terms: &[UvTerm], d: &BigRat) -> Quadric {
    let mut q: Quadric = Default::default();
    for t in terms {
        let slot = match (t.a_pow, t.b_pow) {
            (0, 0) => 0,
            (1, 0) => 1,
            (2, 0) => 2,
            (0, 1) => 3,
            (1, 1) => 4,
            (0, 2) => 5,
            _ => unreachable!("U and V are quadratic in A, B"),
        };
        q[slot] += &t.coef * num_traits::pow(d.clone(), t.d_pow);
    }
    q
}

/// The conic `U(A, B, -p^2) + p^2 V(A, B, -p^2)` and the quadric
/// `V(A, B, -p^2)`.
pub fn conic_quadrics(k: usize, u: usize, p: u64) -> (Quadric, Quadric) {
    let p2 = rat(p as i64 * p as i64);
    let d0 = -p2.clone();
    let uq = quadric_of(&u_terms(k, u), &d0);
    let vq = quadric_of(&v_terms(k, u), &d0);
    let conic: Quadric = std::array::from_fn(|i| &uq[i] + &p2 * &vq[i]);
    (conic, vq)
}

/// Determinant of the symmetric 3x3 matrix of a quadric in `(A, B, 1)`.
pub fn quadric_determinant(q: &Quadric) -> BigRat {
    let h = rat_frac_half;
    let m = [
        [q[2].clone(), h(&q[4]), h(&q[1])],
        [h(&q[4]), q[5].clone(), h(&q[3])],
        [h(&q[1]), h(&q[3]), q[0].clone()],
    ];
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

fn rat_frac_half(x: &BigRat) -> BigRat {
    x / rat(2)
}

fn quadric_mod(q: &Quadric, ell: u64) -> Option<[u64; 6]> {
    let v: Vec<u64> = q.iter().map(|c| rat_mod(c, ell)).collect::<Option<_>>()?;
    Some(std::array::from_fn(|i| v[i]))
}

fn eval_quadric_mod(q: &[u64; 6], a: u64, b: u64, ell: u64) -> u64 {
    let mm = |x: u64, y: u64| (x as u128 * y as u128 % ell as u128) as u64;
    let terms = [q[0], mm(q[1], a), mm(q[2], mm(a, a)), mm(q[3], b), mm(q[4], mm(a, b)), mm(q[5], mm(b, b))];
    terms.iter().fold(0, |acc, &t| (acc + t) % ell)
}

/// The conic is smooth mod `ell` and `V` is not proportional to it.
pub fn conic_nondegenerate_mod(k: usize, u: usize, p: u64, ell: u64) -> bool {
    let (conic, vq) = conic_quadrics(k, u, p);
    let det_ok = rat_mod(&quadric_determinant(&conic), ell).map_or(false, |x| x != 0);
    let (Some(c), Some(v)) = (quadric_mod(&conic, ell), quadric_mod(&vq, ell)) else {
        return false;
    };
    let mm = |x: u64, y: u64| (x as u128 * y as u128 % ell as u128) as u64;
    let independent = (0..6).any(|i| (0..6).any(|j| mm(c[i], v[j]) != mm(c[j], v[i])));
    det_ok && independent
}

/// An `F_ell` point `(A, B)` on the conic with `V(A, B, -p^2) != 0`,
/// sweeping `A = 1, 2, ...` and solving for `B`. The first `skip` points
/// found are passed over (variant selection).
pub fn conic_point_mod_ell(k: usize, u: usize, p: u64, ell: u64, skip: usize) -> Result<(u64, u64)> {
    if !is_prime_u64(ell) || ell % 4 != 3 {
        return Err(Error::InvalidInput(format!("ell = {ell} must be a prime congruent to 3 mod 4")));
    }
    let (conic, vq) = conic_quadrics(k, u, p);
    let (Some(c), Some(v)) = (quadric_mod(&conic, ell), quadric_mod(&vq, ell)) else {
        return Err(Error::InvalidInput(format!("conic has a denominator divisible by {ell}")));
    };
    let mm = |x: u64, y: u64| (x as u128 * y as u128 % ell as u128) as u64;
    let mut seen = 0;
    for a in 1..ell {
        // alpha B^2 + beta B + gamma = 0
        let alpha = c[5];
        let beta = (c[3] + mm(c[4], a)) % ell;
        let gamma = (c[0] + mm(c[1], a) + mm(c[2], mm(a, a))) % ell;
        let mut roots = Vec::new();
        if alpha == 0 {
            if beta != 0 {
                roots.push(mm(ell - gamma % ell, inv_mod(beta, ell).expect("nonzero")) % ell);
            }
        } else {
            let disc = (mm(beta, beta) + ell - mm(4 % ell, mm(alpha, gamma))) % ell;
            if let Some(s) = sqrt_mod(&BigInt::from(disc), ell)? {
                let inv2a = inv_mod(mm(2, alpha), ell).expect("nonzero");
                for r in [s, (ell - s) % ell] {
                    roots.push(mm((r + ell - beta) % ell, inv2a));
                }
                roots.dedup();
            }
        }
        for b in roots {
            if eval_quadric_mod(&c, a, b, ell) == 0 && eval_quadric_mod(&v, a, b, ell) != 0 {
                if seen == skip {
                    return Ok((a, b));
                }
                seen += 1;
            }
        }
    }
    Err(Error::SearchExhausted(format!("no usable point on the conic mod {ell}")))
}

fn v2_rat(x: &BigRat) -> Option<i64> {
    match val_p(x, 2).ok()? {
        Valuation::Finite(v) => Some(v),
        Valuation::Infinite => None,
    }
}

/// Smallest `M >= 1` such that `v_2(U(x, y, z) / V(x, y, z)) = v_2(z) - 1`
/// on seeded witnesses with odd `x, y` and `v_2(z)` ranging over
/// `M + 1 ..= 2M + 4`.
pub fn find_two_adic_constant(k: usize, u: usize) -> Result<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2ad1c);
    'm: for m in 1..=TWO_ADIC_CAP {
        for i in 0..TWO_ADIC_WITNESSES {
            let x = rat(2 * rng.gen_range(-500i64..500) + 1);
            let y = rat(2 * rng.gen_range(-500i64..500) + 1);
            let vz = m as usize + 1 + i % (m as usize + 4);
            let z = rat(2 * rng.gen_range(-500i64..500) + 1) * num_traits::pow(rat(2), vz);
            let vv = eval_v(k, u, &x, &y, &z);
            if vv.is_zero() {
                continue;
            }
            let uu = eval_u(k, u, &x, &y, &z);
            if uu.is_zero() || v2_rat(&(uu / vv)) != Some(vz as i64 - 1) {
                continue 'm;
            }
        }
        return Ok(m);
    }
    Err(Error::SearchExhausted(format!("no 2-adic constant M <= {TWO_ADIC_CAP}")))
}

fn legendre_factorial_valuation(d: u64, s: u64) -> u32 {
    let mut v = 0;
    let mut q = d / s;
    while q > 0 {
        v += q as u32;
        q /= s;
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub d: usize,
    pub k: usize,
    pub u: usize,
    pub p: u64,
    pub q: u64,
    pub ell: u64,
    #[serde(rename = "A_ell")]
    pub a_ell: u64,
    #[serde(rename = "B_ell")]
    pub b_ell: u64,
    /// The 2-adic constant `M = v_2(N_1)`.
    #[serde(rename = "M")]
    pub two_adic: u32,
    #[serde(rename = "A", with = "int_serde")]
    pub a: BigInt,
    #[serde(rename = "B", with = "int_serde")]
    pub b: BigInt,
    #[serde(rename = "N1", with = "int_serde")]
    pub n1: BigInt,
    /// Radical of the part of `N_1` prime to `d!`.
    #[serde(rename = "K", with = "int_serde")]
    pub k_rad: BigInt,
    pub m: u32,
    #[serde(rename = "N", with = "int_serde")]
    pub n: BigInt,
    #[serde(rename = "C", with = "rat_serde")]
    pub c: BigRat,
    #[serde(rename = "D", with = "int_serde")]
    pub dconst: BigInt,
    /// Primes dividing `N` (all of them: `N` is built from known parts).
    pub n_support: Vec<u64>,
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionEvidence {
    pub holds: bool,
    pub evidence: String,
}

fn ev(holds: bool, evidence: impl Into<String>) -> ConditionEvidence {
    ConditionEvidence { holds, evidence: evidence.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionChecklist {
    /// `f(D) = D`.
    pub fixed_point: ConditionEvidence,
    /// `D = -q N^2`.
    pub d_shape: ConditionEvidence,
    /// `C` is `ell`-integral and `C ≡ D ≡ -p^2 (mod ell)`.
    pub ell_residue: ConditionEvidence,
    /// `v_p(D) = 2`, `v_p(A) = v_p(B) = 1`, `v_p(C) = 2`.
    pub p_valuations: ConditionEvidence,
    /// `v_q(A), v_q(B), v_q(C) >= 1`, `v_q(D) = 1`.
    pub q_valuations: ConditionEvidence,
    /// `f` and `C` are `S`-integral for a set `S` of primes `> d`, each
    /// dividing the denominator of `C`.
    pub s_integrality: ConditionEvidence,
    /// `C < 0`, `f(C) < 0`, `f^2(C) > 0`.
    pub signs: ConditionEvidence,
    /// `v_s(C) >= v_s(D)/2` for every prime `s != q` dividing `D`.
    pub d_prime_valuations: ConditionEvidence,
}

impl ConditionChecklist {
    pub fn items(&self) -> [(&'static str, &ConditionEvidence); 8] {
        [
            ("fixed point", &self.fixed_point),
            ("shape of D", &self.d_shape),
            ("residues mod ell", &self.ell_residue),
            ("valuations at p", &self.p_valuations),
            ("valuations at q", &self.q_valuations),
            ("S-integrality", &self.s_integrality),
            ("signs on the critical orbit", &self.signs),
            ("valuations at primes of D", &self.d_prime_valuations),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.items().iter().all(|(_, e)| e.holds)
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        self.items().iter().find(|(_, e)| !e.holds).map(|(n, _)| *n)
    }
}

fn vp(x: &BigRat, p: u64) -> Valuation {
    val_p(x, p).expect("prime checked by caller")
}

fn strip_against(mut x: BigInt, y: &BigInt) -> BigInt {
    loop {
        let g = x.gcd(y);
        if g.is_one() || x.is_zero() {
            return x;
        }
        while (&x % &g).is_zero() {
            x /= &g;
        }
    }
}

fn primorial(d: u64) -> BigInt {
    primes_up_to(d).into_iter().map(BigInt::from).product()
}

pub fn verify_conditions(f: &RatPoly, params: &FamilyParams) -> ConditionChecklist {
    let FamilyParams { p, q, ell, .. } = *params;
    let a = rat_int(params.a.clone());
    let b = rat_int(params.b.clone());
    let c = params.c.clone();
    let d = rat_int(params.dconst.clone());

    let fixed_point = {
        let fd = f.eval(&d);
        ev(fd == d, if fd == d { "f(D) - D = 0 exactly".to_string() } else { "f(D) != D".to_string() })
    };

    let n_from_parts = &params.n1 * num_traits::pow(params.k_rad.clone(), params.m as usize);
    let d_shape = {
        let ok = params.n == n_from_parts && params.dconst == -BigInt::from(q) * &params.n * &params.n;
        ev(ok, format!("D = -q N^2 with N = N1 K^{} ({} bits)", params.m, params.n.bits()))
    };

    let ell_residue = {
        let target = (ell - (p * p) % ell) % ell;
        let (cm, dm) = (rat_mod(&c, ell), rat_mod(&d, ell));
        let ok = cm == Some(target) && dm == Some(target);
        ev(ok, format!("C mod ell = {cm:?}, D mod ell = {dm:?}, -p^2 mod ell = {target}"))
    };

    let fin = Valuation::Finite;
    let p_valuations = {
        let got = [vp(&d, p), vp(&a, p), vp(&b, p), vp(&c, p)];
        let ok = got == [fin(2), fin(1), fin(1), fin(2)];
        ev(ok, format!("v_p(D, A, B, C) = ({}, {}, {}, {})", got[0], got[1], got[2], got[3]))
    };

    let q_valuations = {
        let got = [vp(&a, q), vp(&b, q), vp(&c, q), vp(&d, q)];
        let ok = got[..3].iter().all(|v| *v >= fin(1)) && got[3] == fin(1);
        ev(ok, format!("v_q(A, B, C, D) = ({}, {}, {}, {})", got[0], got[1], got[2], got[3]))
    };

    let s_integrality = {
        let den_c = BigInt::from(c.denom().clone());
        let small = primorial(params.d as u64);
        let coprime_small = den_c.gcd(&small).is_one();
        let supported = f.coeffs().iter().all(|x| strip_against(x.denom().clone(), &den_c).is_one());
        ev(
            coprime_small && supported,
            format!(
                "S = primes of den(C) ({} bits); den(C) prime to all primes <= {}: {coprime_small}; \
                 coefficient denominators supported on S: {supported}",
                den_c.bits(),
                params.d
            ),
        )
    };

    let signs = {
        let (an, ad) = (c.numer().clone(), c.denom().clone());
        let (n1, d1) = f.eval_unreduced(&an, &ad);
        let (n2, _) = f.eval_unreduced(&n1, &d1);
        let ok = c.is_negative() && n1.is_negative() && n2.is_positive();
        ev(
            ok,
            format!(
                "sign C = {}, sign f(C) = {}, sign f^2(C) = {} (f^2(C) numerator has {} bits)",
                sgn(&an),
                sgn(&n1),
                sgn(&n2),
                n2.bits()
            ),
        )
    };

    let d_prime_valuations = {
        let mut rebuilt = BigInt::from(q);
        let mut ok = true;
        let mut notes = Vec::new();
        for &s in &params.n_support {
            let vn = match vp(&rat_int(params.n.clone()), s) {
                Valuation::Finite(v) => v,
                Valuation::Infinite => 0,
            };
            rebuilt *= num_traits::pow(BigInt::from(s), 2 * vn as usize);
            let vd = vp(&d, s);
            let vc = vp(&c, s);
            let holds = match (vc, vd) {
                (Valuation::Finite(x), Valuation::Finite(y)) => 2 * x >= y,
                (Valuation::Infinite, _) => true,
                _ => false,
            };
            ok &= holds;
            notes.push(format!("{s}: v(C) = {vc}, v(D) = {vd}"));
        }
        let full = rebuilt == params.dconst.abs() && !params.n_support.contains(&q);
        if !full {
            notes.push("D has a prime divisor outside the recorded support".into());
        }
        ev(ok && full, notes.join("; "))
    };

    ConditionChecklist {
        fixed_point,
        d_shape,
        ell_residue,
        p_valuations,
        q_valuations,
        s_integrality,
        signs,
        d_prime_valuations,
    }
}

fn sgn(x: &BigInt) -> i8 {
    if x.is_negative() {
        -1
    } else if x.is_zero() {
        0
    } else {
        1
    }
}

/// Smallest `x = r + j·ell > 0` that is odd, prime to `avoid`, and prime to
/// the primes up to `d`.
fn lift_residue(r: u64, ell: u64, d: u64, avoid: &BigInt) -> BigInt {
    let small = primorial(d);
    let mut x = BigInt::from(r);
    if x.is_zero() {
        x = BigInt::from(ell);
    }
    loop {
        if x.is_odd() && x.gcd(&small).is_one() && x.gcd(avoid).is_one() {
            return x;
        }
        x += ell;
    }
}

fn mod_u64(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("reduced")
}

/// Parameters and polynomial before certification.
pub fn construct_params(d: usize, seed: u64) -> Result<(RatPoly, FamilyParams)> {
    let d64 = d as u64;
    prime_in_window(d64)?;
    let k = d / 2 - 1;
    let window: Vec<u64> = primes_up_to(d64 - 3).into_iter().filter(|&s| s >= d64 / 2 + 5).collect();
    let mut obstructed = Vec::new();
    let mut pick = None;
    for &s in &window {
        let u = s as usize - k - 2;
        if check_shape(k, u).is_err() {
            continue;
        }
        match two_adic_obstruction(k, u) {
            Some(e) => obstructed.push(format!("p = {s}: coefficient of x^{e}")),
            None => {
                pick = Some((s, u));
                break;
            }
        }
    }
    let (p, u) = pick.ok_or_else(|| {
        Error::SearchExhausted(format!(
            "every p in [d/2 + 5, d - 3] leaves f non-2-integral for odd A, B ({})",
            obstructed.join("; ")
        ))
    })?;
    let mut log = vec![format!("p = {p} in [d/2 + 5, d - 3]; k = {k}, u = {u}")];
    log.extend(obstructed.iter().map(|o| format!("{o} rejected: not 2-integral for any M")));

    let d5 = d64.pow(5);
    let mut ell = d5;
    let mut chosen = None;
    for _ in 0..MAX_ELL_CANDIDATES {
        ell = next_prime_u64(ell + 1);
        while ell % 4 != 3 {
            ell = next_prime_u64(ell + 1);
        }
        if !conic_nondegenerate_mod(k, u, p, ell) {
            log.push(format!("ell = {ell} rejected: conic degenerate"));
            continue;
        }
        match conic_point_mod_ell(k, u, p, ell, seed as usize) {
            Ok(pt) => {
                chosen = Some(pt);
                break;
            }
            Err(e) => log.push(format!("ell = {ell} rejected: {e}")),
        }
    }
    let (a_ell, b_ell) =
        chosen.ok_or_else(|| Error::SearchExhausted(format!("no usable ell among {MAX_ELL_CANDIDATES} candidates")))?;
    log.push(format!("ell = {ell}: smallest prime > d^5 with ell ≡ 3 mod 4 and a smooth conic"));
    log.push(format!("(A_ell, B_ell) = ({a_ell}, {b_ell}) on the conic, off V = 0"));

    let mut q = 2 * ell + 1;
    while !is_prime_u64(q) {
        q += 2 * ell;
    }
    log.push(format!("q = {q}: smallest prime ≡ 1 mod ell"));

    let two_adic_min = find_two_adic_constant(k, u)?;
    log.push(format!("M >= {two_adic_min}: v_2(U/V) = v_2(z) - 1 on {TWO_ADIC_WITNESSES} witnesses"));

    // odd part of d! restricted to primes < d
    let mut p0 = BigInt::one();
    for s in primes_up_to(d64 - 1).into_iter().filter(|&s| s != 2) {
        let e = legendre_factorial_valuation(d64, s);
        p0 *= num_traits::pow(BigInt::from(s), e as usize);
        log.push(format!("v_{s}(A) = v_{s}(B) = v_{s}(N1) = {e}"));
    }
    let qb = BigInt::from(q);
    let base = mod_u64(&(&p0 * &qb), ell);
    let inv_base = inv_mod(base, ell).expect("ell is prime to p0 q");
    let a_res = (a_ell as u128 * inv_base as u128 % ell as u128) as u64;
    let b_res = (b_ell as u128 * inv_base as u128 % ell as u128) as u64;
    let a_free = lift_residue(a_res, ell, d64, &qb);
    let b_free = lift_residue(b_res, ell, d64, &qb);
    let a = &p0 * &qb * &a_free;
    let b = &p0 * &qb * &b_free;
    log.push(format!("A = odd(d!) q a', a' = {a_free} ≡ A_ell/(odd(d!) q) mod ell, a' odd and prime to q and primes < d"));
    log.push(format!("B = odd(d!) q b', b' = {b_free}"));

    let mark = log.len();
    // larger M keeps the identity; raise it until every coefficient is 2-integral
    let mut two_adic = two_adic_min;
    let (f, c, dconst, n, n1, k_rad, w_primes) = loop {
        let n_base = mod_u64(&(&p0 << two_adic as usize), ell);
        let w_res = (p as u128 * inv_mod(n_base, ell).expect("invertible") as u128 % ell as u128) as u64;
        let avoid = &qb * &a_free * &b_free;
        let w = lift_residue(w_res, ell, d64, &avoid);
        let n1: BigInt = (&p0 << two_adic as usize) * &w;
        log.push(format!("N1 = 2^M odd(d!) w, w = {w} ≡ p/(2^M odd(d!)) mod ell, so N1 ≡ p mod ell and v_q(N1) = 0"));

        let w64 = w.to_u64().ok_or_else(|| Error::SizeCap("free part of N1 exceeds 64 bits".into()))?;
        let w_primes: Vec<u64> = factor_u64(w64).into_iter().map(|(s, _)| s).collect();
        let k_rad: BigInt = w_primes.iter().map(|&s| BigInt::from(s)).product();
        log.push(format!("K = {k_rad}: primes of N1 above d other than p, q, ell"));
        log.push("m = 0: conditions are verified directly at N = N1".into());

        let n = n1.clone();
        let dconst = -&qb * &n * &n;
        let dr = rat_int(dconst.clone());
        let (ar, br) = (rat_int(a.clone()), rat_int(b.clone()));
        let vv = eval_v(k, u, &ar, &br, &dr);
        if vv.is_zero() {
            return Err(Error::Internal("V(A, B, D) vanishes".into()));
        }
        let c = eval_u(k, u, &ar, &br, &dr) / vv;
        let f = build_family_poly(k, u, &ar, &br, &c, &dr)?;
        if f.coeffs().iter().all(|x| x.denom().is_odd()) {
            log.push(format!("M = {two_adic}: smallest admissible M with f 2-integral"));
            break (f, c, dconst, n, n1, k_rad, w_primes);
        }
        if two_adic >= TWO_ADIC_CAP {
            return Err(Error::SearchExhausted(format!("no M <= {TWO_ADIC_CAP} makes f 2-integral")));
        }
        two_adic += 1;
        log.truncate(mark);
    };

    let mut n_support: Vec<u64> = primes_up_to(d64 - 1);
    n_support.extend(&w_primes);
    let params = FamilyParams {
        d,
        k,
        u,
        p,
        q,
        ell,
        a_ell,
        b_ell,
        two_adic,
        a,
        b,
        n1,
        k_rad,
        m: 0,
        n,
        c,
        dconst,
        n_support,
        provenance: log,
    };
    Ok((f, params))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidCase {
    pub c: String,
    pub k: usize,
    pub n: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RigidReport {
    pub cases: Vec<RigidCase>,
    /// Orbit values not computed because they would exceed the bit cap.
    pub skipped: Vec<String>,
    pub all_hold: bool,
}

fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut x, mut y) = (a.abs(), b.abs());
    if x < y {
        std::mem::swap(&mut x, &mut y);
    }
    if y.is_zero() {
        return x;
    }
    (x % &y).gcd(&y)
}

/// Any prime dividing two orbit values `f^k(c)`, `f^n(c)` with
/// `1 <= k < n <= 4`, at which `f` and `c` are integral, divides `D`.
/// Checked on numerators, after removing primes of `D` and of the
/// coefficient denominators.
pub fn lemma_rigid_check(f: &RatPoly, params: &FamilyParams, random_points: usize, seed: u64) -> RigidReport {
    let (lcm, _) = f.integer_form();
    let strip = &params.dconst * &lcm * BigInt::from(params.c.denom().clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![(format!("C"), params.c.clone())];
    for _ in 0..random_points {
        let v = rng.gen_range(-50i64..=50);
        points.push((v.to_string(), rat(v)));
    }
    let d = f.deg() as u64;
    let mut cases = Vec::new();
    let mut skipped = Vec::new();
    for (name, c) in points {
        let mut orbit: Vec<BigInt> = Vec::new();
        let (mut num, mut den) = (c.numer().clone(), c.denom().clone());
        for level in 1..=4 {
            let predicted = d * num.bits().max(den.bits()) + lcm.bits();
            if predicted > RIGID_BIT_CAP {
                skipped.push(format!("c = {name}: f^{level}(c) and beyond (about {predicted} bits)"));
                break;
            }
            let (n2, d2) = f.eval_unreduced(&num, &den);
            num = n2;
            den = d2;
            orbit.push(num.clone());
        }
        for n in 1..orbit.len() {
            for k in 0..n {
                let g = gcd_big(&orbit[k], &orbit[n]);
                let holds = strip_against(g, &strip).is_one();
                cases.push(RigidCase { c: name.clone(), k: k + 1, n: n + 1, holds });
            }
        }
    }
    let all_hold = cases.iter().all(|c| c.holds);
    RigidReport { cases, skipped, all_hold }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BitSizes {
    pub a: u64,
    pub b: u64,
    pub c_num: u64,
    pub c_den: u64,
    pub d: u64,
    pub max_coefficient: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyInstance {
    pub f: RatPoly,
    pub params: FamilyParams,
    pub checklist: ConditionChecklist,
    pub big_local: BigLocalOutcome,
    pub lemma_rigid: RigidReport,
    pub sizes: BitSizes,
    pub certificate: Certificate,
}

fn bit_sizes(f: &RatPoly, params: &FamilyParams) -> BitSizes {
    BitSizes {
        a: params.a.bits(),
        b: params.b.bits(),
        c_num: params.c.numer().bits(),
        c_den: params.c.denom().bits(),
        d: params.dconst.bits(),
        max_coefficient: f.max_height_bits(),
    }
}

const ALL_LEVELS_JUSTIFICATION: &str = "all eight construction conditions hold exactly; f is Eisenstein at q and \
its Newton polygon at p has vertices (0,2), (p,0), (d,0), so every little Galois group is S_d or A_d; \
f' = (2k+2)(x - C)g^2 makes disc f^n(x) ≡ f^n(C) modulo squares, and the conditions force the f^n(C) \
to be independent modulo squares for every n";

/// Certificate for an instance: big-local little-Galois evidence with the
/// instance's own `(p, q)`, character-route classes through `levels`, and
/// the all-levels upgrade when every condition holds.
pub fn certify_instance(f: &RatPoly, params: &FamilyParams, checklist: &ConditionChecklist, levels: usize) -> Certificate {
    let opts = CertifyOptions {
        source: ClassSource::Characters { max_primes: CHARACTER_PRIMES },
        raw_bit_cap: DEFAULT_RAW_BIT_CAP,
    };
    let cert = certify_surjective_with(f, &rat(0), levels, LittleGaloisMode::BigLocal, Some(params.p), Some(params.q), &opts);
    if checklist.all_hold() && cert.verdict == Verdict::SurjectiveThroughLevel(levels) {
        upgrade_all_levels(cert.clone(), ALL_LEVELS_JUSTIFICATION.into()).unwrap_or(cert)
    } else {
        cert
    }
}

/// Full pipeline for degree `d`. `seed` selects among conic points, giving
/// different instances per seed.
pub fn construct(d: usize, seed: u64) -> Result<FamilyInstance> {
    construct_with_levels(d, seed, DEFAULT_CERT_LEVELS)
}

pub fn construct_with_levels(d: usize, seed: u64, levels: usize) -> Result<FamilyInstance> {
    let (f, params) = construct_params(d, seed)?;
    let checklist = verify_conditions(&f, &params);
    if let Some(name) = checklist.first_failure() {
        return Err(Error::SearchExhausted(format!(
            "condition '{name}' fails at m = 0; larger m needs K raised to a multiple of the order of K \
             modulo every prime below d and modulo p q ell, beyond exact bit budgets"
        )));
    }
    let big_local = big_local_certificate(&f, params.p, params.q)?;
    let lemma_rigid = lemma_rigid_check(&f, &params, 20, seed);
    let certificate = certify_instance(&f, &params, &checklist, levels);
    let sizes = bit_sizes(&f, &params);
    Ok(FamilyInstance { f, params, checklist, big_local, lemma_rigid, sizes, certificate })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilyReplay {
    pub poly_matches: bool,
    pub checklist_matches: bool,
    pub certificate_matches: bool,
    pub verdict: Verdict,
}

impl FamilyReplay {
    pub fn ok(&self) -> bool {
        self.poly_matches && self.checklist_matches && self.certificate_matches
    }
}

/// Rebuilds `f` from the parameters, re-verifies every condition and
/// replays the certificate.
pub fn replay_instance(inst: &FamilyInstance) -> Result<FamilyReplay> {
    let p = &inst.params;
    let f = build_family_poly(p.k, p.u, &rat_int(p.a.clone()), &rat_int(p.b.clone()), &p.c, &rat_int(p.dconst.clone()))?;
    let checklist = verify_conditions(&f, p);
    let base = replay(&inst.certificate);
    let upgraded_ok = !base.upgrade_pending || checklist.all_hold();
    Ok(FamilyReplay {
        poly_matches: f == inst.f,
        checklist_matches: checklist == inst.checklist,
        certificate_matches: base.matches && upgraded_ok,
        verdict: if base.upgrade_pending && upgraded_ok { Verdict::SurjectiveAllLevels } else { base.recomputed_verdict },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_frac;
    use proptest::prelude::*;

    #[test]
    fn uv_at_zero() {
        let d = rat_frac(-7, 3);
        let (k, u) = (9, 6);
        assert_eq!(eval_u(k, u, &rat(0), &rat(0), &d), num_traits::pow(d.clone(), 20));
        assert_eq!(eval_v(k, u, &rat(0), &rat(0), &d), frac(20, 19) * num_traits::pow(d, 19));
    }

    #[test]
    fn degree_twenty_shape() {
        let (a, b, c, d) = (rat(2), rat(-3), rat_frac(5, 7), rat(11));
        let f = build_family_poly(9, 6, &a, &b, &c, &d).unwrap();
        assert_eq!(f.deg(), 20);
        assert_eq!(f.coeff(19), -frac(20, 19) * &c);
        assert_eq!(f.coeff(0), d);
        assert_eq!(f.derivative(), expected_derivative(9, 6, &a, &b, &c));
        assert!(build_family_poly(9, 8, &a, &b, &c, &d).is_err());
    }

    #[test]
    fn two_adic_constant_for_twenty() {
        assert_eq!(find_two_adic_constant(9, 6).unwrap(), 1);
    }

    #[test]
    fn conic_points_are_on_the_conic() {
        let (conic, vq) = conic_quadrics(9, 6, 17);
        assert!(!quadric_determinant(&conic).is_zero());
        for ell in [10007u64, 10039, 20011, 3_200_003] {
            if ell % 4 != 3 || !is_prime_u64(ell) || !conic_nondegenerate_mod(9, 6, 17, ell) {
                continue;
            }
            let (a, b) = conic_point_mod_ell(9, 6, 17, ell, 0).unwrap();
            let c = quadric_mod(&conic, ell).unwrap();
            let v = quadric_mod(&vq, ell).unwrap();
            assert_eq!(eval_quadric_mod(&c, a, b, ell), 0);
            assert_ne!(eval_quadric_mod(&v, a, b, ell), 0);
            let again = conic_point_mod_ell(9, 6, 17, ell, 1).unwrap();
            assert_ne!(again, (a, b));
        }
        assert!(conic_point_mod_ell(9, 6, 17, 13, 0).is_err());
    }

    #[test]
    fn quadric_matches_direct_evaluation() {
        let (conic, _) = conic_quadrics(9, 6, 17);
        let d0 = rat(-289);
        let (a, b) = (rat(3), rat_frac(-2, 5));
        let direct = eval_u(9, 6, &a, &b, &d0) + rat(289) * eval_v(9, 6, &a, &b, &d0);
        let mono = [rat(1), a.clone(), &a * &a, b.clone(), &a * &b, &b * &b];
        let via: BigRat = conic.iter().zip(mono.iter()).map(|(x, y)| x * y).sum();
        assert_eq!(direct, via);
    }

    fn small_rat() -> impl Strategy<Value = BigRat> {
        (-30i64..=30, 1i64..=9).prop_map(|(a, b)| rat_frac(a, b))
    }

    fn shape() -> impl Strategy<Value = (usize, usize)> {
        (2usize..=4).prop_flat_map(|u| (u + 2..=u + 5, Just(u)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn derivative_identity((k, u) in shape(), a in small_rat(), b in small_rat(), c in small_rat(), d in small_rat()) {
            let f = build_family_poly(k, u, &a, &b, &c, &d).unwrap();
            // independent route: integrate the factored derivative
            let fp = expected_derivative(k, u, &a, &b, &c);
            let mut coeffs = vec![d.clone()];
            coeffs.extend(fp.coeffs().iter().enumerate().map(|(i, x)| x / rat(i as i64 + 1)));
            prop_assert_eq!(f, RatPoly::new(coeffs));
        }

        #[test]
        fn fixed_point_from_u_over_v((k, u) in shape(), a in small_rat(), b in small_rat(), d in small_rat()) {
            let v = eval_v(k, u, &a, &b, &d);
            prop_assume!(!v.is_zero());
            let c = eval_u(k, u, &a, &b, &d) / v;
            let f = build_family_poly(k, u, &a, &b, &c, &d).unwrap();
            prop_assert_eq!(f.eval(&d), d);
        }

        #[test]
        fn poly_is_u_minus_cv_plus_d((k, u) in shape(), a in small_rat(), b in small_rat(), c in small_rat(), d in small_rat(), x in small_rat()) {
            let f = build_family_poly(k, u, &a, &b, &c, &d).unwrap();
            prop_assert_eq!(f.eval(&x), eval_u(k, u, &a, &b, &x) - &c * eval_v(k, u, &a, &b, &x) + d);
        }
    }
}
