//! Discriminant sequences `D_n = disc(f^n(x) - t)`.
//!
//! Two routes per level. The exact route computes the resultant
//! `Res(F, F')` of `F = f^n - t` in full. The fast route computes the
//! critical-orbit product `∏ (f^n(λ) - t)` over the roots `λ` of `f'`
//! (with multiplicity) as a resultant against `f'`, after reducing `f^n`
//! modulo `f'`. It agrees with the exact class only up to a constant
//! class, which [`calibrate_sign`] pins down empirically and caches.

use crate::error::{Error, Result};
use crate::exact::{height_bits, is_rational_square, rat, rat_frac, rat_serde, BigRat};
use crate::poly::fp::FpPoly;
use crate::poly::{discriminant, resultant, resultant_subresultant, Poly, RatPoly, Ring};
use crate::squareclass::{class_of_tpolynomial, ClassMode, SquareClass};
use num_traits::{One, Zero};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Raw values above this many bits are dropped from serialized sequences.
pub const DEFAULT_RAW_BIT_CAP: u64 = 1_000_000;
pub const CALIBRATION_SAMPLES: usize = 10;

/// The specialization point: a rational, or `t` left symbolic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TArg {
    Value(BigRat),
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscValue {
    Rational(#[serde(with = "rat_serde")] BigRat),
    Poly(RatPoly),
}

impl DiscValue {
    pub fn bits(&self) -> u64 {
        match self {
            DiscValue::Rational(x) => height_bits(x),
            DiscValue::Poly(p) => p.coeffs().iter().map(height_bits).sum(),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRat> {
        match self {
            DiscValue::Rational(x) => Some(x),
            DiscValue::Poly(_) => None,
        }
    }

    pub fn as_poly(&self) -> Option<&RatPoly> {
        match self {
            DiscValue::Poly(p) => Some(p),
            DiscValue::Rational(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalOrbitProduct {
    pub level: usize,
    pub value: DiscValue,
}

fn check_map(f: &RatPoly) -> Result<()> {
    if f.degree().map_or(true, |d| d < 2) {
        return Err(Error::InvalidInput(format!("need deg f >= 2, got {f}")));
    }
    Ok(())
}

fn check_level(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("level must be at least 1".into()));
    }
    Ok(())
}

/// `disc(f^n(x) - t)` at a rational `t`.
pub fn disc_exact_at(f: &RatPoly, t: &BigRat, n: usize) -> Result<BigRat> {
    check_map(f)?;
    check_level(n)?;
    let big = f.iterate(n).sub(&RatPoly::constant(t.clone()));
    let d = discriminant(&big)?;
    if d.is_zero() {
        return Err(Error::Inseparable { level: n });
    }
    Ok(d)
}

/// Applies `g` to each item on scoped worker threads, preserving order.
fn par_map<T: Sync, U: Send>(items: &[T], g: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(items.len().max(1));
    if workers <= 1 || items.len() < 8 {
        return items.iter().map(&g).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| {
                let g = &g;
                s.spawn(move || c.iter().map(g).collect::<Vec<U>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// `D_n(t)` as a polynomial in `t`. Its `t`-degree is at most `d^n - 1`,
/// so it is interpolated from exact discriminants at `d^n + 1` integer
/// points (one more than needed, as a consistency check).
pub fn disc_poly(f: &RatPoly, n: usize) -> Result<RatPoly> {
    check_map(f)?;
    check_level(n)?;
    let big = f.iterate(n);
    let deg = big.deg();
    let nodes: Vec<BigRat> = (0..=deg as i64).map(rat).collect();
    let values = par_map(&nodes, |t| discriminant(&big.sub(&RatPoly::constant(t.clone()))));
    let points = nodes.into_iter().zip(values).map(|(t, v)| Ok((t, v?))).collect::<Result<Vec<_>>>()?;
    let d = RatPoly::interpolate(&points)?;
    if d.is_zero() {
        return Err(Error::Inseparable { level: n });
    }
    if d.deg() >= deg {
        return Err(Error::Internal(format!("disc polynomial at level {n} has degree {}", d.deg())));
    }
    Ok(d)
}

pub fn disc_exact(f: &RatPoly, t: &TArg, n: usize) -> Result<DiscValue> {
    match t {
        TArg::Value(t) => disc_exact_at(f, t, n).map(DiscValue::Rational),
        TArg::Indeterminate => disc_poly(f, n).map(DiscValue::Poly),
    }
}

/// `f^n mod f'`, built by iterating `r -> f(r) mod f'` from `r = x`.
fn orbit_remainder(f: &RatPoly, n: usize) -> Result<RatPoly> {
    let fp = f.derivative();
    let mut r = RatPoly::x().rem(&fp)?;
    for _ in 0..n {
        let mut acc = RatPoly::zero();
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(&r).add(&RatPoly::constant(c.clone())).rem(&fp)?;
        }
        r = acc;
    }
    Ok(r)
}

/// `∏ (f^n(λ) - t)` at rational `t`, equal to
/// `Res(f', f^n - t) / lc(f')^(d^n)`.
pub fn cop_at(f: &RatPoly, t: &BigRat, n: usize) -> Result<BigRat> {
    check_map(f)?;
    let fp = f.derivative();
    let r = orbit_remainder(f, n)?.sub(&RatPoly::constant(t.clone()));
    if r.is_zero() {
        return Ok(BigRat::zero());
    }
    if r.is_constant() {
        return Ok(num_traits::pow(r.lc(), fp.deg()));
    }
    Ok(resultant(&fp, &r)? / num_traits::pow(fp.lc(), r.deg()))
}

/// The critical-orbit product as a polynomial in `t`, of degree `d - 1`.
pub fn cop_poly(f: &RatPoly, n: usize) -> Result<RatPoly> {
    check_map(f)?;
    let fp = f.derivative();
    let r = orbit_remainder(f, n)?.minus_t();
    if r.is_constant() {
        return Ok(Ring::pow(&r.lc(), fp.deg() as u64));
    }
    let res = resultant_subresultant(&fp.to_tpoly(), &r);
    let scale = num_traits::pow(fp.lc(), r.deg());
    Ok(res.scale(&(BigRat::one() / scale)))
}

pub fn critical_orbit_product(f: &RatPoly, t: &TArg, n: usize) -> Result<CriticalOrbitProduct> {
    let value = match t {
        TArg::Value(t) => DiscValue::Rational(cop_at(f, t, n)?),
        TArg::Indeterminate => DiscValue::Poly(cop_poly(f, n)?),
    };
    Ok(CriticalOrbitProduct { level: n, value })
}

/// Constant class `c` with `disc(f^n - t) = c · cop · square`, for every
/// specialization `t` tried.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calibration {
    pub class: SquareClass,
    /// A small rational in the class: one of `±1`, `±lc(f)`.
    #[serde(with = "rat_serde")]
    pub representative: BigRat,
    pub samples: usize,
}

type CalKey = (usize, usize, SquareClass);

fn cal_cache() -> &'static Mutex<HashMap<CalKey, Calibration>> {
    static CACHE: OnceLock<Mutex<HashMap<CalKey, Calibration>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Calibration for `(deg f, n, class of lc f)`, cached after the first
/// verified computation.
pub fn calibrate_sign(f: &RatPoly, n: usize) -> Result<Calibration> {
    check_map(f)?;
    check_level(n)?;
    let key = (f.deg(), n, SquareClass::of_rational(&f.lc())?);
    if let Some(c) = cal_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(c.clone());
    }
    let c = calibrate_sign_uncached(f, n, CALIBRATION_SAMPLES)?;
    cal_cache().lock().expect("cache poisoned").insert(key, c.clone());
    Ok(c)
}

/// Samples `samples` random rational `t` (seeded by `deg f` and `n`) at
/// which both routes are nonzero, and checks the ratio lies in one constant
/// class at all of them.
pub fn calibrate_sign_uncached(f: &RatPoly, n: usize, samples: usize) -> Result<Calibration> {
    check_map(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x00ca_1b00 ^ ((f.deg() as u64) << 16) ^ n as u64);
    let lc = f.lc();
    let candidates = [rat(1), rat(-1), lc.clone(), -lc];
    let mut chosen: Option<BigRat> = None;
    let mut good = 0;
    for _ in 0..samples * 20 {
        if good == samples {
            break;
        }
        let t = rat_frac(rng.gen_range(-40..=40), rng.gen_range(1..=7));
        let cop = cop_at(f, &t, n)?;
        if cop.is_zero() {
            continue;
        }
        let disc = match disc_exact_at(f, &t, n) {
            Ok(d) => d,
            Err(Error::Inseparable { .. }) => continue,
            Err(e) => return Err(e),
        };
        let ratio = disc / cop;
        match &chosen {
            None => {
                chosen = candidates.iter().find(|c| is_rational_square(&(&ratio / *c))).cloned();
                if chosen.is_none() {
                    return Err(Error::Calibration(format!(
                        "level {n}: ratio at t = {t} is not ±1 or ±lc(f) times a square"
                    )));
                }
            }
            Some(c) => {
                if !is_rational_square(&(&ratio / c)) {
                    return Err(Error::Calibration(format!("level {n}: ratio class changes at t = {t}")));
                }
            }
        }
        good += 1;
    }
    let representative = chosen
        .filter(|_| good == samples)
        .ok_or_else(|| Error::Calibration(format!("level {n}: too few usable sample points")))?;
    Ok(Calibration { class: SquareClass::of_rational(&representative)?, representative, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscPath {
    Exact,
    FastCalibrated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscEntry {
    pub level: usize,
    /// Exact discriminant; `None` on the fast path or above the bit cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<DiscValue>,
    /// Bit size of the exact discriminant, when computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_bits: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_product: Option<DiscValue>,
    pub class: SquareClass,
    pub path: DiscPath,
    /// On the exact path: whether the calibrated fast class matched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths_agree: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscSequence {
    pub f: RatPoly,
    #[serde(with = "rat_serde")]
    pub t: BigRat,
    pub entries: Vec<DiscEntry>,
}

impl DiscSequence {
    pub fn classes(&self) -> Vec<SquareClass> {
        self.entries.iter().map(|e| e.class.clone()).collect()
    }
}

fn capped(v: BigRat, cap: u64) -> Option<DiscValue> {
    (height_bits(&v) <= cap).then_some(DiscValue::Rational(v))
}

/// One level of [`disc_sequence`].
pub fn disc_entry(f: &RatPoly, t: &BigRat, n: usize, path: DiscPath, raw_bit_cap: u64) -> Result<DiscEntry> {
    let cop = cop_at(f, t, n)?;
    match path {
        DiscPath::FastCalibrated => {
            if cop.is_zero() {
                return Err(Error::Inseparable { level: n });
            }
            let cal = calibrate_sign(f, n)?;
            Ok(DiscEntry {
                level: n,
                value: None,
                value_bits: None,
                class: SquareClass::of_rational(&(&cop * &cal.representative))?,
                orbit_product: capped(cop, raw_bit_cap),
                path,
                paths_agree: None,
            })
        }
        DiscPath::Exact => {
            let disc = disc_exact_at(f, t, n)?;
            // The exact class is read off a small representative once the
            // ratio is verified to be a square; otherwise from disc itself.
            let fast = calibrate_sign(f, n).ok().map(|cal| &cop * &cal.representative);
            let (class, agree) = match fast {
                Some(rep) if !rep.is_zero() && is_rational_square(&(&disc / &rep)) => {
                    (SquareClass::of_rational(&rep)?, Some(true))
                }
                Some(_) => (SquareClass::of_rational(&disc)?, Some(false)),
                None => (SquareClass::of_rational(&disc)?, None),
            };
            Ok(DiscEntry {
                level: n,
                value_bits: Some(height_bits(&disc)),
                value: capped(disc, raw_bit_cap),
                orbit_product: capped(cop, raw_bit_cap),
                class,
                path,
                paths_agree: agree,
            })
        }
    }
}

pub fn disc_sequence(f: &RatPoly, t: &BigRat, levels: usize, path: DiscPath) -> Result<DiscSequence> {
    disc_sequence_with(f, t, levels, path, DEFAULT_RAW_BIT_CAP)
}

pub fn disc_sequence_with(
    f: &RatPoly,
    t: &BigRat,
    levels: usize,
    path: DiscPath,
    raw_bit_cap: u64,
) -> Result<DiscSequence> {
    check_map(f)?;
    let entries = (1..=levels).map(|n| disc_entry(f, t, n, path, raw_bit_cap)).collect::<Result<_>>()?;
    Ok(DiscSequence { f: f.clone(), t: t.clone(), entries })
}

/// Legendre symbols `(D_n / r)` for `n = 1..=levels`, computed from the
/// reduction of `f^n - t` modulo the odd prime `r`. `None` when `r` is bad
/// for some level: a denominator or leading coefficient vanishes mod `r`,
/// or `r` divides one of the discriminants.
///
/// Characters are multiplicative, so a relation among the classes of the
/// `D_n` forces the same relation among these sign vectors.
pub fn disc_characters_mod(f: &RatPoly, t: &BigRat, levels: usize, r: u64) -> Option<Vec<i8>> {
    if r == 2 || !crate::exact::is_prime_u64(r) || r >= 1 << 32 {
        return None;
    }
    let fr = FpPoly::from_ratpoly(f, r)?;
    if fr.degree() != f.degree() {
        return None;
    }
    let tr = FpPoly::new(r, vec![crate::exact::rat_mod(t, r)?]);
    let mut acc = FpPoly::x(r);
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        acc = fr.compose(&acc);
        let disc = acc.sub(&tr).discriminant()?;
        if disc == 0 {
            return None;
        }
        out.push(crate::exact::legendre(disc, r));
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscPolyEntry {
    pub level: usize,
    pub disc: RatPoly,
    /// Monic product of the odd-multiplicity factors of `disc`.
    pub squarefree: RatPoly,
    pub arithmetic: SquareClass,
    pub geometric: SquareClass,
}

pub fn disc_poly_sequence(f: &RatPoly, levels: usize) -> Result<Vec<DiscPolyEntry>> {
    check_map(f)?;
    (1..=levels)
        .map(|n| {
            let disc = disc_poly(f, n)?;
            Ok(DiscPolyEntry {
                level: n,
                squarefree: disc.squarefree_part()?,
                arithmetic: class_of_tpolynomial(&disc, ClassMode::Arithmetic)?,
                geometric: class_of_tpolynomial(&disc, ClassMode::Geometric)?,
                disc,
            })
        })
        .collect()
}

/// Convenience: a polynomial `x - c` in the variable `t`.
pub fn t_minus(c: &BigRat) -> RatPoly {
    Poly::new(vec![-c.clone(), BigRat::one()])
}
