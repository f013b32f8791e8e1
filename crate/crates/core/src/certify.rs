//! Level-by-level surjectivity certificates.
//!
//! For even `d`, with `t` not periodic and each `f^n(x) - t` separable, the
//! image of Galois in `Aut(T_N)` is everything as soon as (a) the little
//! Galois groups are `S_d` or `A_d` and (b) the class of
//! `disc(f^n(x) - t)` avoids the span of the classes at lower levels for
//! every `n <= N`. This module checks (b) exactly, records the evidence for
//! (a) according to the chosen mode, and serializes everything into a
//! replayable [`Certificate`].

use crate::discseq::{disc_characters_mod, disc_entry, DiscEntry, DiscPath, DEFAULT_RAW_BIT_CAP};
use crate::error::{Error, Result};
use crate::exact::{next_prime_u64, prime_in_window, primes_up_to, rat_serde, BigRat};
use crate::localval::{big_local_certificate, is_eisenstein, BigLocalOutcome};
use crate::poly::{format_poly_list, RatPoly};
use crate::squareclass::{f2_solve, in_span, independent, Independence, SquareClass};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LittleGaloisMode {
    BigLocal,
    Quadratic,
    Assumed,
}

impl FromStr for LittleGaloisMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "big-local" => Ok(LittleGaloisMode::BigLocal),
            "quadratic" => Ok(LittleGaloisMode::Quadratic),
            "assumed" => Ok(LittleGaloisMode::Assumed),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for LittleGaloisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LittleGaloisMode::BigLocal => "big-local",
            LittleGaloisMode::Quadratic => "quadratic",
            LittleGaloisMode::Assumed => "assumed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    SurjectiveAllLevels,
    SurjectiveThroughLevel(usize),
    CriterionFailedAtLevel(usize),
    Unknown,
    InvalidInput,
}

impl Verdict {
    /// 0 surjective, 1 criterion failed, 2 unknown, 3 invalid input.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::SurjectiveAllLevels | Verdict::SurjectiveThroughLevel(_) => 0,
            Verdict::CriterionFailedAtLevel(_) => 1,
            Verdict::Unknown => 2,
            Verdict::InvalidInput => 3,
        }
    }

    pub fn is_surjective(self) -> bool {
        self.exit_code() == 0
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::SurjectiveAllLevels => write!(f, "SURJECTIVE_ALL_LEVELS"),
            Verdict::SurjectiveThroughLevel(n) => write!(f, "SURJECTIVE_THROUGH_LEVEL_{n}"),
            Verdict::CriterionFailedAtLevel(n) => write!(f, "CRITERION_FAILED_AT_LEVEL_{n}"),
            Verdict::Unknown => write!(f, "UNKNOWN"),
            Verdict::InvalidInput => write!(f, "INVALID_INPUT"),
        }
    }
}

impl FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown verdict {s:?}"));
        let level = |rest: &str| rest.parse::<usize>().map_err(|_| bad());
        match s {
            "SURJECTIVE_ALL_LEVELS" => Ok(Verdict::SurjectiveAllLevels),
            "UNKNOWN" => Ok(Verdict::Unknown),
            "INVALID_INPUT" => Ok(Verdict::InvalidInput),
            _ => {
                if let Some(r) = s.strip_prefix("SURJECTIVE_THROUGH_LEVEL_") {
                    Ok(Verdict::SurjectiveThroughLevel(level(r)?))
                } else if let Some(r) = s.strip_prefix("CRITERION_FAILED_AT_LEVEL_") {
                    Ok(Verdict::CriterionFailedAtLevel(level(r)?))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where the per-level classes come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "kebab-case")]
pub enum ClassSource {
    /// Exact discriminants, classes verified by exact squareness.
    Exact,
    /// Critical-orbit products times the calibrated constant.
    FastCalibrated,
    /// Legendre-symbol vectors of the discriminants at up to `max_primes`
    /// good odd primes. Proves a step passes; cannot prove it fails.
    #[serde(rename_all = "camelCase")]
    Characters { max_primes: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertifyOptions {
    pub source: ClassSource,
    pub raw_bit_cap: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { source: ClassSource::Exact, raw_bit_cap: DEFAULT_RAW_BIT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CertInput {
    pub poly: RatPoly,
    #[serde(with = "rat_serde")]
    pub t: BigRat,
    pub levels: usize,
    pub mode: LittleGaloisMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub options: CertifyOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LittleGalois {
    pub mode: LittleGaloisMode,
    /// `big-local`, `Stoll-type` or `assumed`.
    pub label: String,
    /// Evidence valid at every level of the tree, not just up to `N`.
    pub level_uniform: bool,
    pub established: bool,
    pub conditional: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_local: Option<BigLocalOutcome>,
    pub records: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum StepOutcome {
    Pass,
    /// The class lies in the span of the listed earlier levels (empty list:
    /// the class is trivial).
    Fail { span: Vec<usize> },
    Unknown { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub level: usize,
    #[serde(flatten)]
    pub outcome: StepOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CharacterEvidence {
    pub primes: Vec<u64>,
    /// `rows[n-1][j] = 1` iff `D_n` is a nonresidue modulo `primes[j]`.
    pub rows: Vec<Vec<u8>>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllLevels {
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificate {
    pub input: CertInput,
    pub checks: Vec<Check>,
    pub little_galois: LittleGalois,
    pub disc_classes: Vec<DiscEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character_evidence: Option<CharacterEvidence>,
    pub steps: Vec<StepRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independence: Option<Independence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_levels: Option<AllLevels>,
    pub verdict: Verdict,
    pub assumptions: Vec<String>,
}

impl Certificate {
    fn check(&mut self, name: &str, level: Option<usize>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), level, passed, detail: detail.into() });
    }

    pub fn classes(&self) -> Vec<SquareClass> {
        self.disc_classes.iter().map(|e| e.class.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Certificate> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResult {
    pub level: usize,
    pub entry: DiscEntry,
    pub outcome: StepOutcome,
}

fn span_verdict(class: &SquareClass, prior: &[SquareClass]) -> StepOutcome {
    if prior.is_empty() {
        return if class.is_trivial() { StepOutcome::Fail { span: vec![] } } else { StepOutcome::Pass };
    }
    match in_span(class, prior) {
        Some(idx) => StepOutcome::Fail { span: idx.into_iter().map(|i| i + 1).collect() },
        None => StepOutcome::Pass,
    }
}

/// The level-`n` test: PASS iff the exact class of `disc(f^n(x) - t)` is
/// outside the span of `prior` (the classes at levels `1..n`).
pub fn check_level_step(f: &RatPoly, t: &BigRat, n: usize, prior: &[SquareClass]) -> Result<StepResult> {
    let entry = disc_entry(f, t, n, DiscPath::Exact, DEFAULT_RAW_BIT_CAP)?;
    let outcome = span_verdict(&entry.class, prior);
    Ok(StepResult { level: n, entry, outcome })
}

pub fn certify_surjective(
    f: &RatPoly,
    t: &BigRat,
    levels: usize,
    mode: LittleGaloisMode,
    p: Option<u64>,
    q: Option<u64>,
) -> Certificate {
    certify_surjective_with(f, t, levels, mode, p, q, &CertifyOptions::default())
}

/// Smallest prime `q < 10^4` at which `f` is Eisenstein.
fn find_eisenstein_prime(f: &RatPoly) -> Option<u64> {
    primes_up_to(10_000).into_iter().find(|&q| is_eisenstein(f, q))
}

fn little_galois_big_local(f: &RatPoly, d: usize, p: Option<u64>, q: Option<u64>) -> LittleGalois {
    let mut lg = LittleGalois {
        mode: LittleGaloisMode::BigLocal,
        label: "big-local".into(),
        level_uniform: true,
        established: false,
        conditional: false,
        big_local: None,
        records: Vec::new(),
    };
    let p = match p.map(Ok).unwrap_or_else(|| prime_in_window(d as u64)) {
        Ok(p) => p,
        Err(e) => {
            lg.records.push(format!("no prime p: {e}"));
            return lg;
        }
    };
    let Some(q) = q.or_else(|| find_eisenstein_prime(f)) else {
        lg.records.push("no Eisenstein prime q below 10^4".into());
        return lg;
    };
    match big_local_certificate(f, p, q) {
        Ok(outcome) => {
            lg.established = outcome.is_certified();
            lg.records.push(match &outcome {
                BigLocalOutcome::Certified(ev) => ev.justification.clone(),
                BigLocalOutcome::Refused { reason, .. } => format!("refused: {reason}"),
            });
            lg.big_local = Some(outcome);
        }
        Err(e) => lg.records.push(format!("big-local check rejected its input: {e}")),
    }
    lg
}

pub fn certify_surjective_with(
    f: &RatPoly,
    t: &BigRat,
    levels: usize,
    mode: LittleGaloisMode,
    p: Option<u64>,
    q: Option<u64>,
    opts: &CertifyOptions,
) -> Certificate {
    let mut cert = Certificate {
        input: CertInput { poly: f.clone(), t: t.clone(), levels, mode, p, q, options: opts.clone() },
        checks: Vec::new(),
        little_galois: LittleGalois {
            mode,
            label: match mode {
                LittleGaloisMode::BigLocal => "big-local",
                LittleGaloisMode::Quadratic => "Stoll-type",
                LittleGaloisMode::Assumed => "assumed",
            }
            .into(),
            level_uniform: false,
            established: false,
            conditional: mode == LittleGaloisMode::Assumed,
            big_local: None,
            records: Vec::new(),
        },
        disc_classes: Vec::new(),
        character_evidence: None,
        steps: Vec::new(),
        independence: None,
        all_levels: None,
        verdict: Verdict::Unknown,
        assumptions: vec![format!("t is checked to be non-periodic only up to depth {levels}")],
    };
    let d = f.degree().unwrap_or(0);
    let even = d >= 2 && d % 2 == 0;
    cert.check("even-degree", None, even, format!("deg f = {d}"));
    if !even || levels == 0 {
        if levels == 0 {
            cert.check("levels", None, false, "need at least one level");
        }
        cert.verdict = Verdict::InvalidInput;
        return cert;
    }
    if mode == LittleGaloisMode::Quadratic && d != 2 {
        cert.check("quadratic-mode-degree", None, false, format!("quadratic mode needs d = 2, got {d}"));
        cert.verdict = Verdict::InvalidInput;
        return cert;
    }
    let mut x = t.clone();
    for i in 1..=levels {
        x = f.eval(&x);
        if x == *t {
            cert.check("non-periodic", Some(i), false, format!("f^{i}(t) = t"));
            cert.verdict = Verdict::InvalidInput;
            return cert;
        }
    }
    cert.check("non-periodic", None, true, format!("f^i(t) != t for 1 <= i <= {levels}"));

    match mode {
        LittleGaloisMode::BigLocal => cert.little_galois = little_galois_big_local(f, d, p, q),
        LittleGaloisMode::Assumed => {
            cert.little_galois.established = true;
            cert.little_galois.records.push("user assertion: each f(x) - α is irreducible over K(α) with group S_d or A_d".into());
            cert.assumptions.push("little Galois groups S_d or A_d at every level (user assertion); result is CONDITIONAL".into());
        }
        LittleGaloisMode::Quadratic => {}
    }

    let steps = match &opts.source {
        ClassSource::Exact | ClassSource::FastCalibrated => run_class_steps(&mut cert, f, t, levels),
        ClassSource::Characters { max_primes } => run_character_steps(&mut cert, f, t, levels, *max_primes),
    };
    let Some(()) = steps else {
        return cert;
    };

    if mode == LittleGaloisMode::Quadratic {
        let passed: Vec<usize> =
            cert.steps.iter().filter(|s| s.outcome == StepOutcome::Pass).map(|s| s.level).collect();
        for n in &passed {
            cert.little_galois.records.push(format!(
                "level {n}: disc class outside the span of lower levels, so disc(f(x) - α) is a nonsquare over K(α) \
                 for each root α of f^{}(x) - t; f(x) - α is irreducible with group S_2",
                n - 1
            ));
        }
        cert.little_galois.established = passed.len() == levels;
    }

    let first_fail = cert.steps.iter().find(|s| matches!(s.outcome, StepOutcome::Fail { .. })).map(|s| s.level);
    let all_pass = cert.steps.len() == levels && cert.steps.iter().all(|s| s.outcome == StepOutcome::Pass);
    cert.verdict = if let Some(n) = first_fail {
        Verdict::CriterionFailedAtLevel(n)
    } else if all_pass && cert.little_galois.established {
        Verdict::SurjectiveThroughLevel(levels)
    } else {
        Verdict::Unknown
    };
    cert
}

/// Exact or calibrated classes. Returns `None` after setting a terminal
/// verdict.
fn run_class_steps(cert: &mut Certificate, f: &RatPoly, t: &BigRat, levels: usize) -> Option<()> {
    let path = match cert.input.options.source {
        ClassSource::FastCalibrated => DiscPath::FastCalibrated,
        _ => DiscPath::Exact,
    };
    let cap = cert.input.options.raw_bit_cap;
    let mut classes: Vec<SquareClass> = Vec::new();
    for n in 1..=levels {
        let entry = match disc_entry(f, t, n, path, cap) {
            Ok(e) => e,
            Err(Error::Inseparable { level }) => {
                cert.check("separable", Some(level), false, "discriminant vanishes");
                cert.verdict = Verdict::InvalidInput;
                return None;
            }
            Err(e) => {
                cert.check("disc-class", Some(n), false, e.to_string());
                cert.verdict = Verdict::Unknown;
                return None;
            }
        };
        cert.check("separable", Some(n), true, "discriminant is nonzero");
        let outcome = span_verdict(&entry.class, &classes);
        let failed = matches!(outcome, StepOutcome::Fail { .. });
        classes.push(entry.class.clone());
        cert.disc_classes.push(entry);
        cert.steps.push(StepRecord { level: n, outcome });
        if failed {
            break;
        }
    }
    cert.independence = Some(independent(&classes));
    Some(())
}

fn run_character_steps(
    cert: &mut Certificate,
    f: &RatPoly,
    t: &BigRat,
    levels: usize,
    max_primes: usize,
) -> Option<()> {
    let mut primes = Vec::new();
    let mut cols: Vec<Vec<i8>> = Vec::new();
    let mut r = 2;
    let rank_of = |cols: &[Vec<i8>]| -> usize {
        let rows = transpose(cols, levels);
        (1..=levels).filter(|&n| row_outside_span(&rows, n)).count()
    };
    while primes.len() < max_primes && rank_of(&cols) < levels {
        r = next_prime_u64(r + 1);
        if r >= 1 << 32 {
            break;
        }
        if let Some(ch) = disc_characters_mod(f, t, levels, r) {
            primes.push(r);
            cols.push(ch);
        }
    }
    if primes.is_empty() {
        cert.check("separable", None, false, "no good prime found to witness nonzero discriminants");
        cert.verdict = Verdict::Unknown;
        return None;
    }
    for n in 1..=levels {
        cert.check("separable", Some(n), true, format!("discriminant is nonzero modulo {}", primes[0]));
    }
    let rows = transpose(&cols, levels);
    for n in 1..=levels {
        let outcome = if row_outside_span(&rows, n) {
            StepOutcome::Pass
        } else {
            StepOutcome::Unknown {
                reason: format!("character vector lies in the span of lower levels over {} primes", primes.len()),
            }
        };
        cert.steps.push(StepRecord { level: n, outcome });
    }
    let rank = rank_of(&cols);
    cert.character_evidence = Some(CharacterEvidence {
        primes,
        rows: rows.iter().map(|r| r.iter().map(|&b| u8::from(b)).collect()).collect(),
        rank,
    });
    if rank == levels {
        cert.independence = Some(Independence { independent: true, witness: None });
    }
    Some(())
}

fn transpose(cols: &[Vec<i8>], levels: usize) -> Vec<Vec<bool>> {
    (0..levels).map(|n| cols.iter().map(|c| c[n] < 0).collect()).collect()
}

/// Row `n` (1-based) outside the F2 span of rows `1..n`.
fn row_outside_span(rows: &[Vec<bool>], n: usize) -> bool {
    let target = &rows[n - 1];
    if n == 1 {
        return target.iter().any(|&b| b);
    }
    f2_solve(target, &rows[..n - 1]).is_none()
}

/// Upgrades a through-level certificate to all levels. Only sound when the
/// little-Galois evidence is level-uniform and `justification` proves the
/// discriminant condition at every level; callers are responsible for the
/// latter.
pub fn upgrade_all_levels(mut cert: Certificate, justification: String) -> Result<Certificate> {
    if !matches!(cert.verdict, Verdict::SurjectiveThroughLevel(_)) {
        return Err(Error::InvalidInput(format!("cannot upgrade a {} certificate", cert.verdict)));
    }
    if !(cert.little_galois.level_uniform && cert.little_galois.established) {
        return Err(Error::InvalidInput("little-Galois evidence is not level-uniform".into()));
    }
    cert.all_levels = Some(AllLevels { justification });
    cert.verdict = Verdict::SurjectiveAllLevels;
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReplayReport {
    pub matches: bool,
    pub recomputed_verdict: Verdict,
    /// The all-levels upgrade is not re-derived here; it needs the
    /// construction-specific verifier.
    pub upgrade_pending: bool,
}

/// Re-runs the pipeline from the certificate's own input and compares the
/// serialized result with the original.
pub fn replay(cert: &Certificate) -> ReplayReport {
    let i = &cert.input;
    let fresh = certify_surjective_with(&i.poly, &i.t, i.levels, i.mode, i.p, i.q, &i.options);
    let mut base = cert.clone();
    let upgrade_pending = base.all_levels.take().is_some();
    if upgrade_pending {
        base.verdict = Verdict::SurjectiveThroughLevel(i.levels);
    }
    ReplayReport {
        matches: fresh.to_json() == base.to_json(),
        recomputed_verdict: fresh.verdict,
        upgrade_pending,
    }
}

/// One-line summary for terminals.
pub fn summary(cert: &Certificate) -> String {
    let classes: Vec<String> = cert.disc_classes.iter().map(|e| e.class.describe()).collect();
    format!(
        "f = {} ({}), t = {}, levels = {}, mode = {}: {}{}",
        cert.input.poly,
        format_poly_list(&cert.input.poly),
        crate::exact::format_rat(&cert.input.t),
        cert.input.levels,
        cert.little_galois.label,
        cert.verdict,
        if classes.is_empty() { String::new() } else { format!("; classes [{}]", classes.join(", ")) }
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c)
    }

    fn cls(x: i64) -> SquareClass {
        SquareClass::of_rational(&rat(x)).unwrap()
    }

    #[test]
    fn quadratic_example_surjective() {
        let cert = certify_surjective(&p(&[1, 0, 1]), &rat(0), 5, LittleGaloisMode::Quadratic, None, None);
        assert_eq!(cert.verdict, Verdict::SurjectiveThroughLevel(5));
        assert_eq!(cert.little_galois.label, "Stoll-type");
        let want = [-1, 2, 5, 26, 677];
        for (c, w) in cert.classes().iter().zip(want) {
            assert!(c.same_class(&cls(w)));
        }
        assert_eq!(cert.independence.as_ref().unwrap().independent, true);
        assert_eq!(cert.verdict.exit_code(), 0);
    }

    #[test]
    fn degenerate_control_fails_with_witness() {
        let cert = certify_surjective(&p(&[-2, 0, 1]), &rat(0), 3, LittleGaloisMode::Quadratic, None, None);
        // the level-1 and level-2 classes are both the class of 2
        assert_eq!(cert.verdict, Verdict::CriterionFailedAtLevel(2));
        assert_eq!(cert.steps[1].outcome, StepOutcome::Fail { span: vec![1] });
        assert_eq!(cert.independence.as_ref().unwrap().witness, Some(vec![1, 1]));
        assert_eq!(cert.verdict.exit_code(), 1);
    }

    #[test]
    fn invalid_inputs() {
        let odd = certify_surjective(&p(&[1, 0, 0, 1]), &rat(0), 2, LittleGaloisMode::Assumed, None, None);
        assert_eq!(odd.verdict, Verdict::InvalidInput);
        assert_eq!(odd.verdict.exit_code(), 3);
        // 0 is fixed by x^2
        let periodic = certify_surjective(&p(&[0, 0, 1]), &rat(0), 2, LittleGaloisMode::Quadratic, None, None);
        assert_eq!(periodic.verdict, Verdict::InvalidInput);
        let quartic = certify_surjective(&p(&[1, 0, 0, 0, 1]), &rat(0), 2, LittleGaloisMode::Quadratic, None, None);
        assert_eq!(quartic.verdict, Verdict::InvalidInput);
    }

    #[test]
    fn level_step_examples() {
        let f = p(&[1, 0, 1]);
        let s = check_level_step(&f, &rat(0), 2, &[SquareClass::minus_one()]).unwrap();
        assert_eq!(s.outcome, StepOutcome::Pass);
        let g = p(&[-2, 0, 1]);
        let s = check_level_step(&g, &rat(0), 3, &[cls(2), cls(2)]).unwrap();
        assert!(matches!(s.outcome, StepOutcome::Fail { .. }));
        let s = check_level_step(&f, &rat(0), 1, &[]).unwrap();
        assert_eq!(s.outcome, StepOutcome::Pass);
        // x^2 - 1/4 at t = 0: disc = 1 is a square
        let h = RatPoly::new(vec![crate::exact::rat_frac(-1, 4), rat(0), rat(1)]);
        let s = check_level_step(&h, &rat(0), 1, &[]).unwrap();
        assert_eq!(s.outcome, StepOutcome::Fail { span: vec![] });
    }

    #[test]
    fn assumed_mode_is_conditional() {
        let cert = certify_surjective(&p(&[1, 1, 0, 0, 1]), &rat(0), 2, LittleGaloisMode::Assumed, None, None);
        assert!(cert.little_galois.conditional);
        assert!(cert.assumptions.iter().any(|a| a.contains("CONDITIONAL")));
    }

    #[test]
    fn verdict_strings_round_trip() {
        for v in [
            Verdict::SurjectiveAllLevels,
            Verdict::SurjectiveThroughLevel(5),
            Verdict::CriterionFailedAtLevel(3),
            Verdict::Unknown,
            Verdict::InvalidInput,
        ] {
            assert_eq!(v.to_string().parse::<Verdict>().unwrap(), v);
        }
        assert!("SURJECTIVE".parse::<Verdict>().is_err());
    }

    #[test]
    fn certificates_replay_bit_for_bit() {
        for (f, mode, n) in [
            (p(&[1, 0, 1]), LittleGaloisMode::Quadratic, 4),
            (p(&[-2, 0, 1]), LittleGaloisMode::Quadratic, 3),
            (p(&[1, 1, 0, 0, 1]), LittleGaloisMode::Assumed, 2),
        ] {
            let cert = certify_surjective(&f, &rat(0), n, mode, None, None);
            let back = Certificate::from_json(&cert.to_json()).unwrap();
            assert_eq!(back, cert);
            let r = replay(&back);
            assert!(r.matches);
            assert_eq!(r.recomputed_verdict, cert.verdict);
        }
    }

    #[test]
    fn character_route_agrees_with_exact() {
        let opts = CertifyOptions { source: ClassSource::Characters { max_primes: 40 }, ..Default::default() };
        let f = p(&[1, 0, 1]);
        let cert = certify_surjective_with(&f, &rat(0), 4, LittleGaloisMode::Quadratic, None, None, &opts);
        assert_eq!(cert.verdict, Verdict::SurjectiveThroughLevel(4));
        assert_eq!(cert.character_evidence.as_ref().unwrap().rank, 4);
        // dependent classes can never pass on characters
        let g = p(&[-2, 0, 1]);
        let cert = certify_surjective_with(&g, &rat(0), 3, LittleGaloisMode::Quadratic, None, None, &opts);
        assert_eq!(cert.verdict, Verdict::Unknown);
        assert!(matches!(cert.steps[1].outcome, StepOutcome::Unknown { .. }));
    }

    #[test]
    fn json_schema_keys() {
        let cert = certify_surjective(&p(&[1, 0, 1]), &rat(0), 2, LittleGaloisMode::Quadratic, None, None);
        let v: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        for key in ["input", "checks", "littleGalois", "discClasses", "verdict", "assumptions"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["input"]["poly"], "1,0,1");
        assert_eq!(v["verdict"], "SURJECTIVE_THROUGH_LEVEL_2");
    }
}
