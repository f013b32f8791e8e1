//! Frobenius cycle types of `f^n(x) - t` modulo primes, and a comparison
//! against uniform sampling of `Aut(T_n)`.
//!
//! Evidence only: nothing here feeds a certificate verdict.

use crate::error::{Error, Result};
use crate::exact::{is_prime_u64, primes_up_to, rat_mod, BigRat};
use crate::poly::fp::FpPoly;
use crate::poly::RatPoly;
use crate::treegroup::{CycleType, TreePortrait};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_GROUP_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_LEAF_CAP: usize = 64;
const SAMPLE_CHUNK: u64 = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrobeniusType {
    Unramified(CycleType),
    /// Bad reduction: a denominator or the leading coefficient vanishes, or
    /// the reduction is inseparable.
    Ramified,
}

/// `f^n` over `F_p`, by iterated composition of the reduction.
fn iterate_mod(f: &FpPoly, n: usize) -> FpPoly {
    let mut acc = FpPoly::x(f.modulus());
    for _ in 0..n {
        acc = f.compose(&acc);
    }
    acc
}

pub fn cycle_type_mod_p(f: &RatPoly, t: &BigRat, n: usize, p: u64) -> Result<FrobeniusType> {
    if !is_prime_u64(p) || p >= 1 << 32 {
        return Err(Error::NotPrime(p.to_string()));
    }
    let (Some(fr), Some(tr)) = (FpPoly::from_ratpoly(f, p), rat_mod(t, p)) else {
        return Ok(FrobeniusType::Ramified);
    };
    if fr.degree() != f.degree() {
        return Ok(FrobeniusType::Ramified);
    }
    let g = iterate_mod(&fr, n).sub(&FpPoly::new(p, vec![tr]));
    if g.degree().map_or(true, |d| d == 0) || !g.is_squarefree() {
        return Ok(FrobeniusType::Ramified);
    }
    Ok(FrobeniusType::Unramified(CycleType(g.factor_degrees())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub level: usize,
    pub prime_bound: u64,
    pub seed: u64,
    pub unramified_primes: u64,
    pub ramified_primes: Vec<u64>,
    /// Keyed by the cycle type in `{1,1,2}` form.
    pub frobenius: BTreeMap<String, Frequency>,
    pub group_samples: u64,
    pub group: BTreeMap<String, Frequency>,
    pub tv_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub group_samples: u64,
    pub leaf_cap: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { group_samples: DEFAULT_GROUP_SAMPLES, leaf_cap: DEFAULT_LEAF_CAP }
    }
}

fn normalize(counts: &BTreeMap<CycleType, u64>) -> BTreeMap<CycleType, f64> {
    let total: u64 = counts.values().sum();
    counts.iter().map(|(k, &v)| (k.clone(), v as f64 / total as f64)).collect()
}

/// `½ Σ |p - q|` over the union of supports.
pub fn total_variation(a: &BTreeMap<CycleType, f64>, b: &BTreeMap<CycleType, f64>) -> f64 {
    let mut keys: Vec<&CycleType> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

fn table(counts: &BTreeMap<CycleType, u64>) -> BTreeMap<String, Frequency> {
    let freq = normalize(counts);
    counts
        .iter()
        .map(|(k, &count)| (k.to_string(), Frequency { count, frequency: freq[k] }))
        .collect()
}

/// Leaf cycle-type counts of `samples` uniform elements of `Aut(T_n)`.
///
/// Work is split into fixed chunks seeded by `(seed, chunk index)`, so the
/// result does not depend on the number of worker threads.
pub fn sample_group_cycle_types(arity: usize, depth: usize, samples: u64, seed: u64) -> Result<BTreeMap<CycleType, u64>> {
    TreePortrait::identity(arity, depth)?;
    let chunks: Vec<(u64, u64)> = (0..samples.div_ceil(SAMPLE_CHUNK))
        .map(|i| (i, SAMPLE_CHUNK.min(samples - i * SAMPLE_CHUNK)))
        .collect();
    let run = |&(idx, len): &(u64, u64)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ idx.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut m: BTreeMap<CycleType, u64> = BTreeMap::new();
        for _ in 0..len {
            let g = TreePortrait::random_with(arity, depth, &mut rng).expect("shape checked");
            *m.entry(g.cycle_type_on_leaves()).or_default() += 1;
        }
        m
    };
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(chunks.len().max(1));
    let parts: Vec<BTreeMap<CycleType, u64>> = if workers <= 1 {
        chunks.iter().map(run).collect()
    } else {
        let per = chunks.len().div_ceil(workers);
        std::thread::scope(|s| {
            let hs: Vec<_> = chunks
                .chunks(per)
                .map(|c| {
                    let run = &run;
                    s.spawn(move || c.iter().map(run).collect::<Vec<_>>())
                })
                .collect();
            hs.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut total = BTreeMap::new();
    for part in parts {
        for (k, v) in part {
            *total.entry(k).or_default() += v;
        }
    }
    Ok(total)
}

/// Frobenius cycle-type counts over primes `<= prime_bound`, with the list
/// of primes of bad reduction.
pub fn frobenius_counts(
    f: &RatPoly,
    t: &BigRat,
    n: usize,
    prime_bound: u64,
) -> Result<(BTreeMap<CycleType, u64>, Vec<u64>)> {
    let mut counts = BTreeMap::new();
    let mut ramified = Vec::new();
    for p in primes_up_to(prime_bound.min((1 << 32) - 1)) {
        match cycle_type_mod_p(f, t, n, p)? {
            FrobeniusType::Unramified(ct) => *counts.entry(ct).or_default() += 1,
            FrobeniusType::Ramified => ramified.push(p),
        }
    }
    Ok((counts, ramified))
}

pub fn chebotarev_scan(f: &RatPoly, t: &BigRat, n: usize, prime_bound: u64, seed: u64) -> Result<ScanReport> {
    chebotarev_scan_with(f, t, n, prime_bound, seed, ScanOptions::default())
}

pub fn chebotarev_scan_with(
    f: &RatPoly,
    t: &BigRat,
    n: usize,
    prime_bound: u64,
    seed: u64,
    opts: ScanOptions,
) -> Result<ScanReport> {
    let d = f.degree().filter(|&d| d >= 2).ok_or_else(|| Error::InvalidInput("need deg f >= 2".into()))?;
    let leaves = (d as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if leaves > opts.leaf_cap as u64 {
        return Err(Error::SizeCap(format!("d^n = {leaves} exceeds the leaf cap {}", opts.leaf_cap)));
    }
    let (counts, ramified) = frobenius_counts(f, t, n, prime_bound)?;
    if counts.is_empty() {
        return Err(Error::InvalidInput(format!("no unramified primes up to {prime_bound}")));
    }
    let group = sample_group_cycle_types(d, n, opts.group_samples, seed)?;
    let tv = total_variation(&normalize(&counts), &normalize(&group));
    Ok(ScanReport {
        level: n,
        prime_bound,
        seed,
        unramified_primes: counts.values().sum(),
        ramified_primes: ramified,
        frobenius: table(&counts),
        group_samples: opts.group_samples,
        group: table(&group),
        tv_distance: tv,
    })
}
