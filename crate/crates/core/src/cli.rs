//! Command-line front end. Exit codes follow [`crate::certify::Verdict::exit_code`]:
//! 0 surjective, 1 criterion failed, 2 unknown, 3 invalid input.

use crate::certify::{certify_surjective_with, replay, summary, Certificate, CertifyOptions, ClassSource, LittleGaloisMode};
use crate::discseq::DEFAULT_RAW_BIT_CAP;
use crate::error::{Error, Result};
use crate::exact::parse_rat;
use crate::family::{construct_with_levels, replay_instance, FamilyInstance, DEFAULT_CERT_LEVELS};
use crate::frobenius::{chebotarev_scan_with, sample_group_cycle_types, ScanOptions, DEFAULT_GROUP_SAMPLES};
use crate::monodromy::{certify_monodromy, Hypothesis, MonodromyReport, PcfVerdict};
use crate::poly::{format_poly_list, parse_poly};
use crate::treegroup::{group_order, quadratic_character_count_bruteforce};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "arbocert", version, about = "Certify surjectivity of arboreal Galois representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Source {
    Exact,
    FastCalibrated,
    Characters,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify surjectivity through a finite level.
    Certify {
        /// Little-endian coefficients `c0,c1,...`, or `x^2+1` syntax.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value = "big-local")]
        mode: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        /// How discriminant square classes are obtained.
        #[arg(long, value_enum, default_value = "exact")]
        source: Source,
        /// Primes tried by the character source.
        #[arg(long, default_value_t = 64)]
        max_primes: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Build and certify an explicit family member (degree divisible by 4, at least 20).
    Family {
        #[arg(long, default_value_t = 20)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CERT_LEVELS)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterated monodromy over Q(t).
    Monodromy {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        levels: usize,
        /// Assume the little Galois group is A_d or S_d instead of
        /// running the Morse check.
        #[arg(long)]
        assume_big_galois: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Frobenius cycle-type statistics against Aut(T_n).
    Frobenius {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 100_000)]
        prime_bound: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_GROUP_SAMPLES)]
        samples: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Order, quadratic characters and sampled cycle types of Aut(T_n).
    Group {
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-verify a certificate or family JSON artifact.
    Replay {
        #[arg(long)]
        file: PathBuf,
    },
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    std::fs::write(path, s).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Parse(_) | Error::NotPrime(_) | Error::Inseparable { .. } | Error::ZeroPolynomial => 3,
        Error::NoPrimeInWindow { .. } => 3,
        _ => 2,
    }
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Certify { poly, t, levels, mode, p, q, source, max_primes, json } => {
            let f = parse_poly(&poly)?;
            let t = parse_rat(&t)?;
            let mode: LittleGaloisMode = mode.parse()?;
            let source = match source {
                Source::Exact => ClassSource::Exact,
                Source::FastCalibrated => ClassSource::FastCalibrated,
                Source::Characters => ClassSource::Characters { max_primes },
            };
            let opts = CertifyOptions { source, raw_bit_cap: DEFAULT_RAW_BIT_CAP };
            let cert = certify_surjective_with(&f, &t, levels, mode, p, q, &opts);
            println!("{}", summary(&cert));
            if let Some(path) = json {
                write_json(&path, &cert)?;
            }
            Ok(cert.verdict.exit_code())
        }
        Command::Family { degree, seed, levels, out } => {
            let inst = construct_with_levels(degree, seed, levels)?;
            print_family(&inst);
            if let Some(path) = out {
                write_json(&path, &inst)?;
            }
            Ok(inst.certificate.verdict.exit_code())
        }
        Command::Monodromy { poly, levels, assume_big_galois, json } => {
            let f = parse_poly(&poly)?;
            let hyp = if assume_big_galois { Hypothesis::Assumed } else { Hypothesis::Morse };
            let r = certify_monodromy(&f, levels, hyp)?;
            print_monodromy(&r);
            if let Some(path) = json {
                write_json(&path, &r)?;
            }
            Ok(r.verdict.exit_code())
        }
        Command::Frobenius { poly, t, level, prime_bound, seed, samples, json } => {
            let f = parse_poly(&poly)?;
            let t = parse_rat(&t)?;
            let opts = ScanOptions { group_samples: samples, ..ScanOptions::default() };
            let r = chebotarev_scan_with(&f, &t, level, prime_bound, seed, opts)?;
            println!(
                "level {level}, primes < {prime_bound}: {} unramified, {} ramified",
                r.unramified_primes,
                r.ramified_primes.len()
            );
            println!("{:<28} {:>10} {:>10}", "cycle type", "frobenius", "group");
            let keys: std::collections::BTreeSet<&String> = r.frobenius.keys().chain(r.group.keys()).collect();
            for k in keys {
                let fr = r.frobenius.get(k).map_or(0.0, |x| x.frequency);
                let gr = r.group.get(k).map_or(0.0, |x| x.frequency);
                println!("{k:<28} {fr:>10.5} {gr:>10.5}");
            }
            println!("total variation distance: {:.5}", r.tv_distance);
            if let Some(path) = json {
                write_json(&path, &r)?;
            }
            Ok(0)
        }
        Command::Group { arity, depth, samples, seed } => {
            if arity < 2 || depth == 0 {
                return Err(Error::InvalidInput("need arity >= 2 and depth >= 1".into()));
            }
            println!("|Aut(T_{depth})| for arity {arity} = {}", group_order(arity as u64, depth as u32));
            match quadratic_character_count_bruteforce(arity, depth) {
                Ok(n) => println!("quadratic characters (commutator closure): {n}"),
                Err(Error::SizeCap(_)) => println!("quadratic characters: group too large to enumerate"),
                Err(e) => return Err(e),
            }
            if samples > 0 {
                let counts = sample_group_cycle_types(arity, depth, samples, seed)?;
                for (ct, c) in counts {
                    println!("{ct:<28} {:>10.5}", c as f64 / samples as f64);
                }
            }
            Ok(0)
        }
        Command::Replay { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", file.display())))?;
            if let Ok(inst) = serde_json::from_str::<FamilyInstance>(&text) {
                let r = replay_instance(&inst)?;
                println!(
                    "family replay: polynomial {}, conditions {}, certificate {}; verdict {}",
                    ok(r.poly_matches),
                    ok(r.checklist_matches),
                    ok(r.certificate_matches),
                    r.verdict
                );
                return Ok(if r.ok() { r.verdict.exit_code() } else { 1 });
            }
            if let Ok(report) = serde_json::from_str::<MonodromyReport>(&text) {
                let hyp = report.hypothesis.mode;
                let fresh = certify_monodromy(&report.poly, report.levels, hyp)?;
                let same = fresh == report;
                println!("monodromy replay: {}; verdict {}", ok(same), fresh.verdict);
                return Ok(if same { fresh.verdict.exit_code() } else { 1 });
            }
            let cert = Certificate::from_json(&text)?;
            let r = replay(&cert);
            let verdict = if r.upgrade_pending { cert.verdict } else { r.recomputed_verdict };
            println!(
                "certificate replay: {}{}; verdict {verdict}",
                ok(r.matches),
                if r.upgrade_pending { " (all-levels upgrade needs the family verifier)" } else { "" }
            );
            Ok(if r.matches { verdict.exit_code() } else { 1 })
        }
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "matches"
    } else {
        "MISMATCH"
    }
}

fn print_family(inst: &FamilyInstance) {
    let p = &inst.params;
    println!("degree {}: k = {}, u = {}, p = {}, q = {}, ell = {}, M = {}, m = {}", p.d, p.k, p.u, p.p, p.q, p.ell, p.two_adic, p.m);
    println!("A = {}", p.a);
    println!("B = {}", p.b);
    println!("D = {}", p.dconst);
    println!(
        "bits: A {}, B {}, C {}/{}, D {}, largest coefficient {}",
        inst.sizes.a, inst.sizes.b, inst.sizes.c_num, inst.sizes.c_den, inst.sizes.d, inst.sizes.max_coefficient
    );
    for (name, e) in inst.checklist.items() {
        println!("[{}] {name}: {}", if e.holds { "ok" } else { "FAIL" }, e.evidence);
    }
    println!("big-local certificate with (p, q) = ({}, {}): {}", p.p, p.q, inst.big_local.is_certified());
    println!("common-prime test on orbit values: {}", if inst.lemma_rigid.all_hold { "holds" } else { "FAILS" });
    println!("verdict: {}", inst.certificate.verdict);
}

fn print_monodromy(r: &MonodromyReport) {
    println!("f = {} ({}), levels = {}", r.poly, format_poly_list(&r.poly), r.levels);
    let hyp = match (r.hypothesis.mode, r.hypothesis.morse) {
        (Hypothesis::Assumed, _) => "assumed".to_string(),
        (_, Some(true)) => "morse check passed".to_string(),
        _ => "morse check failed".to_string(),
    };
    println!("little Galois group hypothesis: {hyp}");
    for fr in &r.freshness {
        let sup: Vec<String> = fr.support.iter().map(|s| s.to_string().replace('x', "t")).collect();
        println!("level {}: support {{{}}}, fresh: {}", fr.level, sup.join(", "), fr.fresh);
    }
    let pcf = match &r.pcf {
        PcfVerdict::InfiniteOrbitDetected { level } => format!("infinite critical orbit (level {level})"),
        PcfVerdict::PcfDetected { level } => format!("post-critically finite (level {level})"),
        PcfVerdict::UndeterminedAtCap { cap } => format!("undetermined at cap {cap}"),
    };
    println!("critical orbit: {pcf}");
    println!("verdict: {}", r.verdict);
}
