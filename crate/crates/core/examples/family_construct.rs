//! Build the degree-20 family member, print its parameters, the condition
//! checklist and the certificate verdict.
//!
//! `cargo run --release --example family_construct -- [degree] [seed]`

use arbocert::family::{construct, replay_instance};
use std::time::Instant;

fn main() -> arbocert::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().map_or(20, |s| s.parse().expect("degree"));
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let start = Instant::now();
    let inst = construct(d, seed)?;
    let p = &inst.params;
    println!("degree {d}, seed {seed}: p = {}, q = {}, ell = {}, M = {}", p.p, p.q, p.ell, p.two_adic);
    println!(
        "bits: A {}, B {}, C {}/{}, D {}, largest coefficient {}",
        inst.sizes.a, inst.sizes.b, inst.sizes.c_num, inst.sizes.c_den, inst.sizes.d, inst.sizes.max_coefficient
    );
    for line in &p.provenance {
        println!("  {line}");
    }
    for (name, e) in inst.checklist.items() {
        println!("[{}] {name}: {}", if e.holds { "ok" } else { "FAIL" }, e.evidence);
    }
    let rigid = &inst.lemma_rigid;
    println!(
        "common-prime test: {} pairs, all hold: {}, {} orbits cut at the bit cap",
        rigid.cases.len(),
        rigid.all_hold,
        rigid.skipped.len()
    );
    println!("big-local certified: {}", inst.big_local.is_certified());
    println!("verdict: {}", inst.certificate.verdict);
    println!("built in {:.1?}", start.elapsed());
    let r = replay_instance(&inst)?;
    println!("replay ok: {} ({})", r.ok(), r.verdict);
    Ok(())
}
