//! Iterated monodromy over Q(t): Morse check, critical-orbit finiteness and
//! freshness of the odd-multiplicity supports.
//!
//! `cargo run --release --example monodromy`

use arbocert::monodromy::{certify_monodromy, morse_check, pcf_detect, Hypothesis};
use arbocert::poly::RatPoly;

fn main() -> arbocert::Result<()> {
    for coeffs in [vec![1, 0, 1], vec![-2, 0, 1], vec![0, 0, 1], vec![-1, 0, 1]] {
        let f = RatPoly::from_ints(&coeffs);
        println!("{f}: morse {}, orbit {:?}", morse_check(&f)?, pcf_detect(&f, 4)?);
        let r = certify_monodromy(&f, 3, Hypothesis::Morse)?;
        for fr in &r.freshness {
            let sup: Vec<String> = fr.support.iter().map(|s| s.to_string().replace('x', "t")).collect();
            println!("  level {}: {{{}}} fresh {}", fr.level, sup.join(", "), fr.fresh);
        }
        println!("  verdict {}", r.verdict);
    }
    let f = RatPoly::from_ints(&[0, 1, 0, 0, 1]);
    println!("{f}: morse {}, verdict {}", morse_check(&f)?, certify_monodromy(&f, 2, Hypothesis::Morse)?.verdict);
    Ok(())
}
