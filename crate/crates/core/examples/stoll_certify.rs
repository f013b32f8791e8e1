//! Certify x^2 + 1 through level 5 and show the failure for x^2 - 2.
//!
//! `cargo run --release --example stoll_certify`

use arbocert::certify::{certify_surjective, summary, LittleGaloisMode};
use arbocert::exact::rat;
use arbocert::poly::RatPoly;

fn main() {
    let f = RatPoly::from_ints(&[1, 0, 1]);
    let cert = certify_surjective(&f, &rat(0), 5, LittleGaloisMode::Quadratic, None, None);
    println!("{}", summary(&cert));
    for step in &cert.steps {
        println!("  level {}: {:?}", step.level, step.outcome);
    }

    let g = RatPoly::from_ints(&[-2, 0, 1]);
    let cert = certify_surjective(&g, &rat(0), 3, LittleGaloisMode::Quadratic, None, None);
    println!("{}", summary(&cert));
    for step in &cert.steps {
        println!("  level {}: {:?}", step.level, step.outcome);
    }
}
