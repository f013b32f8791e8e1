//! Emit a certificate as JSON, parse it back and replay it.
//!
//! `cargo run --release --example certificate_json`

use arbocert::certify::{certify_surjective, replay, Certificate, LittleGaloisMode};
use arbocert::exact::rat;
use arbocert::poly::RatPoly;

fn main() -> arbocert::Result<()> {
    let f = RatPoly::from_ints(&[1, 0, 1]);
    let cert = certify_surjective(&f, &rat(0), 3, LittleGaloisMode::Quadratic, None, None);
    let json = cert.to_json();
    println!("{json}");
    let back = Certificate::from_json(&json)?;
    let r = replay(&back);
    println!("replay matches: {}, verdict {}", r.matches, r.recomputed_verdict);
    Ok(())
}
