//! Exact resultants two ways and the product rule for discriminants.
//!
//! `cargo run --release --example resultants`

use arbocert::exact::{crt_assemble, format_rat, sqrt_mod};
use arbocert::poly::{check_products_identity, discriminant, discriminant_subresultant, resultant, RatPoly};
use num_bigint::BigInt;

fn main() -> arbocert::Result<()> {
    let p = RatPoly::from_ints(&[1, -3, 0, 2]);
    let q = RatPoly::from_ints(&[5, 1, 1]);
    println!("Res({p}, {q}) = {}", format_rat(&resultant(&p, &q)?));
    println!("disc via CRT = {}, via subresultants = {}", format_rat(&discriminant(&p)?), format_rat(&discriminant_subresultant(&p)?));
    println!("disc(PQ) = disc(P) disc(Q) Res(P,Q)^2: {}", check_products_identity(&p, &q)?);
    let x = crt_assemble(&[(BigInt::from(2), BigInt::from(7)), (BigInt::from(3), BigInt::from(11))])?;
    println!("x ≡ 2 mod 7, x ≡ 3 mod 11: x = {x}");
    println!("sqrt(2) mod 7 = {:?}", sqrt_mod(&BigInt::from(2), 7)?);
    Ok(())
}
