//! Square classes over Q and Q(t) and F2 independence with witnesses.
//!
//! `cargo run --release --example square_classes`

use arbocert::exact::rat;
use arbocert::poly::RatPoly;
use arbocert::squareclass::{class_of_tpolynomial, independent, in_span, ClassMode, SquareClass};

fn main() -> arbocert::Result<()> {
    let classes: Vec<SquareClass> = [-1i64, 2, 5, 26, 677].iter().map(|&x| SquareClass::of_rational(&rat(x))).collect::<Result<_, _>>()?;
    println!("x^2 + 1 orbit classes independent: {:?}", independent(&classes));

    let dep: Vec<SquareClass> = [6i64, 10, 15].iter().map(|&x| SquareClass::of_rational(&rat(x))).collect::<Result<_, _>>()?;
    println!("6, 10, 15: {:?}", independent(&dep));
    println!("30 in span of 6, 10: {:?}", in_span(&SquareClass::of_rational(&rat(30))?, &dep[..2]));

    // -4 (t - 1)^3 (t + 2)^2
    let p = RatPoly::from_ints(&[-1, 1]).mul(&RatPoly::from_ints(&[-1, 1])).mul(&RatPoly::from_ints(&[-1, 1]));
    let p = p.mul(&RatPoly::from_ints(&[2, 1])).mul(&RatPoly::from_ints(&[2, 1])).scale(&rat(-4));
    println!("arithmetic: {}", class_of_tpolynomial(&p, ClassMode::Arithmetic)?.describe());
    println!("geometric:  {}", class_of_tpolynomial(&p, ClassMode::Geometric)?.describe());
    Ok(())
}
