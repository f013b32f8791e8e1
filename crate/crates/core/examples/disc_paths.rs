//! Discriminants of f^n(x) - t by resultants and by the critical orbit,
//! with the sign calibration made visible.
//!
//! `cargo run --release --example disc_paths`

use arbocert::discseq::{calibrate_sign, cop_at, disc_exact_at, disc_poly, disc_sequence, DiscPath};
use arbocert::exact::{format_rat, rat_frac};
use arbocert::poly::RatPoly;
use arbocert::squareclass::SquareClass;

fn main() -> arbocert::Result<()> {
    let f = RatPoly::from_ints(&[3, 1, 0, -2, 1]);
    let t = rat_frac(1, 3);
    println!("f = {f}, t = {}", format_rat(&t));
    for n in 1..=3 {
        let exact = disc_exact_at(&f, &t, n)?;
        let cop = cop_at(&f, &t, n)?;
        let cal = calibrate_sign(&f, n)?;
        let fast = cal.class.mul(&SquareClass::of_rational(&cop)?);
        let exact_class = SquareClass::of_rational(&exact)?;
        println!(
            "level {n}: disc has {} bits, orbit product {} bits, representative {}, same class: {}",
            arbocert::exact::height_bits(&exact),
            arbocert::exact::height_bits(&cop),
            format_rat(&cal.representative),
            fast.same_class(&exact_class)
        );
    }

    let seq = disc_sequence(&f, &t, 3, DiscPath::FastCalibrated)?;
    for e in &seq.entries {
        println!("fast path level {}: {:?}, class has {} atoms", e.level, e.path, e.class.atoms.len());
    }

    let g = RatPoly::from_ints(&[1, 0, 1]);
    println!("disc_x(f^2(x) - t) for x^2 + 1: {}", disc_poly(&g, 2)?.to_string().replace('x', "t"));
    Ok(())
}
