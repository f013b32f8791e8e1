//! Newton polygons, Eisenstein checks and the big-local certificate.
//!
//! `cargo run --release --example local_shapes`

use arbocert::localval::{big_local_certificate, is_eisenstein, newton_polygon};
use arbocert::poly::RatPoly;

fn main() -> arbocert::Result<()> {
    let f = RatPoly::from_ints(&[6, 3, 0, 3, 1]);
    println!("{f}: Eisenstein at 3: {}", is_eisenstein(&f, 3));

    // degree 20 with p = 17, q = 3: v_17 is 2 on a_0..a_16 and 0 from a_17,
    // and the polynomial is Eisenstein at 3
    let mut c = vec![867i64; 17];
    c.extend([3, 3, 3, 1]);
    let g = RatPoly::from_ints(&c);
    let np = newton_polygon(&g, 17)?;
    println!("Newton polygon at 17: {np}");
    println!("{:?}", big_local_certificate(&g, 17, 3)?);
    println!("{:?}", big_local_certificate(&g, 17, 5)?);
    Ok(())
}
