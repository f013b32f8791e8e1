//! Frobenius cycle types against uniform sampling of Aut(T_2).
//!
//! `cargo run --release --example chebotarev -- [prime_bound]`

use arbocert::exact::rat;
use arbocert::frobenius::chebotarev_scan;
use arbocert::poly::RatPoly;

fn main() -> arbocert::Result<()> {
    let bound: u64 = std::env::args().nth(1).map_or(100_000, |s| s.parse().expect("prime bound"));
    for (name, c) in [("x^2 + 1", 1), ("x^2 - 2", -2)] {
        let f = RatPoly::from_ints(&[c, 0, 1]);
        let r = chebotarev_scan(&f, &rat(0), 2, bound, 1)?;
        println!("{name}: {} unramified primes, TV distance {:.4}", r.unramified_primes, r.tv_distance);
        for (ct, fr) in &r.frobenius {
            let g = r.group.get(ct).map_or(0.0, |x| x.frequency);
            println!("  {ct:<12} {:.4}  group {g:.4}", fr.frequency);
        }
    }
    Ok(())
}
