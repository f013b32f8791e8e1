//! Aut(T_n) as portraits: order, level signs and quadratic characters.
//!
//! `cargo run --release --example tree_group -- [arity] [depth]`

use arbocert::treegroup::{character_product, enumerate_portraits, group_order, quadratic_character_count_bruteforce, random_element};

fn main() -> arbocert::Result<()> {
    let mut args = std::env::args().skip(1);
    let arity: usize = args.next().map_or(2, |s| s.parse().expect("arity"));
    let depth: usize = args.next().map_or(3, |s| s.parse().expect("depth"));
    println!("order: {}", group_order(arity as u64, depth as u32));
    match enumerate_portraits(arity, depth, 1 << 16) {
        Ok(all) => println!("enumerated portraits: {}", all.len()),
        Err(e) => println!("enumeration skipped: {e}"),
    }
    match quadratic_character_count_bruteforce(arity, depth) {
        Ok(n) => println!("quadratic characters: {n}"),
        Err(e) => println!("character count skipped: {e}"),
    }
    let g = random_element(arity, depth, 7)?;
    let signs: Vec<i8> = (1..=depth).map(|m| g.level_sign(m)).collect::<Result<_, _>>()?;
    println!("random element: level signs {signs:?}, cycle type on leaves {}", g.cycle_type_on_leaves());
    let products: Vec<i8> = (0..1u32 << depth).map(|mask| character_product(&g, mask)).collect::<Result<_, _>>()?;
    println!("character products over all masks: {products:?}");
    Ok(())
}
