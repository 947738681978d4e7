//! Counts Pythagorean triples and lists the ones whose members have odd
//! support in the first 13 primes.
//!
//!     cargo run --release --example triple_counts -- 532

use morphic::{all_triples, primitive_triples, restrict_to_oddsupp, PrimeSet};

fn main() {
    let limit: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("limit"))
        .unwrap_or(532);
    let prims = primitive_triples(limit);
    println!("[1,{limit}]: {} primitive, {} in all", prims.len(), all_triples(limit).len());
    if let Some(last) = prims.last() {
        println!("largest primitive: {last}");
    }

    let p13 = PrimeSet::first(13);
    let t13 = restrict_to_oddsupp(&prims, &p13);
    println!("\n{} primitive triples with odd support in {p13}:", t13.len());
    for t in &t13 {
        println!("  {t}");
    }
}
