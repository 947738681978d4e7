//! N(P0) for a few prime sets, each backed by a verified certificate on
//! [1, N] and an exhausted search at the next hypotenuse.
//!
//!     cargo run --release --example n_values -- 2,3,19 7,11,13,17

use morphic::{compute_n, PrimeSet};

fn main() -> morphic::Result<()> {
    let mut sets: Vec<String> = std::env::args().skip(1).collect();
    if sets.is_empty() {
        sets = vec!["2,3,5".into(), "2,3,5,7".into(), "2,3,5,7,11".into()];
    }
    for s in sets {
        let p0 = PrimeSet::parse(&s)?;
        let r = compute_n(&p0, 2, 1000)?;
        r.certificate.verify()?;
        println!(
            "N({p0}) = {:<6} {:>3} variables  {:>7} nodes  {:?}",
            r.value.to_string(),
            r.certificate.coloring.assignment().len(),
            r.stats.nodes,
            r.stats.wall
        );
    }
    Ok(())
}
