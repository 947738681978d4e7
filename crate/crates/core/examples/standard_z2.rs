//! Standard morphisms into Z/2Z: the two prime vectors that survive the
//! triples supported on the first 13 primes, the triple that kills both,
//! and the threshold 533 found by search.

use morphic::standard::{avoiding_prime_vectors, standard_threshold, vector_string};
use morphic::{primitive_triples, restrict_to_oddsupp, PrimeSet, Triple};

fn main() -> morphic::Result<()> {
    let p13 = PrimeSet::first(13);
    let t13 = restrict_to_oddsupp(&primitive_triples(532), &p13);
    let survivors = avoiding_prime_vectors(2, &p13, &t13)?;
    println!("{} of 8192 vectors avoid all {} triples:", survivors.len(), t13.len());
    let killer = Triple::new(308, 435, 533).expect("a triple");
    for f in &survivors {
        let colors: Vec<u32> = killer
            .members()
            .iter()
            .map(|&n| {
                morphic::oddsupp(n)
                    .iter()
                    .map(|p| f[p])
                    .sum::<u32>()
                    % 2
            })
            .collect();
        println!("  {}  colors {killer} as {colors:?}", vector_string(f, &p13));
    }

    let report = standard_threshold(2, 1000)?;
    println!(
        "\nthreshold {:?} ({} nodes); witness avoids [1,{}]",
        report.value, report.stats.nodes, report.witness.interval_end
    );
    Ok(())
}
