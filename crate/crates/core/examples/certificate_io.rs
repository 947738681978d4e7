//! Certificates as JSON: write, read back, verify, and move through the
//! automorphisms of Z/mZ.

use std::collections::BTreeMap;

use morphic::{exists_avoiding, Certificate, MorphicColoring, PrimeSet};

fn main() -> morphic::Result<()> {
    let p0 = PrimeSet::parse("2,3")?;
    let cert = exists_avoiding(&p0, 3, 200)?.expect("avoidable");
    let json = cert.to_json();
    println!("{} bytes: {}...", json.len(), &json[..json.len().min(100)]);
    let back = Certificate::from_json(&json)?;
    assert_eq!(back, cert);
    back.verify()?;

    // x -> 2x permutes the colors of Z/3Z; avoidance survives
    let swapped = Certificate::avoiding(cert.coloring.apply_automorphism(2)?, cert.interval_end);
    swapped.verify()?;
    println!("verified, and so is its image under x -> 2x");

    // a tampered certificate is caught
    let mut values: BTreeMap<u64, u32> = cert.coloring.assignment().clone();
    for v in values.values_mut() {
        *v = 0;
    }
    let flat = Certificate::avoiding(MorphicColoring::partial(3, p0, values)?, cert.interval_end);
    match flat.verify() {
        Ok(()) => println!("constant coloring passed?"),
        Err(e) => println!("constant coloring rejected: {e}"),
    }
    Ok(())
}
