//! Checks the bundled standard morphism into Z/3Z on [1,4632] and writes
//! it as a certificate file.
//!
//!     cargo run --release --example z3_verify -- z3.json

use morphic::fixtures::{published_z3_certificate, z3_index_sets};
use morphic::primitive_triples;

fn main() -> morphic::Result<()> {
    let cert = published_z3_certificate();
    let (ones, twos) = z3_index_sets();
    println!(
        "f(p_i) = 1 on {} indices, 2 on {}, 0 on the other primes up to {}",
        ones.len(),
        twos.len(),
        cert.interval_end
    );
    cert.verify()?;
    println!(
        "no monochromatic triple in [1,{}] ({} primitive triples checked with their multiples)",
        cert.interval_end,
        primitive_triples(cert.interval_end).len()
    );
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, cert.to_json_pretty()).map_err(|e| morphic::Error::Io {
            path: path.clone().into(),
            source: e,
        })?;
        println!("wrote {path}");
    }
    Ok(())
}
