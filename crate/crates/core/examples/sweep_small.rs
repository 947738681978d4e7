//! A resumable sweep over pairs of primes up to 30, then a report.
//!
//!     cargo run --release --example sweep_small -- /tmp/pairs.jsonl

use morphic::sweep::{query, sweep, Filter, SweepConfig};

fn main() -> morphic::Result<()> {
    let journal = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("morphic-pairs.jsonl").display().to_string());
    let mut cfg = SweepConfig::new(2, 30);
    cfg.journal = Some(journal.clone().into());
    cfg.resume = true;

    // half now, the rest on the second call
    cfg.max_subsets = Some(20);
    let first = sweep(&cfg)?;
    println!("first pass: {} computed, {} pending", first.computed, first.pending);
    cfg.max_subsets = None;
    let done = sweep(&cfg)?;
    println!("second pass: {} computed, {} pending\n", done.computed, done.pending);

    print!("{}", query(&done.records, &[]).to_markdown());
    let with_3 = query(&done.records, &[Filter::parse("contains:3")?, Filter::Except(532)]);
    println!("\npairs with 3 and N != 532:");
    print!("{}", with_3.to_csv());
    println!("journal: {journal}");
    Ok(())
}
