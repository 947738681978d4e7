//! Exhaustive threshold search for standard morphisms into Z/3Z. Larger
//! caps or moduli can run for a long time, so the search writes a
//! checkpoint every million nodes and can pick up from one.
//!
//!     cargo run --release --example z3_threshold -- 4633 z3.ckpt
//!     cargo run --release --example z3_threshold -- 4633 z3.ckpt resume

use std::fs;

use morphic::standard::{standard_threshold_with, Checkpoint, ThresholdOptions};

fn main() -> morphic::Result<()> {
    let mut args = std::env::args().skip(1);
    let cap: u64 = args.next().map_or(4633, |s| s.parse().expect("cap"));
    let path = args.next().unwrap_or_else(|| "z3_threshold.ckpt".into());
    let resume = match args.next().as_deref() {
        Some("resume") => {
            let text = fs::read_to_string(&path).expect("checkpoint readable");
            Some(serde_json::from_str::<Checkpoint>(&text)?)
        }
        _ => None,
    };
    if let Some(cp) = &resume {
        eprintln!("resuming at M = {} after {} nodes", cp.level, cp.nodes);
    }

    let mut last_level = 0;
    let mut save = |cp: &Checkpoint| {
        if cp.level / 100 != last_level / 100 || !cp.path.is_empty() {
            eprintln!("M = {:5}  nodes {:>12}  depth {}", cp.level, cp.nodes, cp.path.len());
        }
        last_level = cp.level;
        let tmp = format!("{path}.tmp");
        fs::write(&tmp, serde_json::to_string(cp).expect("json")).expect("write checkpoint");
        fs::rename(&tmp, &path).expect("rename checkpoint");
    };
    let opts = ThresholdOptions {
        on_checkpoint: Some(&mut save),
        resume,
        ..ThresholdOptions::default()
    };
    let report = standard_threshold_with(3, cap, opts)?;
    println!("{:?} after {} nodes in {:?}", report.value, report.stats.nodes, report.stats.wall);
    Ok(())
}
