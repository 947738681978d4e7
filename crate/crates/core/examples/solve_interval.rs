//! One avoidance question at a time, with and without a node budget.

use morphic::solver::solve;
use morphic::{Instance, Outcome, PrimeSet, SearchOptions};

fn main() -> morphic::Result<()> {
    let p0 = PrimeSet::parse("2,3,5")?;
    for limit in [4, 100, 532, 533] {
        let inst = Instance::new(&p0, 2, limit)?;
        let (outcome, stats) = solve(&inst, &SearchOptions::new())?;
        let what = match &outcome {
            Outcome::Avoiding(c) => format!("avoidable, {} variables colored", c.coloring.assignment().len()),
            Outcome::Unavoidable => "unavoidable".to_string(),
            Outcome::Unknown => "unknown".to_string(),
        };
        println!("[1,{limit:3}]  {what:35} {:>7} nodes", stats.nodes);
    }

    let inst = Instance::new(&p0, 2, 533)?;
    let heaviest: Vec<String> = inst
        .variables()
        .iter()
        .take(5)
        .map(|&q| format!("{q} (w={})", inst.weight(q)))
        .collect();
    println!("\nheaviest variables at 533: {}", heaviest.join(", "));
    let (outcome, _) = solve(&inst, &SearchOptions::new().with_budget(50))?;
    println!("with a 50-node budget: exit code {}", outcome.exit_code());
    Ok(())
}
