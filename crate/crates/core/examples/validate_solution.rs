//! Write a solution in CVRPLIB format, read it back and check it, then break
//! it on purpose to show the reported violations.

use ails_cvrp::engine::{best_solution, run, RunConfig};
use ails_cvrp::solution::{parse_solution, validate_file};
use ails_cvrp::synthetic::SyntheticSpec;

fn main() -> anyhow::Result<()> {
    let inst = SyntheticSpec::new(40).generate(8);
    let report = run(&inst, RunConfig::default().with_seed(2).with_virtual_clock(1e-3).with_max_iterations(500))?;
    let text = best_solution(&inst, &report).to_cvrplib();
    print!("{text}");

    let file = parse_solution(&inst, &text)?;
    match validate_file(&inst, &file) {
        Ok(cost) => println!("valid, cost {cost}"),
        Err(v) => println!("unexpected: {v:?}"),
    }

    // drop the first route: its customers are now unvisited
    let broken: String = text.lines().filter(|l| !l.starts_with("Route #1:")).map(|l| format!("{l}\n")).collect();
    if let Err(violations) = validate_file(&inst, &parse_solution(&inst, &broken)?) {
        println!("broken copy:");
        for v in violations {
            println!("  {v}");
        }
    }
    Ok(())
}
