//! Solve one instance and print the best routes.
//!
//!     cargo run --release --example solve_instance -- path/to/X-n101-k25.vrp 30
//!
//! Without a path a seeded 100-customer instance is generated.

use std::env;

use ails_cvrp::engine::{run, RunConfig};
use ails_cvrp::instance::read_instance;
use ails_cvrp::synthetic::SyntheticSpec;

fn main() -> anyhow::Result<()> {
    let mut args = env::args().skip(1);
    let inst = match args.next() {
        Some(path) => read_instance(path)?,
        None => SyntheticSpec::new(100).with_route_size(5.0).generate(2024),
    };
    let seconds: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10.0);

    let report = run(&inst, RunConfig::default().with_time_limit(seconds).with_seed(1))?;
    println!(
        "{}: cost {} after {} iterations (best found at {:.1}s, phase 2 from {:?})",
        inst.name(),
        report.best_cost,
        report.iterations,
        report.time_to_best_seconds,
        report.phase2_activation_iteration
    );
    for (k, route) in report.best_routes.iter().enumerate() {
        let ids: Vec<String> = route.iter().map(|v| v.to_string()).collect();
        println!("Route #{}: {}", k + 1, ids.join(" "));
    }
    Ok(())
}
