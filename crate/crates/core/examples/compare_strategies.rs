//! Run every acceptance criterion (with D4) and every degree mechanism (with C4)
//! on the same seeded instance and print the best cost of each.
//!
//!     cargo run --release --example compare_strategies -- 200 20000
//!
//! Uses a virtual clock, so the output is identical on every machine.

use std::env;

use ails_cvrp::adaptive::{Criterion, Mechanism};
use ails_cvrp::engine::{run, RunConfig};
use ails_cvrp::synthetic::SyntheticSpec;

fn main() -> anyhow::Result<()> {
    let mut args = env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let iterations: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5000);
    let inst = SyntheticSpec::new(n).with_route_size(8.0).generate(11);

    let base = RunConfig::default()
        .with_seed(3)
        .with_virtual_clock(1e-3)
        .with_time_limit(iterations as f64 * 1e-3)
        .with_max_iterations(iterations);

    println!("acceptance,degree,best,phase2_from");
    let mut configs = Vec::new();
    for c in Criterion::ALL {
        let mut cfg = base.clone();
        cfg.acceptance.criterion = c;
        configs.push(cfg);
    }
    for m in Mechanism::ALL {
        let mut cfg = base.clone();
        cfg.degree.mechanism = m;
        configs.push(cfg);
    }
    for cfg in configs {
        let (c, m) = (cfg.acceptance.criterion, cfg.degree.mechanism);
        let r = run(&inst, cfg)?;
        let from = r.phase2_activation_iteration.map_or("-".to_string(), |i| i.to_string());
        println!("{c},{m},{},{from}", r.best_cost);
    }
    Ok(())
}
