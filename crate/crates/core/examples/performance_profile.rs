//! Build a small gap matrix from two configurations on a few synthetic
//! instances and print its performance profile.
//!
//! Gaps are measured against the best cost either configuration reached,
//! since synthetic instances have no published reference.

use ails_cvrp::adaptive::Criterion;
use ails_cvrp::bench::{compute_gap, performance_profile, profile_csv};
use ails_cvrp::engine::{run, RunConfig};
use ails_cvrp::synthetic::SyntheticSpec;

fn main() -> anyhow::Result<()> {
    let algorithms = vec!["c4".to_string(), "c1".to_string()];
    let mut gaps = Vec::new();
    for seed in 0..6 {
        let inst = SyntheticSpec::new(60).with_route_size(7.0).generate(seed);
        let mut costs = Vec::new();
        for c in [Criterion::C4, Criterion::C1] {
            let mut cfg = RunConfig::default().with_seed(1).with_virtual_clock(1e-3).with_max_iterations(1500);
            cfg.acceptance.criterion = c;
            costs.push(run(&inst, cfg)?.best_cost as f64);
        }
        let reference = costs.iter().copied().fold(f64::INFINITY, f64::min);
        gaps.push(costs.iter().map(|&c| compute_gap(c, reference)).collect::<Result<Vec<_>, _>>()?);
        println!("{}: {:?}", inst.name(), costs);
    }
    print!("{}", profile_csv(&performance_profile(&algorithms, &gaps)?));
    Ok(())
}
