//! Step a search by hand and watch the elite pool fill once Phase 2 starts.

use ails_cvrp::engine::{RunConfig, Search};
use ails_cvrp::instance::NeighborLists;
use ails_cvrp::synthetic::SyntheticSpec;

fn main() -> anyhow::Result<()> {
    let inst = SyntheticSpec::new(80).with_route_size(6.0).generate(5);
    let mut cfg = RunConfig::default().with_seed(9).with_virtual_clock(1e-3).with_max_iterations(4000);
    cfg.stall_threshold = 300;
    let nl = NeighborLists::build(&inst, cfg.phi);
    let mut search = Search::new(&inst, &nl, cfg)?;

    let mut last_size = 0;
    while !search.finished() {
        let row = search.step();
        if row.elite_size != last_size {
            println!("iteration {:>5}: pool size {} (best {})", row.iteration, row.elite_size, row.best);
            last_size = row.elite_size;
        }
    }
    let pool = search.elite();
    println!(
        "phase 2 from {:?}; {} members, costs {:?}, min pairwise distance {:?} (d_beta {})",
        search.phase2_activation_iteration(),
        pool.len(),
        pool.costs(),
        pool.min_separation(),
        pool.d_beta()
    );
    print!("{}", pool.dump_csv());
    Ok(())
}
