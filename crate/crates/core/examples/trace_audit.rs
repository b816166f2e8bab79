//! Record a per-iteration trace, save it as CSV and summarise it: how often
//! each phase ran, how Phase-1 verdicts split and how omega moved.

use std::collections::BTreeMap;

use ails_cvrp::engine::{run, Phase, RunConfig};
use ails_cvrp::synthetic::SyntheticSpec;

fn main() -> anyhow::Result<()> {
    let inst = SyntheticSpec::new(100).generate(4);
    let mut cfg = RunConfig::default().with_seed(17).with_virtual_clock(0.1).with_trace();
    cfg.stall_threshold = 1000;
    let report = run(&inst, cfg)?;

    let path = std::env::temp_dir().join("ails-trace.csv");
    std::fs::write(&path, report.trace_csv())?;
    println!("{} rows written to {}", report.trace.len(), path.display());

    let mut verdicts: BTreeMap<String, usize> = BTreeMap::new();
    let phase2 = report.trace.iter().filter(|r| r.phase == Phase::Two).count();
    for row in &report.trace {
        if let Some(v) = row.verdict {
            *verdicts.entry(format!("{v:?}")).or_default() += 1;
        }
    }
    println!("phase 2 active from {:?}, {phase2} phase-2 iterations", report.phase2_activation_iteration);
    println!("phase-1 verdicts: {verdicts:?}");
    for chunk in report.trace.chunks(report.trace.len().div_ceil(10).max(1)) {
        let mean = chunk.iter().map(|r| r.omega as f64).sum::<f64>() / chunk.len() as f64;
        let last = chunk.last().unwrap();
        println!("up to {:>5}: mean omega {mean:>5.1}, best {}", last.iteration, last.best);
    }
    Ok(())
}
