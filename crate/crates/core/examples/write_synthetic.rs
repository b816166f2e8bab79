//! Write a seeded synthetic instance in CVRPLIB format.
//!
//!     cargo run --example write_synthetic -- 100 7 > synthetic.vrp

use ails_cvrp::synthetic::SyntheticSpec;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    print!("{}", SyntheticSpec::new(n).with_route_size(5.0).generate(seed).to_cvrplib());
}
