//! Seeded random instances for tests, examples and smoke benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub customers: usize,
    /// Coordinates are integers drawn from `[0, grid]`.
    pub grid: u32,
    pub max_demand: i64,
    /// Target mean number of customers per route; sets the capacity.
    pub route_size: f64,
    /// Put the depot at the centre of the grid instead of a random point.
    pub central_depot: bool,
}

impl SyntheticSpec {
    pub fn new(customers: usize) -> Self {
        Self {
            customers,
            grid: 1000,
            max_demand: 10,
            route_size: 8.0,
            central_depot: false,
        }
    }

    pub fn with_route_size(mut self, route_size: f64) -> Self {
        self.route_size = route_size;
        self
    }

    pub fn with_grid(mut self, grid: u32) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_max_demand(mut self, max_demand: i64) -> Self {
        self.max_demand = max_demand;
        self
    }

    pub fn generate(&self, seed: u64) -> Instance {
        assert!(self.customers >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coords = Vec::with_capacity(self.customers + 1);
        if self.central_depot {
            let c = f64::from(self.grid / 2);
            coords.push((c, c));
        } else {
            coords.push(self.point(&mut rng));
        }
        let mut demand = vec![0];
        for _ in 0..self.customers {
            coords.push(self.point(&mut rng));
            demand.push(rng.gen_range(1..=self.max_demand.max(1)));
        }
        let mean = demand.iter().sum::<i64>() as f64 / self.customers as f64;
        let capacity = ((mean * self.route_size).ceil() as i64).max(self.max_demand).max(1);
        let name = format!("synthetic-n{}-s{seed}", self.customers);
        Instance::new(name, coords, demand, capacity).expect("generated data is valid")
    }

    fn point(&self, rng: &mut impl Rng) -> (f64, f64) {
        (
            f64::from(rng.gen_range(0..=self.grid)),
            f64::from(rng.gen_range(0..=self.grid)),
        )
    }
}

/// Uniform instance with `customers` customers and about eight per route.
pub fn uniform(customers: usize, seed: u64) -> Instance {
    SyntheticSpec::new(customers).generate(seed)
}
