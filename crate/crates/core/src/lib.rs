//! Adaptive iterated local search for the capacitated vehicle routing
//! problem, with a benchmark harness.
//!
//! ```no_run
//! use ails_cvrp::engine::{run, RunConfig};
//! use ails_cvrp::instance::read_instance;
//!
//! let inst = read_instance("X-n101-k25.vrp").unwrap();
//! let report = run(&inst, RunConfig::default().with_time_limit(60.0).with_seed(7)).unwrap();
//! println!("{}", report.best_cost);
//! ```
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod bench;
pub mod cli;
pub mod construction;
pub mod elite;
pub mod engine;
pub mod error;
pub mod instance;
pub mod moves;
pub mod perturbation;
pub mod solution;
pub mod synthetic;

pub use engine::{run, RunConfig, RunReport};
pub use error::{Error, Result};
pub use instance::{Instance, NeighborLists};
pub use solution::Solution;
