//! Randomized initial solution.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::instance::{Instance, NeighborLists, Vertex};
use crate::moves::{insertion_cost, make_feasible};
use crate::solution::{min_routes, Solution};

/// Opens the minimum number of routes and inserts customers in random order,
/// each at the cheapest slot after one of its neighbors (or at a route start)
/// in a route that still has room. Leftover overloads are repaired.
pub fn construct_initial(inst: &Instance, nl: &NeighborLists, rng: &mut impl Rng) -> Solution {
    let mut order: Vec<Vertex> = inst.customers().collect();
    order.shuffle(rng);
    let mut s = Solution::empty(inst);
    for _ in 0..min_routes(inst) {
        s.add_empty_route();
    }
    for v in order {
        let q = inst.demand(v);
        let fits = |s: &Solution, r: usize| s.load(r) + q <= inst.capacity();
        let mut best: Option<(i64, usize, usize)> = None;
        let consider = |best: &mut Option<(i64, usize, usize)>, s: &Solution, r: usize, k: usize| {
            let c = insertion_cost(inst, s.at(r, k as isize - 1), s.at(r, k as isize), v);
            if best.is_none_or(|b| c < b.0) {
                *best = Some((c, r, k));
            }
        };
        for &w in nl.of(v) {
            if s.is_routed(w) && fits(&s, s.route_of(w)) {
                consider(&mut best, &s, s.route_of(w), s.index_of(w) + 1);
            }
        }
        for r in 0..s.num_routes() {
            if fits(&s, r) {
                consider(&mut best, &s, r, 0);
            }
        }
        if best.is_none() {
            let any_fit = (0..s.num_routes()).any(|r| fits(&s, r));
            for r in 0..s.num_routes() {
                if !any_fit || fits(&s, r) {
                    for k in 0..=s.route(r).len() {
                        consider(&mut best, &s, r, k);
                    }
                }
            }
        }
        let (_, r, k) = best.expect("at least one route is open");
        s.insert(inst, v, r, k);
    }
    s.retain_empty_routes(0);
    make_feasible(s, inst, nl)
}
