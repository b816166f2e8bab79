//! Ruin-and-recreate perturbation: remove `omega` customers with a removal
//! heuristic, re-inserting each one right after it is removed, then repair.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::instance::{Instance, NeighborLists, Vertex};
use crate::moves::{insertion_cost, make_feasible};
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Removal {
    /// The customers nearest to a random center.
    Concentric,
    /// Consecutive customers along routes from a random start.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Insertion {
    /// Cheapest position whose predecessor is a neighbor of the customer.
    Cost,
    /// Next to the nearest routed customer.
    Distance,
}

impl Removal {
    pub const ALL: [Removal; 2] = [Removal::Concentric, Removal::Sequential];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Removal::Concentric => "concentric",
            Removal::Sequential => "sequential",
        }
    }
}

impl Insertion {
    pub fn label(self) -> &'static str {
        match self {
            Insertion::Cost => "cost",
            Insertion::Distance => "distance",
        }
    }
}

impl fmt::Display for Removal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The `omega` customers nearest to a random center, center first.
pub fn concentric_order(
    s: &Solution,
    inst: &Instance,
    nl: &NeighborLists,
    omega: usize,
    rng: &mut impl Rng,
) -> Vec<Vertex> {
    let omega = omega.clamp(1, inst.n());
    let center = rng.gen_range(1..=inst.n());
    debug_assert!(s.is_routed(center));
    let mut order = vec![center];
    let list = nl.of(center);
    if omega - 1 <= list.len() {
        order.extend_from_slice(&list[..omega - 1]);
    } else {
        let mut rest: Vec<Vertex> = inst.customers().filter(|&v| v != center).collect();
        rest.sort_by_key(|&v| (inst.dist(center, v), v));
        order.extend_from_slice(&rest[..omega - 1]);
    }
    order
}

/// `omega` customers taken in route order from a random start. When a route
/// runs out, the walk continues from a random customer of another route not
/// visited yet.
pub fn sequential_order(s: &Solution, inst: &Instance, omega: usize, rng: &mut impl Rng) -> Vec<Vertex> {
    let omega = omega.clamp(1, inst.n());
    let mut taken = vec![false; inst.num_vertices()];
    let mut visited = vec![false; s.num_routes()];
    let mut order = Vec::with_capacity(omega);
    let start = rng.gen_range(1..=inst.n());
    let (mut r, mut i) = (s.route_of(start), s.index_of(start));
    loop {
        visited[r] = true;
        for &v in &s.route(r)[i..] {
            if order.len() == omega {
                return order;
            }
            if !taken[v] {
                taken[v] = true;
                order.push(v);
            }
        }
        if order.len() == omega {
            return order;
        }
        let fresh: Vec<usize> = (0..s.num_routes())
            .filter(|&q| !visited[q] && !s.route(q).is_empty())
            .collect();
        if let Some(&q) = fresh.choose(rng) {
            r = q;
            i = rng.gen_range(0..s.route(q).len());
        } else {
            // every route visited: finish with prefixes that were skipped
            let left: Vec<usize> = (0..s.num_routes())
                .filter(|&q| s.route(q).iter().any(|&v| !taken[v]))
                .collect();
            r = *left.choose(rng).expect("omega never exceeds n");
            i = s.route(r).iter().position(|&v| !taken[v]).unwrap_or(0);
        }
    }
}

/// Removes the concentric set from `s` and returns it.
pub fn remove_concentric(
    s: &mut Solution,
    inst: &Instance,
    nl: &NeighborLists,
    omega: usize,
    rng: &mut impl Rng,
) -> Vec<Vertex> {
    let order = concentric_order(s, inst, nl, omega, rng);
    order.iter().for_each(|&v| s.remove(inst, v));
    order
}

/// Removes the sequential set from `s` and returns it.
pub fn remove_sequential(s: &mut Solution, inst: &Instance, omega: usize, rng: &mut impl Rng) -> Vec<Vertex> {
    let order = sequential_order(s, inst, omega, rng);
    order.iter().for_each(|&v| s.remove(inst, v));
    order
}

/// Insertion slot: `route` and index, plus the vertices on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub route: usize,
    pub index: usize,
    pub cost: i64,
}

/// The two neighbors `v` had in the reference solution. `v` may not be put
/// back between both of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Forbidden(pub Vertex, pub Vertex);

impl Forbidden {
    pub fn of(s_ref: &Solution, v: Vertex) -> Self {
        Forbidden(s_ref.pred(v), s_ref.succ(v))
    }

    #[inline]
    pub fn blocks(&self, a: Vertex, b: Vertex) -> bool {
        (a, b) == (self.0, self.1) || (a, b) == (self.1, self.0)
    }
}

fn slot(s: &Solution, inst: &Instance, v: Vertex, route: usize, index: usize) -> (Position, Vertex, Vertex) {
    let a = s.at(route, index as isize - 1);
    let b = s.at(route, index as isize);
    (Position { route, index, cost: insertion_cost(inst, a, b, v) }, a, b)
}

/// Cheapest slot over every route, respecting `forbidden` when possible.
pub fn cheapest_position(s: &Solution, inst: &Instance, v: Vertex, forbidden: Option<Forbidden>) -> Position {
    let mut best: Option<Position> = None;
    let mut fallback: Option<Position> = None;
    for r in 0..s.num_routes() {
        for k in 0..=s.route(r).len() {
            let (p, a, b) = slot(s, inst, v, r, k);
            if fallback.is_none_or(|f| p.cost < f.cost) {
                fallback = Some(p);
            }
            if forbidden.is_some_and(|f| f.blocks(a, b)) {
                continue;
            }
            if best.is_none_or(|f| p.cost < f.cost) {
                best = Some(p);
            }
        }
    }
    best.or(fallback).expect("solution has at least one route")
}

/// Chooses where to re-insert the unrouted customer `v`.
pub fn insert_position(
    s: &Solution,
    inst: &Instance,
    nl: &NeighborLists,
    v: Vertex,
    heuristic: Insertion,
    forbidden: Forbidden,
) -> Position {
    let pick = match heuristic {
        Insertion::Cost => cost_position(s, inst, nl, v, forbidden),
        Insertion::Distance => distance_position(s, inst, nl, v, forbidden),
    };
    pick.unwrap_or_else(|| cheapest_position(s, inst, v, Some(forbidden)))
}

/// Cheapest slot following a routed neighbor of `v`, or starting a route.
fn cost_position(s: &Solution, inst: &Instance, nl: &NeighborLists, v: Vertex, f: Forbidden) -> Option<Position> {
    let mut best: Option<Position> = None;
    let mut consider = |p: Position, a: Vertex, b: Vertex| {
        if !f.blocks(a, b) && best.is_none_or(|q| p.cost < q.cost) {
            best = Some(p);
        }
    };
    for &w in nl.of(v) {
        if s.is_routed(w) {
            let (p, a, b) = slot(s, inst, v, s.route_of(w), s.index_of(w) + 1);
            consider(p, a, b);
        }
    }
    let mut empty_seen = false;
    for r in 0..s.num_routes() {
        if s.route(r).is_empty() {
            if empty_seen {
                continue;
            }
            empty_seen = true;
        }
        let (p, a, b) = slot(s, inst, v, r, 0);
        consider(p, a, b);
    }
    best
}

/// Next to the nearest routed customer, on whichever side is cheaper.
fn distance_position(s: &Solution, inst: &Instance, nl: &NeighborLists, v: Vertex, f: Forbidden) -> Option<Position> {
    let w = nl.of(v).iter().copied().find(|&w| s.is_routed(w)).or_else(|| {
        inst.customers()
            .filter(|&w| w != v && s.is_routed(w))
            .min_by_key(|&w| (inst.dist(v, w), w))
    })?;
    let (r, i) = (s.route_of(w), s.index_of(w));
    let before = slot(s, inst, v, r, i);
    let after = slot(s, inst, v, r, i + 1);
    [before, after]
        .into_iter()
        .filter(|(_, a, b)| !f.blocks(*a, *b))
        .map(|(p, _, _)| p)
        .reduce(|x, y| if y.cost < x.cost { y } else { x })
}

#[derive(Debug, Clone)]
pub struct Perturbed {
    pub solution: Solution,
    pub insertion: Insertion,
    /// Customers in removal order.
    pub removed: Vec<Vertex>,
}

/// Perturbs a copy of `s_ref`: picks an insertion heuristic uniformly, then
/// removes and immediately re-inserts `omega` customers chosen by `removal`,
/// and finally restores feasibility.
pub fn perturb(
    s_ref: &Solution,
    inst: &Instance,
    nl: &NeighborLists,
    removal: Removal,
    omega: usize,
    rng: &mut impl Rng,
) -> Perturbed {
    let insertion = if rng.gen_bool(0.5) { Insertion::Cost } else { Insertion::Distance };
    perturb_with(s_ref, inst, nl, removal, insertion, omega, rng)
}

/// [`perturb`] with a fixed insertion heuristic.
pub fn perturb_with(
    s_ref: &Solution,
    inst: &Instance,
    nl: &NeighborLists,
    removal: Removal,
    insertion: Insertion,
    omega: usize,
    rng: &mut impl Rng,
) -> Perturbed {
    let mut s = s_ref.clone();
    let order = match removal {
        Removal::Concentric => concentric_order(&s, inst, nl, omega, rng),
        Removal::Sequential => sequential_order(&s, inst, omega, rng),
    };
    for &v in &order {
        s.remove(inst, v);
        let p = insert_position(&s, inst, nl, v, insertion, Forbidden::of(s_ref, v));
        s.insert(inst, v, p.route, p.index);
    }
    s.retain_empty_routes(0);
    Perturbed {
        solution: make_feasible(s, inst, nl),
        insertion,
        removed: order,
    }
}
