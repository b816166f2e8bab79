//! Route-based solution representation with cached loads and costs.
//!
//! Routes hold customers only; the depot is implicit at both ends. Every
//! mutation keeps the position index, cumulative loads, per-route costs and
//! the total cost in sync, so the cached values can always be compared
//! against a from-scratch recomputation.

use std::fmt;
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::instance::{Instance, Vertex, DEPOT};

const UNROUTED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    capacity: i64,
    routes: Vec<Vec<Vertex>>,
    /// `cum_load[r][i]` is the demand of `routes[r][..=i]`.
    cum_load: Vec<Vec<i64>>,
    route_cost: Vec<i64>,
    cost: i64,
    route_of: Vec<usize>,
    index_of: Vec<usize>,
}

impl Solution {
    /// A solution with no routes and every customer unrouted.
    pub fn empty(inst: &Instance) -> Self {
        Self {
            capacity: inst.capacity(),
            routes: Vec::new(),
            cum_load: Vec::new(),
            route_cost: Vec::new(),
            cost: 0,
            route_of: vec![UNROUTED; inst.num_vertices()],
            index_of: vec![UNROUTED; inst.num_vertices()],
        }
    }

    /// Builds a solution from explicit customer sequences. Nothing is checked
    /// beyond index bounds; run [`Solution::validate`] on untrusted input.
    pub fn from_routes(inst: &Instance, routes: Vec<Vec<Vertex>>) -> Self {
        let mut s = Self::empty(inst);
        for route in routes {
            let r = s.add_empty_route();
            s.replace_route(inst, r, route);
        }
        s
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn routes(&self) -> &[Vec<Vertex>] {
        &self.routes
    }

    pub fn route(&self, r: usize) -> &[Vertex] {
        &self.routes[r]
    }

    pub fn num_routes(&self) -> usize {
        self.routes.len()
    }

    /// Routes that visit at least one customer.
    pub fn num_used_routes(&self) -> usize {
        self.routes.iter().filter(|r| !r.is_empty()).count()
    }

    pub fn cost(&self) -> i64 {
        self.cost
    }

    pub fn route_cost(&self, r: usize) -> i64 {
        self.route_cost[r]
    }

    pub fn load(&self, r: usize) -> i64 {
        self.cum_load[r].last().copied().unwrap_or(0)
    }

    /// Demand of `routes[r][..=i]`.
    #[inline]
    pub fn load_through(&self, r: usize, i: usize) -> i64 {
        self.cum_load[r][i]
    }

    pub fn excess(&self, r: usize) -> i64 {
        (self.load(r) - self.capacity).max(0)
    }

    pub fn total_excess(&self) -> i64 {
        (0..self.routes.len()).map(|r| self.excess(r)).sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.total_excess() == 0
    }

    #[inline]
    pub fn is_routed(&self, v: Vertex) -> bool {
        self.route_of[v] != UNROUTED
    }

    #[inline]
    pub fn route_of(&self, v: Vertex) -> usize {
        self.route_of[v]
    }

    #[inline]
    pub fn index_of(&self, v: Vertex) -> usize {
        self.index_of[v]
    }

    /// Predecessor of a routed customer (the depot at route start).
    #[inline]
    pub fn pred(&self, v: Vertex) -> Vertex {
        let i = self.index_of[v];
        if i == 0 {
            DEPOT
        } else {
            self.routes[self.route_of[v]][i - 1]
        }
    }

    /// Successor of a routed customer (the depot at route end).
    #[inline]
    pub fn succ(&self, v: Vertex) -> Vertex {
        let route = &self.routes[self.route_of[v]];
        route.get(self.index_of[v] + 1).copied().unwrap_or(DEPOT)
    }

    /// Vertex at `index` of route `r`, treating `-1` and `len` as the depot.
    #[inline]
    pub fn at(&self, r: usize, index: isize) -> Vertex {
        if index < 0 {
            DEPOT
        } else {
            self.routes[r].get(index as usize).copied().unwrap_or(DEPOT)
        }
    }

    pub fn unrouted(&self) -> impl Iterator<Item = Vertex> + '_ {
        (1..self.route_of.len()).filter(|&v| self.route_of[v] == UNROUTED)
    }

    pub fn first_empty_route(&self) -> Option<usize> {
        self.routes.iter().position(|r| r.is_empty())
    }

    pub fn add_empty_route(&mut self) -> usize {
        self.routes.push(Vec::new());
        self.cum_load.push(Vec::new());
        self.route_cost.push(0);
        self.routes.len() - 1
    }

    /// Makes sure at least one empty route exists and returns its index.
    pub fn ensure_empty_route(&mut self) -> usize {
        match self.first_empty_route() {
            Some(r) => r,
            None => self.add_empty_route(),
        }
    }

    /// Drops empty routes until at most `keep` remain. Route indices of the
    /// surviving routes may change.
    pub fn retain_empty_routes(&mut self, keep: usize) {
        let mut kept = 0;
        let mut r = 0;
        let mut changed = false;
        while r < self.routes.len() {
            if self.routes[r].is_empty() {
                if kept < keep {
                    kept += 1;
                } else {
                    self.routes.remove(r);
                    self.cum_load.remove(r);
                    self.route_cost.remove(r);
                    changed = true;
                    continue;
                }
            }
            r += 1;
        }
        if changed {
            for (r, route) in self.routes.iter().enumerate() {
                for &v in route {
                    self.route_of[v] = r;
                }
            }
        }
    }

    /// Removes a routed customer, closing the gap.
    pub fn remove(&mut self, inst: &Instance, v: Vertex) {
        let r = self.route_of[v];
        let i = self.index_of[v];
        debug_assert!(r != UNROUTED, "customer {v} is not routed");
        let (a, b) = (self.pred(v), self.succ(v));
        let delta = inst.dist(a, b) - inst.dist(a, v) - inst.dist(v, b);
        self.routes[r].remove(i);
        self.route_of[v] = UNROUTED;
        self.index_of[v] = UNROUTED;
        self.route_cost[r] += delta;
        self.cost += delta;
        self.reindex_from(inst, r, i);
    }

    /// Inserts an unrouted customer at `index` of route `r`.
    pub fn insert(&mut self, inst: &Instance, v: Vertex, r: usize, index: usize) {
        debug_assert!(!self.is_routed(v), "customer {v} is already routed");
        let a = self.at(r, index as isize - 1);
        let b = self.at(r, index as isize);
        let delta = inst.dist(a, v) + inst.dist(v, b) - inst.dist(a, b);
        self.routes[r].insert(index, v);
        self.route_cost[r] += delta;
        self.cost += delta;
        self.reindex_from(inst, r, index);
    }

    /// Replaces the customer sequence of route `r`. Customers that leave the
    /// route without appearing elsewhere must be re-placed by the caller.
    pub fn replace_route(&mut self, inst: &Instance, r: usize, customers: Vec<Vertex>) {
        for &v in &self.routes[r] {
            if self.route_of[v] == r {
                self.route_of[v] = UNROUTED;
                self.index_of[v] = UNROUTED;
            }
        }
        let new_cost = route_cost(inst, &customers);
        self.cost += new_cost - self.route_cost[r];
        self.route_cost[r] = new_cost;
        self.routes[r] = customers;
        self.reindex_from(inst, r, 0);
    }

    fn reindex_from(&mut self, inst: &Instance, r: usize, from: usize) {
        let route = &self.routes[r];
        let cum = &mut self.cum_load[r];
        cum.truncate(from);
        let mut acc = if from == 0 { 0 } else { cum[from - 1] };
        for (i, &v) in route.iter().enumerate().skip(from) {
            acc += inst.demand(v);
            cum.push(acc);
            self.route_of[v] = r;
            self.index_of[v] = i;
        }
    }

    /// Undirected neighbor view used by [`solution_distance`].
    pub fn adjacency(&self) -> Adjacency {
        let nv = self.route_of.len();
        let mut pred = vec![UNROUTED; nv];
        let mut succ = vec![UNROUTED; nv];
        for route in &self.routes {
            for (i, &v) in route.iter().enumerate() {
                pred[v] = if i == 0 { DEPOT } else { route[i - 1] };
                succ[v] = route.get(i + 1).copied().unwrap_or(DEPOT);
            }
        }
        Adjacency { pred, succ }
    }

    /// Multiset of undirected edges `(min, max)`, sorted. A single-customer
    /// route contributes its depot edge twice.
    pub fn edge_multiset(&self) -> Vec<(Vertex, Vertex)> {
        let mut edges = Vec::new();
        for route in self.routes.iter().filter(|r| !r.is_empty()) {
            let mut prev = DEPOT;
            for &v in route.iter().chain(std::iter::once(&DEPOT)) {
                edges.push((prev.min(v), prev.max(v)));
                prev = v;
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Checks structure, caches and capacity. Violations are returned as data.
    pub fn validate(&self, inst: &Instance) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        let nv = inst.num_vertices();
        let mut seen = vec![0usize; nv];
        for (r, route) in self.routes.iter().enumerate() {
            let mut load = 0;
            for (i, &v) in route.iter().enumerate() {
                if v == DEPOT || v >= nv {
                    violations.push(Violation::InvalidVertex { route: r, vertex: v });
                    continue;
                }
                seen[v] += 1;
                load += inst.demand(v);
                if self.route_of[v] != r || self.index_of[v] != i {
                    violations.push(Violation::PositionDrift(v));
                }
                if self.cum_load[r].get(i) != Some(&load) {
                    violations.push(Violation::LoadDrift { route: r });
                }
            }
            if self.cum_load[r].len() != route.len() {
                violations.push(Violation::LoadDrift { route: r });
            }
            if load > inst.capacity() {
                violations.push(Violation::CapacityExcess {
                    route: r,
                    excess: load - inst.capacity(),
                });
            }
        }
        for v in inst.customers() {
            match seen[v] {
                0 => violations.push(Violation::MissingCustomer(v)),
                1 => {}
                _ => violations.push(Violation::DuplicateCustomer(v)),
            }
        }
        let actual = solution_cost(self, inst);
        if actual != self.cost {
            violations.push(Violation::CostDrift {
                cached: self.cost,
                actual,
            });
        }
        violations.dedup();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// CVRPLIB solution text: one line per non-empty route, then the cost.
    pub fn to_cvrplib(&self) -> String {
        let mut out = String::new();
        for (k, route) in self.routes.iter().filter(|r| !r.is_empty()).enumerate() {
            let _ = write!(out, "Route #{}:", k + 1);
            for v in route {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "Cost {}", self.cost);
        out
    }

    #[cfg(test)]
    pub(crate) fn corrupt_cost(&mut self, delta: i64) {
        self.cost += delta;
    }
}

/// Sum of the edge weights of one route, depot legs included.
pub fn route_cost(inst: &Instance, route: &[Vertex]) -> i64 {
    if route.is_empty() {
        return 0;
    }
    let mut total = inst.dist(DEPOT, route[0]) + inst.dist(route[route.len() - 1], DEPOT);
    for w in route.windows(2) {
        total += inst.dist(w[0], w[1]);
    }
    total
}

/// Objective value recomputed from scratch.
pub fn solution_cost(s: &Solution, inst: &Instance) -> i64 {
    s.routes().iter().map(|r| route_cost(inst, r)).sum()
}

/// Lower bound on the number of vehicles: `ceil(total demand / capacity)`.
pub fn min_routes(inst: &Instance) -> usize {
    let total = inst.total_demand();
    let cap = inst.capacity();
    (((total + cap - 1) / cap).max(1)) as usize
}

/// Predecessor/successor arrays of a solution, indexed by customer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    pred: Vec<Vertex>,
    succ: Vec<Vertex>,
}

impl Adjacency {
    #[inline]
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.pred[u] == v || self.succ[u] == v
    }

    #[inline]
    fn depot_multiplicity(&self, v: Vertex) -> i64 {
        i64::from(self.pred[v] == DEPOT) + i64::from(self.succ[v] == DEPOT)
    }

    /// Size of the symmetric difference of the two edge multisets.
    pub fn distance(&self, other: &Adjacency) -> usize {
        let mut diff = 0usize;
        for v in 1..self.pred.len() {
            let s = self.succ[v];
            if s != DEPOT && s != UNROUTED && !other.adjacent(v, s) {
                diff += 1;
            }
            let s = other.succ[v];
            if s != DEPOT && s != UNROUTED && !self.adjacent(v, s) {
                diff += 1;
            }
            diff += (self.depot_multiplicity(v) - other.depot_multiplicity(v)).unsigned_abs() as usize;
        }
        diff
    }
}

/// Number of edges present in one solution but not the other.
pub fn solution_distance(a: &Solution, b: &Solution) -> usize {
    a.adjacency().distance(&b.adjacency())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InvalidVertex { route: usize, vertex: Vertex },
    DuplicateCustomer(Vertex),
    MissingCustomer(Vertex),
    PositionDrift(Vertex),
    LoadDrift { route: usize },
    CostDrift { cached: i64, actual: i64 },
    CapacityExcess { route: usize, excess: i64 },
    DeclaredCost { declared: i64, actual: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidVertex { route, vertex } => {
                write!(f, "invalid vertex {vertex} in route {route}")
            }
            Violation::DuplicateCustomer(v) => write!(f, "duplicate customer {v}"),
            Violation::MissingCustomer(v) => write!(f, "missing customer {v}"),
            Violation::PositionDrift(v) => write!(f, "position index drift at customer {v}"),
            Violation::LoadDrift { route } => write!(f, "load drift in route {route}"),
            Violation::CostDrift { cached, actual } => {
                write!(f, "cost drift: cached {cached}, actual {actual}")
            }
            Violation::CapacityExcess { route, excess } => {
                write!(f, "capacity excess {excess} in route {route}")
            }
            Violation::DeclaredCost { declared, actual } => {
                write!(f, "declared cost {declared} differs from actual {actual}")
            }
        }
    }
}

/// A solution read from a CVRPLIB `.sol` file, plus its declared cost.
#[derive(Debug, Clone)]
pub struct SolutionFile {
    pub solution: Solution,
    pub declared_cost: Option<i64>,
}

/// Parses `Route #k: c1 c2 ...` lines and an optional `Cost <value>` line.
/// Customer numbers are the instance's internal indices (1..=n).
pub fn parse_solution(inst: &Instance, text: &str) -> Result<SolutionFile, ParseError> {
    let mut routes = Vec::new();
    let mut declared_cost = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("Route") {
            let Some((_, body)) = rest.split_once(':') else {
                return Err(ParseError::new(line_no, "route line without `:`"));
            };
            let mut route = Vec::new();
            for tok in body.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| ParseError::new(line_no, format!("malformed customer `{tok}`")))?;
                if v == DEPOT || v > inst.n() {
                    return Err(ParseError::new(line_no, format!("customer {v} outside 1..={}", inst.n())));
                }
                route.push(v);
            }
            routes.push(route);
        } else if let Some(rest) = line.strip_prefix("Cost") {
            let value = rest.trim().trim_start_matches(':').trim();
            let parsed = value
                .parse::<f64>()
                .map_err(|_| ParseError::new(line_no, format!("malformed cost `{value}`")))?;
            declared_cost = Some(parsed.round() as i64);
        }
    }
    // Duplicates are kept so that validation can report them.
    let mut s = Solution::empty(inst);
    for route in routes {
        let r = s.add_empty_route();
        s.replace_route(inst, r, route);
    }
    Ok(SolutionFile {
        solution: s,
        declared_cost,
    })
}

/// Validates a parsed solution file, including its declared cost.
pub fn validate_file(inst: &Instance, file: &SolutionFile) -> Result<i64, Vec<Violation>> {
    let actual = solution_cost(&file.solution, inst);
    let mut violations = file.solution.validate(inst).err().unwrap_or_default();
    if let Some(declared) = file.declared_cost {
        if declared != actual {
            violations.push(Violation::DeclaredCost { declared, actual });
        }
    }
    if violations.is_empty() {
        Ok(actual)
    } else {
        Err(violations)
    }
}
