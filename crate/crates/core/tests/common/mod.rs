//! Brute-force reference implementations used by the integration tests.
//! Nothing here calls into the library's cost or move code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use ails_cvrp::instance::{Instance, DEPOT};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Routes = Vec<Vec<usize>>;

pub fn dist(inst: &Instance, a: usize, b: usize) -> i64 {
    let (xa, ya) = inst.coords()[a];
    let (xb, yb) = inst.coords()[b];
    ((xa - xb).hypot(ya - yb) + 0.5).floor() as i64
}

pub fn route_cost(inst: &Instance, r: &[usize]) -> i64 {
    if r.is_empty() {
        return 0;
    }
    let mut prev = DEPOT;
    let mut c = 0;
    for &v in r.iter().chain(std::iter::once(&DEPOT)) {
        c += dist(inst, prev, v);
        prev = v;
    }
    c
}

pub fn cost(inst: &Instance, routes: &[Vec<usize>]) -> i64 {
    routes.iter().map(|r| route_cost(inst, r)).sum()
}

pub fn load(inst: &Instance, r: &[usize]) -> i64 {
    r.iter().map(|&v| inst.demand(v)).sum()
}

pub fn total_excess(inst: &Instance, routes: &[Vec<usize>]) -> i64 {
    routes.iter().map(|r| (load(inst, r) - inst.capacity()).max(0)).sum()
}

pub fn feasible(inst: &Instance, routes: &[Vec<usize>]) -> bool {
    total_excess(inst, routes) == 0
}

/// Edge multiset as a count map over undirected pairs.
pub fn edges(routes: &[Vec<usize>]) -> BTreeMap<(usize, usize), i64> {
    let mut m = BTreeMap::new();
    for r in routes.iter().filter(|r| !r.is_empty()) {
        let mut prev = DEPOT;
        for &v in r.iter().chain(std::iter::once(&DEPOT)) {
            *m.entry((prev.min(v), prev.max(v))).or_insert(0) += 1;
            prev = v;
        }
    }
    m
}

/// Size of the symmetric difference of the two edge multisets.
pub fn distance(a: &[Vec<usize>], b: &[Vec<usize>]) -> usize {
    let (ea, eb) = (edges(a), edges(b));
    let mut keys: Vec<_> = ea.keys().chain(eb.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| (ea.get(k).copied().unwrap_or(0) - eb.get(k).copied().unwrap_or(0)).unsigned_abs() as usize)
        .sum()
}

/// Random feasible routes: shuffled customers packed greedily, with an
/// occasional early cut so route counts vary.
pub fn random_routes(inst: &Instance, rng: &mut impl Rng) -> Routes {
    let mut order: Vec<usize> = inst.customers().collect();
    order.shuffle(rng);
    let mut routes: Routes = vec![Vec::new()];
    let mut l = 0;
    for v in order {
        let q = inst.demand(v);
        if l + q > inst.capacity() || (!routes.last().unwrap().is_empty() && rng.gen_bool(0.15)) {
            routes.push(Vec::new());
            l = 0;
        }
        routes.last_mut().unwrap().push(v);
        l += q;
    }
    routes
}

/// Random routes with no capacity check at all.
pub fn random_unchecked_routes(inst: &Instance, k: usize, rng: &mut impl Rng) -> Routes {
    let mut routes: Routes = vec![Vec::new(); k];
    let mut order: Vec<usize> = inst.customers().collect();
    order.shuffle(rng);
    for v in order {
        let r = rng.gen_range(0..k);
        routes[r].push(v);
    }
    routes
}

fn without(r: &[usize], x: usize) -> Vec<usize> {
    r.iter().copied().filter(|&y| y != x).collect()
}

fn with_at(r: &[usize], k: usize, x: usize) -> Vec<usize> {
    let mut out = r.to_vec();
    out.insert(k, x);
    out
}

/// Every neighbor reachable by one move of the six kinds (all anchor pairs,
/// every position). Routes keep their orientation.
pub fn neighborhood(routes: &[Vec<usize>]) -> Vec<Routes> {
    let routes: Routes = routes.iter().filter(|r| !r.is_empty()).cloned().collect();
    let mut out = Vec::new();
    let m = routes.len();
    for a in 0..m {
        let ra = &routes[a];
        for (i, &v) in ra.iter().enumerate() {
            let ra_minus = without(ra, v);
            // relocate into every other route, or into a fresh route
            for b in 0..m {
                if b == a {
                    continue;
                }
                for k in 0..=routes[b].len() {
                    let mut n = routes.clone();
                    n[a] = ra_minus.clone();
                    n[b] = with_at(&routes[b], k, v);
                    out.push(n);
                }
            }
            if ra.len() > 1 {
                let mut n = routes.clone();
                n[a] = ra_minus.clone();
                n.push(vec![v]);
                out.push(n);
            }
            // relocate within the route
            for k in 0..ra.len() {
                let n_r = with_at(&ra_minus, k, v);
                if &n_r != ra {
                    let mut n = routes.clone();
                    n[a] = n_r;
                    out.push(n);
                }
            }
            // split the tail off into a fresh route
            if i + 1 < ra.len() {
                let mut n = routes.clone();
                n[a] = ra[..=i].to_vec();
                n.push(ra[i + 1..].to_vec());
                out.push(n);
            }
        }
        // intra swaps and segment reversals
        for i in 0..ra.len() {
            for j in i + 1..ra.len() {
                let mut s = ra.clone();
                s.swap(i, j);
                let mut n = routes.clone();
                n[a] = s;
                out.push(n);
                if !(i == 0 && j == ra.len() - 1) {
                    let mut s = ra.clone();
                    s[i..=j].reverse();
                    let mut n = routes.clone();
                    n[a] = s;
                    out.push(n);
                }
            }
        }
        for b in 0..m {
            if b == a {
                continue;
            }
            let rb = &routes[b];
            for (i, &v) in ra.iter().enumerate() {
                for (j, &u) in rb.iter().enumerate() {
                    // exchange with free re-insertion positions
                    let (a_minus, b_minus) = (without(ra, v), without(rb, u));
                    for ka in 0..=a_minus.len() {
                        for kb in 0..=b_minus.len() {
                            let mut n = routes.clone();
                            n[a] = with_at(&a_minus, ka, u);
                            n[b] = with_at(&b_minus, kb, v);
                            out.push(n);
                        }
                    }
                    // tail exchange
                    if b > a {
                        let mut n = routes.clone();
                        n[a] = ra[..=i].iter().chain(&rb[j + 1..]).copied().collect();
                        n[b] = rb[..=j].iter().chain(&ra[i + 1..]).copied().collect();
                        out.push(n);
                    }
                }
            }
        }
    }
    out
}

/// First neighbor that is feasible and strictly cheaper, if any.
pub fn improving_neighbor(inst: &Instance, routes: &[Vec<usize>]) -> Option<(i64, Routes)> {
    let base = cost(inst, routes);
    neighborhood(routes)
        .into_iter()
        .filter(|n| feasible(inst, n))
        .map(|n| (cost(inst, &n), n))
        .find(|(c, _)| *c < base)
}

/// `omega` customers nearest to `center` (center included) by full sort.
pub fn nearest_set(inst: &Instance, center: usize, omega: usize) -> Vec<usize> {
    let mut rest: Vec<usize> = inst.customers().filter(|&v| v != center).collect();
    rest.sort_by_key(|&v| (dist(inst, center, v), v));
    let mut out = vec![center];
    out.extend_from_slice(&rest[..omega - 1]);
    out
}

/// Literal elite-pool update on (cost, routes) pairs.
pub struct EliteOracle {
    pub sigma: usize,
    pub d_beta: usize,
    pub members: Vec<(i64, Routes)>,
}

impl EliteOracle {
    pub fn new(sigma: usize, d_beta: usize) -> Self {
        Self { sigma, d_beta, members: Vec::new() }
    }

    pub fn insert(&mut self, f: i64, s: &Routes) -> bool {
        let close: Vec<usize> = (0..self.members.len())
            .filter(|&i| distance(&self.members[i].1, s) <= self.d_beta)
            .collect();
        let plus: Vec<usize> = close.iter().copied().filter(|&i| self.members[i].0 >= f).collect();
        let minus = close.len() - plus.len();
        let worst = (0..self.members.len()).fold(None, |w: Option<usize>, i| match w {
            Some(w) if self.members[w].0 >= self.members[i].0 => Some(w),
            _ => Some(i),
        });
        let room = self.members.len() < self.sigma || worst.is_some_and(|w| f <= self.members[w].0);
        if minus != 0 || !room {
            return false;
        }
        if !plus.is_empty() {
            for &i in plus.iter().rev() {
                self.members.remove(i);
            }
        } else if self.members.len() >= self.sigma {
            self.members.remove(worst.unwrap());
        }
        self.members.push((f, s.clone()));
        true
    }
}
