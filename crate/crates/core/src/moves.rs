//! Granular best-improvement move engine shared by local search and the
//! feasibility repair.
//!
//! Every move is anchored on a pair `(v, u)` where `u` is one of the `phi`
//! nearest customers of `v`, or the depot. The depot anchor stands for the
//! route ends of `v`'s own route and for an empty route.

use crate::error::Error;
use crate::instance::{Instance, NeighborLists, Vertex, DEPOT};
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    ShiftInter,
    SwapStar,
    Cross,
    ShiftIntra,
    SwapIntra,
    TwoOpt,
}

impl MoveKind {
    pub const ALL: [MoveKind; 6] = [
        MoveKind::ShiftInter,
        MoveKind::SwapStar,
        MoveKind::Cross,
        MoveKind::ShiftIntra,
        MoveKind::SwapIntra,
        MoveKind::TwoOpt,
    ];

    pub fn is_inter_route(self) -> bool {
        matches!(self, MoveKind::ShiftInter | MoveKind::SwapStar | MoveKind::Cross)
    }
}

/// How to carry out an evaluated move. Indices refer to the route as it is
/// after the moved customers have been taken out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plan {
    Relocate { v: Vertex, route: usize, index: usize },
    SwapStar { v: Vertex, u: Vertex, v_index: usize, u_index: usize },
    Cross { v: Vertex, u: Vertex },
    /// Moves the tail after `v` into the (empty) route `route`.
    Split { v: Vertex, route: usize },
    Exchange { v: Vertex, u: Vertex },
    Reverse { route: usize, from: usize, to: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveDelta {
    pub kind: MoveKind,
    pub anchor: (Vertex, Vertex),
    pub cost_delta: i64,
    pub excess_delta: i64,
    pub plan: Plan,
}

#[inline]
fn excess(load: i64, cap: i64) -> i64 {
    (load - cap).max(0)
}

/// Cost of inserting `x` between `a` and `b`.
#[inline]
pub fn insertion_cost(inst: &Instance, a: Vertex, b: Vertex, x: Vertex) -> i64 {
    inst.dist(a, x) + inst.dist(x, b) - inst.dist(a, b)
}

/// Saving obtained by taking a routed customer out of its route.
#[inline]
fn removal_gain(s: &Solution, inst: &Instance, v: Vertex) -> i64 {
    let (p, n) = (s.pred(v), s.succ(v));
    inst.dist(p, v) + inst.dist(v, n) - inst.dist(p, n)
}

/// Cheapest insertion of `x` into `route` with `skip` taken out. Returns the
/// cost and the index in the reduced route; the first minimum wins.
fn best_insertion_skipping(inst: &Instance, route: &[Vertex], x: Vertex, skip: Vertex) -> (i64, usize) {
    let mut best = (i64::MAX, 0);
    let mut prev = DEPOT;
    let mut k = 0;
    for &w in route.iter().filter(|&&w| w != skip) {
        let c = insertion_cost(inst, prev, w, x);
        if c < best.0 {
            best = (c, k);
        }
        prev = w;
        k += 1;
    }
    let c = insertion_cost(inst, prev, DEPOT, x);
    if c < best.0 {
        best = (c, k);
    }
    best
}

/// The three cheapest slots for one customer in one route, by (cost, slot).
/// Slot `k` lies between `route[k - 1]` and `route[k]`.
#[derive(Debug, Clone, Copy)]
struct TopSlots {
    stamp: u64,
    top: [(i64, usize); 3],
}

impl TopSlots {
    const EMPTY: TopSlots = TopSlots {
        stamp: 0,
        top: [(i64::MAX, usize::MAX); 3],
    };

    fn compute(inst: &Instance, route: &[Vertex], x: Vertex, stamp: u64) -> Self {
        let mut top = [(i64::MAX, usize::MAX); 3];
        let mut push = |c: i64, k: usize| {
            if c < top[2].0 {
                top[2] = (c, k);
                if top[2].0 < top[1].0 {
                    top.swap(1, 2);
                    if top[1].0 < top[0].0 {
                        top.swap(0, 1);
                    }
                }
            }
        };
        let mut prev = DEPOT;
        for (k, &w) in route.iter().enumerate() {
            push(insertion_cost(inst, prev, w, x), k);
            prev = w;
        }
        push(insertion_cost(inst, prev, DEPOT, x), route.len());
        TopSlots { stamp, top }
    }

    /// Cheapest insertion of `x` into the route with the customer at index
    /// `j` taken out, as (cost, index in the reduced route).
    fn best_without(&self, s: &Solution, inst: &Instance, r: usize, j: usize, x: Vertex) -> (i64, usize) {
        let merged = (insertion_cost(inst, s.at(r, j as isize - 1), s.at(r, j as isize + 1), x), j);
        match self.top.iter().find(|&&(_, k)| k != j && k != j + 1 && k != usize::MAX) {
            Some(&(c, k)) => merged.min((c, if k > j { k - 1 } else { k })),
            None => merged,
        }
    }
}

/// Relocates `v` into another route at `index`.
pub fn delta_shift1_inter(s: &Solution, inst: &Instance, v: Vertex, route: usize, index: usize) -> Option<MoveDelta> {
    let ra = s.route_of(v);
    if route == ra || index > s.route(route).len() {
        return None;
    }
    let cap = s.capacity();
    let q = inst.demand(v);
    let (a, b) = (s.at(route, index as isize - 1), s.at(route, index as isize));
    let cost_delta = insertion_cost(inst, a, b, v) - removal_gain(s, inst, v);
    let (la, lb) = (s.load(ra), s.load(route));
    let excess_delta = excess(la - q, cap) + excess(lb + q, cap) - excess(la, cap) - excess(lb, cap);
    let anchor = if s.route(route).is_empty() { DEPOT } else { s.at(route, index.min(s.route(route).len() - 1) as isize) };
    Some(MoveDelta {
        kind: MoveKind::ShiftInter,
        anchor: (v, anchor),
        cost_delta,
        excess_delta,
        plan: Plan::Relocate { v, route, index },
    })
}

/// Exchanges the routes of `v` and `u`; each goes to the cheapest position
/// of the other route (evaluated with the partner removed).
pub fn delta_swap_star(s: &Solution, inst: &Instance, v: Vertex, u: Vertex) -> Option<MoveDelta> {
    let (ra, rb) = (s.route_of(v), s.route_of(u));
    if ra == rb {
        return None;
    }
    let cap = s.capacity();
    let (ins_v, v_index) = best_insertion_skipping(inst, s.route(rb), v, u);
    let (ins_u, u_index) = best_insertion_skipping(inst, s.route(ra), u, v);
    let cost_delta = ins_v + ins_u - removal_gain(s, inst, v) - removal_gain(s, inst, u);
    let (qv, qu) = (inst.demand(v), inst.demand(u));
    let (la, lb) = (s.load(ra), s.load(rb));
    let excess_delta =
        excess(la - qv + qu, cap) + excess(lb - qu + qv, cap) - excess(la, cap) - excess(lb, cap);
    Some(MoveDelta {
        kind: MoveKind::SwapStar,
        anchor: (v, u),
        cost_delta,
        excess_delta,
        plan: Plan::SwapStar { v, u, v_index, u_index },
    })
}

/// Exchanges the tails following `v` and `u` in two distinct routes.
pub fn delta_cross(s: &Solution, inst: &Instance, v: Vertex, u: Vertex) -> Option<MoveDelta> {
    let (ra, rb) = (s.route_of(v), s.route_of(u));
    if ra == rb {
        return None;
    }
    let cap = s.capacity();
    let (sv, su) = (s.succ(v), s.succ(u));
    let cost_delta = inst.dist(v, su) + inst.dist(u, sv) - inst.dist(v, sv) - inst.dist(u, su);
    let (la, lb) = (s.load(ra), s.load(rb));
    let head_a = s.load_through(ra, s.index_of(v));
    let head_b = s.load_through(rb, s.index_of(u));
    let (tail_a, tail_b) = (la - head_a, lb - head_b);
    let excess_delta = excess(head_a + tail_b, cap) + excess(head_b + tail_a, cap)
        - excess(la, cap)
        - excess(lb, cap);
    Some(MoveDelta {
        kind: MoveKind::Cross,
        anchor: (v, u),
        cost_delta,
        excess_delta,
        plan: Plan::Cross { v, u },
    })
}

/// Cross against an empty route: the tail after `v` becomes a route of its own.
pub fn delta_cross_split(s: &Solution, inst: &Instance, v: Vertex, empty: usize) -> Option<MoveDelta> {
    let ra = s.route_of(v);
    let sv = s.succ(v);
    if sv == DEPOT || !s.route(empty).is_empty() {
        return None;
    }
    let cap = s.capacity();
    let cost_delta = inst.dist(v, DEPOT) + inst.dist(DEPOT, sv) - inst.dist(v, sv);
    let la = s.load(ra);
    let head = s.load_through(ra, s.index_of(v));
    let excess_delta = excess(head, cap) + excess(la - head, cap) - excess(la, cap);
    Some(MoveDelta {
        kind: MoveKind::Cross,
        anchor: (v, DEPOT),
        cost_delta,
        excess_delta,
        plan: Plan::Split { v, route: empty },
    })
}

/// Moves `v` to `index` of its own route, `index` counted with `v` removed.
/// The null move (back to where it was) is not generated.
pub fn delta_shift1_intra(s: &Solution, inst: &Instance, v: Vertex, index: usize) -> Option<MoveDelta> {
    let r = s.route_of(v);
    let i = s.index_of(v);
    let len = s.route(r).len();
    if index == i || index >= len {
        return None;
    }
    // neighbours of the slot in the route without v
    let slot = |k: isize| -> Vertex {
        let k = if k >= i as isize { k + 1 } else { k };
        s.at(r, k)
    };
    let (a, b) = (slot(index as isize - 1), slot(index as isize));
    let cost_delta = insertion_cost(inst, a, b, v) - removal_gain(s, inst, v);
    let anchor = if index < i { b } else { a };
    Some(MoveDelta {
        kind: MoveKind::ShiftIntra,
        anchor: (v, anchor),
        cost_delta,
        excess_delta: 0,
        plan: Plan::Relocate { v, route: r, index },
    })
}

/// Swaps the positions of two customers of the same route.
pub fn delta_swap1_intra(s: &Solution, inst: &Instance, v: Vertex, u: Vertex) -> Option<MoveDelta> {
    let r = s.route_of(v);
    if v == u || s.route_of(u) != r {
        return None;
    }
    let (i, j) = {
        let (a, b) = (s.index_of(v), s.index_of(u));
        (a.min(b), a.max(b))
    };
    let (x, y) = (s.route(r)[i], s.route(r)[j]);
    let d = |a, b| inst.dist(a, b);
    let px = s.at(r, i as isize - 1);
    let ny = s.at(r, j as isize + 1);
    let cost_delta = if j == i + 1 {
        d(px, y) + d(x, ny) - d(px, x) - d(y, ny)
    } else {
        let nx = s.at(r, i as isize + 1);
        let py = s.at(r, j as isize - 1);
        d(px, y) + d(y, nx) + d(py, x) + d(x, ny) - d(px, x) - d(x, nx) - d(py, y) - d(y, ny)
    };
    Some(MoveDelta {
        kind: MoveKind::SwapIntra,
        anchor: (v, u),
        cost_delta,
        excess_delta: 0,
        plan: Plan::Exchange { v, u },
    })
}

/// Reverses `route[from..=to]`. Reversing a single customer or the whole
/// route leaves the edge set unchanged and is not generated.
pub fn delta_reverse(s: &Solution, inst: &Instance, route: usize, from: usize, to: usize) -> Option<MoveDelta> {
    let len = s.route(route).len();
    if from >= to || to >= len || (from == 0 && to == len - 1) {
        return None;
    }
    let (x, y) = (s.route(route)[from], s.route(route)[to]);
    let a = s.at(route, from as isize - 1);
    let b = s.at(route, to as isize + 1);
    let cost_delta = inst.dist(a, y) + inst.dist(x, b) - inst.dist(a, x) - inst.dist(y, b);
    Some(MoveDelta {
        kind: MoveKind::TwoOpt,
        anchor: (x, y),
        cost_delta,
        excess_delta: 0,
        plan: Plan::Reverse { route, from, to },
    })
}

/// 2-opt on reference points `v` and `u` of one route: the segment after the
/// earlier point up to the later one is reversed, making them adjacent.
/// With `u` the depot, the prefix of the route ending at `v` is reversed.
pub fn delta_two_opt(s: &Solution, inst: &Instance, v: Vertex, u: Vertex) -> Option<MoveDelta> {
    let r = s.route_of(v);
    let i = s.index_of(v);
    let mut m = if u == DEPOT {
        delta_reverse(s, inst, r, 0, i)?
    } else {
        if s.route_of(u) != r {
            return None;
        }
        let j = s.index_of(u);
        let (lo, hi) = (i.min(j), i.max(j));
        delta_reverse(s, inst, r, lo + 1, hi)?
    };
    m.anchor = (v, u);
    Some(m)
}

/// Applies an evaluated move. The solution must be in the state the move was
/// evaluated on.
pub fn apply(s: &mut Solution, inst: &Instance, m: &MoveDelta) {
    match m.plan {
        Plan::Relocate { v, route, index } => {
            s.remove(inst, v);
            s.insert(inst, v, route, index);
        }
        Plan::SwapStar { v, u, v_index, u_index } => {
            let (ra, rb) = (s.route_of(v), s.route_of(u));
            s.remove(inst, v);
            s.remove(inst, u);
            s.insert(inst, u, ra, u_index);
            s.insert(inst, v, rb, v_index);
        }
        Plan::Cross { v, u } => {
            let (ra, rb) = (s.route_of(v), s.route_of(u));
            let (i, j) = (s.index_of(v), s.index_of(u));
            let (a, b) = (s.route(ra), s.route(rb));
            let new_a: Vec<Vertex> = a[..=i].iter().chain(&b[j + 1..]).copied().collect();
            let new_b: Vec<Vertex> = b[..=j].iter().chain(&a[i + 1..]).copied().collect();
            s.replace_route(inst, ra, new_a);
            s.replace_route(inst, rb, new_b);
        }
        Plan::Split { v, route } => {
            let ra = s.route_of(v);
            let i = s.index_of(v);
            let a = s.route(ra);
            let (head, tail) = (a[..=i].to_vec(), a[i + 1..].to_vec());
            s.replace_route(inst, ra, head);
            s.replace_route(inst, route, tail);
        }
        Plan::Exchange { v, u } => {
            let r = s.route_of(v);
            let mut seq = s.route(r).to_vec();
            seq.swap(s.index_of(v), s.index_of(u));
            s.replace_route(inst, r, seq);
        }
        Plan::Reverse { route, from, to } => {
            let mut seq = s.route(route).to_vec();
            seq[from..=to].reverse();
            s.replace_route(inst, route, seq);
        }
    }
}

fn routes_touched(s: &Solution, m: &MoveDelta) -> (usize, Option<usize>) {
    match m.plan {
        Plan::Relocate { v, route, .. } => (s.route_of(v), Some(route)),
        Plan::SwapStar { v, u, .. } | Plan::Cross { v, u } => (s.route_of(v), Some(s.route_of(u))),
        Plan::Split { v, route } => (s.route_of(v), Some(route)),
        Plan::Exchange { v, .. } => (s.route_of(v), None),
        Plan::Reverse { route, .. } => (route, None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Only cost-improving moves that keep every route within capacity.
    Improve,
    /// Only moves that strictly reduce total excess, ranked by (excess, cost).
    Repair,
}

impl Mode {
    #[inline]
    fn admits(self, m: &MoveDelta) -> bool {
        match self {
            Mode::Improve => m.excess_delta <= 0 && m.cost_delta < 0,
            Mode::Repair => m.excess_delta < 0,
        }
    }

    #[inline]
    fn better(self, m: &MoveDelta, best: &MoveDelta) -> bool {
        match self {
            Mode::Improve => m.cost_delta < best.cost_delta,
            Mode::Repair => (m.excess_delta, m.cost_delta) < (best.excess_delta, best.cost_delta),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub evaluated: u64,
    pub applied: u64,
    pub routes_added: u64,
}

/// Reusable move engine with don't-look bookkeeping: a customer is skipped
/// when neither its route nor any anchor's route changed since it was last
/// found to have no admissible move.
pub struct LocalSearch<'a> {
    inst: &'a Instance,
    nl: &'a NeighborLists,
    route_stamp: Vec<u64>,
    vertex_stamp: Vec<u64>,
    tick: u64,
    stats: SearchStats,
    anchor_log: Option<Vec<(Vertex, Vertex)>>,
    /// `slots[r][v]`: cached [`TopSlots`] of customer `v` in route `r`.
    slots: Vec<Vec<TopSlots>>,
}

impl<'a> LocalSearch<'a> {
    pub fn new(inst: &'a Instance, nl: &'a NeighborLists) -> Self {
        Self {
            inst,
            nl,
            route_stamp: Vec::new(),
            vertex_stamp: vec![0; inst.num_vertices()],
            tick: 0,
            stats: SearchStats::default(),
            anchor_log: None,
            slots: Vec::new(),
        }
    }

    /// Records every evaluated anchor pair (for auditing the granular
    /// restriction).
    pub fn with_anchor_log(mut self) -> Self {
        self.anchor_log = Some(Vec::new());
        self
    }

    pub fn anchor_log(&self) -> Option<&[(Vertex, Vertex)]> {
        self.anchor_log.as_deref()
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    fn reset(&mut self, s: &Solution) {
        self.tick += 1;
        self.route_stamp.clear();
        self.route_stamp.resize(s.num_routes(), self.tick);
        self.vertex_stamp.iter_mut().for_each(|t| *t = 0);
        self.tick += 1;
    }

    fn touch_route(&mut self, r: usize) {
        if r >= self.route_stamp.len() {
            self.route_stamp.resize(r + 1, 0);
        }
        self.route_stamp[r] = self.tick;
    }

    fn is_clean(&self, s: &Solution, v: Vertex) -> bool {
        let seen = self.vertex_stamp[v];
        if seen == 0 || self.route_stamp[s.route_of(v)] >= seen {
            return false;
        }
        self.nl.of(v).iter().all(|&u| self.route_stamp[s.route_of(u)] < seen)
    }

    fn top_slots(&mut self, s: &Solution, r: usize, x: Vertex) -> TopSlots {
        let stamp = self.route_stamp[r];
        if self.slots.len() <= r {
            self.slots.resize_with(r + 1, Vec::new);
        }
        let row = &mut self.slots[r];
        if row.is_empty() {
            row.resize(self.inst.num_vertices(), TopSlots::EMPTY);
        }
        if row[x].stamp != stamp {
            row[x] = TopSlots::compute(self.inst, s.route(r), x, stamp);
        }
        row[x]
    }

    /// Best admissible move anchored at `v`, first-found on ties.
    fn best_move(&mut self, s: &Solution, v: Vertex, mode: Mode, empty: Option<usize>) -> Option<MoveDelta> {
        let inst = self.inst;
        let d = |a: Vertex, b: Vertex| inst.dist(a, b);
        let mut best: Option<MoveDelta> = None;
        let mut offer = |cost_delta: i64, excess_delta: i64, kind: MoveKind, u: Vertex, plan: Plan, stats: &mut SearchStats| {
            stats.evaluated += 1;
            let m = MoveDelta { kind, anchor: (v, u), cost_delta, excess_delta, plan };
            if mode.admits(&m) && best.as_ref().is_none_or(|b| mode.better(&m, b)) {
                best = Some(m);
            }
        };
        let consider = |m: Option<MoveDelta>, u: Vertex, stats: &mut SearchStats, offer: &mut dyn FnMut(i64, i64, MoveKind, Vertex, Plan, &mut SearchStats)| {
            if let Some(m) = m {
                offer(m.cost_delta, m.excess_delta, m.kind, u, m.plan, stats);
            }
        };
        let cap = s.capacity();
        let ra = s.route_of(v);
        let i = s.index_of(v);
        let (p, nx) = (s.pred(v), s.succ(v));
        let gain_v = d(p, v) + d(v, nx) - d(p, nx);
        let qv = inst.demand(v);
        let la = s.load(ra);
        let exc_a = excess(la, cap);
        let head_a = s.load_through(ra, i);
        for &u in self.nl.of(v) {
            if let Some(log) = self.anchor_log.as_mut() {
                log.push((v, u));
            }
            let rb = s.route_of(u);
            let j = s.index_of(u);
            if rb == ra {
                if mode == Mode::Repair {
                    continue;
                }
                let j_reduced = if j > i { j - 1 } else { j };
                consider(delta_shift1_intra(s, inst, v, j_reduced), u, &mut self.stats, &mut offer);
                consider(delta_shift1_intra(s, inst, v, j_reduced + 1), u, &mut self.stats, &mut offer);
                consider(delta_swap1_intra(s, inst, v, u), u, &mut self.stats, &mut offer);
                consider(delta_two_opt(s, inst, v, u), u, &mut self.stats, &mut offer);
                continue;
            }
            let (pu, su) = (s.pred(u), s.succ(u));
            let qu = inst.demand(u);
            let lb = s.load(rb);
            let exc_ab = exc_a + excess(lb, cap);
            let d_vu = d(v, u);

            let shift_exc = excess(la - qv, cap) + excess(lb + qv, cap) - exc_ab;
            let before = d(pu, v) + d_vu - d(pu, u) - gain_v;
            offer(before, shift_exc, MoveKind::ShiftInter, u, Plan::Relocate { v, route: rb, index: j }, &mut self.stats);
            let after = d_vu + d(v, su) - d(u, su) - gain_v;
            offer(after, shift_exc, MoveKind::ShiftInter, u, Plan::Relocate { v, route: rb, index: j + 1 }, &mut self.stats);

            let (ins_v, v_index) = self.top_slots(s, rb, v).best_without(s, inst, rb, j, v);
            let (ins_u, u_index) = self.top_slots(s, ra, u).best_without(s, inst, ra, i, u);
            let gain_u = d(pu, u) + d(u, su) - d(pu, su);
            let swap_exc = excess(la - qv + qu, cap) + excess(lb - qu + qv, cap) - exc_ab;
            offer(
                ins_v + ins_u - gain_v - gain_u,
                swap_exc,
                MoveKind::SwapStar,
                u,
                Plan::SwapStar { v, u, v_index, u_index },
                &mut self.stats,
            );

            let head_b = s.load_through(rb, j);
            let cross_exc = excess(head_a + lb - head_b, cap) + excess(head_b + la - head_a, cap) - exc_ab;
            let cross = d(v, su) + d(u, nx) - d(v, nx) - d(u, su);
            offer(cross, cross_exc, MoveKind::Cross, u, Plan::Cross { v, u }, &mut self.stats);
        }
        if let Some(log) = self.anchor_log.as_mut() {
            log.push((v, DEPOT));
        }
        if let Some(e) = empty {
            if s.route(ra).len() > 1 {
                consider(delta_shift1_inter(s, inst, v, e, 0), DEPOT, &mut self.stats, &mut offer);
            }
            consider(delta_cross_split(s, inst, v, e), DEPOT, &mut self.stats, &mut offer);
        }
        if mode == Mode::Improve {
            let len = s.route(ra).len();
            if len > 1 {
                consider(delta_shift1_intra(s, inst, v, 0), DEPOT, &mut self.stats, &mut offer);
                consider(delta_shift1_intra(s, inst, v, len - 1), DEPOT, &mut self.stats, &mut offer);
            }
            consider(delta_two_opt(s, inst, v, DEPOT), DEPOT, &mut self.stats, &mut offer);
            if len > 0 {
                consider(delta_reverse(s, inst, ra, i, len - 1), DEPOT, &mut self.stats, &mut offer);
            }
        }
        best
    }

    fn commit(&mut self, s: &mut Solution, m: &MoveDelta) {
        let (a, b) = routes_touched(s, m);
        apply(s, self.inst, m);
        self.stats.applied += 1;
        self.tick += 1;
        self.touch_route(a);
        if let Some(b) = b {
            self.touch_route(b);
        }
        self.tick += 1;
    }

    /// Best-improvement descent to a local optimum of the composite
    /// neighborhood. Empty routes are dropped from the result.
    pub fn improve(&mut self, s: &mut Solution) -> Result<(), Error> {
        self.descend(s, None)
    }

    /// Like [`LocalSearch::improve`] for a solution derived from `reference`,
    /// which must itself be a local optimum of this search. Customers whose
    /// route and anchor routes are unchanged from `reference` start out
    /// marked as having no improving move.
    pub fn improve_from(&mut self, s: &mut Solution, reference: &Solution) -> Result<(), Error> {
        self.descend(s, Some(reference))
    }

    fn descend(&mut self, s: &mut Solution, reference: Option<&Solution>) -> Result<(), Error> {
        let excess = s.total_excess();
        if excess > 0 {
            return Err(Error::Infeasible(excess));
        }
        s.ensure_empty_route();
        self.reset(s);
        let n = self.inst.n();
        if let Some(reference) = reference {
            let unchanged: Vec<bool> = s
                .routes()
                .iter()
                .map(|route| match route.first() {
                    None => true,
                    Some(&v) => reference.is_routed(v) && reference.route(reference.route_of(v)) == route.as_slice(),
                })
                .collect();
            for v in 1..=n {
                if unchanged[s.route_of(v)] && self.nl.of(v).iter().all(|&u| unchanged[s.route_of(u)]) {
                    self.vertex_stamp[v] = self.tick;
                }
            }
            self.tick += 1;
        }
        loop {
            let mut improved = false;
            for v in 1..=n {
                if self.is_clean(s, v) {
                    continue;
                }
                let empty = s.first_empty_route();
                match self.best_move(s, v, Mode::Improve, empty) {
                    Some(m) => {
                        self.commit(s, &m);
                        if s.first_empty_route().is_none() {
                            let r = s.add_empty_route();
                            self.touch_route(r);
                        }
                        improved = true;
                    }
                    None => {
                        self.vertex_stamp[v] = self.tick;
                        self.tick += 1;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        s.retain_empty_routes(0);
        Ok(())
    }

    /// Drives total capacity excess to zero. Whenever no excess-reducing move
    /// exists, an empty route is added and the scan restarts.
    pub fn repair(&mut self, s: &mut Solution) {
        if s.is_feasible() {
            return;
        }
        self.reset(s);
        let n = self.inst.n();
        while s.total_excess() > 0 {
            let mut improved = false;
            for v in 1..=n {
                if self.is_clean(s, v) || !self.touches_overload(s, v) {
                    continue;
                }
                let empty = s.first_empty_route();
                match self.best_move(s, v, Mode::Repair, empty) {
                    Some(m) => {
                        self.commit(s, &m);
                        improved = true;
                        if s.total_excess() == 0 {
                            break;
                        }
                    }
                    None => {
                        self.vertex_stamp[v] = self.tick;
                        self.tick += 1;
                    }
                }
            }
            if !improved && s.total_excess() > 0 {
                s.add_empty_route();
                self.stats.routes_added += 1;
                self.reset(s);
            }
        }
        s.retain_empty_routes(0);
    }

    fn touches_overload(&self, s: &Solution, v: Vertex) -> bool {
        s.excess(s.route_of(v)) > 0 || self.nl.of(v).iter().any(|&u| s.excess(s.route_of(u)) > 0)
    }
}

/// Best-improvement local search over the six move kinds. Fails on an
/// infeasible input.
pub fn local_search(mut s: Solution, inst: &Instance, nl: &NeighborLists) -> Result<Solution, Error> {
    LocalSearch::new(inst, nl).improve(&mut s)?;
    Ok(s)
}

/// Feasibility repair; a feasible input is returned unchanged.
pub fn make_feasible(mut s: Solution, inst: &Instance, nl: &NeighborLists) -> Solution {
    LocalSearch::new(inst, nl).repair(&mut s);
    s
}
