//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The lines are written to stdout directly, so they appear without `--nocapture`.
//! The desk-scale benchmark needs the CVRPLIB files and up to ~70 minutes; it is
//! ignored by default (see `criterion_5_gap_reproduction`).

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use ails_cvrp::adaptive::{
    convergent_alpha, distance_eta, flow_eta, rescale_degree, AcceptanceParams, AcceptanceState, Criterion,
    DegreeParams, DegreeState, Mechanism, Verdict,
};
use ails_cvrp::bench::{compute_gap, round_to, run_experiment, ExperimentSpec, InstanceSource};
use ails_cvrp::elite::{EliteSet, EliteUpdate};
use ails_cvrp::engine::{Phase, RunConfig, Search};
use ails_cvrp::instance::{edge_weight, read_instance, BksRegistry, Instance, NeighborLists, DEPOT};
use ails_cvrp::moves::{self, local_search, MoveDelta};
use ails_cvrp::perturbation::{insert_position, Forbidden, Insertion, Removal};
use ails_cvrp::solution::{min_routes, route_cost, solution_distance, Solution, Violation};
use ails_cvrp::synthetic::SyntheticSpec;
use ails_cvrp::{engine, run};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion lines go straight to stdout so they show up without `--nocapture`.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

/// Collects named checks and prints a single verdict line.
struct Report {
    id: u8,
    title: &'static str,
    started: Instant,
    budget: Duration,
    checks: usize,
    failures: Vec<String>,
}

impl Report {
    fn new(id: u8, title: &'static str, budget_secs: u64) -> Self {
        Self {
            id,
            title,
            started: Instant::now(),
            budget: Duration::from_secs(budget_secs),
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, rel: f64, got: f64, want: f64, what: &str) {
        let err = (got - want).abs() / want.abs().max(1e-300);
        self.check(err <= rel, || format!("{what}: got {got}, want {want}"));
    }

    fn finish(mut self) {
        let took = self.started.elapsed();
        if took > self.budget {
            self.failures
                .push(format!("took {:.2}s, budget {}s", took.as_secs_f64(), self.budget.as_secs()));
        }
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        say!(
            "{status} criterion {}: {} ({} checks, {:.2}s)",
            self.id,
            self.title,
            self.checks,
            took.as_secs_f64()
        );
        for f in &self.failures {
            say!("    {f}");
        }
        assert!(self.failures.is_empty(), "criterion {} failed", self.id);
    }
}

fn point_instance(coords: Vec<(f64, f64)>, demand: Vec<i64>, capacity: i64) -> Instance {
    Instance::new("t", coords, demand, capacity).unwrap()
}

fn fed(params: AcceptanceParams, costs: &[f64]) -> AcceptanceState {
    let mut a = AcceptanceState::new(params);
    for &f in costs {
        a.update_fbar(f);
    }
    a
}

fn params(c: Criterion) -> AcceptanceParams {
    AcceptanceParams { criterion: c, ..AcceptanceParams::default() }
}

#[test]
fn criterion_1_exact_formulas() {
    let mut c = Report::new(1, "exact-formula suite", 1);
    const REL: f64 = 1e-9;

    // edge weights and the solution distance
    let tri = point_instance(vec![(0.0, 0.0), (3.0, 4.0), (1.0, 1.0), (0.0, 0.0)], vec![0, 1, 1, 1], 3);
    c.check(edge_weight(&tri, 0, 1) == 5, || "d((0,0),(3,4)) != 5".into());
    c.check(edge_weight(&tri, 0, 2) == 1, || "d((0,0),(1,1)) != 1".into());
    c.check(edge_weight(&tri, 0, 3) == 0, || "d((0,0),(0,0)) != 0".into());
    c.check(route_cost(&tri, &[1]) == 10, || "out-and-back cost".into());
    c.check(route_cost(&tri, &[]) == 0, || "empty route cost".into());

    let two = point_instance(vec![(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)], vec![0, 1, 1], 2);
    let s1 = Solution::from_routes(&two, vec![vec![1, 2]]);
    let s2 = Solution::from_routes(&two, vec![vec![1], vec![2]]);
    c.check(solution_distance(&s1, &s2) == 3, || format!("d(s1,s2) = {}", solution_distance(&s1, &s2)));
    c.check(solution_distance(&s1, &s1) == 0, || "d(s,s) != 0".into());
    let inst = SyntheticSpec::new(9).with_route_size(3.0).generate(1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let a = Solution::from_routes(&inst, common::random_routes(&inst, &mut rng));
        let b = Solution::from_routes(&inst, common::random_routes(&inst, &mut rng));
        let (ab, ba) = (solution_distance(&a, &b), solution_distance(&b, &a));
        c.check(ab == ba, || format!("asymmetric distance {ab} vs {ba}"));
    }

    // minimum route count
    let m1 = point_instance(vec![(0.0, 0.0); 4], vec![0, 3, 3, 3], 5);
    let m2 = point_instance(vec![(0.0, 0.0); 2], vec![0, 5], 5);
    c.check(min_routes(&m1) == 2 && min_routes(&m2) == 1, || "min_routes".into());

    // running mean
    let a = fed(params(Criterion::C1), &[123.0]);
    c.close(REL, a.f_bar(), 123.0, "f_bar after one iteration");
    let a = fed(params(Criterion::C1), &[100.0, 200.0]);
    c.close(REL, a.f_bar(), 150.0, "f_bar running branch");
    let mut costs = vec![100.0; 30];
    costs.push(130.0);
    let a = fed(params(Criterion::C1), &costs);
    c.close(REL, a.f_bar(), 101.0, "f_bar exponential branch");

    // C1 threshold with the <= boundary
    let mut a = fed(AcceptanceParams { eta: Some(0.4), ..params(Criterion::C1) }, &[100.0, 120.0]);
    c.close(REL, a.f_bar(), 110.0, "C1 setup f_bar");
    c.close(REL, a.threshold(0.0).unwrap(), 104.0, "C1 threshold");
    c.check(a.accept(104.0, 0.0, 0) == Verdict::Accept, || "C1 rejects 104".into());
    c.check(a.accept(104.01, 0.0, 0) == Verdict::Reject, || "C1 accepts 104.01".into());

    // C5 and C7
    let mut a = AcceptanceState::new(params(Criterion::C5));
    c.close(REL, a.threshold(27591.0).unwrap(), 27728.955, "C5 threshold");
    c.check(a.accept(27700.0, 27591.0, 0) == Verdict::Accept, || "C5 rejects 27700".into());
    let mut a = AcceptanceState::new(params(Criterion::C7));
    c.check(a.accept(50.0, 50.0, 0) == Verdict::Accept, || "C7 rejects f = f_best".into());
    c.check(a.accept(50.5, 50.0, 0) == Verdict::Reject, || "C7 accepts f > f_best".into());

    // C6: in each window of k = 6 only the window best replaces the reference
    let mut a = AcceptanceState::new(params(Criterion::C6));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let window: Vec<f64> = (0..6).map(|_| f64::from(rng.gen_range(0..20))).collect();
        let mut held = None;
        let mut replaced = None;
        for (i, &f) in window.iter().enumerate() {
            match a.accept(f, 0.0, 0) {
                Verdict::Hold => held = Some(i),
                Verdict::Accept => replaced = Some(i),
                Verdict::PromoteHeld => replaced = held,
                Verdict::Reject => {}
            }
            if i < 5 {
                c.check(replaced.is_none(), || "C6 replaced the reference mid-window".into());
            }
        }
        let best = window.iter().copied().fold(f64::INFINITY, f64::min);
        let first_best = window.iter().position(|&f| f == best);
        c.check(replaced == first_best, || format!("C6 window {window:?}: replaced by {replaced:?}"));
    }

    // C2 through the state (rate 4/5) and the clamp through the rule
    let mut a = AcceptanceState::new(AcceptanceParams { eta: Some(0.5), gamma: 4, ..params(Criterion::C2) });
    for f in [100.0, 1000.0, 100.0, 100.0, 100.0] {
        a.update_fbar(f);
        a.accept(f, 0.0, 0);
    }
    c.close(REL, a.eta(), 0.25, "C2 eta after rate 0.8");
    c.close(REL, flow_eta(0.7, 0.4, 0.4), 0.7, "C2 fixpoint");
    c.close(REL, flow_eta(0.5, 0.4, 0.8), 0.25, "C2 substitution");
    c.close(REL, flow_eta(0.9, 0.4, 0.1), 1.0, "C2 clamp");

    // C3
    c.close(REL, distance_eta(0.4, 0.5, 25.0, 12.5), 0.4, "C3 fixpoint");
    c.close(REL, distance_eta(0.4, 0.5, 25.0, 25.0), 0.2, "C3 substitution");
    let mut last = 1.0;
    for d in [30.0, 100.0, 1e3, 1e6, 1e12] {
        let e = distance_eta(0.4, 0.5, 25.0, d);
        c.check(e < last, || "C3 not monotone in the distance".into());
        last = e;
    }
    c.check(last < 1e-9, || "C3 eta does not vanish".into());
    let mut a = AcceptanceState::new(AcceptanceParams { eta: Some(0.4), gamma: 2, ..params(Criterion::C3) });
    for d in [20, 30] {
        a.update_fbar(100.0);
        a.accept(100.0, 0.0, d);
    }
    c.close(REL, a.eta(), 0.2, "C3 eta through the state");

    // C4
    let alpha = convergent_alpha(0.01, 100.0, 1000, 1000.0);
    c.close(REL, alpha, 0.01f64.powf(1e-4), "C4 alpha");
    c.check((alpha - 0.999540).abs() < 5e-7, || format!("C4 alpha {alpha} != 0.999540"));
    let mut a = fed(AcceptanceParams { lambda: 1000, ..params(Criterion::C4) }, &[100.0; 1000]);
    for _ in 0..250 {
        a.update_eta_convergent(100.0, 1000.0);
    }
    c.close(REL, a.alpha(), alpha, "C4 alpha through the state");
    c.close(REL, a.eta(), alpha.powi(250), "C4 geometric decay");
    let n = 10_000u64;
    let mut a = AcceptanceState::new(params(Criterion::C4));
    for it in 1..=n {
        a.update_fbar(100.0);
        a.end_iteration(it as f64 / n as f64, 1.0);
    }
    c.check((0.005..=0.02).contains(&a.eta()), || format!("C4 final eta {}", a.eta()));

    // degree mechanisms
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d1 = DegreeState::new(DegreeParams { mechanism: Mechanism::Fixed, ..Default::default() }, 1000);
    c.check(d1.next_omega(Removal::Concentric, &mut rng) == 15, || "D1 default".into());
    let d2 = DegreeState::new(DegreeParams { mechanism: Mechanism::Relative, ..Default::default() }, 1000);
    c.check(d2.next_omega(Removal::Concentric, &mut rng) == 30, || "D2 n=1000".into());
    let d3 = DegreeState::new(DegreeParams { mechanism: Mechanism::Random, ..Default::default() }, 1000);
    let draws: Vec<usize> = (0..10_000).map(|_| d3.next_omega(Removal::Sequential, &mut rng)).collect();
    c.check(draws.iter().all(|w| (1..=30).contains(w)), || "D3 out of [1, 30]".into());

    c.close(REL, rescale_degree(15.0, 25.0, 25.0, 1000), 15.0, "D4 fixpoint");
    c.close(REL, rescale_degree(15.0, 25.0, 12.5, 1000), 30.0, "D4 substitution");
    c.close(REL, rescale_degree(100.0, 25.0, 0.5, 100), 100.0, "D4 cap at n");
    let mut d4 = DegreeState::new(DegreeParams::default(), 1000);
    for i in 0..30 {
        d4.observe_distance(Removal::Concentric, if i % 2 == 0 { 12 } else { 13 });
        d4.observe_distance(Removal::Sequential, 25);
    }
    c.close(REL, d4.omega(Removal::Concentric), 30.0, "D4 through the state");
    c.close(REL, d4.omega(Removal::Sequential), 15.0, "D4 fixpoint through the state");

    // gap
    for (avg, bks, want) in [(27591.00, 27591.0, 0.0), (18878.12, 18839.0, 0.2077), (477886.4, 477277.0, 0.1277)] {
        let g = round_to(compute_gap(avg, bks).unwrap(), 4);
        c.check(g == want, || format!("gap({avg}, {bks}) = {g}, want {want}"));
    }
    c.check(compute_gap(1.0, 0.0).is_err(), || "gap accepts bks = 0".into());

    c.finish();
}

/// Applies `m` to a copy and compares with a full recomputation.
fn audit_delta(c: &mut Report, inst: &Instance, s: &Solution, m: &MoveDelta) {
    let before: Vec<Vec<usize>> = s.routes().to_vec();
    let mut t = s.clone();
    moves::apply(&mut t, inst, m);
    let after = t.routes().to_vec();
    let dc = common::cost(inst, &after) - common::cost(inst, &before);
    let de = common::total_excess(inst, &after) - common::total_excess(inst, &before);
    c.check(dc == m.cost_delta && de == m.excess_delta, || {
        format!(
            "{:?}: delta ({}, {}) vs recomputed ({dc}, {de}) on {before:?}",
            m.plan, m.cost_delta, m.excess_delta
        )
    });
    let stale: Vec<Violation> = match t.validate(inst) {
        Ok(()) => Vec::new(),
        Err(v) => v.into_iter().filter(|x| !matches!(x, Violation::CapacityExcess { .. })).collect(),
    };
    c.check(stale.is_empty(), || format!("{:?} broke the solution: {stale:?}", m.plan));
}

fn random_delta(s: &Solution, inst: &Instance, rng: &mut impl Rng) -> Option<MoveDelta> {
    let v = rng.gen_range(1..=inst.n());
    let u = rng.gen_range(1..=inst.n());
    let r = rng.gen_range(0..s.num_routes());
    match rng.gen_range(0..8) {
        0 => delta_shift(s, inst, v, r, rng),
        1 => moves::delta_swap_star(s, inst, v, u),
        2 => moves::delta_cross(s, inst, v, u),
        3 => s.first_empty_route().and_then(|e| moves::delta_cross_split(s, inst, v, e)),
        4 => moves::delta_shift1_intra(s, inst, v, rng.gen_range(0..s.route(s.route_of(v)).len())),
        5 => moves::delta_swap1_intra(s, inst, v, u),
        6 => {
            let len = s.route(r).len().max(1);
            moves::delta_reverse(s, inst, r, rng.gen_range(0..len), rng.gen_range(0..len))
        }
        _ => moves::delta_two_opt(s, inst, v, if rng.gen_bool(0.2) { DEPOT } else { u }),
    }
}

fn delta_shift(s: &Solution, inst: &Instance, v: usize, r: usize, rng: &mut impl Rng) -> Option<MoveDelta> {
    moves::delta_shift1_inter(s, inst, v, r, rng.gen_range(0..=s.route(r).len()))
}

fn admissible_a1_minimum(s: &Solution, inst: &Instance, nl: &NeighborLists, v: usize, f: Forbidden) -> Option<i64> {
    let mut best = None;
    for r in 0..s.num_routes() {
        for k in 0..=s.route(r).len() {
            let a = s.at(r, k as isize - 1);
            let b = s.at(r, k as isize);
            if !(a == DEPOT || nl.of(v).contains(&a)) || f.blocks(a, b) {
                continue;
            }
            let c = common::dist(inst, a, v) + common::dist(inst, v, b) - common::dist(inst, a, b);
            best = Some(best.map_or(c, |x: i64| x.min(c)));
        }
    }
    best
}

#[test]
fn criterion_2_oracle_equivalence() {
    let mut c = Report::new(2, "local search, insertion and delta oracles", 120);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    // local optimality against exhaustive single-move enumeration
    let mut instances = 0;
    let mut improvable_starts = 0;
    for seed in 0..150u64 {
        let n = rng.gen_range(2..=8);
        let inst = SyntheticSpec::new(n)
            .with_grid(if seed % 3 == 0 { 6 } else { 100 })
            .with_max_demand(rng.gen_range(1..=6))
            .with_route_size(rng.gen_range(1.5..4.0))
            .generate(seed);
        let nl = NeighborLists::build(&inst, n + rng.gen_range(0..3));
        for _ in 0..3 {
            let start = Solution::from_routes(&inst, common::random_routes(&inst, &mut rng));
            improvable_starts += usize::from(common::improving_neighbor(&inst, start.routes()).is_some());
            let out = local_search(start.clone(), &inst, &nl).unwrap();
            let routes = out.routes().to_vec();
            c.check(out.validate(&inst).is_ok() && common::feasible(&inst, &routes), || {
                format!("invalid local search output on seed {seed}")
            });
            c.check(out.cost() <= start.cost(), || "local search made things worse".into());
            if let Some((f, better)) = common::improving_neighbor(&inst, &routes) {
                c.failures.push(format!(
                    "seed {seed}: {routes:?} (cost {}) has improving neighbor {better:?} (cost {f})",
                    out.cost()
                ));
            }
            c.checks += 1;
        }
        instances += 1;
    }
    c.check(instances >= 100, || "fewer than 100 instances".into());
    // the oracle must see improvements where there are some
    c.check(improvable_starts >= 200, || format!("oracle found only {improvable_starts} improvable starts"));

    // cost-based insertion against a scan of every admissible slot
    for seed in 0..400u64 {
        let inst = SyntheticSpec::new(8).with_route_size(3.0).generate(1000 + seed);
        let nl = NeighborLists::build(&inst, rng.gen_range(1..=4));
        let s_ref = local_search(
            Solution::from_routes(&inst, common::random_routes(&inst, &mut rng)),
            &inst,
            &nl,
        )
        .unwrap();
        let mut s = s_ref.clone();
        let mut removed: Vec<usize> = inst.customers().collect();
        removed.shuffle(&mut rng);
        removed.truncate(rng.gen_range(1..=4));
        for &v in &removed {
            s.remove(&inst, v);
        }
        s.ensure_empty_route();
        let v = removed[0];
        let f = Forbidden::of(&s_ref, v);
        let p = insert_position(&s, &inst, &nl, v, Insertion::Cost, f);
        if let Some(best) = admissible_a1_minimum(&s, &inst, &nl, v, f) {
            let a = s.at(p.route, p.index as isize - 1);
            let b = s.at(p.route, p.index as isize);
            let admissible = (a == DEPOT || nl.of(v).contains(&a)) && !f.blocks(a, b);
            c.check(admissible && p.cost == best, || {
                format!("seed {seed}: picked {p:?} (admissible {admissible}), oracle minimum {best}")
            });
        }
    }

    // delta evaluators against full recomputation
    let mut audited = 0;
    while audited < 12_000 {
        let n = rng.gen_range(3..=12);
        let inst = SyntheticSpec::new(n).with_route_size(3.0).generate(rng.gen());
        let k = rng.gen_range(1..=4);
        let mut s = Solution::from_routes(&inst, common::random_unchecked_routes(&inst, k, &mut rng));
        if rng.gen_bool(0.5) {
            s.ensure_empty_route();
        }
        for _ in 0..40 {
            if let Some(m) = random_delta(&s, &inst, &mut rng) {
                audit_delta(&mut c, &inst, &s, &m);
                audited += 1;
                if rng.gen_bool(0.3) {
                    moves::apply(&mut s, &inst, &m);
                    s.ensure_empty_route();
                }
            }
        }
    }
    c.check(audited >= 10_000, || format!("only {audited} moves audited"));
    c.finish();
}

fn routes_of(s: &Solution) -> Vec<Vec<usize>> {
    s.routes().iter().filter(|r| !r.is_empty()).cloned().collect()
}

/// Three solutions `(worse, better, candidate)` with
/// f(better) < f(candidate) < f(worse), `candidate` closer to `close_to`
/// than to the other one, and the two members farther apart than that.
fn find_triple(
    pool: &[Solution],
    candidate_near_worse: bool,
) -> Option<(Solution, Solution, Solution, usize)> {
    for e1 in pool {
        for e2 in pool {
            if e2.cost() >= e1.cost() {
                continue;
            }
            for s in pool {
                if !(e2.cost() < s.cost() && s.cost() < e1.cost()) {
                    continue;
                }
                let (d1, d2, d12) = (
                    common::distance(&routes_of(s), &routes_of(e1)),
                    common::distance(&routes_of(s), &routes_of(e2)),
                    common::distance(&routes_of(e1), &routes_of(e2)),
                );
                let (near, far) = if candidate_near_worse { (d1, d2) } else { (d2, d1) };
                if near < far && near < d12 {
                    return Some((e1.clone(), e2.clone(), s.clone(), near));
                }
            }
        }
    }
    None
}

#[test]
fn criterion_3_elite_conformance() {
    let mut c = Report::new(3, "elite pool update", 60);
    let inst = SyntheticSpec::new(12).with_route_size(4.0).generate(7);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let pool: Vec<Solution> =
        (0..60).map(|_| Solution::from_routes(&inst, common::random_routes(&inst, &mut rng))).collect();

    // empty pool, then a duplicate
    let mut e = EliteSet::new(3, 5);
    c.check(e.try_insert(&pool[0]).inserted(), || "empty pool rejected a solution".into());
    let u = e.try_insert(&pool[0].clone());
    c.check(
        u == EliteUpdate::Inserted { removed: vec![pool[0].cost()] } && e.len() == 1,
        || format!("duplicate: {u:?}, size {}", e.len()),
    );

    // s near the worse member replaces it
    let (e1, e2, s, d_beta) = find_triple(&pool, true).expect("pool has a suitable triple");
    let mut e = EliteSet::new(2, d_beta);
    e.try_insert(&e1);
    e.try_insert(&e2);
    c.check(e.len() == 2, || "setup did not keep both members".into());
    let u = e.try_insert(&s);
    let mut got = e.costs();
    got.sort();
    c.check(
        u == EliteUpdate::Inserted { removed: vec![e1.cost()] } && got == vec![e2.cost(), s.cost()],
        || format!("near-worse scenario: {u:?}, members {got:?}"),
    );

    // s near the better member is rejected
    let (e1, e2, s, d_beta) = find_triple(&pool, false).expect("pool has a suitable triple");
    let mut e = EliteSet::new(2, d_beta);
    e.try_insert(&e1);
    e.try_insert(&e2);
    let u = e.try_insert(&s);
    c.check(u == EliteUpdate::Dominated && e.len() == 2, || format!("near-better scenario: {u:?}"));

    // fuzzed stream of small random walks, against the literal pseudocode
    let (sigma, d_beta) = (10, 8);
    let mut elite = EliteSet::new(sigma, d_beta);
    let mut oracle = common::EliteOracle::new(sigma, d_beta);
    let mut cur = common::random_routes(&inst, &mut rng);
    for step in 0..100_000 {
        if rng.gen_bool(0.01) {
            cur = common::random_routes(&inst, &mut rng);
        } else {
            // relocate a random customer wherever capacity allows
            let v = rng.gen_range(1..=inst.n());
            let from = cur.iter().position(|r| r.contains(&v)).unwrap();
            let to = rng.gen_range(0..=cur.len());
            let mut next = cur.clone();
            next[from].retain(|&x| x != v);
            if to == cur.len() {
                next.push(vec![v]);
            } else {
                let k = rng.gen_range(0..=next[to].len());
                next[to].insert(k, v);
            }
            next.retain(|r| !r.is_empty());
            if common::feasible(&inst, &next) {
                cur = next;
            }
        }
        let s = Solution::from_routes(&inst, cur.clone());
        let got = elite.try_insert(&s).inserted();
        let want = oracle.insert(common::cost(&inst, &cur), &cur);
        c.check(got == want, || format!("step {step}: inserted {got}, oracle {want}"));
        c.check(elite.len() <= sigma, || format!("step {step}: size {}", elite.len()));
        if step % 500 == 0 || got != want {
            let members: Vec<Vec<Vec<usize>>> = elite.members().map(routes_of).collect();
            let expected: Vec<Vec<Vec<usize>>> = oracle.members.iter().map(|m| m.1.clone()).collect();
            c.check(members == expected, || format!("step {step}: member lists differ"));
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    let d = common::distance(&members[i], &members[j]);
                    c.check(d > d_beta, || format!("step {step}: members {i},{j} at distance {d}"));
                }
            }
        }
        if c.failures.len() > 20 {
            break;
        }
    }
    c.check(elite.len() == sigma, || format!("pool never filled ({} members)", elite.len()));
    c.finish();
}

#[test]
fn criterion_4_flowchart_audit() {
    let mut c = Report::new(4, "flowchart audit over 10^4 iterations", 120);
    let inst = SyntheticSpec::new(100).generate(4);
    let cfg = RunConfig::default()
        .with_seed(17)
        .with_trace()
        .with_virtual_clock(0.1)
        .with_time_limit(1e9)
        .with_max_iterations(10_000);
    let threshold = cfg.stall_threshold;
    let nl = NeighborLists::build(&inst, cfg.phi);
    let mut search = Search::new(&inst, &nl, cfg).unwrap();
    let mut best = search.best().cost();
    let mut stall = 0u64;
    let mut activated: Option<u64> = None;
    let mut elite_before = 0usize;
    let (mut eligible, mut phase2) = (0u64, 0u64);
    while !search.finished() {
        let row = search.step();
        if activated.is_none() {
            c.check(row.phase == Phase::One, || format!("iteration {}: Phase 2 before activation", row.iteration));
        } else if elite_before > 0 {
            eligible += 1;
            phase2 += u64::from(row.phase == Phase::Two);
        } else {
            c.check(row.phase == Phase::One, || format!("iteration {}: Phase 2 with an empty pool", row.iteration));
        }
        c.check(row.verdict.is_some() == (row.phase == Phase::One), || {
            format!("iteration {}: acceptance consulted in {:?}", row.iteration, row.phase)
        });
        c.check(row.best <= best, || format!("iteration {}: incumbent went up", row.iteration));
        stall = if row.best < best { 0 } else { stall + 1 };
        best = row.best;
        if activated.is_none() && stall > threshold {
            activated = Some(row.iteration);
        }
        elite_before = row.elite_size;
    }
    c.check(search.phase2_activation_iteration() == activated, || {
        format!("activation at {:?}, recomputed {activated:?}", search.phase2_activation_iteration())
    });
    let freq = phase2 as f64 / eligible.max(1) as f64;
    c.check(eligible >= 2500, || format!("only {eligible} iterations after activation"));
    c.check((0.47..=0.53).contains(&freq), || format!("Phase-2 frequency {freq:.4} over {eligible}"));
    say!("    activation at {activated:?}; Phase 2 in {phase2} of {eligible} eligible iterations ({freq:.4})");
    c.finish();
}

fn instance_dir() -> PathBuf {
    std::env::var_os("AILS_INSTANCE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/instances"))
}

const SMALL_SET: [(&str, f64); 3] = [("X-n101-k25", 0.20), ("X-n120-k6", 0.30), ("X-n148-k46", 0.30)];

#[test]
fn criterion_5_status() {
    let dir = instance_dir();
    let missing: Vec<&str> = SMALL_SET
        .iter()
        .map(|(name, _)| *name)
        .chain(["Leuven1"])
        .filter(|name| !dir.join(format!("{name}.vrp")).exists())
        .collect();
    if missing.is_empty() {
        say!(
            "INFO criterion 5: instances present in {}; run `cargo test --release --test acceptance -- --ignored` (about 1 h)",
            dir.display()
        );
    } else {
        say!(
            "FAIL criterion 5: not run, instance files missing from {}: {} (set AILS_INSTANCE_DIR and run the ignored test)",
            dir.display(),
            missing.join(", ")
        );
    }
}

#[test]
#[ignore = "needs CVRPLIB files and about an hour"]
fn criterion_5_gap_reproduction() {
    let mut c = Report::new(5, "desk-scale gap reproduction", 2 * 3600);
    let dir = instance_dir();
    let bks = BksRegistry::builtin();
    for (name, max_gap) in SMALL_SET {
        let inst = read_instance(dir.join(format!("{name}.vrp"))).unwrap();
        let mut spec = ExperimentSpec::new(vec![InstanceSource::Loaded(inst)], RunConfig::default().with_time_limit(120.0));
        spec.runs = 10;
        let result = run_experiment(&spec).unwrap().remove(0);
        let row = result.gap_row(&bks).unwrap();
        say!("    {name}: avg {} best {} gap {:?}", row.avg, row.best, row.gap);
        c.check(result.invalid_runs().is_empty(), || format!("{name}: invalid solutions"));
        c.check(row.gap.is_some_and(|g| g <= max_gap), || format!("{name}: mean gap {:?} > {max_gap}", row.gap));
        if name == "X-n101-k25" {
            c.check(row.best == 27591, || format!("{name}: best of 10 is {}", row.best));
        }
    }
    let inst = read_instance(dir.join("Leuven1.vrp")).unwrap();
    let report = run(&inst, RunConfig::default().with_time_limit(600.0)).unwrap();
    let best = engine::best_solution(&inst, &report);
    let gap = compute_gap(report.best_cost as f64, 192848.0).unwrap();
    say!("    Leuven1: best {} gap {gap:.4}", report.best_cost);
    c.check(best.validate(&inst).is_ok() && best.is_feasible(), || "Leuven1: invalid solution".into());
    c.check(gap <= 5.0, || format!("Leuven1: gap {gap:.4} > 5"));
    c.finish();
}

#[test]
fn criterion_6_determinism() {
    let mut c = Report::new(6, "determinism under a fixed seed", 300);
    let instances = [
        SyntheticSpec::new(60).generate(61),
        SyntheticSpec::new(120).with_route_size(12.0).generate(62),
    ];
    for inst in &instances {
        let cfg = RunConfig::default()
            .with_seed(5)
            .with_trace()
            .with_virtual_clock(0.01)
            .with_time_limit(20.0)
            .with_max_iterations(4000);
        let a = run(inst, cfg.clone()).unwrap();
        let b = run(inst, cfg).unwrap();
        c.check(a.trace_csv() == b.trace_csv(), || format!("{}: traces differ", inst.name()));
        c.check(a.to_json() == b.to_json(), || format!("{}: reports differ", inst.name()));
        c.check(!a.trace.is_empty(), || format!("{}: empty trace", inst.name()));
    }
    c.finish();
}
