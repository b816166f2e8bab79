mod common;

use ails_cvrp::elite::{EliteSet, EliteUpdate};
use ails_cvrp::synthetic::SyntheticSpec;
use ails_cvrp::Solution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pool(count: usize, seed: u64) -> (ails_cvrp::Instance, Vec<Solution>) {
    let inst = SyntheticSpec::new(20).with_route_size(4.0).generate(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sols = (0..count)
        .map(|_| Solution::from_routes(&inst, common::random_routes(&inst, &mut rng)))
        .collect();
    (inst, sols)
}

#[test]
fn empty_pool_has_nothing_to_offer() {
    let e = EliteSet::new(4, 5);
    assert!(e.is_empty());
    assert!(e.best().is_none());
    assert!(e.sample(&mut ChaCha8Rng::seed_from_u64(0)).is_none());
    assert!(e.min_separation().is_none());
}

#[test]
fn singleton_pool_returns_its_member() {
    let (_, sols) = pool(1, 1);
    let mut e = EliteSet::new(4, 5);
    e.try_insert(&sols[0]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert_eq!(e.sample(&mut rng).unwrap().routes(), sols[0].routes());
    assert_eq!(e.best().unwrap().routes(), sols[0].routes());
}

#[test]
fn sampling_is_uniform() {
    let (_, sols) = pool(4, 2);
    // random 20-customer solutions are far apart; d_beta 0 keeps all four
    let mut e = EliteSet::new(4, 0);
    for s in &sols {
        assert!(e.try_insert(s).inserted());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut counts = [0u32; 4];
    for _ in 0..10_000 {
        let s = e.sample(&mut rng).unwrap();
        let i = sols.iter().position(|x| x.routes() == s.routes()).unwrap();
        counts[i] += 1;
    }
    // 3 sigma of Binomial(10^4, 1/4) is about 130
    for c in counts {
        assert!((2370..=2630).contains(&c), "{counts:?}");
    }
}

#[test]
fn samples_are_independent_copies() {
    let (inst, sols) = pool(3, 3);
    let mut e = EliteSet::new(3, 0);
    sols.iter().for_each(|s| {
        e.try_insert(s);
    });
    let before: Vec<Vec<Vec<usize>>> = e.members().map(|s| s.routes().to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut copy = e.sample(&mut rng).unwrap();
    copy.remove(&inst, 1);
    let after: Vec<Vec<Vec<usize>>> = e.members().map(|s| s.routes().to_vec()).collect();
    assert_eq!(before, after);
}

#[test]
fn best_is_the_cheapest_member() {
    let (_, sols) = pool(30, 4);
    let mut e = EliteSet::new(30, 0);
    sols.iter().for_each(|s| {
        e.try_insert(s);
    });
    let scan = e.costs().into_iter().min().unwrap();
    assert_eq!(e.best().unwrap().cost(), scan);
}

#[test]
fn full_pool_drops_its_worst_member() {
    let (_, mut sols) = pool(6, 5);
    sols.sort_by_key(|s| s.cost());
    let mut e = EliteSet::new(3, 0);
    // the three most expensive fill the pool
    for s in &sols[3..] {
        e.try_insert(s);
    }
    assert_eq!(e.try_insert(&sols[0]), EliteUpdate::Inserted { removed: vec![sols[5].cost()] });
    let mut e = EliteSet::new(1, 0);
    e.try_insert(&sols[0]);
    assert!(sols[5].cost() > sols[0].cost());
    assert_eq!(e.try_insert(&sols[5]), EliteUpdate::TooExpensive);
}

#[test]
fn dump_lists_costs_and_distances() {
    let (_, sols) = pool(2, 6);
    let mut e = EliteSet::new(2, 0);
    e.try_insert(&sols[0]);
    e.try_insert(&sols[1]);
    let csv = e.dump_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "member,cost,d0,d1");
    let d = common::distance(sols[0].routes(), sols[1].routes());
    assert_eq!(lines[1], format!("0,{},0,{d}", sols[0].cost()));
    assert_eq!(e.min_separation(), Some(d));
}
