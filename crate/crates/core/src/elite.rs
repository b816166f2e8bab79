//! Bounded elite pool with a minimum pairwise edge distance.

use std::fmt::Write as _;

use rand::Rng;

use crate::solution::{Adjacency, Solution};

#[derive(Debug, Clone)]
struct Member {
    solution: Solution,
    adjacency: Adjacency,
}

#[derive(Debug, Clone)]
pub struct EliteSet {
    capacity: usize,
    d_beta: usize,
    members: Vec<Member>,
}

/// What `try_insert` did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EliteUpdate {
    /// A member at distance `<= d_beta` is strictly cheaper.
    Dominated,
    /// The pool is full and the candidate is worse than its worst member.
    TooExpensive,
    /// Inserted; costs of the members that were dropped.
    Inserted { removed: Vec<i64> },
}

impl EliteUpdate {
    pub fn inserted(&self) -> bool {
        matches!(self, EliteUpdate::Inserted { .. })
    }
}

impl EliteSet {
    pub fn new(capacity: usize, d_beta: usize) -> Self {
        assert!(capacity >= 1);
        Self {
            capacity,
            d_beta,
            members: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn d_beta(&self) -> usize {
        self.d_beta
    }

    pub fn members(&self) -> impl Iterator<Item = &Solution> {
        self.members.iter().map(|m| &m.solution)
    }

    pub fn costs(&self) -> Vec<i64> {
        self.members.iter().map(|m| m.solution.cost()).collect()
    }

    /// Index of the most expensive member; the lowest index on ties.
    fn worst(&self) -> Option<usize> {
        let mut worst: Option<usize> = None;
        for (i, m) in self.members.iter().enumerate() {
            if worst.is_none_or(|w| m.solution.cost() > self.members[w].solution.cost()) {
                worst = Some(i);
            }
        }
        worst
    }

    /// Offers `s` to the pool. Members within `d_beta` of `s` that are not
    /// cheaper are replaced by it; a strictly cheaper one blocks it. Without
    /// such close members a full pool drops its worst member, provided `s`
    /// is no worse.
    pub fn try_insert(&mut self, s: &Solution) -> EliteUpdate {
        let adjacency = s.adjacency();
        let f = s.cost();
        let mut close_worse = Vec::new();
        for (i, m) in self.members.iter().enumerate() {
            if adjacency.distance(&m.adjacency) <= self.d_beta {
                if m.solution.cost() < f {
                    return EliteUpdate::Dominated;
                }
                close_worse.push(i);
            }
        }
        if self.members.len() >= self.capacity && close_worse.is_empty() {
            let w = self.worst().expect("pool is full");
            if f > self.members[w].solution.cost() {
                return EliteUpdate::TooExpensive;
            }
            close_worse.push(w);
        }
        let mut removed = Vec::with_capacity(close_worse.len());
        for &i in close_worse.iter().rev() {
            removed.push(self.members.remove(i).solution.cost());
        }
        removed.reverse();
        self.members.push(Member {
            solution: s.clone(),
            adjacency,
        });
        EliteUpdate::Inserted { removed }
    }

    /// Copy of a uniformly chosen member.
    pub fn sample(&self, rng: &mut impl Rng) -> Option<Solution> {
        if self.members.is_empty() {
            return None;
        }
        Some(self.members[rng.gen_range(0..self.members.len())].solution.clone())
    }

    pub fn best(&self) -> Option<&Solution> {
        self.members.iter().map(|m| &m.solution).min_by_key(|s| s.cost())
    }

    /// Smallest pairwise distance, or `None` with fewer than two members.
    pub fn min_separation(&self) -> Option<usize> {
        let mut min = None;
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                let d = a.adjacency.distance(&b.adjacency);
                min = Some(min.map_or(d, |m: usize| m.min(d)));
            }
        }
        min
    }

    /// CSV with one row per member: its cost, then its distance to every
    /// member.
    pub fn dump_csv(&self) -> String {
        let mut out = String::from("member,cost");
        for j in 0..self.members.len() {
            let _ = write!(out, ",d{j}");
        }
        out.push('\n');
        for (i, a) in self.members.iter().enumerate() {
            let _ = write!(out, "{i},{}", a.solution.cost());
            for b in &self.members {
                let _ = write!(out, ",{}", a.adjacency.distance(&b.adjacency));
            }
            out.push('\n');
        }
        out
    }
}
