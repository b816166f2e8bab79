//! The two-phase search loop.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adaptive::{AcceptanceParams, AcceptanceState, DegreeParams, DegreeState, Verdict};
use crate::construction::construct_initial;
use crate::elite::EliteSet;
use crate::error::{ConfigError, Error};
use crate::instance::{Instance, NeighborLists};
use crate::moves::LocalSearch;
use crate::perturbation::{perturb, Insertion, Removal};
use crate::solution::{solution_distance, Solution};

/// How elapsed time is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Clock {
    Wall,
    /// Every iteration counts as a fixed amount of time. Runs become
    /// independent of machine speed and exactly reproducible.
    Virtual { seconds_per_iteration: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub acceptance: AcceptanceParams,
    pub degree: DegreeParams,
    /// Window length shared by the averages, eta updates and D4.
    pub gamma: usize,
    /// Target distance of D4 and separation of the elite pool.
    pub d_beta: usize,
    pub sigma: usize,
    pub phi: usize,
    /// `None` means 10 seconds per customer.
    pub time_limit: Option<f64>,
    pub max_iterations: Option<u64>,
    pub stall_threshold: u64,
    pub phase2_probability: f64,
    pub seed: u64,
    pub clock: Clock,
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            acceptance: AcceptanceParams::default(),
            degree: DegreeParams::default(),
            gamma: 30,
            d_beta: 25,
            sigma: 60,
            phi: 40,
            time_limit: None,
            max_iterations: None,
            stall_threshold: 2000,
            phase2_probability: 0.5,
            seed: 0,
            clock: Clock::Wall,
            trace: false,
        }
    }
}

impl RunConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }

    pub fn with_max_iterations(mut self, iterations: u64) -> Self {
        self.max_iterations = Some(iterations);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    /// Virtual clock with the given cost per iteration.
    pub fn with_virtual_clock(mut self, seconds_per_iteration: f64) -> Self {
        self.clock = Clock::Virtual { seconds_per_iteration };
        self
    }

    pub fn time_limit_for(&self, inst: &Instance) -> f64 {
        self.time_limit.unwrap_or(10.0 * inst.n() as f64)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.acceptance.validate()?;
        self.degree.validate()?;
        for (name, v) in [("gamma", self.gamma), ("dbeta", self.d_beta), ("sigma", self.sigma), ("phi", self.phi)] {
            if v == 0 {
                return Err(ConfigError::OutOfRange { name, value: 0.0 });
            }
        }
        if !(0.0..=1.0).contains(&self.phase2_probability) {
            return Err(ConfigError::OutOfRange {
                name: "phase2-probability",
                value: self.phase2_probability,
            });
        }
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                return Err(ConfigError::OutOfRange { name: "time-limit", value: t });
            }
        }
        if let Clock::Virtual { seconds_per_iteration } = self.clock {
            if !(seconds_per_iteration > 0.0) {
                return Err(ConfigError::OutOfRange {
                    name: "virtual-clock",
                    value: seconds_per_iteration,
                });
            }
        }
        Ok(())
    }

    fn acceptance_params(&self) -> AcceptanceParams {
        AcceptanceParams {
            gamma: self.gamma,
            d_beta: self.d_beta as f64,
            ..self.acceptance.clone()
        }
    }

    fn degree_params(&self) -> DegreeParams {
        DegreeParams {
            gamma: self.gamma,
            d_beta: self.d_beta as f64,
            ..self.degree.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    One,
    Two,
}

impl Phase {
    pub fn number(self) -> u8 {
        match self {
            Phase::One => 1,
            Phase::Two => 2,
        }
    }
}

/// One line of the per-iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub phase: Phase,
    pub heuristic: Removal,
    pub insertion: Insertion,
    pub omega: usize,
    pub cost: i64,
    pub best: i64,
    /// `None` on Phase-2 iterations, where acceptance is not consulted.
    pub verdict: Option<Verdict>,
    pub elite_size: usize,
    pub distance: usize,
}

pub const TRACE_HEADER: &str = "iteration,phase,heuristic,insertion,omega,cost,best,verdict,elite_size,distance";

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.iteration,
            r.phase.number(),
            r.heuristic,
            r.insertion,
            r.omega,
            r.cost,
            r.best,
            r.verdict.map_or("-", |v| v.label()),
            r.elite_size,
            r.distance
        );
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub seed: u64,
    pub best_cost: i64,
    /// Routes of the best solution (customers only).
    pub best_routes: Vec<Vec<usize>>,
    pub time_to_best_seconds: f64,
    pub elapsed_seconds: f64,
    pub iterations: u64,
    pub phase2_activation_iteration: Option<u64>,
    pub final_omega: [f64; 2],
    pub final_eta: f64,
    pub elite_size: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TraceRow>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn trace_csv(&self) -> String {
        trace_csv(&self.trace)
    }
}

/// Search state; [`Search::step`] runs one iteration of the loop.
pub struct Search<'a> {
    inst: &'a Instance,
    nl: &'a NeighborLists,
    cfg: RunConfig,
    time_limit: f64,
    rng: ChaCha8Rng,
    ls: LocalSearch<'a>,
    reference: Solution,
    held: Option<Solution>,
    best: Solution,
    elite: EliteSet,
    degree: DegreeState,
    acceptance: AcceptanceState,
    iteration: u64,
    stall: u64,
    phase2_since: Option<u64>,
    time_to_best: f64,
    started: Instant,
    trace: Vec<TraceRow>,
}

impl<'a> Search<'a> {
    /// Builds the initial solution and its local optimum.
    pub fn new(inst: &'a Instance, nl: &'a NeighborLists, cfg: RunConfig) -> Result<Self, Error> {
        cfg.validate()?;
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut ls = LocalSearch::new(inst, nl);
        let mut s = construct_initial(inst, nl, &mut rng);
        ls.improve(&mut s)?;
        Ok(Self {
            inst,
            nl,
            time_limit: cfg.time_limit_for(inst),
            elite: EliteSet::new(cfg.sigma, cfg.d_beta),
            degree: DegreeState::new(cfg.degree_params(), inst.n()),
            acceptance: AcceptanceState::new(cfg.acceptance_params()),
            cfg,
            rng,
            ls,
            best: s.clone(),
            reference: s,
            held: None,
            iteration: 0,
            stall: 0,
            phase2_since: None,
            time_to_best: 0.0,
            started,
            trace: Vec::new(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn best(&self) -> &Solution {
        &self.best
    }

    pub fn reference(&self) -> &Solution {
        &self.reference
    }

    pub fn elite(&self) -> &EliteSet {
        &self.elite
    }

    pub fn degree(&self) -> &DegreeState {
        &self.degree
    }

    pub fn acceptance(&self) -> &AcceptanceState {
        &self.acceptance
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn stall(&self) -> u64 {
        self.stall
    }

    pub fn phase2_active(&self) -> bool {
        self.phase2_since.is_some()
    }

    pub fn phase2_activation_iteration(&self) -> Option<u64> {
        self.phase2_since
    }

    pub fn time_limit(&self) -> f64 {
        self.time_limit
    }

    pub fn elapsed(&self) -> f64 {
        match self.cfg.clock {
            Clock::Wall => self.started.elapsed().as_secs_f64(),
            Clock::Virtual { seconds_per_iteration } => self.iteration as f64 * seconds_per_iteration,
        }
    }

    pub fn finished(&self) -> bool {
        self.cfg.max_iterations.is_some_and(|m| self.iteration >= m) || self.elapsed() >= self.time_limit
    }

    /// Fraction of the budget used, by time or by iterations.
    fn progress(&self) -> f64 {
        let by_time = self.elapsed() / self.time_limit;
        let by_iterations = self.cfg.max_iterations.map_or(0.0, |m| self.iteration as f64 / m as f64);
        by_time.max(by_iterations)
    }

    /// One iteration: perturb a reference, descend, then update incumbent,
    /// degree, phase, elite pool and acceptance state.
    pub fn step(&mut self) -> TraceRow {
        self.iteration += 1;
        let phase = if self.phase2_active() && !self.elite.is_empty() && self.rng.gen_bool(self.cfg.phase2_probability) {
            Phase::Two
        } else {
            Phase::One
        };
        let s_ref = match phase {
            Phase::One => self.reference.clone(),
            Phase::Two => self.elite.sample(&mut self.rng).expect("pool is not empty"),
        };
        let heuristic = Removal::ALL[self.rng.gen_range(0..2)];
        let omega = self.degree.next_omega(heuristic, &mut self.rng);
        let p = perturb(&s_ref, self.inst, self.nl, heuristic, omega, &mut self.rng);
        let mut s = p.solution;
        self.ls.improve_from(&mut s, &s_ref).expect("perturbation output is feasible");
        let f = s.cost();

        if f <= self.best.cost() {
            if f < self.best.cost() {
                self.stall = 0;
                self.time_to_best = self.elapsed();
            } else {
                self.stall += 1;
            }
            self.best = s.clone();
        } else {
            self.stall += 1;
        }
        let distance = solution_distance(&s, &s_ref);
        self.degree.observe_distance(heuristic, distance);
        if self.phase2_since.is_none() && self.stall > self.cfg.stall_threshold {
            self.phase2_since = Some(self.iteration);
        }
        if self.phase2_active() {
            self.elite.try_insert(&s);
        }
        self.acceptance.update_fbar(f as f64);
        let verdict = match phase {
            Phase::One => {
                let v = self.acceptance.accept(f as f64, self.best.cost() as f64, distance);
                match v {
                    Verdict::Accept => {
                        self.reference = s;
                        self.held = None;
                    }
                    Verdict::Hold => self.held = Some(s),
                    Verdict::PromoteHeld => {
                        if let Some(h) = self.held.take() {
                            self.reference = h;
                        }
                    }
                    Verdict::Reject => {}
                }
                Some(v)
            }
            Phase::Two => None,
        };
        let progress = self.progress();
        self.acceptance.end_iteration(progress, 1.0);

        let row = TraceRow {
            iteration: self.iteration,
            phase,
            heuristic,
            insertion: p.insertion,
            omega,
            cost: f,
            best: self.best.cost(),
            verdict,
            elite_size: self.elite.len(),
            distance,
        };
        if self.cfg.trace {
            self.trace.push(row.clone());
        }
        row
    }

    pub fn run_to_end(&mut self) {
        while !self.finished() {
            self.step();
        }
    }

    pub fn into_report(self) -> RunReport {
        RunReport {
            instance: self.inst.name().to_string(),
            seed: self.cfg.seed,
            best_cost: self.best.cost(),
            best_routes: self.best.routes().iter().filter(|r| !r.is_empty()).cloned().collect(),
            time_to_best_seconds: self.time_to_best,
            elapsed_seconds: self.elapsed(),
            iterations: self.iteration,
            phase2_activation_iteration: self.phase2_since,
            final_omega: [self.degree.omega(Removal::Concentric), self.degree.omega(Removal::Sequential)],
            final_eta: self.acceptance.eta(),
            elite_size: self.elite.len(),
            trace: self.trace,
        }
    }
}

/// Runs the search with neighbor lists built for `cfg.phi`.
pub fn run(inst: &Instance, cfg: RunConfig) -> Result<RunReport, Error> {
    let nl = NeighborLists::build(inst, cfg.phi);
    run_with(inst, &nl, cfg)
}

pub fn run_with(inst: &Instance, nl: &NeighborLists, cfg: RunConfig) -> Result<RunReport, Error> {
    let mut search = Search::new(inst, nl, cfg)?;
    search.run_to_end();
    Ok(search.into_report())
}

/// Rebuilds the best solution of a report.
pub fn best_solution(inst: &Instance, report: &RunReport) -> Solution {
    Solution::from_routes(inst, report.best_routes.clone())
}
