//! Perturbation-degree mechanisms and acceptance criteria.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::perturbation::Removal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mechanism {
    /// D1: a constant omega.
    Fixed,
    /// D2: omega proportional to the number of customers.
    Relative,
    /// D3: omega drawn uniformly from a range every iteration.
    Random,
    /// D4: omega steered so that d(s, s^r) tracks a target distance.
    Distance,
}

impl Mechanism {
    pub const ALL: [Mechanism; 4] = [Mechanism::Fixed, Mechanism::Relative, Mechanism::Random, Mechanism::Distance];

    pub fn id(self) -> &'static str {
        match self {
            Mechanism::Fixed => "d1",
            Mechanism::Relative => "d2",
            Mechanism::Random => "d3",
            Mechanism::Distance => "d4",
        }
    }
}

impl FromStr for Mechanism {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "d1" | "fixed" => Ok(Mechanism::Fixed),
            "d2" | "relative" => Ok(Mechanism::Relative),
            "d3" | "random" => Ok(Mechanism::Random),
            "d4" | "distance" => Ok(Mechanism::Distance),
            _ => Err(ConfigError::UnknownDegree(s.to_string())),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeParams {
    pub mechanism: Mechanism,
    /// D1 value; also the starting value of both D4 degrees.
    pub omega: usize,
    pub nu: f64,
    pub omega_low: usize,
    pub omega_high: usize,
    pub d_beta: f64,
    pub gamma: usize,
}

impl Default for DegreeParams {
    fn default() -> Self {
        Self {
            mechanism: Mechanism::Distance,
            omega: 15,
            nu: 0.03,
            omega_low: 1,
            omega_high: 30,
            d_beta: 25.0,
            gamma: 30,
        }
    }
}

impl DegreeParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.omega == 0 {
            return Err(ConfigError::OutOfRange { name: "omega", value: 0.0 });
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(ConfigError::OutOfRange { name: "nu", value: self.nu });
        }
        if self.omega_low == 0 || self.omega_low > self.omega_high {
            return Err(ConfigError::Invalid(format!(
                "omega range [{}, {}] is empty or starts at 0",
                self.omega_low, self.omega_high
            )));
        }
        if !(self.d_beta > 0.0) {
            return Err(ConfigError::OutOfRange { name: "dbeta", value: self.d_beta });
        }
        if self.gamma == 0 {
            return Err(ConfigError::OutOfRange { name: "gamma", value: 0.0 });
        }
        Ok(())
    }
}

/// Per-removal-heuristic perturbation degree.
#[derive(Debug, Clone)]
pub struct DegreeState {
    params: DegreeParams,
    n: usize,
    omega: [f64; 2],
    sum: [f64; 2],
    count: [usize; 2],
}

impl DegreeState {
    pub fn new(params: DegreeParams, n: usize) -> Self {
        let start = params.omega.clamp(1, n.max(1)) as f64;
        Self {
            params,
            n: n.max(1),
            omega: [start; 2],
            sum: [0.0; 2],
            count: [0; 2],
        }
    }

    pub fn params(&self) -> &DegreeParams {
        &self.params
    }

    /// Current real-valued degree of heuristic `k` (meaningful for D4).
    pub fn omega(&self, k: Removal) -> f64 {
        self.omega[k.index()]
    }

    pub fn set_omega(&mut self, k: Removal, omega: f64) {
        self.omega[k.index()] = omega.clamp(1.0, self.n as f64);
    }

    /// Observations accumulated for `k` since its last adjustment.
    pub fn pending(&self, k: Removal) -> usize {
        self.count[k.index()]
    }

    pub fn next_omega(&self, k: Removal, rng: &mut impl Rng) -> usize {
        let n = self.n;
        let p = &self.params;
        match p.mechanism {
            Mechanism::Fixed => p.omega.clamp(1, n),
            Mechanism::Relative => ((p.nu * n as f64).round() as usize).clamp(1, n),
            Mechanism::Random => rng.gen_range(p.omega_low..=p.omega_high).clamp(1, n),
            Mechanism::Distance => (self.omega[k.index()].round() as usize).clamp(1, n),
        }
    }

    /// Records d(s, s^r) of an iteration that used heuristic `k`. Every
    /// `gamma` observations the degree of `k` is rescaled by d_beta / mean.
    pub fn observe_distance(&mut self, k: Removal, d: usize) {
        if self.params.mechanism != Mechanism::Distance {
            return;
        }
        let i = k.index();
        self.sum[i] += d as f64;
        self.count[i] += 1;
        if self.count[i] < self.params.gamma {
            return;
        }
        let mean = self.sum[i] / self.count[i] as f64;
        self.omega[i] = rescale_degree(self.omega[i], self.params.d_beta, mean, self.n);
        self.sum[i] = 0.0;
        self.count[i] = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// Threshold between the recent best and the average, fixed eta.
    C1,
    /// Eta steered by the acceptance rate.
    C2,
    /// Eta steered by the distance of accepted solutions.
    C3,
    /// Eta decays geometrically towards the end of the run.
    C4,
    /// Within a fraction theta of the incumbent.
    C5,
    /// Best of every k iterations.
    C6,
    /// Not worse than the incumbent.
    C7,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::C1,
        Criterion::C2,
        Criterion::C3,
        Criterion::C4,
        Criterion::C5,
        Criterion::C6,
        Criterion::C7,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Criterion::C1 => "c1",
            Criterion::C2 => "c2",
            Criterion::C3 => "c3",
            Criterion::C4 => "c4",
            Criterion::C5 => "c5",
            Criterion::C6 => "c6",
            Criterion::C7 => "c7",
        }
    }

    fn uses_eta(self) -> bool {
        matches!(self, Criterion::C1 | Criterion::C2 | Criterion::C3 | Criterion::C4)
    }
}

impl FromStr for Criterion {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| ConfigError::UnknownAcceptance(s.to_string()))
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceParams {
    pub criterion: Criterion,
    /// Starting eta; `None` picks 1 for C4 and 0.4 otherwise.
    pub eta: Option<f64>,
    pub kappa: f64,
    pub mu: f64,
    pub theta: f64,
    pub k: usize,
    /// Period of the C4 alpha update, in iterations.
    pub lambda: usize,
    pub epsilon: f64,
    pub gamma: usize,
    pub d_beta: f64,
}

impl Default for AcceptanceParams {
    fn default() -> Self {
        Self {
            criterion: Criterion::C4,
            eta: None,
            kappa: 0.4,
            mu: 0.5,
            theta: 0.005,
            k: 6,
            lambda: 30,
            epsilon: 0.01,
            gamma: 30,
            d_beta: 25.0,
        }
    }
}

impl AcceptanceParams {
    pub fn initial_eta(&self) -> f64 {
        self.eta.unwrap_or(if self.criterion == Criterion::C4 { 1.0 } else { 0.4 })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange { name, value: v })
            }
        };
        unit("eta", self.initial_eta())?;
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(ConfigError::OutOfRange { name: "kappa", value: self.kappa });
        }
        if !(self.mu > 0.0) {
            return Err(ConfigError::OutOfRange { name: "mu", value: self.mu });
        }
        if !(self.theta >= 0.0) {
            return Err(ConfigError::OutOfRange { name: "theta", value: self.theta });
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ConfigError::OutOfRange { name: "epsilon", value: self.epsilon });
        }
        for (name, v) in [("k-best", self.k), ("lambda", self.lambda), ("gamma", self.gamma)] {
            if v == 0 {
                return Err(ConfigError::OutOfRange { name, value: 0.0 });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Reject,
    Accept,
    /// C6: the solution is the best of the open window; keep it aside.
    Hold,
    /// C6: the window closed and the solution held earlier is accepted.
    PromoteHeld,
}

impl Verdict {
    /// Whether the reference solution changes this iteration.
    pub fn replaces_reference(self) -> bool {
        matches!(self, Verdict::Accept | Verdict::PromoteHeld)
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Reject => "reject",
            Verdict::Accept => "accept",
            Verdict::Hold => "hold",
            Verdict::PromoteHeld => "promote",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AcceptanceState {
    params: AcceptanceParams,
    eta: f64,
    f_bar: f64,
    recent: VecDeque<f64>,
    it: u64,
    alpha: f64,
    evaluated: u64,
    accepted: u64,
    accepted_distance: f64,
    window_len: usize,
    window_best: f64,
}

impl AcceptanceState {
    pub fn new(params: AcceptanceParams) -> Self {
        let eta = params.initial_eta();
        Self {
            params,
            eta,
            f_bar: 0.0,
            recent: VecDeque::new(),
            it: 0,
            alpha: 1.0,
            evaluated: 0,
            accepted: 0,
            accepted_distance: 0.0,
            window_len: 0,
            window_best: f64::INFINITY,
        }
    }

    pub fn params(&self) -> &AcceptanceParams {
        &self.params
    }

    pub fn criterion(&self) -> Criterion {
        self.params.criterion
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn set_eta(&mut self, eta: f64) {
        self.eta = eta.clamp(0.0, 1.0);
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn f_bar(&self) -> f64 {
        self.f_bar
    }

    /// Best cost among the last `gamma` observations.
    pub fn f_min(&self) -> f64 {
        self.recent.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn iterations(&self) -> u64 {
        self.it
    }

    /// Feeds the cost of this iteration's local optimum into the averages.
    pub fn update_fbar(&mut self, f: f64) {
        self.it += 1;
        let gamma = self.params.gamma as f64;
        if self.it as f64 <= gamma {
            self.f_bar += (f - self.f_bar) / self.it as f64;
        } else {
            self.f_bar = self.f_bar * (1.0 - 1.0 / gamma) + f / gamma;
        }
        self.recent.push_back(f);
        if self.recent.len() > self.params.gamma {
            self.recent.pop_front();
        }
    }

    /// Acceptance threshold for the current state, where it is one.
    pub fn threshold(&self, f_best: f64) -> Option<f64> {
        match self.params.criterion {
            c if c.uses_eta() => {
                let lo = self.f_min();
                Some(lo + self.eta * (self.f_bar - lo))
            }
            Criterion::C5 => Some(f_best * (1.0 + self.params.theta)),
            Criterion::C7 => Some(f_best),
            _ => None,
        }
    }

    /// Decides whether `f` becomes the new reference. `d_to_ref` is
    /// d(s, s^r) for this iteration (used by C3).
    pub fn accept(&mut self, f: f64, f_best: f64, d_to_ref: usize) -> Verdict {
        self.evaluated += 1;
        let verdict = if self.params.criterion == Criterion::C6 {
            self.window_step(f)
        } else if f <= self.threshold(f_best).expect("threshold criterion") {
            Verdict::Accept
        } else {
            Verdict::Reject
        };
        if verdict == Verdict::Accept {
            self.accepted += 1;
            self.accepted_distance += d_to_ref as f64;
            if self.accepted as usize >= self.params.gamma {
                match self.params.criterion {
                    Criterion::C2 => self.update_eta_flow(),
                    Criterion::C3 => self.update_eta_distance(self.params.d_beta),
                    _ => self.reset_counters(),
                }
            }
        }
        verdict
    }

    fn window_step(&mut self, f: f64) -> Verdict {
        self.window_len += 1;
        let improves = f < self.window_best;
        if improves {
            self.window_best = f;
        }
        if self.window_len < self.params.k {
            return if improves { Verdict::Hold } else { Verdict::Reject };
        }
        self.window_len = 0;
        self.window_best = f64::INFINITY;
        if improves {
            Verdict::Accept
        } else {
            Verdict::PromoteHeld
        }
    }

    fn reset_counters(&mut self) {
        self.accepted = 0;
        self.evaluated = 0;
        self.accepted_distance = 0.0;
    }

    /// C2: eta <- kappa * eta / kappa_r with kappa_r the acceptance rate
    /// since the last update.
    pub fn update_eta_flow(&mut self) {
        if self.evaluated > 0 && self.accepted > 0 {
            let rate = self.accepted as f64 / self.evaluated as f64;
            self.eta = flow_eta(self.eta, self.params.kappa, rate);
        }
        self.reset_counters();
    }

    /// C3: eta <- mu * d_beta * eta / mean distance of accepted solutions.
    pub fn update_eta_distance(&mut self, d_beta: f64) {
        if self.accepted > 0 {
            let mean = self.accepted_distance / self.accepted as f64;
            if mean > 0.0 {
                self.eta = distance_eta(self.eta, self.params.mu, d_beta, mean);
            }
        }
        self.reset_counters();
    }

    /// C4: every `lambda` iterations alpha <- epsilon^(t_a / (it * t_f));
    /// eta <- eta * alpha on every call.
    pub fn update_eta_convergent(&mut self, t_elapsed: f64, t_total: f64) {
        if self.it > 0 && self.it.is_multiple_of(self.params.lambda as u64) && t_total > 0.0
            && t_elapsed > 0.0 {
                self.alpha = convergent_alpha(self.params.epsilon, t_elapsed, self.it, t_total);
            }
        self.eta *= self.alpha;
    }

    /// End-of-iteration hook: applies the C4 schedule when active.
    pub fn end_iteration(&mut self, t_elapsed: f64, t_total: f64) {
        if self.params.criterion == Criterion::C4 {
            self.update_eta_convergent(t_elapsed, t_total);
        }
    }
}

/// D4 rescaling: `omega * d_beta / mean`, kept in `[1, n]`. A zero mean
/// (nothing changed) doubles the degree.
pub fn rescale_degree(omega: f64, d_beta: f64, mean: f64, n: usize) -> f64 {
    let n = n.max(1) as f64;
    if mean > 0.0 {
        (omega * d_beta / mean).clamp(1.0, n)
    } else {
        (2.0 * omega).min(n)
    }
}

/// C2 rule: `kappa * eta / rate`, clamped to `[0, 1]`.
pub fn flow_eta(eta: f64, kappa: f64, rate: f64) -> f64 {
    (kappa * eta / rate).clamp(0.0, 1.0)
}

/// C3 rule: `mu * d_beta * eta / mean_distance`, clamped to `[0, 1]`.
pub fn distance_eta(eta: f64, mu: f64, d_beta: f64, mean_distance: f64) -> f64 {
    (mu * d_beta * eta / mean_distance).clamp(0.0, 1.0)
}

/// C4 factor `epsilon^(t_a / (it * t_f))`.
pub fn convergent_alpha(epsilon: f64, t_elapsed: f64, it: u64, t_total: f64) -> f64 {
    epsilon.powf(t_elapsed / (it as f64 * t_total))
}
