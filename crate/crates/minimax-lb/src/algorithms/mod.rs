//! Span-protocol algorithms that probe the instances through the oracle.
//!
//! Every run goes through a [`Session`], which owns the query counter, the
//! index sampler, the evaluation schedule and (optionally) the protocol log.
//! Scores come from [`crate::reference`], never from the algorithm.

mod audit;
mod extragradient;
mod point_prox;
mod sgda;
mod svrg;

pub use audit::{audit_log, protocol_audit, AuditReport, Event, ProtocolLog, Violation};
pub use extragradient::run_extragradient;
pub use point_prox::run_point_prox;
pub use sgda::run_sgda;
pub use svrg::run_svrg_vr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::instance::Instance;
use crate::oracle::{pifo, PifoResponse, QueryCounter};
use crate::reference::Scorer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Sgda,
    Svrg,
    PointProx,
    Extragradient,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Sgda, Algorithm::Svrg, Algorithm::PointProx, Algorithm::Extragradient];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sgda => "sgda",
            Algorithm::Svrg => "svrg",
            Algorithm::PointProx => "point_prox",
            Algorithm::Extragradient => "extragradient",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown algorithm {s:?}")))
    }
}

/// Algorithm choice and hyperparameters. Unset values fall back to
/// `1/(3L)` for stochastic steps, `1/(2L)` for extragradient, an epoch of
/// `n` inner steps and a prox weight of `1/L` (capped by the validity limit).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub epoch_len: Option<usize>,
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Draw probabilities over exposed indices, replacing the instance's.
    #[serde(default)]
    pub sampling: Option<Vec<f64>>,
    /// Cyclic sequence of exposed indices; overrides any distribution.
    #[serde(default)]
    pub forced: Option<Vec<usize>>,
}

impl AlgorithmSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        AlgorithmSpec { algorithm, step: None, epoch_len: None, gamma: None, sampling: None, forced: None }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn with_forced(mut self, seq: Vec<usize>) -> Self {
        self.forced = Some(seq);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_queries: u64,
    /// Target accuracy; its first crossing sets `queries_to_eps`.
    #[serde(default)]
    pub eps: Option<f64>,
    /// Stop as soon as the target is met.
    #[serde(default)]
    pub halt_at_eps: bool,
    /// Query budget whose last iterate is scored separately.
    #[serde(default)]
    pub budget: Option<u64>,
    /// Keep the protocol log for [`protocol_audit`].
    #[serde(default)]
    pub record: bool,
}

impl StopRule {
    pub fn queries(max_queries: u64) -> Self {
        StopRule { max_queries, eps: None, halt_at_eps: false, budget: None, record: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Budget,
    Converged,
    Diverged(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub queries: u64,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trace {
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub queries: u64,
    /// Scores taken once per `n` queries.
    pub evaluations: Vec<Evaluation>,
    pub queries_to_eps: Option<u64>,
    pub final_score: f64,
    pub budget: Option<u64>,
    pub score_at_budget: Option<f64>,
    pub stop: StopReason,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(skip)]
    pub log: Option<ProtocolLog>,
}

/// Dispatches on `spec.algorithm`.
pub fn run<R: Rng + ?Sized>(inst: &Instance, spec: &AlgorithmSpec, stop: &StopRule, rng: &mut R) -> Result<Trace> {
    match spec.algorithm {
        Algorithm::Sgda => run_sgda(inst, spec, stop, rng),
        Algorithm::Svrg => run_svrg_vr(inst, spec, stop, rng),
        Algorithm::PointProx => run_point_prox(inst, spec, stop, rng),
        Algorithm::Extragradient => run_extragradient(inst, spec, stop),
    }
}

enum Draws {
    Weighted { index: WeightedIndex<f64>, probs: Vec<f64> },
    Forced { seq: Vec<usize>, pos: usize },
}

/// Bookkeeping shared by every algorithm.
pub(crate) struct Session<'a> {
    pub inst: &'a Instance,
    pub counter: QueryCounter,
    algorithm: Algorithm,
    draws: Draws,
    stop: StopRule,
    scorer: Option<Scorer>,
    next_eval: u64,
    initial_score: Option<f64>,
    evaluations: Vec<Evaluation>,
    queries_to_eps: Option<u64>,
    at_budget: (Vec<f64>, Vec<f64>),
    halted: Option<StopReason>,
    log: Option<ProtocolLog>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl<'a> Session<'a> {
    pub fn new(inst: &'a Instance, spec: &AlgorithmSpec, stop: &StopRule) -> Result<Self> {
        let draws = match (&spec.forced, &spec.sampling) {
            (Some(seq), _) => {
                if seq.is_empty() {
                    return Err(invalid("forced draw sequence is empty"));
                }
                for &i in seq {
                    inst.check_index(i)?;
                }
                Draws::Forced { seq: seq.clone(), pos: 0 }
            }
            (None, probs) => {
                let probs = probs.clone().unwrap_or_else(|| inst.sampling.probs.clone());
                if probs.len() != inst.n || probs.iter().any(|&p| !(p > 0.0)) {
                    return Err(invalid("draw probabilities must be positive, one per component"));
                }
                let total: f64 = probs.iter().sum();
                let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
                let index = WeightedIndex::new(&probs).map_err(|e| invalid(e.to_string()))?;
                Draws::Weighted { index, probs }
            }
        };
        let x = vec![0.0; inst.dim_x];
        let y = vec![0.0; inst.dim_y];
        let log = stop.record.then(|| ProtocolLog::new(&x, &y));
        Ok(Session {
            inst,
            counter: QueryCounter::new(inst.n),
            algorithm: spec.algorithm,
            draws,
            stop: *stop,
            scorer: Scorer::new(inst).ok(),
            next_eval: 0,
            initial_score: None,
            evaluations: Vec::new(),
            queries_to_eps: None,
            at_budget: (x.clone(), y.clone()),
            halted: None,
            log,
            x,
            y,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn smoothness(&self) -> f64 {
        self.inst.regularity.l
    }

    /// Draws an exposed index and its importance weight `1/(n p_i)`.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (usize, f64) {
        let n = self.inst.n as f64;
        match &mut self.draws {
            Draws::Weighted { index, probs } => {
                let i = index.sample(rng);
                (i, 1.0 / (n * probs[i]))
            }
            Draws::Forced { seq, pos } => {
                let i = seq[*pos % seq.len()];
                *pos += 1;
                (i, 1.0)
            }
        }
    }

    pub fn min_prob(&self) -> f64 {
        match &self.draws {
            Draws::Weighted { probs, .. } => probs.iter().copied().fold(f64::INFINITY, f64::min),
            Draws::Forced { .. } => 1.0 / self.inst.n as f64,
        }
    }

    pub fn query(&mut self, i: usize, x: &[f64], y: &[f64], gamma: Option<f64>) -> Result<PifoResponse> {
        let r = pifo(self.inst, i, x, y, gamma, &mut self.counter)?;
        if let Some(log) = &mut self.log {
            log.push(Event::Query(r.clone()));
        }
        Ok(r)
    }

    /// Logs an intermediate point at which queries are made.
    pub fn visit(&mut self, x: &[f64], y: &[f64]) {
        if let Some(log) = &mut self.log {
            log.push(Event::Iterate { x: x.to_vec(), y: y.to_vec() });
        }
    }

    /// Projects and accepts a new iterate. Returns `false` once the run
    /// should end.
    pub fn commit(&mut self, x: &[f64], y: &[f64]) -> bool {
        self.x = self.inst.project_x(x);
        self.y = self.inst.project_y(y);
        if let Some(log) = &mut self.log {
            log.push(Event::Iterate { x: self.x.clone(), y: self.y.clone() });
        }
        self.observe()
    }

    /// Records the current iterate (also used for the initial point).
    pub fn observe(&mut self) -> bool {
        let q = self.counter.total();
        if self.stop.budget.is_some_and(|b| q <= b) {
            self.at_budget = (self.x.clone(), self.y.clone());
        }
        if q >= self.next_eval {
            let n = self.inst.n as u64;
            self.next_eval = (q / n + 1) * n;
            let score = self.score(&self.x, &self.y);
            self.evaluations.push(Evaluation { queries: q, score });
            let initial = *self.initial_score.get_or_insert(score);
            if score.is_infinite() || score > 1e12 * initial.max(f64::MIN_POSITIVE) {
                self.halted = Some(StopReason::Diverged(format!("score {score:e} after {q} queries, initial {initial:e}")));
                return false;
            }
            if let Some(eps) = self.stop.eps {
                if score <= eps && self.queries_to_eps.is_none() {
                    self.queries_to_eps = Some(q);
                    if self.stop.halt_at_eps {
                        self.halted = Some(StopReason::Converged);
                        return false;
                    }
                }
            }
        }
        q < self.stop.max_queries
    }

    fn score(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.scorer {
            Some(s) => s.score(self.inst, x, y).unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }

    pub fn finish(self) -> Trace {
        let final_score = self.score(&self.x, &self.y);
        let score_at_budget = self.stop.budget.map(|_| self.score(&self.at_budget.0, &self.at_budget.1));
        Trace {
            algorithm: self.algorithm,
            seed: None,
            queries: self.counter.total(),
            evaluations: self.evaluations,
            queries_to_eps: self.queries_to_eps,
            final_score,
            budget: self.stop.budget,
            score_at_budget,
            stop: self.halted.unwrap_or(StopReason::Budget),
            x: self.x,
            y: self.y,
            log: self.log,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimax::make_tilde_r;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("adam".parse::<Algorithm>().is_err());
    }

    #[test]
    fn forced_draws_cycle() {
        let inst = make_tilde_r(4, 1.0, (0.5, 0.5), 3).unwrap();
        let spec = AlgorithmSpec::new(Algorithm::Sgda).with_forced(vec![2, 1]);
        let mut s = Session::new(&inst, &spec, &StopRule::queries(10)).unwrap();
        let mut rng = crate::geo::trial_rng(0, 0);
        let seq: Vec<usize> = (0..4).map(|_| s.draw(&mut rng).0).collect();
        assert_eq!(seq, vec![2, 1, 2, 1]);
    }
}
