//! End-to-end runs: closure → L* → equivalence → conversion, with metrics
//! and an exact post-hoc check against the ground truth.

use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::closure::{closure, ClosureOracle};
use crate::convert::mealy_to_interface_automaton;
use crate::equivalence::{
    reference_counterexample, theoretical_words, Bounds, DistCall, DistOracle, PerfectOracle, StateBoundOracle,
};
use crate::error::{Error, Result};
use crate::interface::InterfaceAutomaton;
use crate::learner::{lstar, LStarConfig, LearnStats};
use crate::mealy::MealyMachine;
use crate::minimize::{distinguisher_bound, minimize};
use crate::oracle::{MealyOracle, MembershipOracle, ReferenceSystem};
use crate::purpose::{LearningPurpose, PurposeFilter, PurposeReference};
use crate::spec::{LoadedModel, Target};
use crate::sul::{apply_refinement, CounterReference, QueryCache, Simulator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    Dist,
    StateBound,
    Perfect,
}

impl FromStr for OracleKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dist" => Ok(OracleKind::Dist),
            "state-bound" => Ok(OracleKind::StateBound),
            "perfect" => Ok(OracleKind::Perfect),
            other => Err(format!("unknown oracle {other:?} (dist, state-bound, perfect)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LearnOptions {
    pub oracle: OracleKind,
    pub bounds: Bounds,
    pub purpose: Option<LearningPurpose>,
    /// Seed of the simulator's choice stream (non-deterministic fixtures).
    pub seed: u64,
    /// Apply the refinement block shipped with the model.
    pub refine: bool,
    pub eq_cap: usize,
    /// Largest word count the state-bound oracle may enumerate per query.
    pub state_bound_budget: u128,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            oracle: OracleKind::Dist,
            bounds: Bounds::dist(2),
            purpose: None,
            seed: 0,
            refine: false,
            eq_cap: LStarConfig::default().eq_cap,
            state_bound_budget: 1_000_000,
        }
    }
}

/// Run metrics. Field names are the keys of the metrics JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub interface_states: Option<usize>,
    pub mealy_states: usize,
    pub time_ms: u64,
    pub mq_asked: u64,
    pub mq_executed: u64,
    pub eq: usize,
    pub mq_per_eq_avg: f64,
    pub mq_per_eq_max: u64,
    pub b_dist_used: Option<usize>,
    pub b_dist_needed: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Verified,
    /// A word on which learned machine and ground truth differ.
    Failed(Vec<String>),
    /// No ground truth to compare against (non-deterministic fixture).
    Unavailable,
}

#[derive(Clone, Debug)]
pub struct LearnReport {
    pub model: String,
    pub machine: MealyMachine,
    pub automaton: Option<InterfaceAutomaton>,
    pub metrics: Metrics,
    pub verification: Verification,
    pub stats: LearnStats,
    pub dist_calls: Vec<DistCall>,
}

impl LearnReport {
    pub fn verified(&self) -> bool {
        self.verification == Verification::Verified
    }
}

pub fn run_learn(model: &LoadedModel, opts: &LearnOptions) -> Result<LearnReport> {
    let start = Instant::now();
    let mut report = match &model.target {
        Target::Async(m) => {
            let m = if opts.refine {
                let r = model
                    .refinement
                    .as_ref()
                    .ok_or_else(|| Error::Refinement("model has no refinement block".into()))?;
                apply_refinement(m, r)?
            } else {
                m.clone()
            };
            let reference = m.is_deterministic().then(|| closure(m.automaton()).machine);
            let inner = ClosureOracle::new(Simulator::new(m, opts.seed))?;
            with_purpose(inner, reference, opts)?
        }
        Target::Mealy(machine) => with_purpose(MealyOracle::new(machine.clone()), Some(machine.clone()), opts)?,
        Target::Counter(sul) => {
            let reference = CounterReference::new(sul);
            with_purpose(ClosureOracle::new(sul.clone())?, Some(reference), opts)?
        }
    };
    report.model = model.name.clone();
    report.metrics.time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn with_purpose<O, R>(inner: O, reference: Option<R>, opts: &LearnOptions) -> Result<LearnReport>
where
    O: MembershipOracle,
    R: ReferenceSystem,
{
    match &opts.purpose {
        Some(p) => {
            let filter = PurposeFilter::new(inner, p.clone())?;
            let reference = reference.map(|r| PurposeReference::new(r, p.clone())).transpose()?;
            learn_core(filter, reference, opts)
        }
        None => learn_core(inner, reference, opts),
    }
}

fn learn_core<O, R>(inner: O, reference: Option<R>, opts: &LearnOptions) -> Result<LearnReport>
where
    O: MembershipOracle,
    R: ReferenceSystem,
{
    let mut mq = QueryCache::new(inner);
    let config = LStarConfig {
        eq_cap: opts.eq_cap,
        ..LStarConfig::default()
    };
    let (result, dist_calls, b_dist_used) = match opts.oracle {
        OracleKind::Dist => {
            let b = opts.bounds.resolved_dist()?;
            let mut eq = DistOracle::new(b);
            let r = lstar(&mut mq, &mut eq, &config)?;
            (r, eq.calls, Some(b))
        }
        OracleKind::StateBound => {
            let b_state = opts
                .bounds
                .b_state
                .ok_or_else(|| Error::Model("the state-bound oracle needs a state bound".into()))?;
            let mut eq = StateBoundOracle::new(b_state, opts.state_bound_budget);
            let r = lstar(&mut mq, &mut eq, &config)?;
            (r, Vec::new(), Some(b_state.saturating_sub(1)))
        }
        OracleKind::Perfect => {
            let r = reference
                .as_ref()
                .ok_or_else(|| Error::Model("the perfect oracle needs a deterministic model".into()))?;
            let mut eq = PerfectOracle::new(r);
            let res = lstar(&mut mq, &mut eq, &config)?;
            (res, Vec::new(), None)
        }
    };
    let machine = minimize(&result.machine);
    let alphabet = machine.alphabet_arc().clone();
    let verification = match &reference {
        Some(r) => match reference_counterexample(&machine, r)? {
            None => Verification::Verified,
            Some(w) => Verification::Failed(alphabet.input_names(&w)),
        },
        None => Verification::Unavailable,
    };
    let b_dist_needed = match reference.as_ref().and_then(|r| r.as_machine()) {
        Some(target) => distinguisher_bound(&minimize(target)).ok(),
        None if verification == Verification::Verified => distinguisher_bound(&machine).ok(),
        None => None,
    };
    let automaton = if alphabet.is_closed() {
        mealy_to_interface_automaton(&machine).ok()
    } else {
        None
    };
    let stats = result.stats;
    let eq = stats.eq_count();
    let per_eq: Vec<u64> = stats.eqs.iter().map(|e| e.asked).collect();
    let counters = mq.counters();
    let metrics = Metrics {
        interface_states: automaton.as_ref().map(InterfaceAutomaton::state_count),
        mealy_states: machine.state_count(),
        time_ms: 0,
        mq_asked: counters.asked,
        mq_executed: counters.executed,
        eq,
        mq_per_eq_avg: if eq == 0 {
            0.0
        } else {
            per_eq.iter().sum::<u64>() as f64 / eq as f64
        },
        mq_per_eq_max: per_eq.iter().copied().max().unwrap_or(0),
        b_dist_used,
        b_dist_needed,
    };
    Ok(LearnReport {
        model: String::new(),
        machine,
        automaton,
        metrics,
        verification,
        stats,
        dist_calls,
    })
}

#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub b_dist: usize,
    /// Defaults to the learned machine's state count.
    pub b_state: Option<usize>,
    pub budget: u128,
    pub seed: u64,
    pub refine: bool,
    pub purpose: Option<LearningPurpose>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            b_dist: 2,
            b_state: None,
            budget: 1_000_000,
            seed: 0,
            refine: false,
            purpose: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistSummary {
    pub b_dist: usize,
    /// `|Q|·|Σ|^(B+1)` for the final hypothesis.
    pub theoretical_per_eq: u128,
    pub mq_asked: u64,
    pub mq_executed: u64,
    pub eq: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateBoundSummary {
    pub b_state: usize,
    /// `|Σ|^(k+b-1)` for the final hypothesis size `k`.
    pub theoretical_words: u128,
    pub theoretical_log10: f64,
    pub ran: bool,
    pub mq_executed: Option<u64>,
    pub verified: Option<bool>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub model: String,
    pub mealy_states: usize,
    pub inputs: usize,
    pub dist: DistSummary,
    pub state_bound: StateBoundSummary,
    /// Theoretical state-bound words over executed distinguisher queries.
    pub ratio: f64,
}

pub fn run_compare(model: &LoadedModel, opts: &CompareOptions) -> Result<CompareReport> {
    let base = LearnOptions {
        seed: opts.seed,
        refine: opts.refine,
        purpose: opts.purpose.clone(),
        state_bound_budget: opts.budget,
        ..LearnOptions::default()
    };
    let dist = run_learn(
        model,
        &LearnOptions {
            oracle: OracleKind::Dist,
            bounds: Bounds::dist(opts.b_dist),
            ..base.clone()
        },
    )?;
    let k = dist.machine.state_count();
    let inputs = dist.machine.alphabet().input_count();
    let b_state = opts.b_state.unwrap_or(k);
    let words = theoretical_words(inputs, k, b_state);
    let mut state_bound = StateBoundSummary {
        b_state,
        theoretical_words: words,
        theoretical_log10: (k + b_state).saturating_sub(1) as f64 * (inputs as f64).log10(),
        ran: false,
        mq_executed: None,
        verified: None,
        note: None,
    };
    if words > opts.budget {
        state_bound.note = Some(format!("not run: {words} words exceed the budget of {}", opts.budget));
    } else {
        let run = run_learn(
            model,
            &LearnOptions {
                oracle: OracleKind::StateBound,
                bounds: Bounds::state(b_state),
                ..base
            },
        );
        match run {
            Ok(r) => {
                state_bound.ran = true;
                state_bound.mq_executed = Some(r.metrics.mq_executed);
                state_bound.verified = Some(r.verified());
            }
            Err(Error::QueryBudget { words, budget }) => {
                state_bound.note = Some(format!("stopped: {words} words exceed the budget of {budget}"));
            }
            Err(e) => return Err(e),
        }
    }
    let executed = dist.metrics.mq_executed.max(1);
    Ok(CompareReport {
        model: dist.model.clone(),
        mealy_states: k,
        inputs,
        dist: DistSummary {
            b_dist: opts.b_dist,
            theoretical_per_eq: DistOracle::budget(k, inputs, opts.b_dist),
            mq_asked: dist.metrics.mq_asked,
            mq_executed: dist.metrics.mq_executed,
            eq: dist.metrics.eq,
            verified: dist.verified(),
        },
        state_bound,
        ratio: words as f64 / executed as f64,
    })
}
