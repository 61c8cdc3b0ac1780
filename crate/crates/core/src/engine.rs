//! The TapSeq search: successor states are extracted from point encodings of
//! proofs that no successor of the current state is bad.

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::aiger::{AigModel, ModelError};
use crate::bits::{InputVector, State};
use crate::cnf::{Cnf, Point};
use crate::encode::{encode_bad_check, encode_step_formula, VarMap};
use crate::encoding::{enc_resolutions, BoundaryPoint, EncodeLimits};
use crate::sat::{solve_with, DefaultPhase, PhasePolicy, RandomizedPhase, ResolutionProof, SatResult, SolveOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("boundary point disagrees with the current state on latch {0}")]
    InconsistentPoint(usize),
    #[error("state {0} has no parent chain to the initial state")]
    BrokenChain(State),
    #[error("invalid counterexample: {0}")]
    InvalidTrace(String),
}

/// A trace `s1..sk` from the initial state to a bad state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub states: Vec<State>,
    /// `inputs[i]` moves `states[i]` to `states[i + 1]`.
    pub inputs: Vec<InputVector>,
    /// Input under which the last state is bad.
    pub final_bad_input: InputVector,
}

impl Counterexample {
    /// Number of states in the trace.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of transitions.
    pub fn depth(&self) -> usize {
        self.states.len() - 1
    }

    /// Replays the trace from the initial state by simulation.
    pub fn validate(&self, m: &AigModel) -> Result<(), EngineError> {
        let bad = |msg: String| Err(EngineError::InvalidTrace(msg));
        if self.states.is_empty() || self.inputs.len() + 1 != self.states.len() {
            return bad("trace shape".into());
        }
        let init = m.initial_state()?;
        if self.states[0] != init {
            return bad(format!("first state {} is not the initial state {init}", self.states[0]));
        }
        for (i, x) in self.inputs.iter().enumerate() {
            let next = m.simulate_step(&self.states[i], x);
            if next != self.states[i + 1] {
                return bad(format!("step {i}: simulation gives {next}, trace has {}", self.states[i + 1]));
            }
        }
        if !m.eval_bad(self.states.last().unwrap(), &self.final_bad_input) {
            return bad("last state is not bad under the final input".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    Bfs,
    Dfs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Bug(Counterexample),
    /// No active states left; the property is not proved.
    Converged,
    BudgetExhausted,
}

impl Verdict {
    pub fn is_bug(&self) -> bool {
        matches!(self, Verdict::Bug(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Bug(c) => Some(c),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Bug(_) => "bug",
            Verdict::Converged => "converged",
            Verdict::BudgetExhausted => "budget",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateRecord {
    pub frame: usize,
    pub parent: Option<State>,
    pub input_from_parent: Option<InputVector>,
}

/// Visited states with their parent links, and the states still to process.
#[derive(Debug, Clone, Default)]
pub struct StateStore {
    all: HashMap<State, StateRecord>,
    active: VecDeque<State>,
    insertion: Vec<State>,
}

impl StateStore {
    pub fn new(init: State) -> Self {
        let mut store = StateStore::default();
        store.all.insert(
            init.clone(),
            StateRecord {
                frame: 0,
                parent: None,
                input_from_parent: None,
            },
        );
        store.insertion.push(init.clone());
        store.active.push_back(init);
        store
    }

    /// Inserts `state` as a child of `parent`; `false` if already known.
    pub fn insert(&mut self, state: State, parent: &State, input: InputVector) -> bool {
        if self.all.contains_key(&state) {
            return false;
        }
        let frame = self.all[parent].frame + 1;
        self.all.insert(
            state.clone(),
            StateRecord {
                frame,
                parent: Some(parent.clone()),
                input_from_parent: Some(input),
            },
        );
        self.insertion.push(state.clone());
        self.active.push_back(state);
        true
    }

    pub fn pop(&mut self, order: Order) -> Option<State> {
        match order {
            Order::Bfs => self.active.pop_front(),
            Order::Dfs => self.active.pop_back(),
        }
    }

    pub fn get(&self, s: &State) -> Option<&StateRecord> {
        self.all.get(s)
    }

    pub fn contains(&self, s: &State) -> bool {
        self.all.contains_key(s)
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn active_len(&self) -> usize {
        self.active.len()
    }

    /// Visited states in insertion order.
    pub fn states(&self) -> &[State] {
        &self.insertion
    }

    /// States and inputs from the initial state to `s`.
    pub fn path_to(&self, s: &State) -> Result<(Vec<State>, Vec<InputVector>), EngineError> {
        let mut states = vec![s.clone()];
        let mut inputs = Vec::new();
        let mut cur = s;
        loop {
            let rec = self.all.get(cur).ok_or_else(|| EngineError::BrokenChain(s.clone()))?;
            match (&rec.parent, &rec.input_from_parent) {
                (None, _) => break,
                (Some(p), Some(x)) => {
                    states.push(p.clone());
                    inputs.push(x.clone());
                    cur = p;
                }
                (Some(_), None) => return Err(EngineError::BrokenChain(s.clone())),
            }
            if states.len() > self.all.len() {
                return Err(EngineError::BrokenChain(s.clone()));
            }
        }
        states.reverse();
        inputs.reverse();
        Ok((states, inputs))
    }
}

/// Builds the trace ending in `bad_state` and replays it by simulation.
pub fn reconstruct_trace(
    m: &AigModel,
    store: &StateStore,
    bad_state: &State,
    final_input: InputVector,
) -> Result<Counterexample, EngineError> {
    let (states, inputs) = store.path_to(bad_state)?;
    let cex = Counterexample {
        states,
        inputs,
        final_bad_input: final_input,
    };
    cex.validate(m)?;
    Ok(cex)
}

/// Adds the successor of `curr` under the transition inputs of `p`.
/// Returns whether the successor is new.
pub fn update_states(
    m: &AigModel,
    store: &mut StateStore,
    p: &Point,
    vm: &VarMap,
    curr: &State,
) -> Result<bool, EngineError> {
    for (i, v) in vm.present.iter().enumerate() {
        if let Some(v) = v {
            if p.value(*v) != curr.get(i) {
                return Err(EngineError::InconsistentPoint(i));
            }
        }
    }
    let x = vm.decode_inputs(p, 0);
    let next = m.simulate_step(curr, &x);
    Ok(store.insert(next, curr, x))
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub order: Order,
    /// Randomize every tenth decision in boundary-point searches.
    pub randomize: bool,
    pub seed: u64,
    pub max_states: usize,
    pub time_limit: Option<Duration>,
    /// Conflict cap for each boundary-point search.
    pub enc_conflicts: Option<u64>,
    /// Conflict cap for each check of a state's successors.
    pub main_conflicts: Option<u64>,
    /// Restrict proofs to the steps the empty clause depends on.
    pub trim: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            order: Order::Bfs,
            randomize: false,
            seed: 0,
            max_states: 40_000,
            time_limit: Some(Duration::from_secs(180)),
            enc_conflicts: Some(EncodeLimits::DEFAULT_CONFLICTS),
            main_conflicts: None,
            trim: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EngineStats {
    /// Distinct states visited, including the initial state.
    pub states: usize,
    pub processed: usize,
    pub max_frame: usize,
    pub sat_calls: u64,
    pub proof_steps: u64,
    pub steps_encoded: u64,
    /// Boundary points materialized (deduplicated per state).
    pub boundary_points: u64,
    pub skipped_state_pivots: u64,
    pub rejected_points: u64,
    pub steps_without_point: u64,
    pub enc_budget_hits: u64,
    /// States whose successor check ran out of budget and were skipped.
    pub skipped_states: u64,
}

impl EngineStats {
    pub fn entries(&self) -> Vec<(&'static str, u64)> {
        vec![
            ("states", self.states as u64),
            ("processed", self.processed as u64),
            ("frames", self.max_frame as u64),
            ("sat_calls", self.sat_calls),
            ("proof_steps", self.proof_steps),
            ("steps_encoded", self.steps_encoded),
            ("boundary_points", self.boundary_points),
            ("skipped_state_pivots", self.skipped_state_pivots),
            ("rejected_points", self.rejected_points),
            ("steps_without_point", self.steps_without_point),
            ("enc_budget_hits", self.enc_budget_hits),
            ("skipped_states", self.skipped_states),
        ]
    }
}

/// Hooks for inspecting intermediate artifacts of a run.
pub trait Observer {
    fn on_step_formula(&mut self, _state: &State, _f: &Cnf, _vm: &VarMap) {}
    fn on_proof(&mut self, _state: &State, _proof: &ResolutionProof) {}
    fn on_boundary_point(&mut self, _state: &State, _step: usize, _bp: &BoundaryPoint) {}
}

impl Observer for () {}

#[derive(Debug, Clone)]
pub struct TapSeqRun {
    pub verdict: Verdict,
    pub stats: EngineStats,
    pub store: StateStore,
}

pub fn run_tapseq(m: &AigModel, cfg: &EngineConfig) -> Result<TapSeqRun, EngineError> {
    run_tapseq_observed(m, cfg, &mut ())
}

pub fn run_tapseq_observed(m: &AigModel, cfg: &EngineConfig, obs: &mut dyn Observer) -> Result<TapSeqRun, EngineError> {
    assert!(cfg.max_states >= 1);
    let deadline = cfg.time_limit.map(|t| Instant::now() + t);
    let init = m.initial_state()?;
    let mut store = StateStore::new(init.clone());
    let mut stats = EngineStats::default();
    let mut enc_policy: Box<dyn PhasePolicy> = if cfg.randomize {
        Box::new(RandomizedPhase::new(cfg.seed))
    } else {
        Box::new(DefaultPhase)
    };
    let limits = EncodeLimits {
        max_conflicts: cfg.enc_conflicts,
        deadline,
    };

    let finish = |verdict, mut stats: EngineStats, store: StateStore| {
        stats.states = store.len();
        Ok(TapSeqRun { verdict, stats, store })
    };

    let (f, vm) = encode_bad_check(m, &init);
    stats.sat_calls += 1;
    if let SatResult::Sat(p) = solve_with(&f, &[], &mut DefaultPhase, SolveOptions::default()) {
        let x = vm.decode_inputs(&p, 0);
        let cex = reconstruct_trace(m, &store, &init, x)?;
        return finish(Verdict::Bug(cex), stats, store);
    }

    let mut exhausted = false;
    'search: while let Some(curr) = store.pop(cfg.order) {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            exhausted = true;
            break;
        }
        stats.processed += 1;
        stats.max_frame = stats.max_frame.max(store.get(&curr).unwrap().frame);

        let (f, vm) = encode_step_formula(m, &curr);
        obs.on_step_formula(&curr, &f, &vm);
        let opts = SolveOptions {
            proof: true,
            trim: cfg.trim,
            max_conflicts: cfg.main_conflicts,
            deadline,
        };
        stats.sat_calls += 1;
        let proof = match solve_with(&f, &[], &mut DefaultPhase, opts) {
            SatResult::Sat(p) => {
                let x = vm.decode_inputs(&p, 0);
                let next = m.simulate_step(&curr, &x);
                debug_assert_eq!(next, vm.decode_next(&p));
                store.insert(next.clone(), &curr, x);
                let cex = reconstruct_trace(m, &store, &next, vm.decode_inputs(&p, 1))?;
                return finish(Verdict::Bug(cex), stats, store);
            }
            SatResult::Unsat(proof) => proof.expect("proof logging enabled"),
            SatResult::BudgetExceeded => {
                stats.skipped_states += 1;
                exhausted = true;
                continue;
            }
        };
        obs.on_proof(&curr, &proof);
        stats.proof_steps += proof.steps.len() as u64;

        let mut points = Vec::new();
        let report = enc_resolutions(&f, &proof, &vm, &curr, enc_policy.as_mut(), limits, |bp, k| {
            obs.on_boundary_point(&curr, k, bp);
            points.push(bp.point().clone());
        });
        stats.sat_calls += report.steps_encoded as u64;
        stats.steps_encoded += report.steps_encoded as u64;
        stats.boundary_points += report.encoding.len() as u64;
        stats.skipped_state_pivots += report.skipped_state_pivots as u64;
        stats.rejected_points += report.rejected as u64;
        stats.steps_without_point += report.no_point as u64;
        stats.enc_budget_hits += report.budget_hits as u64;

        for p in &points {
            if store.len() >= cfg.max_states {
                exhausted = true;
                break 'search;
            }
            update_states(m, &mut store, p, &vm, &curr)?;
        }
    }
    let verdict = if exhausted || store.active_len() > 0 {
        Verdict::BudgetExhausted
    } else {
        Verdict::Converged
    };
    finish(verdict, stats, store)
}
