//! Explicit-state breadth-first reachability, used as ground truth.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::aiger::{AigModel, ModelError};
use crate::bits::{InputVector, State};
use crate::cnf::Clause;
use crate::encode::{encode_bad_check, encode_transition};
use crate::engine::Counterexample;
use crate::sat::{solve_with, DefaultPhase, SatResult, SolveOptions};

/// Above this many inputs, successors are enumerated with a SAT solver.
pub const MAX_ENUMERATED_INPUTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    /// A bad state is reachable in `depth` transitions, and no fewer.
    Reachable { depth: usize, trace: Counterexample },
    /// All `states` reachable states were explored and none is bad.
    Unreachable { states: usize },
    /// The state budget ran out first.
    Inconclusive { states: usize },
}

impl OracleResult {
    pub fn depth(&self) -> Option<usize> {
        match self {
            OracleResult::Reachable { depth, .. } => Some(*depth),
            _ => None,
        }
    }
}

fn all_inputs(n: usize) -> impl Iterator<Item = InputVector> {
    (0..1u64 << n).map(move |v| InputVector::from_u64(v, n))
}

/// An input making `s` bad, if one exists.
pub fn bad_input(m: &AigModel, s: &State) -> Option<InputVector> {
    if m.num_inputs() <= MAX_ENUMERATED_INPUTS {
        return all_inputs(m.num_inputs()).find(|x| m.eval_bad(s, x));
    }
    let (f, vm) = encode_bad_check(m, s);
    match solve_with(&f, &[], &mut DefaultPhase, SolveOptions::default()) {
        SatResult::Sat(p) => Some(vm.decode_inputs(&p, 0)),
        _ => None,
    }
}

/// Distinct successors of `s`, each with one input producing it.
pub fn successors(m: &AigModel, s: &State) -> Vec<(State, InputVector)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    if m.num_inputs() <= MAX_ENUMERATED_INPUTS {
        for x in all_inputs(m.num_inputs()) {
            let t = m.simulate_step(s, &x);
            if seen.insert(t.clone()) {
                out.push((t, x));
            }
        }
        return out;
    }
    let (mut f, vm) = encode_transition(m, s);
    loop {
        match solve_with(&f, &[], &mut DefaultPhase, SolveOptions::default()) {
            SatResult::Sat(p) => {
                let x = vm.decode_inputs(&p, 0);
                let t = m.simulate_step(s, &x);
                let block: Vec<_> = vm
                    .next
                    .iter()
                    .map(|v| {
                        let v = v.expect("next-state variable");
                        if p.value(v) {
                            v.neg()
                        } else {
                            v.pos()
                        }
                    })
                    .collect();
                if seen.insert(t.clone()) {
                    out.push((t, x));
                }
                f.add_clause(Clause::new(block).unwrap());
            }
            _ => return out,
        }
    }
}

/// Breadth-first search from the initial state over at most `max_states`
/// states. Returns the minimal depth of a bad state when one is reachable.
pub fn explicit_oracle(m: &AigModel, max_states: usize) -> Result<OracleResult, ModelError> {
    let init = m.initial_state()?;
    let mut parent: HashMap<State, Option<(State, InputVector)>> = HashMap::new();
    parent.insert(init.clone(), None);
    let mut queue = VecDeque::from([(init, 0usize)]);
    let mut complete = true;
    while let Some((s, depth)) = queue.pop_front() {
        if let Some(x) = bad_input(m, &s) {
            let mut states = vec![s.clone()];
            let mut inputs = Vec::new();
            let mut cur = &s;
            while let Some((p, px)) = &parent[cur] {
                states.push(p.clone());
                inputs.push(px.clone());
                cur = p;
            }
            states.reverse();
            inputs.reverse();
            let trace = Counterexample {
                states,
                inputs,
                final_bad_input: x,
            };
            return Ok(OracleResult::Reachable { depth, trace });
        }
        for (t, x) in successors(m, &s) {
            if parent.contains_key(&t) {
                continue;
            }
            if parent.len() >= max_states {
                complete = false;
                continue;
            }
            parent.insert(t.clone(), Some((s.clone(), x)));
            queue.push_back((t, depth + 1));
        }
    }
    let states = parent.len();
    Ok(if complete {
        OracleResult::Unreachable { states }
    } else {
        OracleResult::Inconclusive { states }
    })
}

/// All states reachable from the initial state, up to `max_states`.
pub fn reachable_states(m: &AigModel, max_states: usize) -> Result<HashSet<State>, ModelError> {
    let init = m.initial_state()?;
    let mut seen = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([init]);
    while let Some(s) = queue.pop_front() {
        for (t, _) in successors(m, &s) {
            if seen.len() >= max_states {
                return Ok(seen);
            }
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    Ok(seen)
}
