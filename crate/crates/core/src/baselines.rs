//! Reference bug hunters: random simulation and bounded model checking.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aiger::AigModel;
use crate::bits::{InputVector, State};
use crate::encode::encode_unrolling;
use crate::engine::{Counterexample, EngineError, Verdict};
use crate::sat::{DefaultPhase, SatResult, SolveOptions, Solver};

#[derive(Debug, Clone)]
pub struct RandConfig {
    pub max_tries: u64,
    /// Maximum number of states in one walk, including the initial state.
    pub max_length: u64,
    pub seed: u64,
    pub time_limit: Option<Duration>,
}

impl Default for RandConfig {
    fn default() -> Self {
        RandConfig {
            max_tries: 10_000,
            max_length: 100,
            seed: 0,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RandStats {
    /// States checked against the property.
    pub steps: u64,
    pub tries: u64,
}

impl RandStats {
    pub fn entries(&self) -> Vec<(&'static str, u64)> {
        vec![("steps", self.steps), ("tries", self.tries)]
    }
}

#[derive(Debug, Clone)]
pub struct RandRun {
    pub verdict: Verdict,
    pub stats: RandStats,
}

fn random_input(rng: &mut ChaCha8Rng, n: usize) -> InputVector {
    InputVector::from_bools((0..n).map(|_| rng.random::<bool>()))
}

/// Random walks from the initial state. Each visited state is checked with
/// the input sampled for that step; a walk restarts after `max_length` states.
pub fn run_rand(m: &AigModel, cfg: &RandConfig) -> Result<RandRun, EngineError> {
    assert!(cfg.max_tries >= 1 && cfg.max_length >= 1);
    let deadline = cfg.time_limit.map(|t| Instant::now() + t);
    let init = m.initial_state()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stats = RandStats::default();
    while stats.tries < cfg.max_tries {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        stats.tries += 1;
        let mut states = vec![init.clone()];
        let mut inputs = Vec::new();
        loop {
            let x = random_input(&mut rng, m.num_inputs());
            let curr = states.last().unwrap();
            stats.steps += 1;
            let (next, bad) = m.step_and_bad(curr, &x);
            if bad {
                let cex = Counterexample {
                    states,
                    inputs,
                    final_bad_input: x,
                };
                cex.validate(m)?;
                return Ok(RandRun {
                    verdict: Verdict::Bug(cex),
                    stats,
                });
            }
            if states.len() as u64 >= cfg.max_length {
                break;
            }
            states.push(next);
            inputs.push(x);
        }
    }
    Ok(RandRun {
        verdict: Verdict::BudgetExhausted,
        stats,
    })
}

#[derive(Debug, Clone)]
pub struct BmcConfig {
    pub max_depth: usize,
    /// Conflict cap for each depth.
    pub max_conflicts: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for BmcConfig {
    fn default() -> Self {
        BmcConfig {
            max_depth: 100,
            max_conflicts: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BmcStats {
    /// Deepest depth shown to have no counterexample, if any.
    pub refuted_through: Option<usize>,
    pub sat_calls: u64,
    pub conflicts: u64,
}

impl BmcStats {
    pub fn entries(&self) -> Vec<(&'static str, u64)> {
        let mut v = vec![("sat_calls", self.sat_calls), ("conflicts", self.conflicts)];
        if let Some(d) = self.refuted_through {
            v.push(("refuted_through", d as u64));
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct BmcRun {
    pub verdict: Verdict,
    pub stats: BmcStats,
}

/// Checks depths `0..=max_depth` in order; the first counterexample found is
/// therefore one of minimal depth.
pub fn run_bmc(m: &AigModel, cfg: &BmcConfig) -> Result<BmcRun, EngineError> {
    let deadline = cfg.time_limit.map(|t| Instant::now() + t);
    let init = m.initial_state()?;
    let mut stats = BmcStats::default();
    for depth in 0..=cfg.max_depth {
        let (f, vm) = encode_unrolling(m, &init, depth);
        let opts = SolveOptions {
            proof: false,
            trim: false,
            max_conflicts: cfg.max_conflicts,
            deadline,
        };
        stats.sat_calls += 1;
        let mut solver = Solver::new(&f, &[], opts);
        let result = solver.solve(&mut DefaultPhase);
        stats.conflicts += solver.stats().conflicts;
        match result {
            SatResult::Sat(p) => {
                let inputs: Vec<InputVector> = (0..depth).map(|k| vm.decode_inputs(&p, k)).collect();
                let mut states: Vec<State> = vec![init.clone()];
                for x in &inputs {
                    states.push(m.simulate_step(states.last().unwrap(), x));
                }
                let cex = Counterexample {
                    states,
                    inputs,
                    final_bad_input: vm.decode_inputs(&p, depth),
                };
                cex.validate(m)?;
                return Ok(BmcRun {
                    verdict: Verdict::Bug(cex),
                    stats,
                });
            }
            SatResult::Unsat(_) => stats.refuted_through = Some(depth),
            SatResult::BudgetExceeded => break,
        }
    }
    Ok(BmcRun {
        verdict: Verdict::BudgetExhausted,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits;

    #[test]
    fn rand_counter_first_try() {
        let r = run_rand(&circuits::counter(3, 7), &RandConfig::default()).unwrap();
        let cex = r.verdict.counterexample().unwrap();
        assert_eq!(cex.depth(), 7);
        assert_eq!(r.stats.tries, 1);
        assert_eq!(r.stats.steps, 8);
    }

    #[test]
    fn rand_budget_exact() {
        let cfg = RandConfig {
            max_tries: 7,
            max_length: 13,
            ..Default::default()
        };
        let r = run_rand(&circuits::never_bad(3), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::BudgetExhausted);
        assert_eq!(r.stats.steps, 7 * 13);
        assert_eq!(r.stats.tries, 7);
    }

    #[test]
    fn rand_bad_initial() {
        let r = run_rand(&circuits::bad_initial(), &RandConfig::default()).unwrap();
        assert_eq!(r.verdict.counterexample().unwrap().len(), 1);
        assert_eq!(r.stats.steps, 1);
    }

    #[test]
    fn rand_reproducible() {
        let m = circuits::combination_lock(2, &[3, 1]);
        let cfg = RandConfig {
            seed: 7,
            ..Default::default()
        };
        let a = run_rand(&m, &cfg).unwrap();
        let b = run_rand(&m, &cfg).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn bmc_examples() {
        let r = run_bmc(&circuits::bad_initial(), &BmcConfig::default()).unwrap();
        assert_eq!(r.verdict.counterexample().unwrap().depth(), 0);

        let r = run_bmc(&circuits::counter(3, 7), &BmcConfig::default()).unwrap();
        let cex = r.verdict.counterexample().unwrap();
        assert_eq!((cex.depth(), cex.len()), (7, 8));
        assert_eq!(r.stats.refuted_through, Some(6));

        let cfg = BmcConfig {
            max_depth: 5,
            ..Default::default()
        };
        let r = run_bmc(&circuits::never_bad(3), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::BudgetExhausted);
        assert_eq!(r.stats.refuted_through, Some(5));
        assert_eq!(r.stats.sat_calls, 6);
    }
}
