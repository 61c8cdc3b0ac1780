use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::Var;

/// Chooses the value assigned to a decision variable.
pub trait PhasePolicy {
    /// `saved` is the variable's last assigned value, if any.
    fn decide(&mut self, var: Var, saved: Option<bool>) -> bool;
}

/// Phase saving, falling back to `false` for fresh variables.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultPhase;

impl PhasePolicy for DefaultPhase {
    fn decide(&mut self, _var: Var, saved: Option<bool>) -> bool {
        saved.unwrap_or(false)
    }
}

/// Like [`DefaultPhase`], but every `period`-th decision gets a random
/// phase. The decision counter and the RNG persist across solver calls.
#[derive(Debug, Clone)]
pub struct RandomizedPhase {
    rng: ChaCha8Rng,
    period: u64,
    decisions: u64,
}

impl RandomizedPhase {
    pub const DEFAULT_PERIOD: u64 = 10;

    pub fn new(seed: u64) -> Self {
        Self::with_period(seed, Self::DEFAULT_PERIOD)
    }

    pub fn with_period(seed: u64, period: u64) -> Self {
        assert!(period >= 1);
        RandomizedPhase {
            rng: ChaCha8Rng::seed_from_u64(seed),
            period,
            decisions: 0,
        }
    }

    pub fn decisions(&self) -> u64 {
        self.decisions
    }
}

impl PhasePolicy for RandomizedPhase {
    fn decide(&mut self, _var: Var, saved: Option<bool>) -> bool {
        self.decisions += 1;
        if self.decisions.is_multiple_of(self.period) {
            self.rng.random()
        } else {
            saved.unwrap_or(false)
        }
    }
}
