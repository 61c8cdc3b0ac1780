//! Conflict-driven clause learning with resolution-proof logging.
//!
//! Every learned clause records the trivial resolution chain produced by
//! first-UIP conflict analysis: the conflicting clause followed by
//! `(pivot, antecedent)` pairs. Literals falsified at decision level 0 are
//! kept in learned clauses rather than resolved away, so each chain
//! resolves to exactly the learned clause. The final conflict at level 0 is
//! resolved against the reasons on the trail until the empty clause remains.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::Instant;

use super::phase::PhasePolicy;
use super::proof::{ParentRef, ResolutionProof, ResolutionStep};
use crate::cnf::{Clause, Cnf, Lit, Point, Var};

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Record resolution chains and return a proof on UNSAT.
    pub proof: bool,
    /// Return only the steps the empty clause depends on.
    pub trim: bool,
    pub max_conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

impl SolveOptions {
    pub fn with_proof() -> Self {
        SolveOptions {
            proof: true,
            trim: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Point),
    /// The proof is present when proof logging was requested.
    Unsat(Option<ResolutionProof>),
    BudgetExceeded,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatResult::Unsat(_))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

const UNDEF: u8 = 2;

#[derive(Debug, Clone, Copy)]
struct Activity(f64);

impl PartialEq for Activity {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}
impl Eq for Activity {}
impl PartialOrd for Activity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Activity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone)]
struct Chain {
    start: usize,
    links: Vec<(Var, usize)>,
}

pub struct Solver {
    num_vars: usize,
    /// Input clauses in formula order (assumption units appended).
    inputs: Vec<Clause>,
    /// Clause database: inputs first, then learned clauses. Watched literals
    /// sit at positions 0 and 1.
    db: Vec<Vec<Lit>>,
    /// `chains[k]` derives clause `inputs.len() + k`.
    chains: Vec<Chain>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    saved: Vec<Option<bool>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: BinaryHeap<(Activity, Reverse<u32>)>,
    seen: Vec<bool>,
    opts: SolveOptions,
    stats: SolverStats,
}

enum Outcome {
    Sat,
    Unsat(Option<Chain>, Option<usize>),
    Budget,
}

impl Solver {
    /// Solver over `f` with each assumption added as a unit input clause.
    pub fn new(f: &Cnf, assumptions: &[Lit], opts: SolveOptions) -> Self {
        let n = f.var_count();
        let mut inputs = f.clauses().to_vec();
        for &a in assumptions {
            assert!(a.var().index() <= n, "assumption over unknown variable");
            inputs.push(Clause::new(vec![a]).unwrap());
        }
        let db = inputs.iter().map(|c| c.lits().to_vec()).collect();
        Solver {
            num_vars: n,
            inputs,
            db,
            chains: Vec::new(),
            watches: vec![Vec::new(); 2 * (n + 1)],
            value: vec![UNDEF; n + 1],
            level: vec![0; n + 1],
            reason: vec![None; n + 1],
            saved: vec![None; n + 1],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n + 1],
            var_inc: 1.0,
            heap: (1..=n as u32).map(|v| (Activity(0.0), Reverse(v))).collect(),
            seen: vec![false; n + 1],
            opts,
            stats: SolverStats::default(),
        }
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.value[l.var().index()];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ l.is_negated() as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var().index();
        debug_assert_eq!(self.value[v], UNDEF);
        self.value[v] = !l.is_negated() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn watch(&mut self, cid: usize) {
        let c = &self.db[cid];
        self.watches[c[0].code()].push(cid);
        self.watches[c[1].code()].push(cid);
    }

    /// Returns a conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cid = ws[i];
                i += 1;
                {
                    let c = &mut self.db[cid];
                    if c[0] == false_lit {
                        c.swap(0, 1);
                    }
                }
                let first = self.db[cid][0];
                if self.lit_value(first) == 1 {
                    ws[j] = cid;
                    j += 1;
                    continue;
                }
                let len = self.db[cid].len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.db[cid][k];
                    if self.lit_value(l) != 0 {
                        self.db[cid].swap(1, k);
                        self.watches[l.code()].push(cid);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = cid;
                j += 1;
                if self.lit_value(first) == 0 {
                    conflict = Some(cid);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(cid));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: Var) {
        let i = v.index();
        self.activity[i] += self.var_inc;
        if self.activity[i] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
            self.heap = (1..=self.num_vars as u32)
                .filter(|&v| self.value[v as usize] == UNDEF)
                .map(|v| (Activity(self.activity[v as usize]), Reverse(v)))
                .collect();
        }
        if self.value[i] == UNDEF {
            self.heap.push((Activity(self.activity[i]), Reverse(v.0)));
        }
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var().index();
            self.saved[v] = Some(!l.is_negated());
            self.value[v] = UNDEF;
            self.reason[v] = None;
            self.heap.push((Activity(self.activity[v]), Reverse(v as u32)));
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Var> {
        while let Some((act, Reverse(v))) = self.heap.pop() {
            let i = v as usize;
            if self.value[i] == UNDEF && act.0 == self.activity[i] {
                return Some(Var(v));
            }
        }
        None
    }

    /// First-UIP analysis. Returns the learned literals (asserting literal
    /// first, highest remaining level second) and the resolution chain.
    fn analyze(&mut self, confl: usize) -> (Vec<Lit>, Chain) {
        let cur = self.decision_level();
        let mut out = vec![Lit::new(Var(1), false)];
        let mut chain = Chain {
            start: confl,
            links: Vec::new(),
        };
        let mut counter = 0usize;
        let mut clause = confl;
        let mut resolved: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            for k in 0..self.db[clause].len() {
                let q = self.db[clause][k];
                if Some(q) == resolved {
                    continue;
                }
                let v = q.var();
                if !self.seen[v.index()] {
                    self.seen[v.index()] = true;
                    self.bump(v);
                    if self.level[v.index()] == cur {
                        counter += 1;
                    } else {
                        out.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var().index()] = false;
            counter -= 1;
            if counter == 0 {
                out[0] = !p;
                break;
            }
            clause = self.reason[p.var().index()].expect("implied literal without reason");
            chain.links.push((p.var(), clause));
            resolved = Some(p);
        }
        for l in &out[1..] {
            self.seen[l.var().index()] = false;
        }
        if out.len() > 1 {
            let (best, _) = out[1..]
                .iter()
                .enumerate()
                .max_by_key(|(i, l)| (self.level[l.var().index()], Reverse(*i)))
                .unwrap();
            out.swap(1, best + 1);
        }
        (out, chain)
    }

    /// Resolves a level-0 conflict down to the empty clause.
    fn analyze_final(&mut self, confl: usize) -> Chain {
        let mut chain = Chain {
            start: confl,
            links: Vec::new(),
        };
        let mut count = 0;
        for k in 0..self.db[confl].len() {
            let v = self.db[confl][k].var().index();
            if !self.seen[v] {
                self.seen[v] = true;
                count += 1;
            }
        }
        let mut idx = self.trail.len();
        while count > 0 {
            idx -= 1;
            let p = self.trail[idx];
            let v = p.var().index();
            if !self.seen[v] {
                continue;
            }
            self.seen[v] = false;
            count -= 1;
            let r = self.reason[v].expect("level-0 literal without reason");
            chain.links.push((p.var(), r));
            for k in 0..self.db[r].len() {
                let u = self.db[r][k].var().index();
                if u != v && !self.seen[u] {
                    self.seen[u] = true;
                    count += 1;
                }
            }
        }
        chain
    }

    fn budget_exhausted(&self) -> bool {
        if let Some(max) = self.opts.max_conflicts {
            if self.stats.conflicts >= max {
                return true;
            }
        }
        if let Some(deadline) = self.opts.deadline {
            if self.stats.conflicts.is_multiple_of(64) && Instant::now() >= deadline {
                return true;
            }
        }
        false
    }

    fn luby(mut i: u64) -> u64 {
        // i-th element (0-based) of the Luby sequence
        let mut size = 1u64;
        let mut seq = 0u32;
        while size < i + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        while size - 1 != i {
            size = (size - 1) >> 1;
            seq -= 1;
            i %= size;
        }
        1 << seq
    }

    fn search(&mut self, policy: &mut dyn PhasePolicy) -> Outcome {
        for cid in 0..self.db.len() {
            match self.db[cid].len() {
                0 => return Outcome::Unsat(None, Some(cid)),
                1 => {
                    let l = self.db[cid][0];
                    match self.lit_value(l) {
                        UNDEF => self.enqueue(l, Some(cid)),
                        0 => {
                            let chain = self.opts.proof.then(|| self.analyze_final(cid));
                            return Outcome::Unsat(chain, None);
                        }
                        _ => {}
                    }
                }
                _ => self.watch(cid),
            }
        }

        let mut restart_budget = 100 * Self::luby(0);
        let mut since_restart = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                since_restart += 1;
                let max_level = self.db[confl]
                    .iter()
                    .map(|l| self.level[l.var().index()])
                    .max()
                    .unwrap_or(0);
                if max_level == 0 {
                    let chain = self.opts.proof.then(|| self.analyze_final(confl));
                    return Outcome::Unsat(chain, None);
                }
                self.backtrack(max_level);
                let (learnt, chain) = self.analyze(confl);
                let bt = if learnt.len() > 1 {
                    self.level[learnt[1].var().index()]
                } else {
                    0
                };
                self.backtrack(bt);
                let cid = self.db.len();
                if self.opts.proof {
                    self.chains.push(chain);
                } else {
                    self.chains.push(Chain {
                        start: confl,
                        links: Vec::new(),
                    });
                }
                let asserting = learnt[0];
                self.db.push(learnt);
                if self.db[cid].len() > 1 {
                    self.watch(cid);
                }
                self.enqueue(asserting, Some(cid));
                self.var_inc /= 0.95;
                if self.budget_exhausted() {
                    return Outcome::Budget;
                }
            } else {
                if since_restart >= restart_budget {
                    self.stats.restarts += 1;
                    since_restart = 0;
                    restart_budget = 100 * Self::luby(self.stats.restarts);
                    self.backtrack(0);
                    continue;
                }
                let Some(v) = self.pick_branch() else {
                    return Outcome::Sat;
                };
                self.stats.decisions += 1;
                if self.stats.decisions.is_multiple_of(1024) {
                    if let Some(deadline) = self.opts.deadline {
                        if Instant::now() >= deadline {
                            return Outcome::Budget;
                        }
                    }
                }
                let phase = policy.decide(v, self.saved[v.index()]);
                self.trail_lim.push(self.trail.len());
                self.enqueue(Lit::new(v, !phase), None);
            }
        }
    }

    pub fn solve(&mut self, policy: &mut dyn PhasePolicy) -> SatResult {
        match self.search(policy) {
            Outcome::Sat => {
                let p = Point::from_values((1..=self.num_vars).map(|v| self.value[v] == 1));
                for c in &self.inputs {
                    assert!(p.satisfies(c), "solver returned a non-model");
                }
                SatResult::Sat(p)
            }
            Outcome::Budget => SatResult::BudgetExceeded,
            Outcome::Unsat(chain, empty_input) => {
                if !self.opts.proof {
                    return SatResult::Unsat(None);
                }
                let proof = match empty_input {
                    Some(i) => ResolutionProof {
                        input_clauses: self.inputs.clone(),
                        steps: Vec::new(),
                        conclusion: ParentRef::Input(i),
                    },
                    None => self.build_proof(chain.expect("proof logging enabled")),
                };
                SatResult::Unsat(Some(proof))
            }
        }
    }

    fn build_proof(&self, final_chain: Chain) -> ResolutionProof {
        let n_in = self.inputs.len();
        let mut needed = vec![!self.opts.trim; self.chains.len()];
        if self.opts.trim {
            let mut stack = vec![&final_chain];
            while let Some(ch) = stack.pop() {
                for cid in std::iter::once(ch.start).chain(ch.links.iter().map(|l| l.1)) {
                    if cid >= n_in && !needed[cid - n_in] {
                        needed[cid - n_in] = true;
                        stack.push(&self.chains[cid - n_in]);
                    }
                }
            }
        }
        let mut proof = ResolutionProof {
            input_clauses: self.inputs.clone(),
            steps: Vec::new(),
            conclusion: ParentRef::Input(0),
        };
        let mut learned_ref: Vec<Option<ParentRef>> = vec![None; self.chains.len()];
        for k in 0..self.chains.len() {
            if needed[k] {
                let r = Self::emit_chain(&mut proof, &self.chains[k], &learned_ref, n_in);
                debug_assert_eq!(
                    proof.clause(r),
                    &Clause::new(self.db[n_in + k].clone()).unwrap(),
                    "chain does not derive the learned clause"
                );
                learned_ref[k] = Some(r);
            }
        }
        let r = Self::emit_chain(&mut proof, &final_chain, &learned_ref, n_in);
        debug_assert!(proof.clause(r).is_empty());
        proof.conclusion = r;
        proof
    }

    fn emit_chain(
        proof: &mut ResolutionProof,
        chain: &Chain,
        learned_ref: &[Option<ParentRef>],
        n_in: usize,
    ) -> ParentRef {
        let ref_of = |cid: usize| {
            if cid < n_in {
                ParentRef::Input(cid)
            } else {
                learned_ref[cid - n_in].expect("learned clause used before derivation")
            }
        };
        let mut cur = ref_of(chain.start);
        for &(pivot, ante) in &chain.links {
            let other = ref_of(ante);
            let resolvent = proof
                .clause(cur)
                .resolve(proof.clause(other), pivot)
                .expect("conflict analysis produced an invalid resolution");
            proof.steps.push(ResolutionStep {
                resolvent,
                pivot,
                parents: [cur, other],
            });
            cur = ParentRef::Step(proof.steps.len() - 1);
        }
        cur
    }
}

/// Solves `f` under `assumptions` with proof logging and trimming enabled.
pub fn solve(f: &Cnf, assumptions: &[Lit], policy: &mut dyn PhasePolicy) -> SatResult {
    Solver::new(f, assumptions, SolveOptions::with_proof()).solve(policy)
}

pub fn solve_with(f: &Cnf, assumptions: &[Lit], policy: &mut dyn PhasePolicy, opts: SolveOptions) -> SatResult {
    Solver::new(f, assumptions, opts).solve(policy)
}
