//! Tseitin encoding of the transition relation and the bad-state predicate.
//!
//! Present-state bits fixed to constants are substituted at clause level:
//! clauses satisfied by a constant are dropped and falsified literals are
//! removed. Gate variables are kept even when their value is implied, so
//! unsatisfiability proofs still resolve through the circuit structure.

use crate::aiger::{lit_is_negated, lit_var, AigLit, AigModel};
use crate::bits::{InputVector, State};
use crate::cnf::{Clause, Cnf, Lit, Point, Var, VarRole};

/// Value of an AIGER literal inside an encoding: a constant or a CNF literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signal {
    Const(bool),
    Lit(Lit),
}

impl std::ops::Not for Signal {
    type Output = Signal;

    fn not(self) -> Signal {
        match self {
            Signal::Const(b) => Signal::Const(!b),
            Signal::Lit(l) => Signal::Lit(!l),
        }
    }
}

impl Signal {
    pub fn eval(self, p: &Point) -> bool {
        match self {
            Signal::Const(b) => b,
            Signal::Lit(l) => p.lit_value(l),
        }
    }
}

/// CNF variable standing for an and-gate output in some time frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateVar {
    pub var: Var,
    pub aig_var: u32,
    pub frame: usize,
}

/// Correspondence between circuit signals and CNF variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarMap {
    /// Present-state variable per latch; `None` when substituted by a constant.
    pub present: Vec<Option<Var>>,
    /// Next-state variable per latch (`S'`), when encoded.
    pub next: Vec<Option<Var>>,
    /// Input variables per time frame; `None` for inputs outside the encoded cone.
    pub inputs: Vec<Vec<Option<Var>>>,
    pub gates: Vec<GateVar>,
}

impl VarMap {
    pub fn is_present_state(&self, v: Var) -> Option<usize> {
        self.present.iter().position(|&p| p == Some(v))
    }

    /// Input assignment of `frame` read from `p`; inputs without a variable read as 0.
    pub fn decode_inputs(&self, p: &Point, frame: usize) -> InputVector {
        let vars = &self.inputs[frame];
        InputVector::from_bools(vars.iter().map(|v| v.is_some_and(|v| p.value(v))))
    }

    /// Present state read from `p`; substituted bits are taken from `curr`.
    pub fn decode_present(&self, p: &Point, curr: &State) -> State {
        State::from_bools(
            self.present
                .iter()
                .enumerate()
                .map(|(i, v)| v.map_or(curr.get(i), |v| p.value(v))),
        )
    }

    /// Next state read from `p`. All next-state bits must be encoded.
    pub fn decode_next(&self, p: &Point) -> State {
        State::from_bools(self.next.iter().map(|v| p.value(v.expect("next-state bit not encoded"))))
    }
}

/// Projection of a satisfying point onto `S'` and the transition inputs `X`.
pub fn decode_model(p: &Point, vm: &VarMap) -> (State, InputVector) {
    (vm.decode_next(p), vm.decode_inputs(p, 0))
}

/// Incremental builder for circuit encodings.
pub struct Encoder<'m> {
    model: &'m AigModel,
    cnf: Cnf,
    vm: VarMap,
}

impl<'m> Encoder<'m> {
    pub fn new(model: &'m AigModel) -> Self {
        let n = model.num_latches();
        Encoder {
            model,
            cnf: Cnf::new(),
            vm: VarMap {
                present: vec![None; n],
                next: vec![None; n],
                inputs: Vec::new(),
                gates: Vec::new(),
            },
        }
    }

    pub fn constant_state(&self, s: &State) -> Vec<Signal> {
        assert_eq!(s.len(), self.model.num_latches(), "state width mismatch");
        s.iter().map(Signal::Const).collect()
    }

    /// Fresh present-state variables, one per latch.
    pub fn symbolic_state(&mut self) -> Vec<Signal> {
        (0..self.model.num_latches())
            .map(|i| {
                let v = self.cnf.new_var(VarRole::PresentState(i));
                self.vm.present[i] = Some(v);
                Signal::Lit(v.pos())
            })
            .collect()
    }

    /// Adds the clause `OR sigs` after constant substitution.
    pub fn add_clause(&mut self, sigs: &[Signal]) {
        let mut lits = Vec::with_capacity(sigs.len());
        for s in sigs {
            match *s {
                Signal::Const(true) => return,
                Signal::Const(false) => {}
                Signal::Lit(l) => lits.push(l),
            }
        }
        // tautologies carry no information
        if let Ok(c) = Clause::new(lits) {
            self.cnf.add_clause(c);
        }
    }

    pub fn assert(&mut self, sig: Signal) {
        self.add_clause(&[sig]);
    }

    /// Encodes one copy of the combinational logic with latch outputs bound
    /// to `latch`, returning the values of `roots`. Only the cone of
    /// influence of `roots` is encoded; inputs in the cone get fresh
    /// variables for time frame `frame`.
    pub fn frame(&mut self, latch: &[Signal], frame: usize, roots: &[AigLit]) -> Vec<Signal> {
        let m = self.model;
        assert_eq!(latch.len(), m.num_latches());
        let mut needed = vec![false; m.max_var as usize + 1];
        for &r in roots {
            needed[lit_var(r) as usize] = true;
        }
        for g in m.ands.iter().rev() {
            if needed[lit_var(g.lhs) as usize] {
                needed[lit_var(g.rhs0) as usize] = true;
                needed[lit_var(g.rhs1) as usize] = true;
            }
        }

        let mut sig: Vec<Option<Signal>> = vec![None; m.max_var as usize + 1];
        sig[0] = Some(Signal::Const(false));
        if self.vm.inputs.len() <= frame {
            self.vm.inputs.resize(frame + 1, vec![None; m.num_inputs()]);
        }
        for (i, &lit) in m.inputs.iter().enumerate() {
            let v = lit_var(lit) as usize;
            if needed[v] {
                let var = self.cnf.new_var(VarRole::Input { index: i, frame });
                self.vm.inputs[frame][i] = Some(var);
                sig[v] = Some(Signal::Lit(var.pos()));
            }
        }
        for (i, l) in m.latches.iter().enumerate() {
            sig[lit_var(l.lit) as usize] = Some(latch[i]);
        }
        let value = |sig: &[Option<Signal>], lit: AigLit| {
            let s = sig[lit_var(lit) as usize].expect("signal used before definition");
            if lit_is_negated(lit) {
                !s
            } else {
                s
            }
        };
        for g in &m.ands {
            let v = lit_var(g.lhs);
            if !needed[v as usize] {
                continue;
            }
            let a = value(&sig, g.rhs0);
            let b = value(&sig, g.rhs1);
            let z = self.cnf.new_var(VarRole::Internal);
            self.vm.gates.push(GateVar {
                var: z,
                aig_var: v,
                frame,
            });
            let zs = Signal::Lit(z.pos());
            self.add_clause(&[!zs, a]);
            self.add_clause(&[!zs, b]);
            self.add_clause(&[zs, !a, !b]);
            sig[v as usize] = Some(zs);
        }
        roots.iter().map(|&r| value(&sig, r)).collect()
    }

    /// Fresh next-state variables `S'`, each constrained equal to `sigs[i]`.
    pub fn next_state_vars(&mut self, sigs: &[Signal]) -> Vec<Signal> {
        sigs.iter()
            .enumerate()
            .map(|(i, &s)| {
                let v = self.cnf.new_var(VarRole::NextState(i));
                self.vm.next[i] = Some(v);
                let vs = Signal::Lit(v.pos());
                self.add_clause(&[!vs, s]);
                self.add_clause(&[vs, !s]);
                vs
            })
            .collect()
    }

    pub fn next_literals(&self) -> Vec<AigLit> {
        self.model.latches.iter().map(|l| l.next).collect()
    }

    pub fn finish(self) -> (Cnf, VarMap) {
        (self.cnf, self.vm)
    }
}

/// Formula that is satisfiable iff some successor of `s` is bad:
/// `T(s, S', X) /\ bad(S', X2)` with `s` substituted. Inputs of the bad
/// check are a fresh copy (`vm.inputs[1]`).
pub fn encode_step_formula(m: &AigModel, s: &State) -> (Cnf, VarMap) {
    let mut enc = Encoder::new(m);
    let present = enc.constant_state(s);
    let nexts = enc.next_literals();
    let next_sigs = enc.frame(&present, 0, &nexts);
    let next_vars = enc.next_state_vars(&next_sigs);
    let bad = enc.frame(&next_vars, 1, &[m.bad()])[0];
    enc.assert(bad);
    enc.finish()
}

/// Formula that is satisfiable iff `bad(s, X)` holds for some input.
pub fn encode_bad_check(m: &AigModel, s: &State) -> (Cnf, VarMap) {
    let mut enc = Encoder::new(m);
    let present = enc.constant_state(s);
    let bad = enc.frame(&present, 0, &[m.bad()])[0];
    enc.assert(bad);
    let (cnf, mut vm) = enc.finish();
    if vm.inputs.is_empty() {
        vm.inputs.push(vec![None; m.num_inputs()]);
    }
    (cnf, vm)
}

/// `T(s, S', X)` with `s` substituted, for successor enumeration.
pub fn encode_transition(m: &AigModel, s: &State) -> (Cnf, VarMap) {
    let mut enc = Encoder::new(m);
    let present = enc.constant_state(s);
    let nexts = enc.next_literals();
    let next_sigs = enc.frame(&present, 0, &nexts);
    enc.next_state_vars(&next_sigs);
    let (cnf, mut vm) = enc.finish();
    if vm.inputs.is_empty() {
        vm.inputs.push(vec![None; m.num_inputs()]);
    }
    (cnf, vm)
}

/// `T(S, S', X)` with symbolic present state and no property.
pub fn encode_symbolic_transition(m: &AigModel) -> (Cnf, VarMap) {
    let mut enc = Encoder::new(m);
    let present = enc.symbolic_state();
    let nexts = enc.next_literals();
    let next_sigs = enc.frame(&present, 0, &nexts);
    enc.next_state_vars(&next_sigs);
    let (cnf, mut vm) = enc.finish();
    if vm.inputs.is_empty() {
        vm.inputs.push(vec![None; m.num_inputs()]);
    }
    (cnf, vm)
}

/// Unrolling of `depth` transitions from `init` with the bad literal
/// asserted in the last frame. Inputs of frame `k` are `vm.inputs[k]`.
pub fn encode_unrolling(m: &AigModel, init: &State, depth: usize) -> (Cnf, VarMap) {
    let mut enc = Encoder::new(m);
    let mut latch = enc.constant_state(init);
    let nexts = enc.next_literals();
    for k in 0..depth {
        latch = enc.frame(&latch, k, &nexts);
    }
    let bad = enc.frame(&latch, depth, &[m.bad()])[0];
    enc.assert(bad);
    let (cnf, mut vm) = enc.finish();
    if vm.inputs.len() <= depth {
        vm.inputs.resize(depth + 1, vec![None; m.num_inputs()]);
    }
    (cnf, vm)
}
