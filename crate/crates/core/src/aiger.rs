//! AIGER reader/writer and the and-inverter-graph model with two-valued
//! simulation.
//!
//! Both the ASCII (`aag`) and binary (`aig`) flavours of AIGER 1.0 and 1.9
//! are accepted. Symbol tables and comments are skipped. Justice, fairness
//! and invariant-constraint sections are rejected.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::{InputVector, State};

/// AIGER literal: `2 * var + negated`. `0` is constant false, `1` constant true.
pub type AigLit = u32;

#[inline]
pub fn lit_var(lit: AigLit) -> u32 {
    lit >> 1
}

#[inline]
pub fn lit_is_negated(lit: AigLit) -> bool {
    lit & 1 == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AigerErrorKind {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported section: {0}")]
    UnsupportedSection(&'static str),
    #[error("literal {lit} exceeds maximum {max}")]
    LiteralOutOfRange { lit: u64, max: u64 },
    #[error("invalid definition: {0}")]
    InvalidDefinition(String),
    #[error("non-monotone delta encoding in binary and-gate section")]
    NonMonotoneDelta,
    #[error("unexpected end of file")]
    UnexpectedEof,
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("model has neither outputs nor bad-state properties")]
    NoProperty,
    #[error("combinational cycle through variable {0}")]
    Cycle(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} (at byte {offset})")]
pub struct AigerError {
    pub offset: usize,
    pub kind: AigerErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("latch {0} has an uninitialized reset value")]
    UninitializedLatch(usize),
    #[error("property index {index} out of range ({available} available)")]
    PropertyOutOfRange { index: usize, available: usize },
    #[error("model cannot be written in binary AIGER without renumbering: {0}")]
    NotCanonical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reset {
    Zero,
    One,
    /// AIGER 1.9 reset equal to the latch literal itself.
    Uninitialized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Latch {
    pub lit: AigLit,
    pub next: AigLit,
    pub reset: Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AndGate {
    pub lhs: AigLit,
    pub rhs0: AigLit,
    pub rhs1: AigLit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Const,
    Input(usize),
    Latch(usize),
    And(usize),
    Unused,
}

/// Parsed and-inverter graph. And gates are stored in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AigModel {
    pub max_var: u32,
    pub inputs: Vec<AigLit>,
    pub latches: Vec<Latch>,
    pub ands: Vec<AndGate>,
    pub outputs: Vec<AigLit>,
    pub bads: Vec<AigLit>,
    property: usize,
    bad: AigLit,
    kinds: Vec<VarKind>,
}

impl AigModel {
    /// Builds and validates a model from its sections. And gates may come in
    /// any order; they are sorted topologically (stable for already sorted input).
    pub fn new(
        max_var: u32,
        inputs: Vec<AigLit>,
        latches: Vec<Latch>,
        ands: Vec<AndGate>,
        outputs: Vec<AigLit>,
        bads: Vec<AigLit>,
    ) -> Result<Self, AigerErrorKind> {
        if outputs.is_empty() && bads.is_empty() {
            return Err(AigerErrorKind::NoProperty);
        }
        let max_lit = 2 * max_var as u64 + 1;
        let check = |lit: AigLit| {
            if lit as u64 > max_lit {
                Err(AigerErrorKind::LiteralOutOfRange {
                    lit: lit as u64,
                    max: max_lit,
                })
            } else {
                Ok(())
            }
        };
        let mut kinds = vec![VarKind::Unused; max_var as usize + 1];
        kinds[0] = VarKind::Const;
        let mut define = |lit: AigLit, kind: VarKind, what: &str| {
            check(lit)?;
            if lit < 2 || lit_is_negated(lit) {
                return Err(AigerErrorKind::InvalidDefinition(format!(
                    "{what} literal {lit} must be even and non-constant"
                )));
            }
            let slot = &mut kinds[lit_var(lit) as usize];
            if *slot != VarKind::Unused {
                return Err(AigerErrorKind::InvalidDefinition(format!(
                    "variable {} defined twice",
                    lit_var(lit)
                )));
            }
            *slot = kind;
            Ok(())
        };
        for (i, &lit) in inputs.iter().enumerate() {
            define(lit, VarKind::Input(i), "input")?;
        }
        for (i, l) in latches.iter().enumerate() {
            define(l.lit, VarKind::Latch(i), "latch")?;
        }
        for (i, g) in ands.iter().enumerate() {
            define(g.lhs, VarKind::And(i), "and-gate")?;
        }
        let used = latches
            .iter()
            .map(|l| l.next)
            .chain(ands.iter().flat_map(|g| [g.rhs0, g.rhs1]))
            .chain(outputs.iter().copied())
            .chain(bads.iter().copied());
        for lit in used {
            check(lit)?;
            if kinds[lit_var(lit) as usize] == VarKind::Unused {
                return Err(AigerErrorKind::InvalidDefinition(format!(
                    "literal {lit} uses undefined variable {}",
                    lit_var(lit)
                )));
            }
        }

        let order = topo_order(&ands, &kinds)?;
        let ands: Vec<AndGate> = order.into_iter().map(|i| ands[i]).collect();
        for (i, g) in ands.iter().enumerate() {
            kinds[lit_var(g.lhs) as usize] = VarKind::And(i);
        }

        let bad = bads.first().or(outputs.first()).copied().unwrap();
        Ok(AigModel {
            max_var,
            inputs,
            latches,
            ands,
            outputs,
            bads,
            property: 0,
            bad,
            kinds,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_latches(&self) -> usize {
        self.latches.len()
    }

    /// The selected bad literal.
    pub fn bad(&self) -> AigLit {
        self.bad
    }

    pub fn property_index(&self) -> usize {
        self.property
    }

    /// Number of selectable properties (bad-state declarations, else outputs).
    pub fn num_properties(&self) -> usize {
        if self.bads.is_empty() {
            self.outputs.len()
        } else {
            self.bads.len()
        }
    }

    /// Selects which bad-state declaration (or output, for AIGER 1.0 files) is checked.
    pub fn select_property(&mut self, index: usize) -> Result<(), ModelError> {
        let list = if self.bads.is_empty() {
            &self.outputs
        } else {
            &self.bads
        };
        let lit = *list.get(index).ok_or(ModelError::PropertyOutOfRange {
            index,
            available: list.len(),
        })?;
        self.property = index;
        self.bad = lit;
        Ok(())
    }

    pub fn var_kind(&self, var: u32) -> VarKind {
        self.kinds[var as usize]
    }

    /// The single reset state. Uninitialized latches are rejected.
    pub fn initial_state(&self) -> Result<State, ModelError> {
        let mut s = State::zeros(self.latches.len());
        for (i, l) in self.latches.iter().enumerate() {
            match l.reset {
                Reset::Zero => {}
                Reset::One => s.set(i, true),
                Reset::Uninitialized => return Err(ModelError::UninitializedLatch(i)),
            }
        }
        Ok(s)
    }

    /// Values of every variable under `(s, x)`, indexed by variable.
    pub fn evaluate(&self, s: &State, x: &InputVector) -> Vec<bool> {
        assert_eq!(s.len(), self.latches.len(), "state width mismatch");
        assert_eq!(x.len(), self.inputs.len(), "input width mismatch");
        let mut values = vec![false; self.max_var as usize + 1];
        for (i, &lit) in self.inputs.iter().enumerate() {
            values[lit_var(lit) as usize] = x.get(i);
        }
        for (i, l) in self.latches.iter().enumerate() {
            values[lit_var(l.lit) as usize] = s.get(i);
        }
        for g in &self.ands {
            values[lit_var(g.lhs) as usize] =
                lit_value(&values, g.rhs0) && lit_value(&values, g.rhs1);
        }
        values
    }

    pub fn simulate_step(&self, s: &State, x: &InputVector) -> State {
        let values = self.evaluate(s, x);
        self.next_state_from(&values)
    }

    pub fn eval_bad(&self, s: &State, x: &InputVector) -> bool {
        let values = self.evaluate(s, x);
        lit_value(&values, self.bad)
    }

    /// Next state and bad value in one evaluation.
    pub fn step_and_bad(&self, s: &State, x: &InputVector) -> (State, bool) {
        let values = self.evaluate(s, x);
        (self.next_state_from(&values), lit_value(&values, self.bad))
    }

    fn next_state_from(&self, values: &[bool]) -> State {
        State::from_bools(self.latches.iter().map(|l| lit_value(values, l.next)))
    }

    /// ASCII AIGER rendering. Uses the 1.9 header when bad-state properties exist.
    pub fn to_ascii(&self) -> String {
        let mut out = String::new();
        write!(
            out,
            "aag {} {} {} {} {}",
            self.max_var,
            self.inputs.len(),
            self.latches.len(),
            self.outputs.len(),
            self.ands.len()
        )
        .unwrap();
        if !self.bads.is_empty() {
            write!(out, " {}", self.bads.len()).unwrap();
        }
        out.push('\n');
        for lit in &self.inputs {
            writeln!(out, "{lit}").unwrap();
        }
        for l in &self.latches {
            match l.reset {
                Reset::Zero => writeln!(out, "{} {}", l.lit, l.next),
                Reset::One => writeln!(out, "{} {} 1", l.lit, l.next),
                Reset::Uninitialized => writeln!(out, "{} {} {}", l.lit, l.next, l.lit),
            }
            .unwrap();
        }
        for lit in self.outputs.iter().chain(&self.bads) {
            writeln!(out, "{lit}").unwrap();
        }
        for g in &self.ands {
            writeln!(out, "{} {} {}", g.lhs, g.rhs0, g.rhs1).unwrap();
        }
        out
    }

    /// Binary AIGER rendering. Requires canonical numbering (inputs, then
    /// latches, then gates with `lhs > rhs0 >= rhs1`).
    pub fn to_binary(&self) -> Result<Vec<u8>, ModelError> {
        let ni = self.inputs.len() as u32;
        let nl = self.latches.len() as u32;
        let na = self.ands.len() as u32;
        if self.max_var != ni + nl + na {
            return Err(ModelError::NotCanonical("M != I + L + A".into()));
        }
        for (i, &lit) in self.inputs.iter().enumerate() {
            if lit != 2 * (i as u32 + 1) {
                return Err(ModelError::NotCanonical(format!("input {i}")));
            }
        }
        for (i, l) in self.latches.iter().enumerate() {
            if l.lit != 2 * (ni + i as u32 + 1) {
                return Err(ModelError::NotCanonical(format!("latch {i}")));
            }
        }
        let mut out = Vec::new();
        let mut header = format!("aig {} {} {} {} {}", self.max_var, ni, nl, self.outputs.len(), na);
        if !self.bads.is_empty() {
            write!(header, " {}", self.bads.len()).unwrap();
        }
        header.push('\n');
        for l in &self.latches {
            match l.reset {
                Reset::Zero => writeln!(header, "{}", l.next),
                Reset::One => writeln!(header, "{} 1", l.next),
                Reset::Uninitialized => writeln!(header, "{} {}", l.next, l.lit),
            }
            .unwrap();
        }
        for lit in self.outputs.iter().chain(&self.bads) {
            writeln!(header, "{lit}").unwrap();
        }
        out.extend_from_slice(header.as_bytes());
        for (i, g) in self.ands.iter().enumerate() {
            let lhs = 2 * (ni + nl + i as u32 + 1);
            if g.lhs != lhs || g.rhs0 >= lhs || g.rhs1 > g.rhs0 {
                return Err(ModelError::NotCanonical(format!("and gate {i}")));
            }
            encode_varint(&mut out, lhs - g.rhs0);
            encode_varint(&mut out, g.rhs0 - g.rhs1);
        }
        Ok(out)
    }
}

#[inline]
pub fn lit_value(values: &[bool], lit: AigLit) -> bool {
    values[lit_var(lit) as usize] ^ lit_is_negated(lit)
}

fn encode_varint(out: &mut Vec<u8>, mut x: u32) {
    while x & !0x7f != 0 {
        out.push((x & 0x7f) as u8 | 0x80);
        x >>= 7;
    }
    out.push(x as u8);
}

/// Gate indices in dependency order. Iterative DFS so deep graphs do not
/// overflow the stack; postorder is identity when gates are already sorted.
fn topo_order(ands: &[AndGate], kinds: &[VarKind]) -> Result<Vec<usize>, AigerErrorKind> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; ands.len()];
    let mut order = Vec::with_capacity(ands.len());
    let gate_of = |lit: AigLit| match kinds[lit_var(lit) as usize] {
        VarKind::And(i) => Some(i),
        _ => None,
    };
    let mut stack: Vec<(usize, u8)> = Vec::new();
    for root in 0..ands.len() {
        if mark[root] != Mark::New {
            continue;
        }
        stack.push((root, 0));
        mark[root] = Mark::Active;
        while let Some(&mut (g, ref mut child)) = stack.last_mut() {
            if *child < 2 {
                let lit = if *child == 0 { ands[g].rhs0 } else { ands[g].rhs1 };
                *child += 1;
                if let Some(dep) = gate_of(lit) {
                    match mark[dep] {
                        Mark::New => {
                            mark[dep] = Mark::Active;
                            stack.push((dep, 0));
                        }
                        Mark::Active => return Err(AigerErrorKind::Cycle(lit_var(ands[dep].lhs))),
                        Mark::Done => {}
                    }
                }
            } else {
                mark[g] = Mark::Done;
                order.push(g);
                stack.pop();
            }
        }
    }
    Ok(order)
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, kind: AigerErrorKind) -> AigerError {
        AigerError {
            offset: self.pos,
            kind,
        }
    }

    /// Next `\n`-terminated line (without the terminator) and its start offset.
    fn line(&mut self) -> Result<(usize, &'a str), AigerError> {
        if self.pos >= self.data.len() {
            return Err(self.err(AigerErrorKind::UnexpectedEof));
        }
        let start = self.pos;
        let end = self.data[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(self.data.len(), |p| start + p);
        self.pos = (end + 1).min(self.data.len());
        let text = std::str::from_utf8(&self.data[start..end]).map_err(|_| AigerError {
            offset: start,
            kind: AigerErrorKind::Syntax("non-ASCII bytes".into()),
        })?;
        Ok((start, text.strip_suffix('\r').unwrap_or(text)))
    }

    fn numbers(&mut self, min: usize, max: usize) -> Result<(usize, Vec<u32>), AigerError> {
        let (offset, text) = self.line()?;
        let nums = parse_numbers(text).map_err(|kind| AigerError { offset, kind })?;
        if nums.len() < min || nums.len() > max {
            return Err(AigerError {
                offset,
                kind: AigerErrorKind::Syntax(format!(
                    "expected {min}..={max} numbers, found {}",
                    nums.len()
                )),
            });
        }
        Ok((offset, nums))
    }

    fn varint(&mut self) -> Result<u32, AigerError> {
        let mut x: u64 = 0;
        let mut shift = 0;
        loop {
            let Some(&b) = self.data.get(self.pos) else {
                return Err(self.err(AigerErrorKind::UnexpectedEof));
            };
            self.pos += 1;
            x |= ((b & 0x7f) as u64) << shift;
            if x > u32::MAX as u64 {
                return Err(self.err(AigerErrorKind::Syntax("delta overflow".into())));
            }
            if b & 0x80 == 0 {
                return Ok(x as u32);
            }
            shift += 7;
            if shift > 35 {
                return Err(self.err(AigerErrorKind::Syntax("delta overflow".into())));
            }
        }
    }
}

fn parse_numbers(text: &str) -> Result<Vec<u32>, AigerErrorKind> {
    text.split(' ')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| AigerErrorKind::Syntax(format!("expected unsigned integer, found {t:?}")))
        })
        .collect()
}

struct Header {
    binary: bool,
    m: u32,
    i: u32,
    l: u32,
    o: u32,
    a: u32,
    b: u32,
}

fn parse_header(r: &mut Reader) -> Result<Header, AigerError> {
    let (offset, text) = r.line()?;
    let bad = |msg: String| AigerError {
        offset,
        kind: AigerErrorKind::MalformedHeader(msg),
    };
    let mut parts = text.split(' ').filter(|t| !t.is_empty());
    let binary = match parts.next() {
        Some("aag") => false,
        Some("aig") => true,
        other => return Err(bad(format!("expected 'aag' or 'aig', found {other:?}"))),
    };
    let nums: Vec<u32> = parts
        .map(|t| t.parse::<u32>().map_err(|_| bad(format!("bad count {t:?}"))))
        .collect::<Result<_, _>>()?;
    if nums.len() < 5 || nums.len() > 9 {
        return Err(bad(format!("expected 5 to 9 counts, found {}", nums.len())));
    }
    let get = |i: usize| nums.get(i).copied().unwrap_or(0);
    for (idx, name) in [(6, "invariant constraints"), (7, "justice properties"), (8, "fairness constraints")] {
        if get(idx) > 0 {
            return Err(AigerError {
                offset,
                kind: AigerErrorKind::UnsupportedSection(name),
            });
        }
    }
    let h = Header {
        binary,
        m: get(0),
        i: get(1),
        l: get(2),
        o: get(3),
        a: get(4),
        b: get(5),
    };
    let sum = h.i as u64 + h.l as u64 + h.a as u64;
    if binary && sum != h.m as u64 {
        return Err(bad(format!("binary header requires M = I + L + A ({} != {sum})", h.m)));
    }
    if !binary && sum > h.m as u64 {
        return Err(bad(format!("M = {} smaller than I + L + A = {sum}", h.m)));
    }
    Ok(h)
}

fn parse_latch(lit: AigLit, rest: &[u32], offset: usize) -> Result<Latch, AigerError> {
    let reset = match rest.first() {
        None | Some(0) => Reset::Zero,
        Some(1) => Reset::One,
        Some(&r) if r == lit => Reset::Uninitialized,
        Some(&r) => {
            return Err(AigerError {
                offset,
                kind: AigerErrorKind::InvalidDefinition(format!(
                    "latch {lit} reset {r} must be 0, 1 or the latch literal"
                )),
            })
        }
    };
    Ok(Latch {
        lit,
        next: 0,
        reset,
    })
}

/// Parses ASCII or binary AIGER content.
pub fn parse_aiger(bytes: &[u8]) -> Result<AigModel, AigerError> {
    let mut r = Reader { data: bytes, pos: 0 };
    let h = parse_header(&mut r)?;
    let body_start = r.pos;

    let mut inputs = Vec::with_capacity(h.i as usize);
    if h.binary {
        inputs.extend((1..=h.i).map(|i| 2 * i));
    } else {
        for _ in 0..h.i {
            let (_, n) = r.numbers(1, 1)?;
            inputs.push(n[0]);
        }
    }

    let mut latches = Vec::with_capacity(h.l as usize);
    for j in 0..h.l {
        if h.binary {
            let (offset, n) = r.numbers(1, 2)?;
            let lit = 2 * (h.i + j + 1);
            let mut latch = parse_latch(lit, &n[1..], offset)?;
            latch.next = n[0];
            latches.push(latch);
        } else {
            let (offset, n) = r.numbers(2, 3)?;
            let mut latch = parse_latch(n[0], &n[2..], offset)?;
            latch.next = n[1];
            latches.push(latch);
        }
    }

    let mut outputs = Vec::with_capacity(h.o as usize);
    for _ in 0..h.o {
        outputs.push(r.numbers(1, 1)?.1[0]);
    }
    let mut bads = Vec::with_capacity(h.b as usize);
    for _ in 0..h.b {
        bads.push(r.numbers(1, 1)?.1[0]);
    }

    let mut ands = Vec::with_capacity(h.a as usize);
    if h.binary {
        for k in 0..h.a {
            let offset = r.pos;
            let lhs = 2 * (h.i + h.l + k + 1);
            let d0 = r.varint()?;
            let d1 = r.varint()?;
            if d0 == 0 || d0 > lhs {
                return Err(AigerError {
                    offset,
                    kind: AigerErrorKind::NonMonotoneDelta,
                });
            }
            let rhs0 = lhs - d0;
            if d1 > rhs0 {
                return Err(AigerError {
                    offset,
                    kind: AigerErrorKind::NonMonotoneDelta,
                });
            }
            ands.push(AndGate {
                lhs,
                rhs0,
                rhs1: rhs0 - d1,
            });
        }
    } else {
        for _ in 0..h.a {
            let (_, n) = r.numbers(3, 3)?;
            ands.push(AndGate {
                lhs: n[0],
                rhs0: n[1],
                rhs1: n[2],
            });
        }
    }

    AigModel::new(h.m, inputs, latches, ands, outputs, bads).map_err(|kind| AigerError {
        offset: body_start,
        kind,
    })
}

/// Programmatic circuit construction. Variables are renumbered canonically
/// on [`AigBuilder::build`], so the result can be written in binary form.
#[derive(Debug, Default, Clone)]
pub struct AigBuilder {
    next_var: u32,
    inputs: Vec<u32>,
    latches: Vec<(u32, AigLit, Reset)>,
    ands: Vec<(u32, AigLit, AigLit)>,
    outputs: Vec<AigLit>,
    bads: Vec<AigLit>,
}

impl AigBuilder {
    pub fn new() -> Self {
        AigBuilder {
            next_var: 1,
            ..Default::default()
        }
    }

    fn fresh(&mut self) -> u32 {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    pub fn input(&mut self) -> AigLit {
        let v = self.fresh();
        self.inputs.push(v);
        2 * v
    }

    /// New latch with next-state function constant false; see [`AigBuilder::set_next`].
    pub fn latch(&mut self, reset: Reset) -> AigLit {
        let v = self.fresh();
        self.latches.push((v, 0, reset));
        2 * v
    }

    pub fn set_next(&mut self, latch: AigLit, next: AigLit) {
        let v = lit_var(latch);
        let entry = self
            .latches
            .iter_mut()
            .find(|l| l.0 == v)
            .expect("not a latch literal");
        entry.1 = next;
    }

    pub fn and(&mut self, a: AigLit, b: AigLit) -> AigLit {
        let v = self.fresh();
        self.ands.push((v, a, b));
        2 * v
    }

    pub fn or(&mut self, a: AigLit, b: AigLit) -> AigLit {
        self.and(a ^ 1, b ^ 1) ^ 1
    }

    pub fn xor(&mut self, a: AigLit, b: AigLit) -> AigLit {
        let both = self.and(a, b);
        let neither = self.and(a ^ 1, b ^ 1);
        self.and(both ^ 1, neither ^ 1)
    }

    pub fn mux(&mut self, sel: AigLit, then: AigLit, other: AigLit) -> AigLit {
        let t = self.and(sel, then);
        let e = self.and(sel ^ 1, other);
        self.or(t, e)
    }

    pub fn and_all(&mut self, lits: &[AigLit]) -> AigLit {
        let mut acc = 1;
        for &l in lits {
            acc = if acc == 1 { l } else { self.and(acc, l) };
        }
        acc
    }

    /// Literal that is true iff `bits` equal the constant `value` (bit 0 = LSB).
    pub fn equals_const(&mut self, bits: &[AigLit], value: u64) -> AigLit {
        let lits: Vec<AigLit> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| if value >> i & 1 == 1 { b } else { b ^ 1 })
            .collect();
        self.and_all(&lits)
    }

    pub fn output(&mut self, lit: AigLit) {
        self.outputs.push(lit);
    }

    pub fn bad(&mut self, lit: AigLit) {
        self.bads.push(lit);
    }

    pub fn build(&self) -> AigModel {
        let mut map = vec![0u32; self.next_var as usize];
        let mut n = 0;
        for &v in self
            .inputs
            .iter()
            .chain(self.latches.iter().map(|l| &l.0))
            .chain(self.ands.iter().map(|g| &g.0))
        {
            n += 1;
            map[v as usize] = n;
        }
        let tr = |lit: AigLit| 2 * map[lit_var(lit) as usize] + (lit & 1);
        let inputs = self.inputs.iter().map(|&v| 2 * map[v as usize]).collect();
        let latches = self
            .latches
            .iter()
            .map(|&(v, next, reset)| Latch {
                lit: 2 * map[v as usize],
                next: tr(next),
                reset,
            })
            .collect();
        let ands = self
            .ands
            .iter()
            .map(|&(v, a, b)| {
                let (a, b) = (tr(a), tr(b));
                AndGate {
                    lhs: 2 * map[v as usize],
                    rhs0: a.max(b),
                    rhs1: a.min(b),
                }
            })
            .collect();
        let outputs = self.outputs.iter().map(|&l| tr(l)).collect();
        let bads = self.bads.iter().map(|&l| tr(l)).collect();
        AigModel::new(n, inputs, latches, ands, outputs, bads).expect("builder produced invalid model")
    }
}
