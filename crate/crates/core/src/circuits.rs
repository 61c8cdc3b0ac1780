//! Small crafted circuits with known behaviour.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aiger::{AigBuilder, AigLit, AigModel, Reset};

const TRUE: AigLit = 1;

/// `bits + inc` (one-bit increment), LSB first.
fn increment(b: &mut AigBuilder, bits: &[AigLit], inc: AigLit) -> Vec<AigLit> {
    let mut carry = inc;
    bits.iter()
        .map(|&x| {
            let s = b.xor(x, carry);
            carry = b.and(x, carry);
            s
        })
        .collect()
}

/// `bits - 1` modulo `2^n`, LSB first.
fn decrement(b: &mut AigBuilder, bits: &[AigLit]) -> Vec<AigLit> {
    let mut borrow = TRUE;
    bits.iter()
        .map(|&x| {
            let d = b.xor(x, borrow);
            borrow = b.and(x ^ 1, borrow);
            d
        })
        .collect()
}

fn latches(b: &mut AigBuilder, n: usize) -> Vec<AigLit> {
    (0..n).map(|_| b.latch(Reset::Zero)).collect()
}

/// Free-running `n`-bit counter from 0; bad when it equals `target`.
pub fn counter(n: usize, target: u64) -> AigModel {
    let mut b = AigBuilder::new();
    let q = latches(&mut b, n);
    let next = increment(&mut b, &q, TRUE);
    for (&l, &d) in q.iter().zip(&next) {
        b.set_next(l, d);
    }
    let bad = b.equals_const(&q, target);
    b.bad(bad);
    b.build()
}

/// Counter that advances only when all `width` enable inputs are 1.
pub fn enabled_counter(n: usize, width: usize, target: u64) -> AigModel {
    let mut b = AigBuilder::new();
    let en: Vec<AigLit> = (0..width).map(|_| b.input()).collect();
    let q = latches(&mut b, n);
    let go = b.and_all(&en);
    let next = increment(&mut b, &q, go);
    for (&l, &d) in q.iter().zip(&next) {
        b.set_next(l, d);
    }
    let bad = b.equals_const(&q, target);
    b.bad(bad);
    b.build()
}

/// Counter that steps up or down depending on an input.
pub fn up_down_counter(n: usize, target: u64) -> AigModel {
    let mut b = AigBuilder::new();
    let up = b.input();
    let q = latches(&mut b, n);
    let inc = increment(&mut b, &q, TRUE);
    let dec = decrement(&mut b, &q);
    for i in 0..n {
        let d = b.mux(up, inc[i], dec[i]);
        b.set_next(q[i], d);
    }
    let bad = b.equals_const(&q, target);
    b.bad(bad);
    b.build()
}

/// `n`-stage shift register fed by an input; bad when all stages are 1.
pub fn shift_register(n: usize) -> AigModel {
    let mut b = AigBuilder::new();
    let din = b.input();
    let q = latches(&mut b, n);
    b.set_next(q[0], din);
    for i in 1..n {
        b.set_next(q[i], q[i - 1]);
    }
    let bad = b.and_all(&q);
    b.bad(bad);
    b.build()
}

/// Twisted ring (Johnson) counter; bad when its state equals `target`.
pub fn johnson_counter(n: usize, target: u64) -> AigModel {
    let mut b = AigBuilder::new();
    let q = latches(&mut b, n);
    b.set_next(q[0], q[n - 1] ^ 1);
    for i in 1..n {
        b.set_next(q[i], q[i - 1]);
    }
    let bad = b.equals_const(&q, target);
    b.bad(bad);
    b.build()
}

/// Lock that opens after the input word sequence `code`; a wrong word
/// resets it. Bad when open.
pub fn combination_lock(width: usize, code: &[u64]) -> AigModel {
    let mut b = AigBuilder::new();
    let x: Vec<AigLit> = (0..width).map(|_| b.input()).collect();
    let stage_bits = (usize::BITS - code.len().leading_zeros()) as usize;
    let q = latches(&mut b, stage_bits.max(1));
    let mut advance = 0;
    for (k, &word) in code.iter().enumerate() {
        let at = b.equals_const(&q, k as u64);
        let hit = b.equals_const(&x, word);
        let step = b.and(at, hit);
        advance = b.or(advance, step);
    }
    let open = b.equals_const(&q, code.len() as u64);
    let keep = b.or(advance, open);
    let inc = increment(&mut b, &q, advance);
    for (&l, &d) in q.iter().zip(&inc) {
        let d = b.and(d, keep);
        b.set_next(l, d);
    }
    b.bad(open);
    b.build()
}

/// Fibonacci LFSR with the given tap positions, seeded with 1 in bit 0.
/// Bad when the register equals `target`.
pub fn lfsr(n: usize, taps: &[usize], target: u64) -> AigModel {
    let mut b = AigBuilder::new();
    let mut q = vec![b.latch(Reset::One)];
    q.extend(latches(&mut b, n - 1));
    let mut fb = 0;
    for &t in taps {
        fb = b.xor(fb, q[t]);
    }
    b.set_next(q[0], fb);
    for i in 1..n {
        b.set_next(q[i], q[i - 1]);
    }
    let bad = b.equals_const(&q, target);
    b.bad(bad);
    b.build()
}

/// Counter modulo `modulus` (wrapping to 0); bad when it equals `target`,
/// which is unreachable when `target >= modulus`.
pub fn modulo_counter(n: usize, modulus: u64, target: u64) -> AigModel {
    let mut b = AigBuilder::new();
    let q = latches(&mut b, n);
    let inc = increment(&mut b, &q, TRUE);
    let wrap = b.equals_const(&q, modulus - 1);
    for (&l, &d) in q.iter().zip(&inc) {
        let d = b.and(d, wrap ^ 1);
        b.set_next(l, d);
    }
    let bad = b.equals_const(&q, target);
    b.bad(bad);
    b.build()
}

/// Two latches toggling in lockstep; bad when they differ (never).
pub fn lockstep_pair() -> AigModel {
    let mut b = AigBuilder::new();
    let t = b.input();
    let a = b.latch(Reset::Zero);
    let c = b.latch(Reset::Zero);
    let na = b.xor(a, t);
    let nc = b.xor(c, t);
    b.set_next(a, na);
    b.set_next(c, nc);
    let bad = b.xor(a, c);
    b.bad(bad);
    b.build()
}

/// Single latch holding its value; bad when it is 1 (never, from 0).
pub fn self_loop() -> AigModel {
    let mut b = AigBuilder::new();
    let l = b.latch(Reset::Zero);
    b.set_next(l, l);
    b.bad(l);
    b.build()
}

/// Single latch initialized to 1 and bad when 1.
pub fn bad_initial() -> AigModel {
    let mut b = AigBuilder::new();
    let l = b.latch(Reset::One);
    b.set_next(l, l);
    b.bad(l);
    b.build()
}

/// Bad is the constant false.
pub fn never_bad(n: usize) -> AigModel {
    let mut b = AigBuilder::new();
    let x = b.input();
    let q = latches(&mut b, n);
    let next = increment(&mut b, &q, x);
    for (&l, &d) in q.iter().zip(&next) {
        b.set_next(l, d);
    }
    b.bad(0);
    b.build()
}

/// Counter whose bad condition needs a specific input in the last state.
pub fn input_guarded_bad(n: usize, target: u64) -> AigModel {
    let mut b = AigBuilder::new();
    let fire = b.input();
    let q = latches(&mut b, n);
    let next = increment(&mut b, &q, TRUE);
    for (&l, &d) in q.iter().zip(&next) {
        b.set_next(l, d);
    }
    let at = b.equals_const(&q, target);
    let bad = b.and(at, fire);
    b.bad(bad);
    b.build()
}

/// Random sequential circuit: each latch's next function is a random
/// and-inverter expression over latches and inputs, and bad is a random
/// partial cube over the latches.
pub fn random_fsm(seed: u64, num_latches: usize, num_inputs: usize, gates: usize) -> AigModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = AigBuilder::new();
    let x: Vec<AigLit> = (0..num_inputs).map(|_| b.input()).collect();
    let q: Vec<AigLit> = (0..num_latches)
        .map(|_| b.latch(if rng.random_bool(0.2) { Reset::One } else { Reset::Zero }))
        .collect();
    let mut pool: Vec<AigLit> = x.iter().chain(&q).copied().collect();
    for _ in 0..gates {
        let a = pool[rng.random_range(0..pool.len())] ^ rng.random_range(0..2);
        let c = pool[rng.random_range(0..pool.len())] ^ rng.random_range(0..2);
        let g = b.and(a, c);
        pool.push(g);
    }
    for &l in &q {
        let f = pool[rng.random_range(num_inputs..pool.len())] ^ rng.random_range(0..2);
        b.set_next(l, f);
    }
    let cube_len = rng.random_range(1..=num_latches.min(3));
    let mut cube = Vec::new();
    for _ in 0..cube_len {
        cube.push(q[rng.random_range(0..num_latches)] ^ rng.random_range(0..2));
    }
    cube.sort_unstable();
    cube.dedup();
    if cube.windows(2).any(|w| w[0] ^ 1 == w[1]) {
        cube.truncate(1);
    }
    let bad = b.and_all(&cube);
    b.bad(bad);
    b.build()
}

/// Counter that only advances on one specific `width`-bit input word, with
/// `width` chosen so that searches assigning inputs 0 by default never see
/// it advance. Bad when the counter reaches `target`.
pub fn keyed_counter(n: usize, width: usize, key: u64, target: u64) -> AigModel {
    let mut b = AigBuilder::new();
    let x: Vec<AigLit> = (0..width).map(|_| b.input()).collect();
    let q = latches(&mut b, n);
    let go = b.equals_const(&x, key);
    let next = increment(&mut b, &q, go);
    for (&l, &d) in q.iter().zip(&next) {
        b.set_next(l, d);
    }
    let bad = b.equals_const(&q, target);
    b.bad(bad);
    b.build()
}

/// Named circuits with at most 16 latches, used as a test corpus.
pub fn corpus() -> Vec<(String, AigModel)> {
    let mut v: Vec<(String, AigModel)> = vec![
        ("counter3".into(), counter(3, 7)),
        ("counter4_t9".into(), counter(4, 9)),
        ("enabled_counter3".into(), enabled_counter(3, 1, 5)),
        ("enabled_counter3_w2".into(), enabled_counter(3, 2, 6)),
        ("up_down4".into(), up_down_counter(4, 10)),
        ("shift4".into(), shift_register(4)),
        ("shift6".into(), shift_register(6)),
        ("johnson4".into(), johnson_counter(4, 0b1110)),
        ("lock2x3".into(), combination_lock(2, &[3, 1, 2])),
        ("lock3x2".into(), combination_lock(3, &[5, 2])),
        ("lfsr4".into(), lfsr(4, &[2, 3], 0b1000)),
        ("mod5_safe".into(), modulo_counter(3, 5, 7)),
        ("mod6_t4".into(), modulo_counter(3, 6, 4)),
        ("lockstep".into(), lockstep_pair()),
        ("self_loop".into(), self_loop()),
        ("bad_initial".into(), bad_initial()),
        ("never_bad".into(), never_bad(3)),
        ("guarded_bad".into(), input_guarded_bad(3, 5)),
        ("keyed_counter".into(), keyed_counter(2, 3, 0b101, 3)),
    ];
    for seed in 0..8 {
        v.push((format!("random_fsm{seed}"), random_fsm(seed, 4, 2, 10)));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{InputVector, State};

    fn run(m: &AigModel, inputs: &[u64]) -> State {
        let mut s = m.initial_state().unwrap();
        for &x in inputs {
            s = m.simulate_step(&s, &InputVector::from_u64(x, m.num_inputs()));
        }
        s
    }

    #[test]
    fn counters_count() {
        let m = counter(3, 7);
        assert_eq!(run(&m, &[0; 5]).to_u64(), Some(5));
        let m = up_down_counter(3, 7);
        assert_eq!(run(&m, &[0]).to_u64(), Some(7));
        assert_eq!(run(&m, &[1, 1, 0]).to_u64(), Some(1));
        let m = enabled_counter(3, 2, 7);
        assert_eq!(run(&m, &[3, 1, 2, 3]).to_u64(), Some(2));
        let m = modulo_counter(3, 5, 7);
        assert_eq!(run(&m, &[0; 5]).to_u64(), Some(0));
    }

    #[test]
    fn lock_opens_on_code() {
        let m = combination_lock(2, &[3, 1, 2]);
        let s = run(&m, &[3, 1, 2]);
        assert!(m.eval_bad(&s, &InputVector::zeros(2)));
        let s = run(&m, &[3, 0, 1, 2]);
        assert!(!m.eval_bad(&s, &InputVector::zeros(2)));
        // open stays open
        let s = run(&m, &[3, 1, 2, 0, 0]);
        assert!(m.eval_bad(&s, &InputVector::zeros(2)));
    }

    #[test]
    fn lfsr_and_johnson_sequences() {
        let m = johnson_counter(3, 0);
        let seq: Vec<u64> = (0..6).map(|k| run(&m, &vec![0; k]).to_u64().unwrap()).collect();
        assert_eq!(seq, vec![0b000, 0b001, 0b011, 0b111, 0b110, 0b100]);
        let m = lfsr(4, &[2, 3], 0);
        let mut seen = std::collections::HashSet::new();
        for k in 0..15 {
            seen.insert(run(&m, &vec![0; k]));
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn random_fsm_is_deterministic() {
        assert_eq!(random_fsm(3, 4, 2, 10).to_ascii(), random_fsm(3, 4, 2, 10).to_ascii());
        assert_eq!(corpus().len(), 27);
        assert!(corpus().iter().all(|(_, m)| m.num_latches() <= 16));
    }
}
