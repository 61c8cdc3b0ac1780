//! AIGER witness files: `1`, `b<index>`, the initial latch values, one
//! input line per frame, and a terminating `.`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::aiger::AigModel;
use crate::bits::{InputVector, State};
use crate::engine::Counterexample;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("witness does not replay: {0}")]
    Replay(String),
}

/// Parsed witness contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub property: usize,
    pub init: State,
    /// One line per frame; the last one is the input under which the final state is bad.
    pub inputs: Vec<InputVector>,
}

pub fn write_witness(cex: &Counterexample, property: usize) -> String {
    let mut out = format!("1\nb{property}\n{}\n", cex.states[0]);
    for x in cex.inputs.iter().chain(std::iter::once(&cex.final_bad_input)) {
        writeln!(out, "{x}").unwrap();
    }
    out.push_str(".\n");
    out
}

pub fn parse_witness(text: &str, num_latches: usize, num_inputs: usize) -> Result<Witness, WitnessError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let malformed = |line: usize, msg: &str| WitnessError::Malformed {
        line,
        msg: msg.to_string(),
    };
    let mut next = |what: &str| lines.next().ok_or_else(|| malformed(0, &format!("missing {what}")));

    let (n, l) = next("status line")?;
    if l.trim() != "1" {
        return Err(malformed(n, "expected status line '1'"));
    }
    let (n, l) = next("property line")?;
    let property = l
        .trim()
        .strip_prefix('b')
        .and_then(|i| i.parse().ok())
        .ok_or_else(|| malformed(n, "expected 'b<index>'"))?;
    let (n, l) = next("initial state line")?;
    let init: State = l.trim().parse().map_err(|e| malformed(n, &format!("{e}")))?;
    if init.len() != num_latches {
        return Err(malformed(n, &format!("expected {num_latches} latch values, got {}", init.len())));
    }
    let mut inputs = Vec::new();
    loop {
        let (n, l) = next("'.' terminator")?;
        let l = l.trim();
        if l == "." {
            break;
        }
        let x: InputVector = l.parse().map_err(|e| malformed(n, &format!("{e}")))?;
        if x.len() != num_inputs {
            return Err(malformed(n, &format!("expected {num_inputs} input values, got {}", x.len())));
        }
        inputs.push(x);
    }
    if inputs.is_empty() {
        return Err(malformed(0, "no input frames"));
    }
    Ok(Witness { property, init, inputs })
}

/// Replays `text` from the reset state of `m` (with its property selected
/// as named in the witness); succeeds iff bad holds in the last frame.
pub fn validate_witness(m: &AigModel, text: &str) -> Result<Counterexample, WitnessError> {
    let w = parse_witness(text, m.num_latches(), m.num_inputs())?;
    let mut m = m.clone();
    m.select_property(w.property).map_err(|e| WitnessError::Replay(e.to_string()))?;
    let init = m.initial_state().map_err(|e| WitnessError::Replay(e.to_string()))?;
    if w.init != init {
        return Err(WitnessError::Replay(format!("initial line {} differs from reset state {init}", w.init)));
    }
    let (last, transitions) = w.inputs.split_last().unwrap();
    let mut states = vec![init];
    for x in transitions {
        let s = m.simulate_step(states.last().unwrap(), x);
        states.push(s);
    }
    let cex = Counterexample {
        states,
        inputs: transitions.to_vec(),
        final_bad_input: last.clone(),
    };
    if !m.eval_bad(cex.states.last().unwrap(), last) {
        return Err(WitnessError::Replay(format!("bad does not hold in frame {}", transitions.len())));
    }
    Ok(cex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits;
    use crate::oracle::{explicit_oracle, OracleResult};

    #[test]
    fn counter_witness_round_trip() {
        let m = circuits::input_guarded_bad(3, 5);
        let OracleResult::Reachable { trace, .. } = explicit_oracle(&m, 100).unwrap() else { panic!() };
        let text = write_witness(&trace, 0);
        assert!(text.starts_with("1\nb0\n000\n"));
        assert_eq!(text.lines().count(), 3 + 6 + 1);
        assert_eq!(validate_witness(&m, &text).unwrap(), trace);

        // the final input must fire the guard
        let broken = text.replace("1\n.\n", "0\n.\n");
        assert!(matches!(validate_witness(&m, &broken), Err(WitnessError::Replay(_))));
    }

    #[test]
    fn flipped_input_rejected() {
        let m = circuits::enabled_counter(3, 1, 3);
        let OracleResult::Reachable { trace, .. } = explicit_oracle(&m, 100).unwrap() else { panic!() };
        let text = write_witness(&trace, 0);
        assert!(validate_witness(&m, &text).is_ok());
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        lines[4] = if lines[4] == "1" { "0".into() } else { "1".into() };
        let flipped = lines.join("\n") + "\n";
        assert!(validate_witness(&m, &flipped).is_err());
    }

    #[test]
    fn bad_initial_state_empty_inputs() {
        let m = circuits::bad_initial();
        let text = "1\nb0\n1\n\n.\n";
        let cex = validate_witness(&m, text).unwrap();
        assert_eq!(cex.len(), 1);
    }

    #[test]
    fn malformed() {
        let m = circuits::counter(3, 7);
        for text in ["", "0\nb0\n000\n\n.\n", "1\nx0\n000\n\n.\n", "1\nb0\n00\n\n.\n", "1\nb0\n000\n", "1\nb0\n000\n.\n", "1\nb3\n000\n\n.\n"] {
            assert!(validate_witness(&m, text).is_err(), "{text:?}");
        }
    }
}
