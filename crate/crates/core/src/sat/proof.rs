//! Resolution proofs and their checker.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{Clause, Cnf, Lit, Var};

/// Parent of a resolution step: an input clause or an earlier step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParentRef {
    Input(usize),
    Step(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionStep {
    pub resolvent: Clause,
    pub pivot: Var,
    pub parents: [ParentRef; 2],
}

/// Derivation of the empty clause from `input_clauses`.
///
/// `conclusion` names the empty clause: the last step, or an input clause
/// when the formula already contains the empty clause (then `steps` is empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionProof {
    pub input_clauses: Vec<Clause>,
    pub steps: Vec<ResolutionStep>,
    pub conclusion: ParentRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("step {step}: parent {parent:?} does not precede it")]
    ForwardReference { step: usize, parent: ParentRef },
    #[error("step {step}: input clause {index} is not a clause of the formula")]
    UnknownInput { step: usize, index: usize },
    #[error("step {step}: {reason}")]
    BadResolution { step: usize, reason: String },
    #[error("step {step}: recorded resolvent {recorded:?} differs from computed {computed:?}")]
    WrongResolvent {
        step: usize,
        recorded: Clause,
        computed: Clause,
    },
    #[error("proof does not end in the empty clause")]
    NotRefutation,
}

impl ResolutionProof {
    pub fn clause(&self, r: ParentRef) -> &Clause {
        match r {
            ParentRef::Input(i) => &self.input_clauses[i],
            ParentRef::Step(i) => &self.steps[i].resolvent,
        }
    }

    /// Line-oriented dump: one `sid pivot parent parent : lits 0` line per
    /// step. Input clauses are numbered `1..=n` in formula order and step `k`
    /// (0-based) gets id `n + 1 + k`.
    pub fn to_text(&self) -> String {
        let n = self.input_clauses.len();
        let id = |r: ParentRef| match r {
            ParentRef::Input(i) => i + 1,
            ParentRef::Step(k) => n + 1 + k,
        };
        let mut out = String::new();
        for (k, s) in self.steps.iter().enumerate() {
            write!(out, "{} {} {} {} :", n + 1 + k, s.pivot, id(s.parents[0]), id(s.parents[1])).unwrap();
            for l in s.resolvent.lits() {
                write!(out, " {l}").unwrap();
            }
            out.push_str(" 0\n");
        }
        out
    }

    /// Reads the format written by [`ResolutionProof::to_text`] against `f`.
    pub fn from_text(f: &Cnf, text: &str) -> Result<ResolutionProof, String> {
        let n = f.len();
        let mut steps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let err = |m: &str| format!("line {}: {m}", lineno + 1);
            let (head, tail) = line.split_once(':').ok_or_else(|| err("missing ':'"))?;
            let head: Vec<usize> = head
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err("bad number")))
                .collect::<Result<_, _>>()?;
            if head.len() != 4 || head[0] != n + 1 + steps.len() || head[1] == 0 {
                return Err(err("bad step header"));
            }
            let parent = |id: usize| -> Result<ParentRef, String> {
                if (1..=n).contains(&id) {
                    Ok(ParentRef::Input(id - 1))
                } else if id > n && id - n - 1 < steps.len() {
                    Ok(ParentRef::Step(id - n - 1))
                } else {
                    Err(err("bad parent id"))
                }
            };
            let parents = [parent(head[2])?, parent(head[3])?];
            let lits: Vec<i64> = tail
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err("bad literal")))
                .collect::<Result<_, _>>()?;
            if lits.last() != Some(&0) {
                return Err(err("missing terminating 0"));
            }
            let resolvent = Clause::new(lits[..lits.len() - 1].iter().map(|&x| Lit::from_dimacs(x)).collect())
                .map_err(|e| err(&e.to_string()))?;
            steps.push(ResolutionStep {
                resolvent,
                pivot: Var(head[1] as u32),
                parents,
            });
        }
        let conclusion = match steps.len() {
            0 => ParentRef::Input(f.clauses().iter().position(|c| c.is_empty()).ok_or("no steps and no empty input clause")?),
            k => ParentRef::Step(k - 1),
        };
        Ok(ResolutionProof {
            input_clauses: f.clauses().to_vec(),
            steps,
            conclusion,
        })
    }
}

/// Checks that `proof` is a resolution refutation of `f`: every referenced
/// input clause belongs to `f`, every step is a valid resolution of earlier
/// clauses, and the conclusion is the empty clause.
pub fn check_proof(f: &Cnf, proof: &ResolutionProof) -> Result<(), ProofError> {
    let formula: HashSet<&Clause> = f.clauses().iter().collect();
    let mut checked_inputs = vec![false; proof.input_clauses.len()];
    let mut check_input = |step: usize, i: usize| -> Result<(), ProofError> {
        match proof.input_clauses.get(i) {
            Some(c) if checked_inputs[i] || formula.contains(c) => {
                checked_inputs[i] = true;
                Ok(())
            }
            _ => Err(ProofError::UnknownInput { step, index: i }),
        }
    };
    for (k, s) in proof.steps.iter().enumerate() {
        for &p in &s.parents {
            match p {
                ParentRef::Input(i) => check_input(k, i)?,
                ParentRef::Step(j) if j < k => {}
                ParentRef::Step(_) => return Err(ProofError::ForwardReference { step: k, parent: p }),
            }
        }
        let a = proof.clause(s.parents[0]);
        let b = proof.clause(s.parents[1]);
        let computed = a.resolve(b, s.pivot).map_err(|e| ProofError::BadResolution {
            step: k,
            reason: e.to_string(),
        })?;
        if computed != s.resolvent {
            return Err(ProofError::WrongResolvent {
                step: k,
                recorded: s.resolvent.clone(),
                computed,
            });
        }
    }
    match proof.conclusion {
        ParentRef::Step(k) if k + 1 == proof.steps.len() && proof.steps[k].resolvent.is_empty() => Ok(()),
        ParentRef::Input(i) if proof.steps.is_empty() => {
            check_input(0, i)?;
            if proof.input_clauses[i].is_empty() {
                Ok(())
            } else {
                Err(ProofError::NotRefutation)
            }
        }
        _ => Err(ProofError::NotRefutation),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_units() -> (Cnf, ResolutionProof) {
        let f = Cnf::from_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let proof = ResolutionProof {
            input_clauses: f.clauses().to_vec(),
            steps: vec![ResolutionStep {
                resolvent: Clause::empty(),
                pivot: Var(1),
                parents: [ParentRef::Input(0), ParentRef::Input(1)],
            }],
            conclusion: ParentRef::Step(0),
        };
        (f, proof)
    }

    #[test]
    fn one_step_proof() {
        let (f, proof) = two_units();
        assert_eq!(check_proof(&f, &proof), Ok(()));
        assert_eq!(proof.to_text(), "3 1 1 2 : 0\n");
        assert_eq!(ResolutionProof::from_text(&f, &proof.to_text()).unwrap(), proof);
    }

    #[test]
    fn mislabeled_pivot_rejected() {
        let f = Cnf::from_dimacs("p cnf 2 2\n1 0\n-1 0\n").unwrap();
        let (_, mut proof) = two_units();
        proof.input_clauses = f.clauses().to_vec();
        proof.steps[0].pivot = Var(2);
        assert!(matches!(check_proof(&f, &proof), Err(ProofError::BadResolution { step: 0, .. })));
    }

    #[test]
    fn other_defects() {
        let (f, mut proof) = two_units();
        proof.steps[0].parents[1] = ParentRef::Step(0);
        assert!(matches!(check_proof(&f, &proof), Err(ProofError::ForwardReference { .. })));

        let (_, proof) = two_units();
        let g = Cnf::from_dimacs("p cnf 1 1\n1 0\n").unwrap();
        assert!(matches!(check_proof(&g, &proof), Err(ProofError::UnknownInput { .. })));

        let (f, mut proof) = two_units();
        proof.steps[0].resolvent = Clause::from_dimacs(&[1]).unwrap();
        assert!(matches!(check_proof(&f, &proof), Err(ProofError::WrongResolvent { .. })));

        let (f, mut proof) = two_units();
        proof.steps.clear();
        proof.conclusion = ParentRef::Input(0);
        assert_eq!(check_proof(&f, &proof), Err(ProofError::NotRefutation));
    }
}
