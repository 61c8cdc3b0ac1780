use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use tapseq_core::bits::State;
use tapseq_core::cnf::Cnf;
use tapseq_core::encode::VarMap;
use tapseq_core::encoding::BoundaryPoint;
use tapseq_core::engine::Observer;
use tapseq_core::sat::ResolutionProof;

/// Writes intermediate artifacts of a run. I/O errors are kept and reported
/// after the run.
pub struct DumpObserver {
    cnf_dir: Option<PathBuf>,
    proof_dir: Option<PathBuf>,
    points: Option<BufWriter<File>>,
    /// Number of step formulas seen so far; names the per-state files.
    index: usize,
    inputs_in_proof: usize,
    error: Option<(PathBuf, io::Error)>,
}

impl DumpObserver {
    pub fn new(cnf_dir: Option<&Path>, proof_dir: Option<&Path>, points: Option<&Path>) -> Result<Self, (PathBuf, io::Error)> {
        for dir in [cnf_dir, proof_dir].into_iter().flatten() {
            fs::create_dir_all(dir).map_err(|e| (dir.to_path_buf(), e))?;
        }
        let points = points
            .map(|p| File::create(p).map(BufWriter::new).map_err(|e| (p.to_path_buf(), e)))
            .transpose()?;
        Ok(DumpObserver {
            cnf_dir: cnf_dir.map(Path::to_path_buf),
            proof_dir: proof_dir.map(Path::to_path_buf),
            points,
            index: 0,
            inputs_in_proof: 0,
            error: None,
        })
    }

    fn record<T>(&mut self, path: &Path, r: io::Result<T>) {
        if let Err(e) = r {
            self.error.get_or_insert((path.to_path_buf(), e));
        }
    }

    pub fn finish(mut self) -> Result<(), (PathBuf, io::Error)> {
        if let Some(w) = self.points.as_mut() {
            if let Err(e) = w.flush() {
                self.error.get_or_insert((PathBuf::from("points"), e));
            }
        }
        match self.error {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

impl Observer for DumpObserver {
    fn on_step_formula(&mut self, state: &State, f: &Cnf, _vm: &VarMap) {
        self.index += 1;
        if let Some(dir) = &self.cnf_dir {
            let path = dir.join(format!("step_{:05}.cnf", self.index));
            let text = format!("c state {state}\n{}", f.to_dimacs());
            let r = fs::write(&path, text);
            self.record(&path, r);
        }
    }

    fn on_proof(&mut self, state: &State, proof: &ResolutionProof) {
        self.inputs_in_proof = proof.input_clauses.len();
        if let Some(dir) = &self.proof_dir {
            let path = dir.join(format!("step_{:05}.proof", self.index));
            let text = format!("c state {state}\n{}", proof.to_text());
            let r = fs::write(&path, text);
            self.record(&path, r);
        }
    }

    /// One line per point: `p <state> <step id> <pivot> : <literals> 0`,
    /// with step ids numbered as in the proof dump.
    fn on_boundary_point(&mut self, state: &State, step: usize, bp: &BoundaryPoint) {
        let Some(w) = self.points.as_mut() else { return };
        let mut line = format!("p {state} {} {} :", self.inputs_in_proof + 1 + step, bp.pivot());
        for l in bp.point().to_lits() {
            line.push(' ');
            line.push_str(&l.to_string());
        }
        line.push_str(" 0\n");
        let r = w.write_all(line.as_bytes());
        self.record(Path::new("points"), r);
    }
}
