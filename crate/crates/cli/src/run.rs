use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use tapseq_core::aiger::{parse_aiger, AigModel};
use tapseq_core::baselines::{run_bmc, run_rand, BmcConfig, RandConfig};
use tapseq_core::engine::{run_tapseq_observed, Counterexample, EngineConfig, EngineError, Observer, Order};
use tapseq_core::oracle::{explicit_oracle, OracleResult};
use tapseq_core::witness::{validate_witness, write_witness};

use crate::dump::DumpObserver;
use crate::{Mode, OrderArg, RunOptions, EXIT_BUG, EXIT_INVALID_WITNESS};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    fn io(path: &Path, source: io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<EngineError> for RunError {
    fn from(e: EngineError) -> Self {
        RunError::Model(e.to_string())
    }
}

pub struct Outputs {
    pub witness: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub dump_cnf: Option<PathBuf>,
    pub dump_proof: Option<PathBuf>,
    pub dump_points: Option<PathBuf>,
}

/// Result of one run in a mode-independent shape.
pub struct Report {
    pub mode: Mode,
    pub verdict: &'static str,
    pub cex: Option<Counterexample>,
    /// States visited, walk steps, or deepest refuted depth, depending on the mode.
    pub states: u64,
    pub stats: Vec<(&'static str, u64)>,
    pub seconds: f64,
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        if self.cex.is_some() {
            EXIT_BUG
        } else {
            0
        }
    }

    /// `key=value` lines without timing, identical across identical runs.
    pub fn stats_text(&self) -> String {
        let mode = match self.mode {
            Mode::Tapseq => "tapseq",
            Mode::Rand => "rand",
            Mode::Bmc => "bmc",
            Mode::Oracle => "oracle",
        };
        let mut out = format!("mode={mode}\nverdict={}\n", self.verdict);
        if let Some(c) = &self.cex {
            writeln!(out, "cex_length={}", c.depth()).unwrap();
        }
        for (k, v) in &self.stats {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }
}

pub fn load_model(path: &Path, property: usize) -> Result<AigModel, RunError> {
    let bytes = fs::read(path).map_err(|e| RunError::io(path, e))?;
    let mut m = parse_aiger(&bytes).map_err(|e| RunError::Model(format!("{}: {e}", path.display())))?;
    m.select_property(property).map_err(|e| RunError::Model(e.to_string()))?;
    m.initial_state().map_err(|e| RunError::Model(format!("{}: {e}", path.display())))?;
    Ok(m)
}

fn time_limit(opts: &RunOptions) -> Result<Option<Duration>, RunError> {
    if !(opts.time_limit >= 0.0 && opts.time_limit.is_finite()) {
        return Err(RunError::Usage(format!("invalid time limit {}", opts.time_limit)));
    }
    Ok((opts.time_limit > 0.0).then(|| Duration::from_secs_f64(opts.time_limit)))
}

pub fn execute(m: &AigModel, opts: &RunOptions, obs: &mut dyn Observer) -> Result<Report, RunError> {
    let limit = time_limit(opts)?;
    let start = Instant::now();
    let (verdict, cex, states, stats) = match opts.mode {
        Mode::Tapseq => {
            let cfg = EngineConfig {
                order: match opts.order {
                    OrderArg::Bfs => Order::Bfs,
                    OrderArg::Dfs => Order::Dfs,
                },
                randomize: opts.randomize,
                seed: opts.seed,
                max_states: opts.max_states as usize,
                time_limit: limit,
                trim: !opts.no_trim,
                ..Default::default()
            };
            let run = run_tapseq_observed(m, &cfg, obs)?;
            let name = run.verdict.name();
            (name, run.verdict.counterexample().cloned(), run.stats.states as u64, run.stats.entries())
        }
        Mode::Rand => {
            let cfg = RandConfig {
                max_tries: opts.max_tries,
                max_length: opts.max_length,
                seed: opts.seed,
                time_limit: limit,
            };
            let run = run_rand(m, &cfg)?;
            let name = run.verdict.name();
            (name, run.verdict.counterexample().cloned(), run.stats.steps, run.stats.entries())
        }
        Mode::Bmc => {
            let cfg = BmcConfig {
                max_depth: opts.max_depth as usize,
                time_limit: limit,
                ..Default::default()
            };
            let run = run_bmc(m, &cfg)?;
            let name = run.verdict.name();
            let depth = run.stats.refuted_through.map_or(0, |d| d as u64 + 1);
            (name, run.verdict.counterexample().cloned(), depth, run.stats.entries())
        }
        Mode::Oracle => {
            let r = explicit_oracle(m, opts.max_states as usize).map_err(|e| RunError::Model(e.to_string()))?;
            match r {
                OracleResult::Reachable { trace, depth } => ("bug", Some(trace), depth as u64, vec![]),
                OracleResult::Unreachable { states } => ("unreachable", None, states as u64, vec![("states", states as u64)]),
                OracleResult::Inconclusive { states } => ("budget", None, states as u64, vec![("states", states as u64)]),
            }
        }
    };
    Ok(Report {
        mode: opts.mode,
        verdict,
        cex,
        states,
        stats,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_command(model: &Path, opts: &RunOptions, out: &Outputs) -> Result<u8, RunError> {
    let m = load_model(model, opts.property)?;
    let dumping = out.dump_cnf.is_some() || out.dump_proof.is_some() || out.dump_points.is_some();
    if dumping && opts.mode != Mode::Tapseq {
        return Err(RunError::Usage("--dump-cnf, --dump-proof and --dump-points need --mode tapseq".into()));
    }
    let mut dumper = DumpObserver::new(out.dump_cnf.as_deref(), out.dump_proof.as_deref(), out.dump_points.as_deref())
        .map_err(|(p, e)| RunError::io(&p, e))?;
    let report = execute(&m, opts, &mut dumper)?;
    dumper.finish().map_err(|(p, e)| RunError::io(&p, e))?;

    let stats = report.stats_text();
    eprint!("{stats}");
    eprintln!("time_s={:.3}", report.seconds);
    if let Some(path) = &out.stats {
        fs::write(path, &stats).map_err(|e| RunError::io(path, e))?;
    }
    if let Some(cex) = &report.cex {
        let text = write_witness(cex, m.property_index());
        match &out.witness {
            Some(path) => fs::write(path, text).map_err(|e| RunError::io(path, e))?,
            None => print!("{text}"),
        }
    }
    Ok(report.exit_code())
}

pub fn validate_command(model: &Path, witness: &Path) -> Result<u8, RunError> {
    let bytes = fs::read(model).map_err(|e| RunError::io(model, e))?;
    let m = parse_aiger(&bytes).map_err(|e| RunError::Model(format!("{}: {e}", model.display())))?;
    let text = fs::read_to_string(witness).map_err(|e| RunError::io(witness, e))?;
    match validate_witness(&m, &text) {
        Ok(cex) => {
            println!("valid: bad reached after {} transitions", cex.depth());
            Ok(0)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(EXIT_INVALID_WITNESS)
        }
    }
}
