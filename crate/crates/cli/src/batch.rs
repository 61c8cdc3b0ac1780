use std::fs;
use std::path::Path;

use tapseq_core::circuits;
use tapseq_core::witness::write_witness;

use crate::run::{execute, load_model, RunError};
use crate::RunOptions;

pub const CSV_HEADER: &str = "name,mode,verdict,states,cex_length,seconds";

fn model_files(dir: &Path) -> Result<Vec<std::path::PathBuf>, RunError> {
    let entries = fs::read_dir(dir).map_err(|e| RunError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut files: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("aag" | "aig")))
        .collect();
    files.sort();
    Ok(files)
}

pub fn batch_command(dir: &Path, opts: &RunOptions, csv: Option<&Path>, witness_dir: Option<&Path>) -> Result<u8, RunError> {
    if let Some(d) = witness_dir {
        fs::create_dir_all(d).map_err(|e| RunError::Io {
            path: d.to_path_buf(),
            source: e,
        })?;
    }
    let mode = format!("{:?}", opts.mode).to_lowercase();
    let mut rows = vec![CSV_HEADER.to_string()];
    println!("{CSV_HEADER}");
    for path in model_files(dir)? {
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let row = match load_model(&path, opts.property).and_then(|m| Ok((execute(&m, opts, &mut ())?, m))) {
            Ok((report, m)) => {
                if let (Some(cex), Some(d)) = (&report.cex, witness_dir) {
                    let p = d.join(format!("{name}.cex"));
                    fs::write(&p, write_witness(cex, m.property_index())).map_err(|e| RunError::Io { path: p, source: e })?;
                }
                let len = report.cex.as_ref().map(|c| c.depth().to_string()).unwrap_or_default();
                format!("{name},{mode},{},{},{len},{:.3}", report.verdict, report.states, report.seconds)
            }
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                format!("{name},{mode},error,,,")
            }
        };
        println!("{row}");
        rows.push(row);
    }
    if let Some(p) = csv {
        fs::write(p, rows.join("\n") + "\n").map_err(|e| RunError::Io {
            path: p.to_path_buf(),
            source: e,
        })?;
    }
    Ok(0)
}

pub fn corpus_command(dir: &Path) -> Result<u8, RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for (name, m) in circuits::corpus() {
        let p = dir.join(format!("{name}.aag"));
        fs::write(&p, m.to_ascii()).map_err(|e| RunError::Io { path: p, source: e })?;
    }
    Ok(0)
}
