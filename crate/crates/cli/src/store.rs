//! Reading and writing the persisted artifacts of a run.
//!
//! Every float goes through [`fmt17`] so that a value read back is the value
//! written, and file hashes identify results.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use regret_core::regret::{fmt17, CellStatus, Exploration, RegretMatrix, ScenarioOptimum};
use regret_core::scenarios::ScenarioSet;
use regret_lp::Basis;
use sha2::{Digest, Sha256};

use crate::error::{IoContext, PipelineError, Result};

/// Creates the parent directory and writes `bytes` to `path`.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).at(dir)?;
    }
    fs::write(path, bytes).at(path)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).at(path)
}

/// Runs `fill` against an in-memory buffer, then writes the file in one go.
pub fn write_with(path: &Path, fill: impl FnOnce(&mut Vec<u8>) -> std::result::Result<(), String>) -> Result<()> {
    let mut buf = Vec::new();
    fill(&mut buf).map_err(|m| PipelineError::corrupt(path, m))?;
    write_file(path, &buf)
}

pub fn csv_reader(path: &Path) -> Result<csv::Reader<BufReader<fs::File>>> {
    let f = fs::File::open(path).at(path)?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(BufReader::new(f)))
}

/// Header and rows of a CSV file.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv_reader(path)?;
    let header = r.headers().map_err(|e| PipelineError::corrupt(path, e))?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()
        .map_err(|e| PipelineError::corrupt(path, e))?;
    Ok((header, rows))
}

pub fn parse_f64(path: &Path, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|e| PipelineError::corrupt(path, format!("'{s}': {e}")))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_scenarios(path: &Path, s: &ScenarioSet) -> Result<()> {
    write_with(path, |buf| s.write_csv(buf).map_err(|e| e.to_string()))
}

pub fn read_scenarios(path: &Path) -> Result<ScenarioSet> {
    let f = fs::File::open(path).at(path)?;
    ScenarioSet::read_csv(BufReader::new(f)).map_err(|e| PipelineError::corrupt(path, e))
}

/// Physical values of the uncertain parameters, one row per scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterTable {
    pub names: Vec<String>,
    /// `columns[p][i]`: parameter `p` in scenario `i`.
    pub columns: Vec<Vec<f64>>,
}

impl ParameterTable {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_with(path, |buf| {
            let mut w = csv::Writer::from_writer(buf);
            let header = std::iter::once("scenario".to_string()).chain(self.names.iter().cloned());
            w.write_record(header).map_err(|e| e.to_string())?;
            let n = self.columns.first().map_or(0, Vec::len);
            for i in 0..n {
                let row = std::iter::once(i.to_string()).chain(self.columns.iter().map(|c| fmt17(c[i])));
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let (header, rows) = read_table(path)?;
        let names: Vec<String> = header.into_iter().skip(1).collect();
        let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
        for row in &rows {
            if row.len() != names.len() + 1 {
                return Err(PipelineError::corrupt(path, "ragged row"));
            }
            for (c, cell) in columns.iter_mut().zip(&row[1..]) {
                c.push(parse_f64(path, cell)?);
            }
        }
        Ok(Self { names, columns })
    }
}

const OPTIMA_FIXED: [&str; 5] = ["scenario", "status", "cost", "biomass_used", "biomass_available"];

/// `optima.csv` holds one line per scenario; `bases.txt` the optimal bases.
pub fn write_exploration(optima: &Path, bases: &Path, ex: &Exploration) -> Result<()> {
    write_with(optima, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        let header = OPTIMA_FIXED.iter().map(|s| s.to_string()).chain(ex.output_names.iter().cloned());
        w.write_record(header).map_err(|e| e.to_string())?;
        for (i, o) in ex.optima.iter().enumerate() {
            let outputs: Vec<String> = if o.outputs.is_empty() {
                vec![fmt17(f64::NAN); ex.output_names.len()]
            } else {
                o.outputs.iter().map(|v| fmt17(*v)).collect()
            };
            let row = [i.to_string(), o.status.to_string(), fmt17(o.cost), fmt17(o.biomass_used), fmt17(o.biomass_available)]
                .into_iter()
                .chain(outputs);
            w.write_record(row).map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())
    })?;
    write_with(bases, |buf| {
        for (i, o) in ex.optima.iter().enumerate() {
            let text = o.basis.as_ref().map_or_else(|| "-".to_string(), Basis::to_compact);
            writeln!(buf, "{i} {text}").map_err(|e| e.to_string())?;
        }
        Ok(())
    })
}

/// Reads `optima.csv`, and the bases too when `bases` is given.
pub fn read_exploration(optima: &Path, bases: Option<&Path>) -> Result<Exploration> {
    let (header, rows) = read_table(optima)?;
    if header.len() < OPTIMA_FIXED.len() || header[..OPTIMA_FIXED.len()] != OPTIMA_FIXED {
        return Err(PipelineError::corrupt(optima, "unexpected header"));
    }
    let output_names: Vec<String> = header[OPTIMA_FIXED.len()..].to_vec();
    let mut list = Vec::with_capacity(rows.len());
    for row in &rows {
        if row.len() != header.len() {
            return Err(PipelineError::corrupt(optima, "ragged row"));
        }
        let status: CellStatus = row[1].parse().map_err(|e: String| PipelineError::corrupt(optima, e))?;
        let outputs = if status.is_optimal() {
            row[OPTIMA_FIXED.len()..].iter().map(|c| parse_f64(optima, c)).collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        list.push(ScenarioOptimum {
            status,
            cost: parse_f64(optima, &row[2])?,
            outputs,
            biomass_used: parse_f64(optima, &row[3])?,
            biomass_available: parse_f64(optima, &row[4])?,
            basis: None,
            iterations: 0,
        });
    }
    if let Some(path) = bases {
        let text = read_text(path)?;
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() != list.len() {
            return Err(PipelineError::corrupt(path, format!("{} bases for {} scenarios", lines.len(), list.len())));
        }
        for (i, (line, o)) in lines.iter().zip(&mut list).enumerate() {
            let (id, body) = line.split_once(' ').ok_or_else(|| PipelineError::corrupt(path, "missing separator"))?;
            if id != i.to_string() {
                return Err(PipelineError::corrupt(path, format!("line {i} is for scenario {id}")));
            }
            if body != "-" {
                o.basis = Some(Basis::from_compact(body).ok_or_else(|| PipelineError::corrupt(path, format!("basis {i}")))?);
            }
        }
    }
    Ok(Exploration { output_names, optima: list })
}

/// Writes `regret_matrix.csv`, `costs.csv` and `cell_status.csv` into `dir`.
pub fn write_regret_matrix(dir: &Path, rm: &RegretMatrix) -> Result<()> {
    write_with(&dir.join(REGRET_FILE), |b| rm.write_regret_csv(b).map_err(|e| e.to_string()))?;
    write_with(&dir.join(COSTS_FILE), |b| rm.write_costs_csv(b).map_err(|e| e.to_string()))?;
    write_with(&dir.join(STATUS_FILE), |b| rm.write_status_csv(b).map_err(|e| e.to_string()))
}

pub const REGRET_FILE: &str = "regret_matrix.csv";
pub const COSTS_FILE: &str = "costs.csv";
pub const STATUS_FILE: &str = "cell_status.csv";

fn matrix_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let (header, rows) = read_table(path)?;
    let n = header.len().saturating_sub(1);
    let names = rows.iter().map(|r| r[0].clone()).collect();
    let cells = rows
        .into_iter()
        .map(|r| if r.len() == n + 1 { Ok(r[1..].to_vec()) } else { Err(PipelineError::corrupt(path, "ragged row")) })
        .collect::<Result<_>>()?;
    Ok((names, cells))
}

fn numbers(path: &Path, rows: Vec<Vec<String>>) -> Result<Vec<Vec<f64>>> {
    rows.iter().map(|r| r.iter().map(|c| parse_f64(path, c)).collect()).collect()
}

pub fn read_regret_matrix(dir: &Path) -> Result<RegretMatrix> {
    let rp = dir.join(REGRET_FILE);
    let cp = dir.join(COSTS_FILE);
    let sp = dir.join(STATUS_FILE);
    let (strategies, regret) = matrix_rows(&rp)?;
    let regret = numbers(&rp, regret)?;
    let (cost_names, cost) = matrix_rows(&cp)?;
    let mut cost = numbers(&cp, cost)?;
    if cost_names.last().map(String::as_str) != Some("optimum") || cost_names.len() != strategies.len() + 1 {
        return Err(PipelineError::corrupt(&cp, "expected one row per strategy and a final optimum row"));
    }
    let c_opt = cost.pop().unwrap_or_default();
    let (status_names, status) = matrix_rows(&sp)?;
    if status_names != strategies {
        return Err(PipelineError::corrupt(&sp, "strategy rows differ from the regret matrix"));
    }
    let status = status
        .into_iter()
        .map(|r| r.iter().map(|c| c.parse::<CellStatus>().map_err(|e| PipelineError::corrupt(&sp, e))).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok(RegretMatrix { strategies, regret, cost, c_opt, status })
}

/// File-system safe version of a strategy or parameter name.
pub fn slug(name: &str) -> String {
    let s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect();
    s.trim_matches('_').to_string()
}

/// All files below `root`, relative and `/`-separated, sorted.
pub fn list_files(root: &Path) -> Result<Vec<PathBuf>> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
        for entry in fs::read_dir(dir).at(dir)? {
            let entry = entry.at(dir)?;
            let path = entry.path();
            if entry.file_type().at(&path)?.is_dir() {
                walk(root, &path, out)?;
            } else {
                out.push(path.strip_prefix(root).expect("below root").to_path_buf());
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(root, root, &mut out)?;
    out.sort();
    Ok(out)
}

pub fn buffered(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).at(dir)?;
    }
    Ok(BufWriter::new(fs::File::create(path).at(path)?))
}
