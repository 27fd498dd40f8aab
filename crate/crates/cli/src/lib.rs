//! Scenario-driven front end for the weighted-young checks and probes.
//!
//! A scenario file fixes a parameter tuple and the knobs of one command;
//! running it yields a [`record::RunRecord`] that echoes the resolved
//! scenario next to the verdict or reports.

pub mod commands;
pub mod lemmas;
pub mod record;
pub mod render;
pub mod scenario;

use std::collections::BTreeSet;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use record::{RunRecord, EXIT_INPUT};
use render::Format;
use scenario::{parse_batch, Kind, Scenario};

/// Command-line settings that take precedence over scenario files.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, sc: &mut Scenario) {
        if let Some(seed) = self.seed {
            sc.seed = seed;
        }
        if let Some(n) = self.grid_n {
            sc.grid_n = Some(n);
        }
        if let Some(l) = self.grid_l {
            sc.grid_l = Some(l);
        }
    }
}

/// Reads every file (`-` is stdin) and returns the scenarios in order.
/// Names must be unique across the batch since they name output files.
pub fn load_scenarios(paths: &[PathBuf], kind: Kind, overrides: Overrides) -> anyhow::Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for path in paths {
        let text = if path.as_os_str() == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        } else {
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        };
        let batch = parse_batch(&text, kind).with_context(|| format!("in {}", path.display()))?;
        if batch.is_empty() {
            bail!("{} holds no scenario", path.display());
        }
        out.extend(batch);
    }
    let mut names = BTreeSet::new();
    for sc in &mut out {
        overrides.apply(sc);
        if !names.insert(sc.name.clone()) {
            bail!("scenario name `{}` used twice in one batch", sc.name);
        }
    }
    Ok(out)
}

/// Runs scenarios concurrently; records come back in input order.
pub fn run_batch(scenarios: &[Scenario]) -> Vec<RunRecord> {
    scenarios.par_iter().map(commands::run).collect()
}

/// Exit code of a batch: input errors first, otherwise the largest code.
pub fn batch_exit(records: &[RunRecord]) -> i32 {
    if records.iter().any(|r| r.exit_code == EXIT_INPUT) {
        EXIT_INPUT
    } else {
        records.iter().map(|r| r.exit_code).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub name: String,
    pub kind: Kind,
    pub exit_code: i32,
    pub json: String,
    pub csv: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Index {
    pub tool: String,
    pub version: String,
    pub exit_code: i32,
    pub runs: Vec<IndexEntry>,
}

/// Writes `<name>.json` and `<name>.csv` per record, then `index.json`.
pub fn write_outputs(dir: &Path, records: &[RunRecord]) -> anyhow::Result<Index> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut runs = Vec::new();
    for rec in records {
        let name = &rec.scenario.name;
        let json = format!("{name}.json");
        let csv = format!("{name}.csv");
        fs::write(dir.join(&json), render::render(rec, Format::Json)?)?;
        fs::write(dir.join(&csv), render::render(rec, Format::Csv)?)?;
        runs.push(IndexEntry {
            name: name.clone(),
            kind: rec.scenario.kind,
            exit_code: rec.exit_code,
            json,
            csv,
        });
    }
    let index = Index {
        tool: record::TOOL.into(),
        version: record::VERSION.into(),
        exit_code: batch_exit(records),
        runs,
    };
    fs::write(dir.join("index.json"), serde_json::to_string_pretty(&index)? + "\n")?;
    Ok(index)
}
