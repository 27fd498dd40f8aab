//! Machine-readable results of a single scenario run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use weighted_young::exponent::{Classification, ParamTuple, Verdict};
use weighted_young::kernel::BoundReport;
use weighted_young::probes::{ProbeConfig, ProbeReport, WitnessSummary};

use crate::scenario::{LemmaSuite, Scenario};

pub const TOOL: &str = "wyoung";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes. `check`: bounded / unbounded / undetermined. `probe`:
/// passed / necessity witnessed / failed. Anything malformed, a violated
/// precondition or a resolution-guard hit exits with [`EXIT_INPUT`].
pub const EXIT_OK: i32 = 0;
pub const EXIT_UNBOUNDED: i32 = 1;
pub const EXIT_WITNESSED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;
pub const EXIT_FAIL: i32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    /// The scenario as executed, defaults and command-line overrides included.
    pub scenario: Scenario,
    pub probe_config: Option<ProbeConfig>,
    pub outcome: Outcome,
    pub exit_code: i32,
    pub timings: Timings,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

impl RunRecord {
    /// Copy with every wall-clock field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> RunRecord {
        let mut out = self.clone();
        out.timings = Timings::default();
        if let Outcome::Lemmas { cases } = &mut out.outcome {
            for case in cases {
                case.elapsed_ms = 0.0;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outcome {
    Check {
        verdict: Verdict,
        /// Ids of the conditions that decided the verdict.
        binding: Vec<String>,
    },
    Probe {
        status: ProbeStatus,
        reports: Vec<ProbeReport>,
        bounds: Vec<BoundReport>,
        witness: Option<WitnessSummary>,
        cross_check: Option<CrossCheck>,
    },
    Sweep {
        rows: Vec<SweepRow>,
        counts: BTreeMap<String, usize>,
    },
    Lemmas {
        cases: Vec<LemmaCase>,
    },
    Error {
        kind: ErrorKind,
        message: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStatus {
    Pass,
    NecessityWitnessed,
    Fail,
}

impl ProbeStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            ProbeStatus::Pass => EXIT_OK,
            ProbeStatus::NecessityWitnessed => EXIT_WITNESSED,
            ProbeStatus::Fail => EXIT_FAIL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Scenario,
    Precondition,
    Resolution,
    InvalidParams,
    RowCap,
}

/// What the checker verdict demands of the probes, and whether they
/// delivered it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub classification: Classification,
    /// Largest violation `rhs - lhs` over the violated pairwise and
    /// critical-sum conditions, as a decimal.
    pub margin: Option<f64>,
    pub margin_exact: Option<String>,
    pub requirement: Requirement,
    pub measured: Option<f64>,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Requirement {
    /// Bounded tuple: the boundedness sweep must pass.
    SweepPasses,
    /// Violation margin at least 1/4: some probe must grow at this rate.
    GrowthAtLeast { slope: f64 },
    /// Nothing is claimed; probes, if run, are informational.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: ParamTuple,
    /// The swept weights, in slot order, as exact rationals.
    pub weights: [String; 3],
    pub classification: Classification,
    pub binding: Vec<String>,
    /// Strict inequalities the verdict depended on.
    pub strict: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCase {
    pub suite: LemmaSuite,
    pub label: String,
    pub pass: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
    pub elapsed_ms: f64,
}
