//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! name = critical-young
//! flavor = convolution
//! p = 2, 2, 2
//! t1 = 1/6
//! ```
//!
//! Keys are validated before anything runs: unknown keys, duplicates and
//! decimal literals in exponent or weight keys are errors. A line holding
//! only `---` separates scenarios in a batch file.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use weighted_young::exponent::{Exponent, Flavor, ParamTuple, Space, Weight};
use weighted_young::probes::{default_alpha_ladder, default_offset_ladder, default_scale_ladder};

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("key `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("scenario is for `{found}`, command is `{expected}`")]
    KindMismatch { expected: Kind, found: Kind },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Check,
    Probe,
    VerifyLemmas,
    Sweep,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Check => "check",
            Kind::Probe => "probe",
            Kind::VerifyLemmas => "verify-lemmas",
            Kind::Sweep => "sweep",
        })
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "check" => Ok(Kind::Check),
            "probe" => Ok(Kind::Probe),
            "verify-lemmas" => Ok(Kind::VerifyLemmas),
            "sweep" => Ok(Kind::Sweep),
            other => Err(format!("unknown kind `{other}`")),
        }
    }
}

/// Which function spaces a check or sweep is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceChoice {
    /// Weighted Lebesgue for convolution, Fourier–Lebesgue for multiplication.
    Lebesgue,
    M,
    W,
}

impl SpaceChoice {
    pub fn modulation(self) -> Option<Space> {
        match self {
            SpaceChoice::Lebesgue => None,
            SpaceChoice::M => Some(Space::M),
            SpaceChoice::W => Some(Space::W),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeChoice {
    /// Gaussian necessity probe.
    Gaussian,
    /// Translated-bump necessity probe on the `(t1, t2)` pair.
    Translation,
    /// Boundedness sweep; needs a bounded tuple.
    Sweep,
    /// Weighted norm of a single Gaussian along the alpha ladder.
    Norm,
    /// Pointwise lower bound of the Gaussian convolution.
    LowerBound,
    /// All necessity probes on every weight pair.
    Witness,
    /// Sweep for bounded tuples, witness probes otherwise.
    CrossCheck,
}

/// Which weight family a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOver {
    T,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaSuite {
    /// The three descriptions of the admissible window agree on a rational grid.
    Equivalence,
    /// The relaxed range bound leaves convolution verdicts unchanged.
    RangeBound,
    /// The five-region split reproduces `T_F` exactly.
    Decomposition,
    /// Slice-norm estimates for each region.
    SliceEstimates,
    /// Mapping bounds for `T_F` from mixed kernel norms.
    MappingBounds,
}

impl LemmaSuite {
    pub const ALL: [LemmaSuite; 5] = [
        LemmaSuite::Equivalence,
        LemmaSuite::RangeBound,
        LemmaSuite::Decomposition,
        LemmaSuite::SliceEstimates,
        LemmaSuite::MappingBounds,
    ];
}

/// A fully resolved scenario: every default is filled in, so the echo in a
/// run record says exactly what ran.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    pub params: ParamTuple,
    pub flavor: Flavor,
    pub space: SpaceChoice,
    pub probe: ProbeChoice,
    pub alphas: Vec<f64>,
    pub offsets: Vec<f64>,
    pub scales: Vec<f64>,
    pub alpha: f64,
    pub radius: f64,
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub slope_tolerance: f64,
    pub min_r_squared: f64,
    pub seed: u64,
    pub sweep_over: SweepOver,
    pub sweep_values: Vec<Weight>,
    pub sweep_slots: Vec<usize>,
    pub row_cap: usize,
    pub lemmas: Vec<LemmaSuite>,
    pub trials: usize,
}

pub const DEFAULT_ROW_CAP: usize = 20_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

impl Scenario {
    pub fn new(kind: Kind) -> Self {
        Scenario {
            name: "scenario".into(),
            kind,
            params: ParamTuple::new(1),
            flavor: Flavor::Convolution,
            space: SpaceChoice::Lebesgue,
            probe: ProbeChoice::Gaussian,
            alphas: default_alpha_ladder(),
            offsets: default_offset_ladder(),
            scales: default_scale_ladder(),
            alpha: 0.25,
            radius: 8.0,
            grid_n: None,
            grid_l: None,
            slope_tolerance: 0.05,
            min_r_squared: 0.99,
            seed: DEFAULT_SEED,
            sweep_over: SweepOver::T,
            sweep_values: (-4..=4).map(|k| Weight::new(k, 4)).collect(),
            sweep_slots: vec![0, 1, 2],
            row_cap: DEFAULT_ROW_CAP,
            lemmas: LemmaSuite::ALL.to_vec(),
            trials: 8,
        }
    }
}

const KEYS: &[&str] = &[
    "name", "kind", "d", "p", "q", "s", "t", "p0", "p1", "p2", "q0", "q1", "q2", "s0", "s1", "s2", "t0", "t1", "t2",
    "flavor", "space", "probe", "alphas", "offsets", "scales", "alpha", "radius", "grid_n", "grid_l",
    "slope_tolerance", "min_r_squared", "seed", "sweep_over", "sweep_values", "sweep_slots", "row_cap", "lemmas",
    "trials",
];

fn value_err(key: &str, message: impl fmt::Display) -> ScenarioError {
    ScenarioError::Value {
        key: key.to_string(),
        message: message.to_string(),
    }
}

fn list(value: &str) -> Vec<&str> {
    value.split(',').map(str::trim).filter(|v| !v.is_empty()).collect()
}

fn triple<T: FromStr>(key: &str, value: &str) -> Result<[T; 3], ScenarioError>
where
    T::Err: fmt::Display,
{
    let items = list(value);
    if items.len() != 3 {
        return Err(value_err(key, format!("expected three comma-separated values, got {}", items.len())));
    }
    let mut out = Vec::with_capacity(3);
    for item in items {
        out.push(item.parse::<T>().map_err(|e| value_err(key, e))?);
    }
    Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T, ScenarioError>
where
    T::Err: fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| value_err(key, e))
}

fn floats(key: &str, value: &str) -> Result<Vec<f64>, ScenarioError> {
    list(value).into_iter().map(|v| scalar::<f64>(key, v)).collect()
}

fn keyword<T: serde::de::DeserializeOwned>(key: &str, value: &str) -> Result<T, ScenarioError> {
    serde_json::from_value(serde_json::Value::String(value.trim().to_string()))
        .map_err(|_| value_err(key, format!("unrecognized value `{}`", value.trim())))
}

/// Parses one scenario. `kind` is the command's kind; a `kind` key in the
/// file must agree with it.
pub fn parse_scenario(text: &str, kind: Kind) -> Result<Scenario, ScenarioError> {
    let mut sc = Scenario::new(kind);
    let mut seen = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ScenarioError::Syntax {
            line: idx + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ScenarioError::UnknownKey(key.to_string()));
        }
        if !seen.insert(key.to_string()) {
            return Err(ScenarioError::Duplicate(key.to_string()));
        }
        apply(&mut sc, key, value)?;
    }
    for family in ["p", "q", "s", "t"] {
        if seen.contains(family) && (0..3).any(|j| seen.contains(&format!("{family}{j}"))) {
            return Err(value_err(family, "given both as a triple and by component"));
        }
    }
    if sc.kind != kind {
        return Err(ScenarioError::KindMismatch {
            expected: kind,
            found: sc.kind,
        });
    }
    validate(&sc)?;
    Ok(sc)
}

/// Parses a batch file whose scenarios are separated by `---` lines.
pub fn parse_batch(text: &str, kind: Kind) -> Result<Vec<Scenario>, ScenarioError> {
    let mut chunks = vec![String::new()];
    for line in text.lines() {
        if line.trim() == "---" {
            chunks.push(String::new());
        } else {
            let last = chunks.last_mut().expect("non-empty");
            last.push_str(line);
            last.push('\n');
        }
    }
    chunks
        .iter()
        .filter(|c| c.lines().any(|l| !l.split('#').next().unwrap_or("").trim().is_empty()))
        .map(|c| parse_scenario(c, kind))
        .collect()
}

fn apply(sc: &mut Scenario, key: &str, value: &str) -> Result<(), ScenarioError> {
    let v = value.trim();
    match key {
        "name" => {
            if v.is_empty() || !v.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
                return Err(value_err(key, "use letters, digits, `-`, `_` or `.`"));
            }
            sc.name = v.to_string();
        }
        "kind" => sc.kind = v.parse().map_err(|e: String| value_err(key, e))?,
        "d" => {
            let d: u32 = scalar(key, v)?;
            if !(d == 1 || d == 2) {
                return Err(value_err(key, "dimension must be 1 or 2"));
            }
            sc.params.d = d;
        }
        "p" => sc.params.p = triple(key, v)?,
        "q" => sc.params.q = triple(key, v)?,
        "s" => sc.params.s = triple(key, v)?,
        "t" => sc.params.t = triple(key, v)?,
        "p0" | "p1" | "p2" | "q0" | "q1" | "q2" => {
            let j = component(key);
            let e: Exponent = scalar(key, v)?;
            if key.starts_with('p') {
                sc.params.p[j] = e;
            } else {
                sc.params.q[j] = e;
            }
        }
        "s0" | "s1" | "s2" | "t0" | "t1" | "t2" => {
            let j = component(key);
            let w: Weight = scalar(key, v)?;
            if key.starts_with('s') {
                sc.params.s[j] = w;
            } else {
                sc.params.t[j] = w;
            }
        }
        "flavor" => sc.flavor = keyword(key, v)?,
        "space" => {
            sc.space = match v {
                "lebesgue" => SpaceChoice::Lebesgue,
                "M" | "m" => SpaceChoice::M,
                "W" | "w" => SpaceChoice::W,
                other => return Err(value_err(key, format!("unrecognized value `{other}`"))),
            }
        }
        "probe" => sc.probe = keyword(key, v)?,
        "alphas" => sc.alphas = floats(key, v)?,
        "offsets" => sc.offsets = floats(key, v)?,
        "scales" => sc.scales = floats(key, v)?,
        "alpha" => sc.alpha = scalar(key, v)?,
        "radius" => sc.radius = scalar(key, v)?,
        "grid_n" => sc.grid_n = Some(scalar(key, v)?),
        "grid_l" => sc.grid_l = Some(scalar(key, v)?),
        "slope_tolerance" => sc.slope_tolerance = scalar(key, v)?,
        "min_r_squared" => sc.min_r_squared = scalar(key, v)?,
        "seed" => sc.seed = scalar(key, v)?,
        "sweep_over" => sc.sweep_over = keyword(key, v)?,
        "sweep_values" => {
            sc.sweep_values = list(v).into_iter().map(|w| scalar::<Weight>(key, w)).collect::<Result<_, _>>()?
        }
        "sweep_slots" => sc.sweep_slots = list(v).into_iter().map(|w| scalar::<usize>(key, w)).collect::<Result<_, _>>()?,
        "row_cap" => sc.row_cap = scalar(key, v)?,
        "lemmas" => {
            sc.lemmas = if v == "all" {
                LemmaSuite::ALL.to_vec()
            } else {
                list(v).into_iter().map(|w| keyword(key, w)).collect::<Result<_, _>>()?
            }
        }
        "trials" => sc.trials = scalar(key, v)?,
        _ => unreachable!("key list and match arms agree"),
    }
    Ok(())
}

fn component(key: &str) -> usize {
    (key.as_bytes()[1] - b'0') as usize
}

fn validate(sc: &Scenario) -> Result<(), ScenarioError> {
    for (key, ladder) in [("alphas", &sc.alphas), ("offsets", &sc.offsets), ("scales", &sc.scales)] {
        if ladder.len() < 2 || ladder.iter().any(|v| !v.is_finite()) {
            return Err(value_err(key, "need at least two finite values"));
        }
    }
    if !(sc.slope_tolerance > 0.0) {
        return Err(value_err("slope_tolerance", "must be positive"));
    }
    if !(0.0..=1.0).contains(&sc.min_r_squared) {
        return Err(value_err("min_r_squared", "must lie in [0, 1]"));
    }
    if sc.sweep_values.is_empty() {
        return Err(value_err("sweep_values", "need at least one value"));
    }
    let slots: BTreeSet<usize> = sc.sweep_slots.iter().copied().collect();
    if slots.is_empty() || slots.len() != sc.sweep_slots.len() || slots.iter().any(|&j| j > 2) {
        return Err(value_err("sweep_slots", "distinct slots among 0, 1, 2"));
    }
    if sc.trials == 0 {
        return Err(value_err("trials", "must be positive"));
    }
    Ok(())
}

/// Renders a scenario back into the file format; parsing the output gives
/// the same scenario.
pub fn to_text(sc: &Scenario) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    let trip = |v: [String; 3]| v.join(", ");
    let kw = |v: &dyn erased::Kw| v.kw();
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    line("name", sc.name.clone());
    line("kind", sc.kind.to_string());
    line("d", sc.params.d.to_string());
    line("p", trip(sc.params.p.map(|e| e.to_string())));
    line("q", trip(sc.params.q.map(|e| e.to_string())));
    line("s", trip(sc.params.s.map(|e| e.to_string())));
    line("t", trip(sc.params.t.map(|e| e.to_string())));
    line("flavor", kw(&sc.flavor));
    line(
        "space",
        match sc.space {
            SpaceChoice::Lebesgue => "lebesgue".into(),
            SpaceChoice::M => "M".into(),
            SpaceChoice::W => "W".into(),
        },
    );
    line("probe", kw(&sc.probe));
    line("alphas", join(&sc.alphas));
    line("offsets", join(&sc.offsets));
    line("scales", join(&sc.scales));
    line("alpha", format!("{:?}", sc.alpha));
    line("radius", format!("{:?}", sc.radius));
    if let Some(n) = sc.grid_n {
        line("grid_n", n.to_string());
    }
    if let Some(l) = sc.grid_l {
        line("grid_l", format!("{l:?}"));
    }
    line("slope_tolerance", format!("{:?}", sc.slope_tolerance));
    line("min_r_squared", format!("{:?}", sc.min_r_squared));
    line("seed", sc.seed.to_string());
    line("sweep_over", kw(&sc.sweep_over));
    line("sweep_values", sc.sweep_values.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", "));
    line("sweep_slots", sc.sweep_slots.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(", "));
    line("row_cap", sc.row_cap.to_string());
    line("lemmas", sc.lemmas.iter().map(|l| kw(l)).collect::<Vec<_>>().join(", "));
    line("trials", sc.trials.to_string());
    out
}

mod erased {
    use serde::Serialize;

    /// Serialized keyword of a unit enum variant.
    pub trait Kw {
        fn kw(&self) -> String;
    }

    impl<T: Serialize> Kw for T {
        fn kw(&self) -> String {
            match serde_json::to_value(self) {
                Ok(serde_json::Value::String(s)) => s,
                other => panic!("not a keyword: {other:?}"),
            }
        }
    }
}
