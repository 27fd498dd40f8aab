//! Scenario execution: one [`RunRecord`] per scenario.

use std::collections::BTreeMap;
use std::time::Instant;

use weighted_young::exponent::{format_rational, rational_to_f64, Classification, Flavor, ParamTuple, Rational, Verdict, Weight};
use weighted_young::grid::Grid;
use weighted_young::probes::{
    boundedness_sweep, gaussian_lower_bound_check, gaussian_necessity_probe, gaussian_norm_slope, necessity_witness,
    translation_necessity_probe, ProbeConfig, ProbeKind, ProbeReport, SweepFlavor,
};
use weighted_young::Error;

use crate::lemmas::run_suites;
use crate::record::*;
use crate::scenario::{Kind, ProbeChoice, Scenario, SpaceChoice, SweepOver};

/// Violation margin from which a probe is expected to show growth.
pub const WITNESS_MARGIN: Rational = Rational::new_raw(1, 4);

pub fn sweep_flavor(flavor: Flavor, space: SpaceChoice) -> SweepFlavor {
    match (flavor, space.modulation()) {
        (Flavor::Convolution, None) => SweepFlavor::Convolution,
        (Flavor::Multiplication, None) => SweepFlavor::Multiplication,
        (Flavor::Convolution, Some(s)) => SweepFlavor::ModulationConvolution(s),
        (Flavor::Multiplication, Some(s)) => SweepFlavor::ModulationMultiplication(s),
    }
}

pub fn verdict(sc: &Scenario) -> Verdict {
    sweep_flavor(sc.flavor, sc.space).verdict(&sc.params)
}

/// Probe grids for the scenario: the standard one-dimensional set, or a
/// coarse planar set for `d = 2`, with the scenario's overrides applied.
pub fn probe_config(sc: &Scenario) -> weighted_young::Result<ProbeConfig> {
    let mut config = ProbeConfig::standard();
    if sc.params.d == 2 {
        let plane = |l: f64, n: usize| Grid::new(2, l, n);
        config.grid = plane(16.0, 128)?;
        config.translation_grid = plane(64.0, 256)?;
        config.fourier_grid = plane(2.0 * std::f64::consts::PI, 64)?;
        config.modulation_grid = plane(16.0, 64)?;
        config.modulation_stride = 4;
    }
    config.slope_tolerance = sc.slope_tolerance;
    config.min_r_squared = sc.min_r_squared;
    config.with_overrides(sc.grid_n, sc.grid_l)
}

fn error_outcome(e: &Error) -> Outcome {
    let kind = match e {
        Error::Resolution(_) => ErrorKind::Resolution,
        Error::Precondition(_) => ErrorKind::Precondition,
        _ => ErrorKind::InvalidParams,
    };
    Outcome::Error {
        kind,
        message: e.to_string(),
    }
}

fn finish(sc: &Scenario, config: Option<ProbeConfig>, outcome: Outcome, exit_code: i32, start: Instant) -> RunRecord {
    RunRecord {
        tool: TOOL.into(),
        version: VERSION.into(),
        scenario: sc.clone(),
        probe_config: config,
        outcome,
        exit_code,
        timings: Timings {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    }
}

/// Runs a scenario according to its kind.
pub fn run(sc: &Scenario) -> RunRecord {
    match sc.kind {
        Kind::Check => cmd_check(sc),
        Kind::Probe => cmd_probe(sc),
        Kind::Sweep => cmd_sweep(sc),
        Kind::VerifyLemmas => cmd_verify_lemmas(sc),
    }
}

pub fn cmd_check(sc: &Scenario) -> RunRecord {
    let start = Instant::now();
    let v = verdict(sc);
    let code = match v.classification {
        Classification::Bounded => EXIT_OK,
        Classification::Unbounded => EXIT_UNBOUNDED,
        Classification::Undetermined => EXIT_UNDETERMINED,
    };
    let binding = v.binding_conditions().iter().map(|c| c.id.clone()).collect();
    finish(sc, None, Outcome::Check { verdict: v, binding }, code, start)
}

/// Growth only counts as a witness for the necessity probes; the norm
/// ladder and the boundedness sweep simply pass or fail.
fn report_status(r: &ProbeReport) -> ProbeStatus {
    let necessity = matches!(r.probe, ProbeKind::GaussianNecessity | ProbeKind::TranslationNecessity);
    if necessity && r.necessity_witnessed {
        ProbeStatus::NecessityWitnessed
    } else if r.pass {
        ProbeStatus::Pass
    } else {
        ProbeStatus::Fail
    }
}

/// Largest violation among the violated pairwise and critical-sum
/// conditions.
pub fn violation_margin(v: &Verdict) -> Option<Rational> {
    v.trace
        .necessary_violations()
        .filter(|c| c.id.starts_with("pair[") || c.id.starts_with("critical_sum"))
        .map(|c| c.rhs - c.lhs)
        .max()
}

fn probe_params(sc: &Scenario) -> ParamTuple {
    match sc.flavor {
        Flavor::Convolution => sc.params,
        Flavor::Multiplication => sc.params.mirrored(),
    }
}

struct ProbeRun {
    status: ProbeStatus,
    reports: Vec<ProbeReport>,
    bounds: Vec<weighted_young::kernel::BoundReport>,
    witness: Option<weighted_young::probes::WitnessSummary>,
    cross_check: Option<CrossCheck>,
}

impl ProbeRun {
    fn single(r: ProbeReport) -> Self {
        ProbeRun {
            status: report_status(&r),
            reports: vec![r],
            bounds: Vec::new(),
            witness: None,
            cross_check: None,
        }
    }
}

fn run_probe(sc: &Scenario, config: &ProbeConfig) -> weighted_young::Result<ProbeRun> {
    let params = probe_params(sc);
    Ok(match sc.probe {
        ProbeChoice::Gaussian => ProbeRun::single(gaussian_necessity_probe(&params, &sc.alphas, config)?),
        ProbeChoice::Translation => ProbeRun::single(translation_necessity_probe(&params, &sc.offsets, config)?),
        ProbeChoice::Norm => ProbeRun::single(gaussian_norm_slope(
            params.p[1],
            params.t[1],
            params.d as usize,
            &sc.alphas,
            config,
        )?),
        ProbeChoice::Sweep => {
            ProbeRun::single(boundedness_sweep(&sc.params, sweep_flavor(sc.flavor, sc.space), &sc.scales, config)?)
        }
        ProbeChoice::LowerBound => {
            let b = gaussian_lower_bound_check(&params, sc.alpha, sc.radius, config)?;
            ProbeRun {
                status: if b.pass { ProbeStatus::Pass } else { ProbeStatus::Fail },
                reports: Vec::new(),
                bounds: vec![b],
                witness: None,
                cross_check: None,
            }
        }
        ProbeChoice::Witness => {
            let w = necessity_witness(&sc.params, sc.flavor, config)?;
            ProbeRun {
                status: if w.witnessed { ProbeStatus::NecessityWitnessed } else { ProbeStatus::Pass },
                reports: w.reports.clone(),
                bounds: Vec::new(),
                witness: Some(w),
                cross_check: None,
            }
        }
        ProbeChoice::CrossCheck => cross_check(sc, config)?,
    })
}

/// Bounded tuples must pass the boundedness sweep; tuples violating a
/// pairwise or critical-sum condition by at least 1/4 must be witnessed by
/// growth of at least `margin/2 - tolerance`.
fn cross_check(sc: &Scenario, config: &ProbeConfig) -> weighted_young::Result<ProbeRun> {
    let v = verdict(sc);
    let margin = violation_margin(&v);
    let mut run = ProbeRun {
        status: ProbeStatus::Pass,
        reports: Vec::new(),
        bounds: Vec::new(),
        witness: None,
        cross_check: None,
    };
    let (requirement, measured, satisfied) = if v.classification == Classification::Bounded {
        let r = boundedness_sweep(&sc.params, sweep_flavor(sc.flavor, sc.space), &sc.scales, config)?;
        let out = (Requirement::SweepPasses, Some(r.fitted_slope), r.pass);
        run.reports.push(r);
        out
    } else if let Some(m) = margin.filter(|m| *m >= WITNESS_MARGIN) {
        let needed = rational_to_f64(&m) / 2.0 - config.slope_tolerance;
        let w = necessity_witness(&sc.params, sc.flavor, config)?;
        let best = w.max_growth_slope;
        run.reports = w.reports.clone();
        run.witness = Some(w);
        (Requirement::GrowthAtLeast { slope: needed }, Some(best), best >= needed)
    } else {
        (Requirement::None, None, true)
    };
    run.status = if !satisfied {
        ProbeStatus::Fail
    } else if matches!(requirement, Requirement::GrowthAtLeast { .. }) {
        ProbeStatus::NecessityWitnessed
    } else {
        ProbeStatus::Pass
    };
    run.cross_check = Some(CrossCheck {
        classification: v.classification,
        margin: margin.map(|m| rational_to_f64(&m)),
        margin_exact: margin.map(|m| format_rational(&m)),
        requirement,
        measured,
        satisfied,
    });
    Ok(run)
}

pub fn cmd_probe(sc: &Scenario) -> RunRecord {
    let start = Instant::now();
    let config = match probe_config(sc) {
        Ok(c) => c,
        Err(e) => return finish(sc, None, error_outcome(&e), EXIT_INPUT, start),
    };
    match run_probe(sc, &config) {
        Ok(run) => {
            let code = run.status.exit_code();
            let outcome = Outcome::Probe {
                status: run.status,
                reports: run.reports,
                bounds: run.bounds,
                witness: run.witness,
                cross_check: run.cross_check,
            };
            finish(sc, Some(config), outcome, code, start)
        }
        Err(e) => finish(sc, Some(config), error_outcome(&e), EXIT_INPUT, start),
    }
}

/// Number of rows a sweep scenario would produce.
pub fn sweep_rows(sc: &Scenario) -> usize {
    sc.sweep_values.len().saturating_pow(sc.sweep_slots.len() as u32)
}

pub fn cmd_sweep(sc: &Scenario) -> RunRecord {
    let start = Instant::now();
    let rows_needed = sweep_rows(sc);
    if rows_needed > sc.row_cap {
        let outcome = Outcome::Error {
            kind: ErrorKind::RowCap,
            message: format!("sweep needs {rows_needed} rows, above the cap of {}", sc.row_cap),
        };
        return finish(sc, None, outcome, EXIT_INPUT, start);
    }
    let flavor = sweep_flavor(sc.flavor, sc.space);
    let base = match sc.sweep_over {
        SweepOver::T => sc.params.t,
        SweepOver::S => sc.params.s,
    };
    let mut rows = Vec::with_capacity(rows_needed);
    let mut counts = BTreeMap::new();
    let k = sc.sweep_values.len();
    for mut code in 0..rows_needed {
        let mut w: [Weight; 3] = base;
        for &slot in sc.sweep_slots.iter().rev() {
            w[slot] = sc.sweep_values[code % k];
            code /= k;
        }
        let params = match sc.sweep_over {
            SweepOver::T => sc.params.with_t(w),
            SweepOver::S => sc.params.with_s(w),
        };
        let v = flavor.verdict(&params);
        let binding: Vec<String> = v.binding_conditions().iter().map(|c| c.id.clone()).collect();
        let strict = v
            .trace
            .conditions()
            .iter()
            .filter(|c| c.strictness_required)
            .map(|c| c.id.clone())
            .collect();
        *counts.entry(v.classification.to_string()).or_insert(0) += 1;
        rows.push(SweepRow {
            params,
            weights: w.map(|x| x.to_string()),
            classification: v.classification,
            binding,
            strict,
        });
    }
    finish(sc, None, Outcome::Sweep { rows, counts }, EXIT_OK, start)
}

pub fn cmd_verify_lemmas(sc: &Scenario) -> RunRecord {
    let start = Instant::now();
    match run_suites(sc) {
        Ok(cases) => {
            let code = if cases.iter().all(|c| c.pass) { EXIT_OK } else { EXIT_FAIL };
            finish(sc, None, Outcome::Lemmas { cases }, code, start)
        }
        Err(e) => finish(sc, None, error_outcome(&e), EXIT_INPUT, start),
    }
}
