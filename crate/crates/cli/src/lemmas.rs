//! Verification suites behind `verify-lemmas`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weighted_young::exponent::{
    check_convolution_with, lemma_equivalence_holds, rat, Exponent, ParamTuple, RangeBound, Rational, Weight,
};
use weighted_young::grid::{Grid, SampledFunction};
use weighted_young::kernel::{
    decomposition_residual, in_region, region_of, verify_lemma_intestimates, verify_prop_tf_bounds, KernelParams,
    PropBoundConfig, PropCase, RegionId, RegionParams,
};
use weighted_young::Result;

use crate::record::LemmaCase;
use crate::scenario::{LemmaSuite, Scenario};

pub const RESIDUAL_TOL: f64 = 1e-12;
pub const DECOMPOSITION_PAIRS: usize = 20;
/// Upper end of the slice-norm scan.
pub const SCAN_MAX: f64 = 100.0;

/// Weight configurations for the decomposition residual.
pub fn decomposition_weights() -> [[Weight; 3]; 5] {
    let w = Weight::new;
    [
        [w(0, 1), w(0, 1), w(0, 1)],
        [w(1, 1), w(1, 1), w(1, 1)],
        [w(2, 1), w(0, 1), w(1, 1)],
        [w(1, 2), w(-1, 1), w(2, 1)],
        [w(-1, 3), w(3, 2), w(-1, 2)],
    ]
}

/// Slice-norm cases: region, exponent, weights.
pub fn slice_cases() -> [(RegionId, Exponent, [i64; 3]); 5] {
    [
        (RegionId::Omega1, Exponent::int(2), [1, 1, 1]),
        (RegionId::Omega3, Exponent::INF, [0, 1, 1]),
        (RegionId::Omega4, Exponent::int(2), [1, 0, 0]),
        (RegionId::Omega2, Exponent::int(1), [0, 1, 2]),
        (RegionId::Omega5, Exponent::int(2), [0, 1, 1]),
    ]
}

fn twelfths() -> impl Iterator<Item = [Rational; 3]> {
    (0..13).flat_map(|a| (0..13).flat_map(move |b| (0..13).map(move |c| [a, b, c].map(|k| rat(k, 12)))))
}

fn case(suite: LemmaSuite, label: impl Into<String>, pass: bool, detail: String, metrics: BTreeMap<String, f64>, start: Instant) -> LemmaCase {
    LemmaCase {
        suite,
        label: label.into(),
        pass,
        detail,
        metrics,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn metrics<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// All `13^3` triples `x` in `{0, 1/12, ..., 1}^3`.
pub fn equivalence_suite() -> Vec<LemmaCase> {
    let start = Instant::now();
    let mut failures = 0usize;
    let mut total = 0usize;
    for x in twelfths() {
        total += 1;
        if !lemma_equivalence_holds(x) {
            failures += 1;
        }
    }
    vec![case(
        LemmaSuite::Equivalence,
        "window equivalence on {0, 1/12, ..., 1}^3",
        failures == 0,
        format!("{failures} failures in {total} triples"),
        metrics([("triples", total as f64), ("failures", failures as f64)]),
        start,
    )]
}

/// The same grid read as reciprocal exponents, against a few weight
/// configurations: the relaxed range bound must not change any verdict.
pub fn range_bound_suite(d: u32) -> Vec<LemmaCase> {
    let start = Instant::now();
    let w = Weight::new;
    let weights = [
        [w(0, 1); 3],
        [w(1, 2); 3],
        [w(1, 6); 3],
        [w(0, 1), w(1, 1), w(-1, 1)],
        [w(1, 1), w(1, 1), w(1, 1)],
        [w(-1, 4), w(1, 2), w(1, 2)],
    ];
    let mut discrepancies = 0usize;
    let mut total = 0usize;
    for x in twelfths() {
        let p = x.map(|r| Exponent::from_reciprocal(r).expect("reciprocal in [0, 1]"));
        for t in weights {
            let params = ParamTuple::new(d).with_p(p).with_t(t);
            total += 1;
            let half = check_convolution_with(&params, RangeBound::Half).classification;
            let relaxed = check_convolution_with(&params, RangeBound::Relaxed).classification;
            if half != relaxed {
                discrepancies += 1;
            }
        }
    }
    vec![case(
        LemmaSuite::RangeBound,
        "relaxed range bound leaves convolution verdicts unchanged",
        discrepancies == 0,
        format!("{discrepancies} discrepancies in {total} tuples"),
        metrics([("tuples", total as f64), ("discrepancies", discrepancies as f64)]),
        start,
    )]
}

/// Default grid for the decomposition suite.
pub fn decomposition_grid(d: u32, n: Option<usize>, l: Option<f64>) -> Result<Grid> {
    match d {
        1 => Grid::new(1, l.unwrap_or(40.0), n.unwrap_or(256)),
        _ => Grid::new(2, l.unwrap_or(12.0), n.unwrap_or(32)),
    }
}

fn random_smooth(grid: Grid, rng: &mut ChaCha8Rng) -> Result<SampledFunction> {
    let centre: f64 = rng.random_range(-2.0..2.0);
    let a: f64 = rng.random_range(0.2..1.0);
    let phase: f64 = rng.random_range(-1.0..1.0);
    SampledFunction::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| (v - centre) * (v - centre)).sum();
        Complex64::from_polar((-a * r2).exp(), phase * x[0])
    })
}

/// Region partition of every grid pair, then the five-region residual for
/// random smooth pairs under each weight configuration.
pub fn decomposition_suite(grid: Grid, seed: u64) -> Result<Vec<LemmaCase>> {
    let rp = RegionParams::default();
    let mut out = Vec::new();

    let start = Instant::now();
    let d = grid.dim();
    let mut counts = [0usize; 5];
    let mut unassigned = 0usize;
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let (x, y) = (grid.point(i), grid.point(j));
            let (x, y) = (&x[..d], &y[..d]);
            let r = region_of(x, y, &rp);
            // Region 2 is taken minus region 1; the cover is disjoint after that.
            let member = in_region(r, x, y, &rp) && !(r == RegionId::Omega2 && in_region(RegionId::Omega1, x, y, &rp));
            if member {
                counts[r.index() - 1] += 1;
            } else {
                unassigned += 1;
            }
        }
    }
    let pairs = grid.len() * grid.len();
    let mut m = metrics([("pairs", pairs as f64), ("unassigned", unassigned as f64)]);
    for (k, c) in counts.iter().enumerate() {
        m.insert(format!("region_{}", k + 1), *c as f64);
    }
    out.push(case(
        LemmaSuite::Decomposition,
        format!("every grid pair in exactly one region (d={d}, n={}, L={})", grid.n(), grid.half_width()),
        unassigned == 0 && counts.iter().sum::<usize>() == pairs,
        format!("region sizes {counts:?}"),
        m,
        start,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(SampledFunction, SampledFunction)> = (0..DECOMPOSITION_PAIRS)
        .map(|_| Ok((random_smooth(grid, &mut rng)?, random_smooth(grid, &mut rng)?)))
        .collect::<Result<_>>()?;
    for t in decomposition_weights() {
        let start = Instant::now();
        let kp = KernelParams::new(d, t)?;
        let mut worst = 0.0f64;
        for (f, g) in &inputs {
            worst = worst.max(decomposition_residual(&kp, &rp, f, g)?);
        }
        out.push(case(
            LemmaSuite::Decomposition,
            format!("five-region residual, t=({}, {}, {})", t[0], t[1], t[2]),
            worst <= RESIDUAL_TOL,
            format!("max residual {worst:.3e} over {} pairs", inputs.len()),
            metrics([("max_residual", worst)]),
            start,
        ));
    }
    Ok(out)
}

pub fn slice_suite(d: u32) -> Result<Vec<LemmaCase>> {
    let rp = RegionParams::default();
    let mut out = Vec::new();
    for (region, p, t) in slice_cases() {
        let start = Instant::now();
        let kp = KernelParams::new(d as usize, t.map(Weight::int))?;
        let r = verify_lemma_intestimates(region, &kp, &rp, p, SCAN_MAX)?;
        let mut detail = format!("max/median = {:.3}", r.max_ratio / r.median_ratio);
        for note in &r.notes {
            detail.push_str("; ");
            detail.push_str(note);
        }
        out.push(case(
            LemmaSuite::SliceEstimates,
            r.label.clone(),
            r.pass,
            detail,
            metrics([
                ("max_ratio", r.max_ratio),
                ("median_ratio", r.median_ratio),
                ("scan_points", r.scan.len() as f64),
            ]),
            start,
        ));
    }
    Ok(out)
}

pub fn mapping_suite(p: [Exponent; 3], trials: usize, seed: u64) -> Result<Vec<LemmaCase>> {
    let config = PropBoundConfig {
        trials,
        seed,
        ..PropBoundConfig::default()
    };
    let mut out = Vec::new();
    for index in 1..=3 {
        let start = Instant::now();
        let which = PropCase::from_index(index)?;
        let r = verify_prop_tf_bounds(which, p, &config)?;
        out.push(case(
            LemmaSuite::MappingBounds,
            format!("{which:?}, p=({}, {}, {})", p[0], p[1], p[2]),
            r.pass,
            format!("max ratio {:.4}, slope {:?}", r.max_ratio, r.slope),
            metrics([("max_ratio", r.max_ratio), ("median_ratio", r.median_ratio)]),
            start,
        ));
    }
    Ok(out)
}

/// Runs the suites named in the scenario, in suite order.
pub fn run_suites(sc: &Scenario) -> Result<Vec<LemmaCase>> {
    let mut out = Vec::new();
    let mut suites = sc.lemmas.clone();
    suites.sort();
    suites.dedup();
    for suite in suites {
        match suite {
            LemmaSuite::Equivalence => out.extend(equivalence_suite()),
            LemmaSuite::RangeBound => out.extend(range_bound_suite(sc.params.d)),
            LemmaSuite::Decomposition => {
                let grid = decomposition_grid(sc.params.d, sc.grid_n, sc.grid_l)?;
                out.extend(decomposition_suite(grid, sc.seed)?)
            }
            LemmaSuite::SliceEstimates => out.extend(slice_suite(sc.params.d)?),
            LemmaSuite::MappingBounds => out.extend(mapping_suite(sc.params.p, sc.trials, sc.seed)?),
        }
    }
    Ok(out)
}
