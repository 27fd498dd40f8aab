use rayon::prelude::*;

use super::{
    check_dim, check_params_dim, fitted_report, guard_alpha, guard_tail, GaussianFamily, LadderPoint, ProbeConfig,
    ProbeKind, ProbeReport, DUALITY_PERMUTATIONS,
};
use crate::error::{Error, Result};
use crate::exponent::{rational_to_f64, Exponent, ParamTuple, Rational, Weight};
use crate::grid::{bracket, convolve, weighted_lebesgue_norm, SampledFunction};
use crate::kernel::BoundReport;
use crate::stats::median;

fn check_alpha_ladder(alphas: &[f64]) -> Result<()> {
    if alphas.len() < 2 {
        return Err(Error::InvalidParams("alpha ladder needs at least two points".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
        return Err(Error::InvalidParams(format!("alpha = {a} not in (0, 1]")));
    }
    let increasing = alphas.windows(2).all(|w| w[0] < w[1]);
    let decreasing = alphas.windows(2).all(|w| w[0] > w[1]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidParams("alpha ladder must be strictly monotone".into()));
    }
    Ok(())
}

/// `||<x>^{-t} e^{-alpha |x|^2}||_{L^p_t}` along the ladder, against
/// `1/alpha`; the predicted slope is `d/(2p)` whatever `t` is, and the
/// tolerance is 5% of it (0.05 absolute when it vanishes).
pub fn gaussian_norm_slope(p: Exponent, t: Weight, d: usize, alphas: &[f64], config: &ProbeConfig) -> Result<ProbeReport> {
    check_alpha_ladder(alphas)?;
    let grid = config.grid;
    check_dim(grid, d)?;
    let values = alphas
        .par_iter()
        .map(|&alpha| {
            guard_alpha(&grid, alpha)?;
            let member = GaussianFamily::new(alpha, [t; 3], d)?.member(0, grid)?;
            weighted_lebesgue_norm(&member, p, t)
        })
        .collect::<Result<Vec<f64>>>()?;
    let predicted = d as f64 * rational_to_f64(&p.reciprocal()) / 2.0;
    let tolerance = if predicted > 0.0 { 0.05 * predicted } else { config.slope_tolerance };
    let scales: Vec<f64> = alphas.iter().map(|a| 1.0 / a).collect();
    let ladder = scales.iter().zip(&values).map(|(&scale, &value)| LadderPoint { scale, value }).collect();
    fitted_report(ProbeKind::GaussianNorm, [0, 1, 2], ladder, &scales, predicted, tolerance, config.min_r_squared, 1.0)
}

/// First relabeling that puts a nonnegative weight in slot 1.
pub(crate) fn nonnegative_t1_permutation(params: &ParamTuple) -> Option<[usize; 3]> {
    DUALITY_PERMUTATIONS
        .into_iter()
        .find(|perm| params.t[perm[1]].value() >= Rational::from_integer(0))
}

/// Operator ratio `||f1 * f2||_{L^{p0'}_{-t0}} / (||f1||_{L^{p1}_{t1}} ||f2||_{L^{p2}_{t2}})`
/// for the Gaussian family at one `alpha`.
pub(crate) fn gaussian_operator_ratio(params: &ParamTuple, alpha: f64, config: &ProbeConfig) -> Result<f64> {
    let grid = config.grid;
    guard_alpha(&grid, alpha)?;
    let family = GaussianFamily::new(alpha, params.t, params.d as usize)?;
    let f1 = family.member(1, grid)?;
    let f2 = family.member(2, grid)?;
    guard_tail(&f1, "f1")?;
    guard_tail(&f2, "f2")?;
    let g = convolve(&f1, &f2)?;
    guard_tail(&g, "f1 * f2")?;
    let num = weighted_lebesgue_norm(&g, params.p[0].conjugate(), neg(params.t[0]))?;
    let den = weighted_lebesgue_norm(&f1, params.p[1], params.t[1])? * weighted_lebesgue_norm(&f2, params.p[2], params.t[2])?;
    Ok(num / den)
}

fn neg(w: Weight) -> Weight {
    Weight(-w.value())
}

/// Gaussian necessity probe for the convolution estimate. The tuple is
/// first relabeled so that `t1 >= 0`; the predicted slope of the operator
/// ratio against `1/alpha` is `(d R(p) - sum t)/2`, and growth witnesses a
/// violated lower bound on `sum t`.
pub fn gaussian_necessity_probe(params: &ParamTuple, alphas: &[f64], config: &ProbeConfig) -> Result<ProbeReport> {
    check_alpha_ladder(alphas)?;
    check_params_dim(params, config.grid)?;
    let perm = nonnegative_t1_permutation(params).ok_or_else(|| {
        Error::Precondition("every weight t_j is negative; no relabeling gives t1 >= 0".into())
    })?;
    let probed = params.permuted(perm);
    let values = alphas
        .par_iter()
        .map(|&alpha| gaussian_operator_ratio(&probed, alpha, config))
        .collect::<Result<Vec<f64>>>()?;
    let sum_t: Rational = probed.t.iter().map(|w| w.value()).sum();
    let predicted = rational_to_f64(&(Rational::from_integer(probed.d as i64) * probed.r_p() - sum_t)) / 2.0;
    let scales: Vec<f64> = alphas.iter().map(|a| 1.0 / a).collect();
    let ladder = scales.iter().zip(&values).map(|(&scale, &value)| LadderPoint { scale, value }).collect();
    let mut report = fitted_report(
        ProbeKind::GaussianNecessity,
        perm,
        ladder,
        &scales,
        predicted,
        config.slope_tolerance,
        config.min_r_squared,
        1.0,
    )?;
    if perm != [0, 1, 2] {
        report.notes.push(format!("relabeled by {perm:?} to make t1 nonnegative"));
    }
    Ok(report)
}

/// Largest `c` with `(f1 * f2)(x) >= c <x>^{d - t1 - t2} e^{-3 alpha |x|^2}`
/// on `|x| <= radius`, reported as the minimum of the pointwise ratios.
pub fn lower_bound_constant(
    f1: &SampledFunction,
    f2: &SampledFunction,
    params: &ParamTuple,
    alpha: f64,
    radius: f64,
) -> Result<BoundReport> {
    check_params_dim(params, *f1.grid())?;
    if f1.max_abs() == 0.0 || f2.max_abs() == 0.0 {
        return Err(Error::Precondition("inputs must not vanish identically".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParams(format!("alpha = {alpha} not in (0, 1]")));
    }
    let grid = *f1.grid();
    let d = grid.dim();
    let g = convolve(f1, f2)?;
    let exponent = d as f64 - params.t[1].to_f64() - params.t[2].to_f64();
    let mut scan = Vec::new();
    let mut ratios = Vec::new();
    for (k, v) in g.values().iter().enumerate() {
        let x = grid.point(k);
        let x = &x[..d];
        let r2: f64 = x.iter().map(|c| c * c).sum();
        if r2.sqrt() > radius {
            continue;
        }
        let h = bracket(x).powf(exponent) * (-3.0 * alpha * r2).exp();
        scan.push(r2.sqrt());
        ratios.push(v.re / h);
    }
    if ratios.is_empty() {
        return Err(Error::InvalidParams(format!("no grid point within radius {radius}")));
    }
    let c = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pass = c.is_finite() && c > 0.0;
    Ok(BoundReport {
        label: format!("gaussian lower bound, alpha = {alpha}"),
        median_ratio: median(&ratios),
        scan,
        ratios,
        max_ratio,
        slope: None,
        pass,
        under_resolved: Vec::new(),
        notes: vec![format!("largest admissible constant c = {c:.6e}")],
    })
}

/// Pointwise lower bound for the Gaussian family: builds `f1`, `f2` and
/// checks the bound on `|x| <= radius`.
pub fn gaussian_lower_bound_check(params: &ParamTuple, alpha: f64, radius: f64, config: &ProbeConfig) -> Result<BoundReport> {
    check_params_dim(params, config.grid)?;
    if params.t[1].value() < Rational::from_integer(0) {
        return Err(Error::Precondition("the lower bound assumes t1 >= 0".into()));
    }
    guard_alpha(&config.grid, alpha)?;
    let family = GaussianFamily::new(alpha, params.t, params.d as usize)?;
    let f1 = family.member(1, config.grid)?;
    let f2 = family.member(2, config.grid)?;
    lower_bound_constant(&f1, &f2, params, alpha, radius)
}
