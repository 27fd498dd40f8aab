use rayon::prelude::*;

use super::{check_params_dim, fitted_report, BumpFamily, LadderPoint, ProbeConfig, ProbeKind, ProbeReport};
use crate::error::{Error, Result};
use crate::exponent::{rational_to_f64, ParamTuple, Weight};
use crate::grid::{bracket, convolve, weighted_lebesgue_norm};

/// Relative tolerance for the offset independence of `f1 * f2`.
pub const CANCELLATION_TOL: f64 = 1e-10;

/// Translated-bump probe for the pair `(t1, t2)`: the norm product
/// `||f1||_{L^{p1}_{t1}} ||f2||_{L^{p2}_{t2}}` grows like `<x0>^{t1 + t2}`
/// while `f1 * f2 = f0 * f0` does not move, so a negative fitted slope makes
/// the operator ratio grow. Run on a relabeled tuple to reach the other
/// pairs.
pub fn translation_necessity_probe(params: &ParamTuple, offsets: &[f64], config: &ProbeConfig) -> Result<ProbeReport> {
    translation_probe_relabeled(params, [0, 1, 2], offsets, config)
}

pub(crate) fn translation_probe_relabeled(
    params: &ParamTuple,
    perm: [usize; 3],
    offsets: &[f64],
    config: &ProbeConfig,
) -> Result<ProbeReport> {
    let grid = config.translation_grid;
    check_params_dim(params, grid)?;
    if offsets.len() < 2 || !offsets.windows(2).all(|w| w[0] < w[1]) || offsets[0] <= 0.0 {
        return Err(Error::InvalidParams("offsets must be positive and strictly increasing".into()));
    }
    let probed = params.permuted(perm);
    let d = probed.d as usize;
    let base = BumpFamily::along_axis(0.0, d).base(grid)?;
    let reference = convolve(&base, &base)?;
    let ref_max = reference.max_abs();
    let target_p = probed.p[0].conjugate();
    let target_t = Weight(-probed.t[0].value());

    let rows = offsets
        .par_iter()
        .map(|&x0| {
            let family = BumpFamily::along_axis(x0, d);
            let f1 = family.member(1.0, grid)?;
            let f2 = family.member(-1.0, grid)?;
            let product = weighted_lebesgue_norm(&f1, probed.p[1], probed.t[1])?
                * weighted_lebesgue_norm(&f2, probed.p[2], probed.t[2])?;
            let g = convolve(&f1, &f2)?;
            let cancellation = g.max_abs_diff(&reference)? / ref_max;
            let conv_norm = weighted_lebesgue_norm(&g, target_p, target_t)?;
            Ok((product, cancellation, conv_norm))
        })
        .collect::<Result<Vec<(f64, f64, f64)>>>()?;

    let ladder = offsets
        .iter()
        .zip(&rows)
        .map(|(&scale, row)| LadderPoint { scale, value: row.0 })
        .collect();
    let abscissa: Vec<f64> = offsets.iter().map(|&x0| bracket(&[x0])).collect();
    let predicted = rational_to_f64(&(probed.t[1].value() + probed.t[2].value()));
    let mut report = fitted_report(
        ProbeKind::TranslationNecessity,
        perm,
        ladder,
        &abscissa,
        predicted,
        config.slope_tolerance,
        config.min_r_squared,
        -1.0,
    )?;
    let cancellation = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let norms: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let hi = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let variation = (hi - lo) / hi;
    report.details.insert("cancellation_error".into(), cancellation);
    report.details.insert("convolution_norm".into(), hi);
    report.details.insert("convolution_norm_variation".into(), variation);
    let constant = cancellation <= CANCELLATION_TOL && variation <= CANCELLATION_TOL;
    if !constant {
        report.notes.push(format!("f1 * f2 moved with the offset: relative change {variation:.3e}"));
    }
    report.pass &= constant;
    Ok(report)
}
