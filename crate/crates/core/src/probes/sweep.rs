use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_params_dim, fitted_report, guard_tail, LadderPoint, ProbeConfig, ProbeKind, ProbeReport};
use crate::error::{Error, Result};
use crate::exponent::{
    check_convolution, check_modulation, check_multiplication, Classification, Flavor, ParamTuple, Space,
    Verdict, Weight,
};
use crate::grid::{
    bracket, convolve, fourier_lebesgue_norm, inverse_fourier_transform, modulation_norm_of_table, stft,
    weighted_lebesgue_norm, Grid, SampledFunction, SampledKernel2d,
};

/// Largest allowed ratio between the extreme measurements of a sweep.
pub const SWEEP_SPREAD: f64 = 4.0;

/// Relative agreement required of the STFT product identity.
pub const PRODUCT_IDENTITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFlavor {
    /// `L^{p1}_{t1} * L^{p2}_{t2} -> L^{p0'}_{-t0}`.
    Convolution,
    /// `FL^{q1}_{s1} . FL^{q2}_{s2} -> FL^{q0'}_{-s0}`.
    Multiplication,
    ModulationConvolution(Space),
    ModulationMultiplication(Space),
}

impl SweepFlavor {
    pub fn verdict(self, params: &ParamTuple) -> Verdict {
        match self {
            SweepFlavor::Convolution => check_convolution(params),
            SweepFlavor::Multiplication => check_multiplication(params),
            SweepFlavor::ModulationConvolution(space) => check_modulation(params, Flavor::Convolution, space),
            SweepFlavor::ModulationMultiplication(space) => check_modulation(params, Flavor::Multiplication, space),
        }
    }
}

/// Input pairs at scale `lambda`: weighted and plain dilations, translated
/// unit Gaussians, and for modulation spaces also concentrated and
/// modulated Gaussians. `w` are the weights of the side the inputs live on.
///
/// Opposite modulations have nearly disjoint spectra, so their convolution
/// is rounding noise; convolution sweeps pair equal modulations instead.
fn member_pairs(grid: Grid, lambda: f64, w: [Weight; 3], modulation: Option<Flavor>) -> Result<Vec<[SampledFunction; 2]>> {
    let gauss = |centre: f64, width: f64, freq: f64, weight: f64| {
        SampledFunction::from_fn(grid, move |x| {
            let mut r2 = (x[0] - centre).powi(2);
            r2 += x[1..].iter().map(|v| v * v).sum::<f64>();
            Complex64::from_polar(bracket(x).powf(-weight) * (-r2 / (width * width)).exp(), freq * x[0])
        })
    };
    let (w1, w2) = (w[1].to_f64(), w[2].to_f64());
    let mut pairs = vec![
        [gauss(0.0, lambda, 0.0, w1)?, gauss(0.0, lambda, 0.0, w2)?],
        [gauss(0.0, lambda, 0.0, 0.0)?, gauss(0.0, lambda, 0.0, 0.0)?],
    ];
    for (a, b) in [(lambda, -lambda), (lambda, 0.0), (0.0, lambda), (lambda, lambda), (-lambda, -lambda)] {
        pairs.push([gauss(a, 1.0, 0.0, 0.0)?, gauss(b, 1.0, 0.0, 0.0)?]);
    }
    if let Some(flavor) = modulation {
        let narrow = lambda.sqrt().recip();
        let partner = if flavor == Flavor::Convolution { lambda } else { -lambda };
        pairs.push([gauss(0.0, narrow, 0.0, 0.0)?, gauss(0.0, narrow, 0.0, 0.0)?]);
        pairs.push([gauss(0.0, 1.0, lambda, 0.0)?, gauss(0.0, 1.0, partner, 0.0)?]);
        pairs.push([gauss(0.0, 1.0, lambda, 0.0)?, gauss(0.0, 1.0, 0.0, 0.0)?]);
    }
    Ok(pairs)
}

fn neg(w: Weight) -> Weight {
    Weight(-w.value())
}

fn standard_window(grid: Grid) -> Result<SampledFunction> {
    SampledFunction::from_real_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp())
}

struct Ratio<'a> {
    params: &'a ParamTuple,
    flavor: SweepFlavor,
    config: &'a ProbeConfig,
    window: Option<SampledFunction>,
}

impl Ratio<'_> {
    fn grid(&self) -> Grid {
        match self.flavor {
            SweepFlavor::Convolution => self.config.grid,
            SweepFlavor::Multiplication => self.config.fourier_grid.dual(),
            _ => self.config.modulation_grid,
        }
    }

    fn modulation(&self, f: &SampledFunction, j: usize, space: Space) -> Result<f64> {
        let window = self.window.as_ref().expect("modulation flavors carry a window");
        let table = stft(f, window, self.config.modulation_stride)?;
        let p = self.params;
        Ok(if j == 0 {
            modulation_norm_of_table(&table, p.p[0].conjugate(), p.q[0].conjugate(), neg(p.s[0]), neg(p.t[0]), space)
        } else {
            modulation_norm_of_table(&table, p.p[j], p.q[j], p.s[j], p.t[j], space)
        })
    }

    fn eval(&self, pair: &[SampledFunction; 2]) -> Result<f64> {
        let p = self.params;
        let [f1, f2] = pair;
        guard_tail(f1, "f1")?;
        guard_tail(f2, "f2")?;
        match self.flavor {
            SweepFlavor::Convolution => {
                let g = convolve(f1, f2)?;
                guard_tail(&g, "f1 * f2")?;
                let num = weighted_lebesgue_norm(&g, p.p[0].conjugate(), neg(p.t[0]))?;
                Ok(num / (weighted_lebesgue_norm(f1, p.p[1], p.t[1])? * weighted_lebesgue_norm(f2, p.p[2], p.t[2])?))
            }
            SweepFlavor::Multiplication => {
                // Inputs are the transforms; the product is formed in space.
                let spatial = self.config.fourier_grid;
                let product = inverse_fourier_transform(f1, &spatial)?.mul(&inverse_fourier_transform(f2, &spatial)?)?;
                let num = fourier_lebesgue_norm(&product, p.q[0].conjugate(), neg(p.s[0]))?;
                Ok(num / (weighted_lebesgue_norm(f1, p.q[1], p.s[1])? * weighted_lebesgue_norm(f2, p.q[2], p.s[2])?))
            }
            SweepFlavor::ModulationConvolution(space) | SweepFlavor::ModulationMultiplication(space) => {
                let g = match self.flavor {
                    SweepFlavor::ModulationConvolution(_) => convolve(f1, f2)?,
                    _ => f1.mul(f2)?,
                };
                guard_tail(&g, "output")?;
                Ok(self.modulation(&g, 0, space)? / (self.modulation(f1, 1, space)? * self.modulation(f2, 2, space)?))
            }
        }
    }
}

/// Operator ratio over dilated, translated and (for modulation spaces)
/// modulated Gaussian inputs along a ladder of scales `lambda >= 1`. The
/// ladder records the running supremum of the ratio; the sweep passes when
/// its slope against `lambda` on the upper half of the ladder is within
/// tolerance of 0 and the measurements stay within a factor
/// [`SWEEP_SPREAD`].
///
/// Only tuples the checker classifies as bounded are accepted.
pub fn boundedness_sweep(params: &ParamTuple, flavor: SweepFlavor, scales: &[f64], config: &ProbeConfig) -> Result<ProbeReport> {
    let verdict = flavor.verdict(params);
    if verdict.classification != Classification::Bounded {
        return Err(Error::Precondition(format!(
            "boundedness sweep needs a bounded tuple, the checker says {}",
            verdict.classification
        )));
    }
    if scales.len() < 2 || scales[0] < 1.0 || !scales.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParams("scales must start at 1 or above and increase strictly".into()));
    }
    let modulation = match flavor {
        SweepFlavor::ModulationConvolution(_) => Some(Flavor::Convolution),
        SweepFlavor::ModulationMultiplication(_) => Some(Flavor::Multiplication),
        _ => None,
    };
    let mut ratio = Ratio {
        params,
        flavor,
        config,
        window: None,
    };
    let grid = ratio.grid();
    check_params_dim(params, grid)?;
    if modulation.is_some() {
        ratio.window = Some(standard_window(grid)?);
    }
    let weights = if flavor == SweepFlavor::Multiplication { params.s } else { params.t };
    let per_scale = scales
        .par_iter()
        .map(|&lambda| {
            member_pairs(grid, lambda, weights, modulation)?
                .iter()
                .map(|pair| ratio.eval(pair))
                .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut running = 0.0f64;
    let ladder: Vec<LadderPoint> = scales
        .iter()
        .zip(&per_scale)
        .map(|(&scale, &v)| {
            running = running.max(v);
            LadderPoint { scale, value: running }
        })
        .collect();
    // The running supremum of a bounded ratio rises and then levels off; the
    // slope is read on the upper half of the ladder, the spread on all of it.
    let from = (ladder.len() / 2).min(ladder.len() - 2);
    let mut report = fitted_report(
        ProbeKind::BoundednessSweep,
        [0, 1, 2],
        ladder[from..].to_vec(),
        &scales[from..],
        0.0,
        config.slope_tolerance,
        config.min_r_squared,
        1.0,
    )?;
    report.ladder = ladder;
    report.details.insert("fit_from_scale".into(), scales[from]);
    let spread = report.ladder.last().map(|p| p.value).unwrap_or(0.0) / report.ladder[0].value;
    report.details.insert("spread".into(), spread);
    report.pass = report.fitted_slope.abs() <= config.slope_tolerance && spread <= SWEEP_SPREAD;
    if let SweepFlavor::ModulationMultiplication(_) = flavor {
        let pair = &member_pairs(grid, 1.0, weights, modulation)?[8];
        let deviation = product_identity_deviation(&pair[0], &pair[1], config.modulation_stride)?;
        report.details.insert("product_identity_deviation".into(), deviation);
        report.pass &= deviation <= PRODUCT_IDENTITY_TOL;
    }
    Ok(report)
}

/// Compares `V_phi(f1 f2)(x, xi)` with
/// `(2 pi)^{-d/2} (V_phi1 f1(x, .) * V_phi2 f2(x, .))(xi)` on the STFT
/// lattice, for `phi1 = phi2 = e^{-|x|^2/4}` and `phi = phi1 phi2`.
/// Returns the largest difference relative to the largest value.
pub fn product_identity_deviation(f1: &SampledFunction, f2: &SampledFunction, stride: usize) -> Result<f64> {
    f1.grid().require_same(f2.grid())?;
    let grid = *f1.grid();
    let half = SampledFunction::from_real_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>() / 4.0).exp())?;
    let window = half.mul(&half)?;
    let lhs = stft(&f1.mul(f2)?, &window, stride)?;
    let v1 = stft(f1, &half, stride)?;
    let v2 = stft(f2, &half, stride)?;
    let dual = *lhs.y_grid();
    let scale = (2.0 * std::f64::consts::PI).powf(-(grid.dim() as f64) / 2.0);
    let row = |table: &SampledKernel2d, ix: usize| SampledFunction::new(dual, table.row(ix).to_vec());
    let rows = (0..lhs.x_grid().len())
        .into_par_iter()
        .map(|ix| Ok(convolve(&row(&v1, ix)?, &row(&v2, ix)?)?.scale(Complex64::new(scale, 0.0)).into_values()))
        .collect::<Result<Vec<Vec<Complex64>>>>()?;
    let rhs = SampledKernel2d::new(*lhs.x_grid(), dual, rows.concat())?;
    let top = lhs.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let diff = lhs
        .values()
        .iter()
        .zip(rhs.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(if top == 0.0 { diff } else { diff / top })
}
