//! Test-function families whose norm ratios grow exactly when an
//! admissibility condition fails, and the log-log measurements built on
//! them.
//!
//! Slopes are always fitted by least squares on `ln(value)` against
//! `ln(scale)`; the abscissa is `1/alpha` for Gaussian ladders and the
//! bracket of the offset for translations.

mod gaussian;
mod sweep;
mod translation;
mod witness;

pub use gaussian::{
    gaussian_lower_bound_check, gaussian_necessity_probe, gaussian_norm_slope, lower_bound_constant,
};
pub use sweep::{boundedness_sweep, product_identity_deviation, SweepFlavor};
pub use translation::translation_necessity_probe;
pub use witness::{necessity_witness, WitnessSummary};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ParamTuple, Weight};
use crate::grid::{bracket, Grid, SampledFunction, RESOLUTION_TOL};
use crate::stats::fit_line;

/// Largest admissible `e^{-alpha L^2}`.
pub const RESOLUTION_GUARD: f64 = 1e-12;

/// Index relabelings used for the duality swaps of the trilinear form
/// `int (f1 * f2) f0`; the form is symmetric, so every relabeling of a
/// parameter tuple poses an equivalent boundedness question.
pub const DUALITY_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [2, 1, 0],
    [0, 2, 1],
    [1, 2, 0],
    [2, 0, 1],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    GaussianNorm,
    GaussianNecessity,
    TranslationNecessity,
    BoundednessSweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub scale: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: ProbeKind,
    /// Relabeling applied to the input tuple before probing.
    pub permutation: [usize; 3],
    pub ladder: Vec<LadderPoint>,
    pub fitted_slope: f64,
    pub predicted_slope: f64,
    pub r_squared: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Slope of the operator ratio against the ladder abscissa; positive
    /// values mean the ratio grows.
    pub growth_slope: f64,
    /// The ratio grows beyond the slope tolerance.
    pub necessity_witnessed: bool,
    pub details: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// Grids and thresholds shared by the probes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Gaussian ladders and Lebesgue-side sweeps.
    pub grid: Grid,
    /// Translated bumps; must hold the largest offset plus the bump support.
    pub translation_grid: Grid,
    /// Spatial grid for Fourier–Lebesgue sweeps; its dual carries the inputs.
    pub fourier_grid: Grid,
    pub modulation_grid: Grid,
    pub modulation_stride: usize,
    pub slope_tolerance: f64,
    pub min_r_squared: f64,
}

impl ProbeConfig {
    /// Default one-dimensional configuration.
    pub fn standard() -> Self {
        let grid = |l: f64, n: usize| Grid::new(1, l, n).expect("static grid");
        ProbeConfig {
            grid: grid(128.0, 1024),
            translation_grid: grid(512.0, 4096),
            fourier_grid: grid(4.0 * std::f64::consts::PI, 1024),
            modulation_grid: grid(128.0, 4096),
            modulation_stride: 16,
            slope_tolerance: 0.05,
            min_r_squared: 0.99,
        }
    }

    /// Same grids with every sample count replaced by `n` and every half
    /// width by `l`, where given.
    pub fn with_overrides(mut self, n: Option<usize>, l: Option<f64>) -> Result<Self> {
        for g in [&mut self.grid, &mut self.translation_grid, &mut self.fourier_grid, &mut self.modulation_grid] {
            *g = Grid::new(g.dim(), l.unwrap_or(g.half_width()), n.unwrap_or(g.n()))?;
        }
        if self.modulation_grid.n() % self.modulation_stride != 0 {
            self.modulation_stride = 1;
        }
        Ok(self)
    }
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self::standard()
    }
}

/// `alpha = 2^{-k/2}`, `k = 0..=12`.
pub fn default_alpha_ladder() -> Vec<f64> {
    (0..=12).map(|k| 2f64.powf(-(k as f64) / 2.0)).collect()
}

/// Offsets on which the norm product is in its power-law regime.
pub fn default_offset_ladder() -> Vec<f64> {
    vec![16.0, 32.0, 64.0, 128.0, 256.0]
}

/// Scales `alpha^{-1/2}` for the default alpha ladder.
pub fn default_scale_ladder() -> Vec<f64> {
    default_alpha_ladder().iter().map(|a| a.powf(-0.5)).collect()
}

/// Members `f_j(x) = <x>^{-t_j} e^{-alpha |x|^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianFamily {
    pub alpha: f64,
    pub t: [Weight; 3],
    pub d: usize,
}

impl GaussianFamily {
    pub fn new(alpha: f64, t: [Weight; 3], d: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} not in (0, 1]")));
        }
        Ok(GaussianFamily { alpha, t, d })
    }

    pub fn member(&self, j: usize, grid: Grid) -> Result<SampledFunction> {
        check_dim(grid, self.d)?;
        let t = self.t[j].to_f64();
        let alpha = self.alpha;
        SampledFunction::from_real_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            bracket(x).powf(-t) * (-alpha * r2).exp()
        })
    }
}

/// Smooth plateau: 1 on the unit ball, 0 outside the ball of radius 2,
/// with the quintic smoothstep in `u = (|x|^2 - 1)/3` in between.
pub fn plateau_bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let u = ((r2 - 1.0) / 3.0).clamp(0.0, 1.0);
    1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
}

/// `f1 = f0(. - x0)`, `f2 = f0(. + x0)` for the plateau bump `f0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpFamily {
    pub x0: [f64; 2],
    pub d: usize,
}

impl BumpFamily {
    /// Offset along the first axis.
    pub fn along_axis(offset: f64, d: usize) -> Self {
        BumpFamily { x0: [offset, 0.0], d }
    }

    pub fn base(&self, grid: Grid) -> Result<SampledFunction> {
        check_dim(grid, self.d)?;
        SampledFunction::from_real_fn(grid, plateau_bump)
    }

    /// `sign = +1` gives `f1`, `sign = -1` gives `f2`.
    pub fn member(&self, sign: f64, grid: Grid) -> Result<SampledFunction> {
        check_dim(grid, self.d)?;
        let x0 = self.x0;
        let reach = x0[..self.d].iter().map(|v| v.abs()).fold(0.0, f64::max) + 2.0;
        if reach > grid.half_width() - 4.0 * grid.spacing() {
            return Err(Error::Resolution(format!(
                "bump at offset {:?} reaches {reach} beyond the box half width {}",
                &x0[..self.d],
                grid.half_width()
            )));
        }
        SampledFunction::from_real_fn(grid, |x| {
            let mut z = [0.0; 2];
            for k in 0..x.len() {
                z[k] = x[k] - sign * x0[k];
            }
            plateau_bump(&z[..x.len()])
        })
    }
}

pub(crate) fn check_dim(grid: Grid, d: usize) -> Result<()> {
    if grid.dim() != d {
        return Err(Error::GridMismatch(format!("{d}-dimensional family on a {}-dimensional grid", grid.dim())));
    }
    Ok(())
}

pub(crate) fn check_params_dim(params: &ParamTuple, grid: Grid) -> Result<()> {
    params.validate()?;
    check_dim(grid, params.d as usize)
}

/// `e^{-alpha L^2}` must stay below the guard.
pub(crate) fn guard_alpha(grid: &Grid, alpha: f64) -> Result<()> {
    let decay = (-alpha * grid.half_width().powi(2)).exp();
    if decay >= RESOLUTION_GUARD {
        return Err(Error::Resolution(format!(
            "alpha = {alpha}: e^(-alpha L^2) = {decay:.3e} with L = {}",
            grid.half_width()
        )));
    }
    Ok(())
}

/// Samples beyond half the box must be negligible.
pub(crate) fn guard_tail(f: &SampledFunction, label: &str) -> Result<()> {
    let ratio = f.tail_ratio(f.grid().half_width() / 2.0);
    if ratio > RESOLUTION_TOL {
        return Err(Error::Resolution(format!("{label}: tail beyond L/2 is {ratio:.3e} of the maximum")));
    }
    Ok(())
}

/// Assembles a report from a ladder of `(abscissa, value)` pairs, fitting
/// `ln value` against `ln abscissa`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn fitted_report(
    probe: ProbeKind,
    permutation: [usize; 3],
    ladder: Vec<LadderPoint>,
    abscissa: &[f64],
    predicted: f64,
    tolerance: f64,
    min_r_squared: f64,
    growth_sign: f64,
) -> Result<ProbeReport> {
    let xs: Vec<f64> = abscissa.iter().map(|a| a.ln()).collect();
    let ys: Vec<f64> = ladder.iter().map(|p| p.value.ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Precondition("ladder contains non-positive measurements".into()));
    }
    let fit = fit_line(&xs, &ys)
        .ok_or_else(|| Error::InvalidParams("ladder needs at least two distinct scales".into()))?;
    // A flat ladder has no trend for r^2 to explain; the slope test alone decides.
    let spread = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ys.iter().copied().fold(f64::INFINITY, f64::min);
    let span = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xs.iter().copied().fold(f64::INFINITY, f64::min);
    let flat = spread <= tolerance * span;
    let pass = (fit.slope - predicted).abs() <= tolerance && (fit.r_squared >= min_r_squared || flat);
    let growth = growth_sign * fit.slope;
    let mut details = BTreeMap::new();
    details.insert("intercept".to_string(), fit.intercept);
    Ok(ProbeReport {
        probe,
        permutation,
        ladder,
        fitted_slope: fit.slope,
        predicted_slope: predicted,
        r_squared: fit.r_squared,
        tolerance,
        pass,
        growth_slope: growth,
        necessity_witnessed: growth > tolerance,
        details,
        notes: Vec::new(),
    })
}
