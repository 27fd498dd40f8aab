//! Uniform grids over centered boxes `[-L, L]^d` (`d` = 1 or 2) and the
//! sampled functions living on them.
//!
//! Sample `k` along an axis sits at `x_k = (k - n/2) h` with `h = 2L/n`.
//! Multi-indices are flattened row-major, the first axis outermost.

mod fourier;
mod norms;
mod stft;

pub use fourier::{convolve, fourier_transform, fourier_transform_raw, inverse_fourier_transform};
pub use norms::{
    fourier_lebesgue_norm, lp_norm, mixed_norm_2d, weighted_lebesgue_norm, weighted_lp_norm,
    MixedOrder,
};
pub use stft::{modulation_norm, modulation_norm_of_table, stft};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative magnitude below which a transform is considered resolved at the
/// boundary of its box.
pub const RESOLUTION_TOL: f64 = 1e-8;

/// The Japanese bracket `(1 + |x|^2)^{1/2}`.
pub fn bracket(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct Grid {
    d: usize,
    half_width: f64,
    n: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    d: usize,
    half_width: f64,
    n: usize,
}

impl TryFrom<RawGrid> for Grid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        Grid::new(raw.d, raw.half_width, raw.n)
    }
}

impl Grid {
    pub fn new(d: usize, half_width: f64, n: usize) -> Result<Self> {
        if !(d == 1 || d == 2) {
            return Err(Error::InvalidGrid(format!("dimension {d} not in {{1, 2}}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} must be a power of two >= 8")));
        }
        Ok(Grid { d, half_width, n })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Samples per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight `h^d`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Total number of samples `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of axis index `k`.
    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.spacing()
    }

    /// Splits a flat index into per-axis indices.
    pub fn axes(&self, idx: usize) -> [usize; 2] {
        if self.d == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    pub fn flat(&self, axes: [usize; 2]) -> usize {
        if self.d == 1 {
            axes[0]
        } else {
            axes[0] * self.n + axes[1]
        }
    }

    /// Point coordinates; the second entry is 0 when `d = 1`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.axes(idx);
        if self.d == 1 {
            [self.coord(a), 0.0]
        } else {
            [self.coord(a), self.coord(b)]
        }
    }

    /// Flat index of the sample at `x_i - x_j`, when it lies on the grid.
    pub fn difference_index(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = (self.axes(i), self.axes(j));
        let half = (self.n / 2) as isize;
        let mut out = [0usize; 2];
        for axis in 0..self.d {
            let k = a[axis] as isize - b[axis] as isize + half;
            if k < 0 || k >= self.n as isize {
                return None;
            }
            out[axis] = k as usize;
        }
        Some(self.flat(out))
    }

    /// The frequency lattice `xi_m = m pi / L`, `m in [-n/2, n/2)`, itself a
    /// centered grid with spacing `pi / L`.
    pub fn dual(&self) -> Grid {
        Grid {
            d: self.d,
            half_width: self.n as f64 * std::f64::consts::PI / (2.0 * self.half_width),
            n: self.n,
        }
    }

    /// Every `stride`-th sample per axis, starting at `-L`.
    pub fn strided(&self, stride: usize) -> Result<Grid> {
        if stride == 0 || self.n % stride != 0 {
            return Err(Error::InvalidGrid(format!("stride {stride} does not divide n = {}", self.n)));
        }
        Grid::new(self.d, self.half_width, self.n / stride)
    }

    pub(crate) fn same_as(&self, other: &Grid) -> bool {
        self.d == other.d
            && self.n == other.n
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }

    pub(crate) fn require_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Complex samples of a function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(bad));
        }
        Ok(SampledFunction { grid, values })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        SampledFunction { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|i| f(&grid.point(i)[..grid.dim()]))
            .collect();
        Self::new(grid, values)
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.grid.require_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(SampledFunction::from_parts_unchecked(self.grid, values))
    }

    pub fn scale(&self, c: Complex64) -> SampledFunction {
        SampledFunction::from_parts_unchecked(self.grid, self.values.iter().map(|v| v * c).collect())
    }

    pub fn max_abs_diff(&self, other: &SampledFunction) -> Result<f64> {
        self.grid.require_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest magnitude on points with `max_i |x_i| >= radius`, relative to
    /// the overall maximum. Zero functions report 0.
    pub fn tail_ratio(&self, radius: f64) -> f64 {
        let total = self.max_abs();
        if total == 0.0 {
            return 0.0;
        }
        let d = self.grid.dim();
        let tail = (0..self.grid.len())
            .filter(|&i| self.grid.point(i)[..d].iter().any(|c| c.abs() >= radius))
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max);
        tail / total
    }

    /// Copy shifted by a whole number of samples per axis, zero filled:
    /// `g(x) = f(x - shift h)`.
    pub fn shifted(&self, shift: [isize; 2]) -> SampledFunction {
        let n = self.grid.n() as isize;
        let d = self.grid.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let axes = self.grid.axes(i);
            let mut src = [0usize; 2];
            let mut inside = true;
            for a in 0..d {
                let k = axes[a] as isize - shift[a];
                if k < 0 || k >= n {
                    inside = false;
                    break;
                }
                src[a] = k as usize;
            }
            if inside {
                *slot = self.values[self.grid.flat(src)];
            }
        }
        SampledFunction::from_parts_unchecked(self.grid, out)
    }
}

/// Samples of a function of two grid variables `(x, y)`, stored with `x`
/// outermost: `values[ix * y_grid.len() + iy]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledKernel2d {
    x_grid: Grid,
    y_grid: Grid,
    values: Vec<Complex64>,
}

impl SampledKernel2d {
    pub fn new(x_grid: Grid, y_grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != x_grid.len() * y_grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a {} x {} table",
                values.len(),
                x_grid.len(),
                y_grid.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(bad));
        }
        Ok(SampledKernel2d { x_grid, y_grid, values })
    }

    pub fn from_fn(x_grid: Grid, y_grid: Grid, f: impl Fn(&[f64], &[f64]) -> Complex64) -> Result<Self> {
        let (dx, dy) = (x_grid.dim(), y_grid.dim());
        let mut values = Vec::with_capacity(x_grid.len() * y_grid.len());
        for i in 0..x_grid.len() {
            let x = x_grid.point(i);
            for j in 0..y_grid.len() {
                values.push(f(&x[..dx], &y_grid.point(j)[..dy]));
            }
        }
        Self::new(x_grid, y_grid, values)
    }

    pub fn x_grid(&self) -> &Grid {
        &self.x_grid
    }

    pub fn y_grid(&self) -> &Grid {
        &self.y_grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[ix * self.y_grid.len() + iy]
    }

    pub fn row(&self, ix: usize) -> &[Complex64] {
        let m = self.y_grid.len();
        &self.values[ix * m..(ix + 1) * m]
    }

    pub fn map(&self, f: impl Fn(&[f64], &[f64], Complex64) -> Complex64) -> SampledKernel2d {
        let (dx, dy) = (self.x_grid.dim(), self.y_grid.dim());
        let m = self.y_grid.len();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let x = self.x_grid.point(k / m);
                let y = self.y_grid.point(k % m);
                f(&x[..dx], &y[..dy], *v)
            })
            .collect();
        SampledKernel2d {
            x_grid: self.x_grid,
            y_grid: self.y_grid,
            values,
        }
    }
}
