use super::{bracket, fourier_transform, Grid, SampledFunction, SampledKernel2d};
use crate::error::{Error, Result};
use crate::exponent::{Exponent, Weight};

/// Which variable is integrated first in a mixed norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixedOrder {
    /// `L^p` in the first variable inside, `L^q` in the second outside.
    InnerFirst,
    /// `L^q` in the second variable inside, `L^p` in the first outside.
    InnerSecond,
}

/// Rectangle-rule `L^p` norm of nonnegative samples with quadrature weight
/// `cell`; `p = inf` gives the maximum. Values are rescaled by their
/// maximum before powering so large weights do not overflow.
pub fn lp_norm(values: &[f64], p: f64, cell: f64) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    let inv = max.recip();
    let sum: f64 = if p == 1.0 {
        values.iter().sum::<f64>() * inv
    } else if p == 2.0 {
        values.iter().map(|v| (v * inv) * (v * inv)).sum()
    } else if p.fract() == 0.0 && p <= 16.0 {
        let k = p as i32;
        values.iter().map(|v| (v * inv).powi(k)).sum()
    } else {
        values.iter().map(|v| (v * inv).powf(p)).sum()
    };
    max * (sum * cell).powf(1.0 / p)
}

/// `|| f <.>^t ||_{L^p}` with a floating weight exponent.
pub fn weighted_lp_norm(f: &SampledFunction, p: f64, t: f64) -> Result<f64> {
    if let Some(bad) = f.values().iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(bad));
    }
    let grid = f.grid();
    let d = grid.dim();
    let vals: Vec<f64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm() * bracket(&grid.point(i)[..d]).powf(t))
        .collect();
    Ok(lp_norm(&vals, p, grid.cell()))
}

/// `|| f <.>^t ||_{L^p}` by the rectangle rule; `L^inf` is the grid maximum,
/// a lower bound for the true supremum.
pub fn weighted_lebesgue_norm(f: &SampledFunction, p: Exponent, t: Weight) -> Result<f64> {
    weighted_lp_norm(f, p.to_f64(), t.to_f64())
}

/// `|| fhat <.>^s ||_{L^q}`.
pub fn fourier_lebesgue_norm(f: &SampledFunction, q: Exponent, s: Weight) -> Result<f64> {
    weighted_lebesgue_norm(&fourier_transform(f)?, q, s)
}

fn mixed(values: &[f64], x_grid: &Grid, y_grid: &Grid, p: f64, q: f64, order: MixedOrder) -> f64 {
    let (nx, ny) = (x_grid.len(), y_grid.len());
    match order {
        MixedOrder::InnerFirst => {
            let mut transposed = vec![0.0; nx * ny];
            for (ix, row) in values.chunks(ny).enumerate() {
                for (iy, v) in row.iter().enumerate() {
                    transposed[iy * nx + ix] = *v;
                }
            }
            let outer: Vec<f64> = transposed.chunks(nx).map(|col| lp_norm(col, p, x_grid.cell())).collect();
            lp_norm(&outer, q, y_grid.cell())
        }
        MixedOrder::InnerSecond => {
            let outer: Vec<f64> = values
                .chunks(ny)
                .map(|row| lp_norm(row, q, y_grid.cell()))
                .collect();
            lp_norm(&outer, p, x_grid.cell())
        }
    }
}

pub(crate) fn mixed_norm_abs(
    values: &[f64],
    x_grid: &Grid,
    y_grid: &Grid,
    p: Exponent,
    q: Exponent,
    order: MixedOrder,
) -> f64 {
    mixed(values, x_grid, y_grid, p.to_f64(), q.to_f64(), order)
}

/// Mixed `L^{p,q}` norm of a two-variable table: exponent `p` belongs to the
/// first variable and `q` to the second, `order` fixes which is inner.
pub fn mixed_norm_2d(f: &SampledKernel2d, p: Exponent, q: Exponent, order: MixedOrder) -> f64 {
    let abs: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    mixed_norm_abs(&abs, f.x_grid(), f.y_grid(), p, q, order)
}
