use num_complex::Complex64;
use rayon::prelude::*;

use super::{KernelParams, KernelSource, RegionId, RegionKernel, RegionParams, WeightKernel};
use crate::error::{Error, Result};
use crate::grid::{SampledFunction, SampledKernel2d};

/// `T_F(f, g)(x) = int F(x, y) f(y) g(x - y) dy` by the rectangle rule, with
/// `g` taken as zero off the grid.
pub fn t_f<K: KernelSource + ?Sized>(kernel: &K, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    let grid = *kernel.grid();
    grid.require_same(f.grid())?;
    grid.require_same(g.grid())?;
    let (fv, gv) = (f.values(), g.values());
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, fj) in fv.iter().enumerate() {
                if *fj == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if let Some(m) = grid.difference_index(k, j) {
                    acc += kernel.value(k, j) * fj * gv[m];
                }
            }
            acc * grid.cell()
        })
        .collect();
    SampledFunction::new(grid, values)
}

/// `T_{Theta F}(f, g)(x) = int F(x, y) f(x - y) g(y) dy`.
pub fn t_theta_f<K: KernelSource + ?Sized>(
    kernel: &K,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<SampledFunction> {
    t_f(kernel, g, f)
}

/// `(Theta F)(x, y) = F(x, x - y)`; pairs whose difference leaves the grid
/// get 0.
pub fn theta(table: &SampledKernel2d) -> Result<SampledKernel2d> {
    let grid = *table.x_grid();
    grid.require_same(table.y_grid())?;
    let m = grid.len();
    let values = (0..m * m)
        .map(|k| {
            let (i, j) = (k / m, k % m);
            grid.difference_index(i, j)
                .map_or(Complex64::new(0.0, 0.0), |l| table.get(i, l))
        })
        .collect();
    SampledKernel2d::new(grid, grid, values)
}

/// `max |T_F(f,g) - sum_j T_{F_j}(f,g)| / max |T_F(f,g)|` over the grid,
/// where `F_j` are the restrictions of the weight kernel to the five
/// regions. Returns 0 when `T_F(f,g)` vanishes identically.
pub fn decomposition_residual(
    kp: &KernelParams,
    rp: &RegionParams,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<f64> {
    let kernel = WeightKernel::new(*kp, *f.grid())?;
    let whole = t_f(&kernel, f, g)?;
    let scale = whole.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut sum = vec![Complex64::new(0.0, 0.0); whole.values().len()];
    for region in RegionId::ALL {
        let part = t_f(
            &RegionKernel {
                kernel,
                regions: *rp,
                region,
            },
            f,
            g,
        )?;
        for (s, v) in sum.iter_mut().zip(part.values()) {
            *s += v;
        }
    }
    let total = SampledFunction::new(*f.grid(), sum).map_err(|_| Error::NonFinite(0))?;
    Ok(whole.max_abs_diff(&total)? / scale)
}
