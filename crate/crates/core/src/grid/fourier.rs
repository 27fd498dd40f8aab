use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid, SampledFunction, RESOLUTION_TOL};
use crate::error::{Error, Result};

/// In-place unnormalized DFT along every axis of an `m^d` row-major block.
pub(crate) fn fft_nd(data: &mut [Complex64], m: usize, d: usize, inverse: bool) {
    thread_local! {
        static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    }
    let plan: Arc<dyn Fft<f64>> = PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if inverse {
            planner.plan_fft_inverse(m)
        } else {
            planner.plan_fft_forward(m)
        }
    });
    plan.process(data);
    if d == 2 {
        let mut column = vec![Complex64::new(0.0, 0.0); m];
        for c in 0..m {
            for r in 0..m {
                column[r] = data[r * m + c];
            }
            plan.process(&mut column);
            for r in 0..m {
                data[r * m + c] = column[r];
            }
        }
    }
}

/// `(-1)^(sum of axis indices)`; with `n/2` even this is the centering phase
/// on both the spatial and the frequency side.
fn checker_sign(grid: &Grid, idx: usize) -> f64 {
    let n = grid.n();
    let parity = if grid.dim() == 1 { idx } else { idx / n + idx % n };
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Continuous Fourier transform `(2 pi)^{-d/2} int f(x) e^{-i x xi} dx`
/// sampled on the dual grid, without the resolution check.
pub fn fourier_transform_raw(f: &SampledFunction) -> SampledFunction {
    let grid = *f.grid();
    let mut data: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v * checker_sign(&grid, i))
        .collect();
    fft_nd(&mut data, grid.n(), grid.dim(), false);
    let scale = grid.cell() * (2.0 * PI).powf(-(grid.dim() as f64) / 2.0);
    for (j, v) in data.iter_mut().enumerate() {
        *v *= scale * checker_sign(&grid, j);
    }
    SampledFunction::from_parts_unchecked(grid.dual(), data)
}

/// Sampled Fourier transform on the dual grid `xi_m = m pi / L`.
///
/// Fails when the transform is still above [`RESOLUTION_TOL`] (relative to
/// its maximum) on the outermost frequency samples.
pub fn fourier_transform(f: &SampledFunction) -> Result<SampledFunction> {
    let out = fourier_transform_raw(f);
    let edge = out.grid().half_width() - out.grid().spacing() * 1.5;
    let ratio = out.tail_ratio(edge);
    if ratio > RESOLUTION_TOL {
        return Err(Error::Resolution(format!(
            "transform reaches {ratio:.3e} of its maximum at the frequency boundary"
        )));
    }
    Ok(out)
}

/// Inverse transform of samples on `spatial.dual()` back to `spatial`.
pub fn inverse_fourier_transform(fhat: &SampledFunction, spatial: &Grid) -> Result<SampledFunction> {
    fhat.grid().require_same(&spatial.dual())?;
    let grid = *spatial;
    let dual = *fhat.grid();
    let mut data: Vec<Complex64> = fhat
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| v * checker_sign(&dual, j))
        .collect();
    fft_nd(&mut data, grid.n(), grid.dim(), true);
    let scale = dual.cell() * (2.0 * PI).powf(-(grid.dim() as f64) / 2.0);
    for (k, v) in data.iter_mut().enumerate() {
        *v *= scale * checker_sign(&grid, k);
    }
    Ok(SampledFunction::from_parts_unchecked(grid, data))
}

/// Linear convolution `int f(x - y) g(y) dy` on the shared grid.
///
/// Both inputs are zero-padded to `2n` per axis, so the discrete sum is the
/// exact truncated convolution with no cyclic wrap-around.
pub fn convolve(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    f.grid().require_same(g.grid())?;
    let grid = *f.grid();
    let (n, d) = (grid.n(), grid.dim());
    let m = 2 * n;
    let size = m.pow(d as u32);
    let pad = |src: &SampledFunction| {
        let mut out = vec![Complex64::new(0.0, 0.0); size];
        for (i, v) in src.values().iter().enumerate() {
            let [a, b] = grid.axes(i);
            let slot = if d == 1 { a } else { a * m + b };
            out[slot] = *v;
        }
        out
    };
    let mut a = pad(f);
    let mut b = pad(g);
    fft_nd(&mut a, m, d, false);
    fft_nd(&mut b, m, d, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft_nd(&mut a, m, d, true);
    // Sample k of the result sits at padded index k + n/2 per axis.
    let scale = grid.cell() / size as f64;
    let half = n / 2;
    let values = (0..grid.len())
        .map(|i| {
            let [p, q] = grid.axes(i);
            let slot = if d == 1 { p + half } else { (p + half) * m + q + half };
            a[slot] * scale
        })
        .collect();
    Ok(SampledFunction::from_parts_unchecked(grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(grid: Grid, a: f64) -> SampledFunction {
        SampledFunction::from_real_fn(grid, |x| (-a * x.iter().map(|v| v * v).sum::<f64>()).exp()).unwrap()
    }

    #[test]
    fn gaussian_is_fixed_point() {
        let g = Grid::new(1, 16.0, 1024).unwrap();
        let fhat = fourier_transform(&gauss(g, 0.5)).unwrap();
        let expect = gauss(g.dual(), 0.5);
        assert!(fhat.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn gaussian_scaling() {
        let g = Grid::new(1, 16.0, 1024).unwrap();
        let fhat = fourier_transform(&gauss(g, 1.0)).unwrap();
        let expect = gauss(g.dual(), 0.25).scale(Complex64::new(0.5f64.sqrt(), 0.0));
        assert!(fhat.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn translation_becomes_modulation() {
        let g = Grid::new(1, 16.0, 1024).unwrap();
        let a = 1.25;
        let f = SampledFunction::from_real_fn(g, |x| (-(x[0] - a).powi(2) / 2.0).exp()).unwrap();
        let fhat = fourier_transform(&f).unwrap();
        let base = fourier_transform(&gauss(g, 0.5)).unwrap();
        let dual = g.dual();
        for j in 0..dual.len() {
            let xi = dual.coord(j);
            let expect = Complex64::from_polar(1.0, -a * xi) * base.values()[j];
            assert!((fhat.values()[j] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn two_dimensional_gaussian() {
        let g = Grid::new(2, 12.0, 64).unwrap();
        let fhat = fourier_transform(&gauss(g, 0.5)).unwrap();
        assert!(fhat.max_abs_diff(&gauss(g.dual(), 0.5)).unwrap() < 1e-12);
    }

    #[test]
    fn under_resolved_transform_is_reported() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let box_fn = SampledFunction::from_real_fn(g, |x| if x[0].abs() <= 1.0 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(fourier_transform(&box_fn), Err(Error::Resolution(_))));
    }

    #[test]
    fn inverse_round_trip() {
        let g = Grid::new(1, 10.0, 256).unwrap();
        let f = SampledFunction::from_fn(g, |x| {
            Complex64::new((-x[0] * x[0]).exp(), x[0] * (-x[0] * x[0] / 2.0).exp())
        })
        .unwrap();
        let back = inverse_fourier_transform(&fourier_transform_raw(&f), &g).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-13);
        assert!(inverse_fourier_transform(&f, &g).is_err());
    }

    #[test]
    fn fourier_transform_matches_direct_sum() {
        let g = Grid::new(1, 4.0, 32).unwrap();
        let f = SampledFunction::from_fn(g, |x| Complex64::new((-x[0] * x[0]).exp(), 0.3 * x[0])).unwrap();
        let fast = fourier_transform_raw(&f);
        let dual = g.dual();
        for j in 0..dual.len() {
            let xi = dual.coord(j);
            let direct: Complex64 = (0..g.len())
                .map(|k| f.values()[k] * Complex64::from_polar(1.0, -g.coord(k) * xi))
                .sum::<Complex64>()
                * g.spacing()
                / (2.0 * PI).sqrt();
            assert!((fast.values()[j] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn box_convolution_apex() {
        let g = Grid::new(1, 8.0, 1024).unwrap();
        let chi = SampledFunction::from_real_fn(g, |x| if x[0].abs() <= 1.0 { 1.0 } else { 0.0 }).unwrap();
        let c = convolve(&chi, &chi).unwrap();
        // 129 samples of width h cover [-1, 1]: the rectangle rule gives 2 + h.
        assert!((c.values()[512].re - 2.0).abs() <= g.spacing() + 1e-12);
    }

    #[test]
    fn gaussian_self_convolution() {
        let g = Grid::new(1, 16.0, 1024).unwrap();
        let c = convolve(&gauss(g, 1.0), &gauss(g, 1.0)).unwrap();
        let expect = gauss(g, 0.5).scale(Complex64::new((PI / 2.0).sqrt(), 0.0));
        assert!(c.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn convolution_rejects_mismatched_grids() {
        let a = Grid::new(1, 8.0, 64).unwrap();
        let b = Grid::new(1, 8.0, 128).unwrap();
        assert!(matches!(
            convolve(&gauss(a, 1.0), &gauss(b, 1.0)),
            Err(Error::GridMismatch(_))
        ));
    }
}
