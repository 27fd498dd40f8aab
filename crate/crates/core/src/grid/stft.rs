use num_complex::Complex64;
use rayon::prelude::*;

use super::fourier::fourier_transform_raw;
use super::norms::{mixed_norm_abs, MixedOrder};
use super::{bracket, SampledFunction, SampledKernel2d};
use crate::error::{Error, Result};
use crate::exponent::{Exponent, Space, Weight};

/// Short-time Fourier transform `V_phi f(x, xi)` on the lattice
/// `grid.strided(stride) x grid.dual()`.
///
/// Row `x` is the sampled transform of `y -> f(y) conj(phi(y - x))`, with
/// `phi` taken as zero off the grid.
pub fn stft(f: &SampledFunction, window: &SampledFunction, stride: usize) -> Result<SampledKernel2d> {
    f.grid().require_same(window.grid())?;
    if window.max_abs() == 0.0 {
        return Err(Error::Precondition("window is identically zero".into()));
    }
    let grid = *f.grid();
    let x_grid = grid.strided(stride)?;
    let m = grid.len();
    let mut values = vec![Complex64::new(0.0, 0.0); x_grid.len() * m];
    values.par_chunks_mut(m).enumerate().for_each(|(ix, out)| {
        let [a, b] = x_grid.axes(ix);
        let centre = grid.flat([a * stride, b * stride]);
        let product = if grid.dim() == 1 {
            windowed_line(f.values(), window.values(), centre)
        } else {
            (0..m)
                .map(|k| match grid.difference_index(k, centre) {
                    Some(j) => f.values()[k] * window.values()[j].conj(),
                    None => Complex64::new(0.0, 0.0),
                })
                .collect()
        };
        out.copy_from_slice(fourier_transform_raw(&SampledFunction::from_parts_unchecked(grid, product)).values());
    });
    SampledKernel2d::new(x_grid, grid.dual(), values)
}

/// `f[k] conj(phi[k - centre + n/2])` on a line, zero where the window
/// index leaves the grid.
fn windowed_line(f: &[Complex64], phi: &[Complex64], centre: usize) -> Vec<Complex64> {
    let n = f.len();
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let lo = centre.saturating_sub(half);
    let hi = (centre + half).min(n);
    for k in lo..hi {
        out[k] = f[k] * phi[k + half - centre].conj();
    }
    out
}

/// Weighted mixed norm of an STFT table: `M` integrates `x` first with
/// exponent `p` and then `xi` with `q`; `W` integrates `xi` first.
pub fn modulation_norm_of_table(
    table: &SampledKernel2d,
    p: Exponent,
    q: Exponent,
    s: Weight,
    t: Weight,
    space: Space,
) -> f64 {
    let (tf, sf) = (t.to_f64(), s.to_f64());
    let (xg, yg) = (table.x_grid(), table.y_grid());
    let (dx, dy) = (xg.dim(), yg.dim());
    let xw: Vec<f64> = (0..xg.len()).map(|i| bracket(&xg.point(i)[..dx]).powf(tf)).collect();
    let yw: Vec<f64> = (0..yg.len()).map(|j| bracket(&yg.point(j)[..dy]).powf(sf)).collect();
    let m = yg.len();
    let abs: Vec<f64> = table
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v.norm_sqr().sqrt() * xw[k / m] * yw[k % m])
        .collect();
    let order = match space {
        Space::M => MixedOrder::InnerFirst,
        Space::W => MixedOrder::InnerSecond,
    };
    mixed_norm_abs(&abs, xg, yg, p, q, order)
}

/// `||f||_{M^{p,q}_{(t,s)}}` or `||f||_{W^{p,q}_{(t,s)}}` computed from the
/// STFT with window `phi` on an `x` lattice of the given stride.
#[allow(clippy::too_many_arguments)]
pub fn modulation_norm(
    f: &SampledFunction,
    window: &SampledFunction,
    p: Exponent,
    q: Exponent,
    s: Weight,
    t: Weight,
    space: Space,
    stride: usize,
) -> Result<f64> {
    let table = stft(f, window, stride)?;
    Ok(modulation_norm_of_table(&table, p, q, s, t, space))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn gauss(grid: Grid) -> SampledFunction {
        SampledFunction::from_real_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp()).unwrap()
    }

    #[test]
    fn moyal_identity() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let table = stft(&gauss(g), &gauss(g), 1).unwrap();
        let l2 = modulation_norm_of_table(&table, Exponent::int(2), Exponent::int(2), Weight::zero(), Weight::zero(), Space::M);
        assert!((l2 - PI.sqrt()).abs() / PI.sqrt() < 1e-10);
        let w = modulation_norm_of_table(&table, Exponent::int(2), Exponent::int(2), Weight::zero(), Weight::zero(), Space::W);
        assert!((w - l2).abs() < 1e-12);
    }

    #[test]
    fn zero_signal_and_zero_window() {
        let g = Grid::new(1, 8.0, 64).unwrap();
        let zero = SampledFunction::zeros(g);
        let table = stft(&zero, &gauss(g), 2).unwrap();
        assert!(table.values().iter().all(|v| v.norm() == 0.0));
        assert!(matches!(stft(&gauss(g), &zero, 1), Err(Error::Precondition(_))));
        assert!(stft(&gauss(g), &gauss(g), 3).is_err());
    }

    #[test]
    fn matches_pointwise_quadrature() {
        let g = Grid::new(1, 12.0, 128).unwrap();
        let table = stft(&gauss(g), &gauss(g), 4).unwrap();
        let (xg, yg) = (table.x_grid(), table.y_grid());
        for ix in (0..xg.len()).step_by(3) {
            let x = xg.coord(ix);
            for iy in (0..yg.len()).step_by(5) {
                let xi = yg.coord(iy);
                let direct: Complex64 = (0..g.len())
                    .map(|k| {
                        let y = g.coord(k);
                        let w = (-(y * y) / 2.0 - (y - x).powi(2) / 2.0).exp();
                        Complex64::from_polar(w, -y * xi)
                    })
                    .sum::<Complex64>()
                    * g.spacing()
                    / (2.0 * PI).sqrt();
                assert!((table.get(ix, iy) - direct).norm() < 1e-8);
                // Closed form |V| = 2^{-1/2} e^{-(x^2 + xi^2)/4}.
                let exact = (-(x * x + xi * xi) / 4.0).exp() / 2f64.sqrt();
                assert!((table.get(ix, iy).norm() - exact).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn weighted_mixed_norm_closed_form() {
        // For Gaussian f and phi the x-integral of |V| is sqrt(2 pi) e^{-xi^2/4};
        // times <xi> its maximum sits at xi = 1, which lies on this lattice.
        let g = Grid::new(1, 8.0 * PI, 512).unwrap();
        let n = modulation_norm(&gauss(g), &gauss(g), Exponent::int(1), Exponent::INF, Weight::int(1), Weight::zero(), Space::M, 2)
            .unwrap();
        let exact = 2.0 * PI.sqrt() * (-0.25f64).exp();
        assert!((n - exact).abs() / exact < 1e-4);
    }
}
