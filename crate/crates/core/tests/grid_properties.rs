use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weighted_young::exponent::Space;
use weighted_young::grid::{
    convolve, fourier_transform, lp_norm, mixed_norm_2d, modulation_norm_of_table, stft, weighted_lebesgue_norm,
    weighted_lp_norm, Grid, MixedOrder, SampledFunction, SampledKernel2d,
};
use weighted_young::{Exponent, Weight};

/// A few random Gaussian bumps with modest centres, widths and phases.
fn random_smooth(grid: Grid, rng: &mut ChaCha8Rng) -> SampledFunction {
    let bumps: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(-2.0..2.0),
                rng.random_range(0.4..1.5),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        })
        .collect();
    SampledFunction::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|&(c, a, re, im)| {
                let r2: f64 = x.iter().map(|v| (v - c) * (v - c)).sum();
                Complex64::new(re, im) * (-a * r2).exp()
            })
            .sum()
    })
    .unwrap()
}

fn l2(f: &SampledFunction) -> f64 {
    weighted_lebesgue_norm(f, Exponent::int(2), Weight::zero()).unwrap()
}

#[test]
fn convolution_matches_direct_sum() {
    let g = Grid::new(1, 8.0, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_smooth(g, &mut rng);
    let h = random_smooth(g, &mut rng);
    let fast = convolve(&f, &h).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..g.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..g.len() {
            if let Some(diff) = g.difference_index(k, j) {
                acc += f.values()[diff] * h.values()[j];
            }
        }
        worst = worst.max((fast.values()[k] - acc * g.spacing()).norm());
    }
    assert!(worst < 1e-9, "max deviation {worst}");
}

#[test]
fn two_dimensional_convolution_matches_direct_sum() {
    let g = Grid::new(2, 6.0, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_smooth(g, &mut rng);
    let h = random_smooth(g, &mut rng);
    let fast = convolve(&f, &h).unwrap();
    for k in 0..g.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..g.len() {
            if let Some(diff) = g.difference_index(k, j) {
                acc += f.values()[diff] * h.values()[j];
            }
        }
        assert!((fast.values()[k] - acc * g.cell()).norm() < 1e-9);
    }
}

#[test]
fn mixed_norm_matches_nested_loops() {
    let g = Grid::new(1, 4.0, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let vals: Vec<Complex64> = (0..g.len() * g.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let table = SampledKernel2d::new(g, g, vals.clone()).unwrap();
    let got = mixed_norm_2d(&table, Exponent::int(3), Exponent::int(1), MixedOrder::InnerSecond);
    let h = g.spacing();
    let mut outer = 0.0;
    for ix in 0..g.len() {
        let mut inner = 0.0;
        for iy in 0..g.len() {
            inner += vals[ix * g.len() + iy].norm() * h;
        }
        outer += inner.powi(3) * h;
    }
    let oracle = outer.powf(1.0 / 3.0);
    assert!((got - oracle).abs() / oracle < 1e-10);
}

#[test]
fn stft_energy_reproduces_norm_product() {
    let g = Grid::new(1, 12.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_smooth(g, &mut rng);
    let phi = random_smooth(g, &mut rng);
    let table = stft(&f, &phi, 1).unwrap();
    let energy: f64 = table.values().iter().map(|v| v.norm_sqr()).sum::<f64>()
        * table.x_grid().cell()
        * table.y_grid().cell();
    let expect = (l2(&f) * l2(&phi)).powi(2);
    assert!((energy - expect).abs() / expect < 1e-6);
}

#[test]
fn modulation_norms_coincide_at_two() {
    let g = Grid::new(1, 12.0, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_smooth(g, &mut rng);
    let phi = random_smooth(g, &mut rng);
    let table = stft(&f, &phi, 1).unwrap();
    let two = Exponent::int(2);
    let m = modulation_norm_of_table(&table, two, two, Weight::zero(), Weight::zero(), Space::M);
    let w = modulation_norm_of_table(&table, two, two, Weight::zero(), Weight::zero(), Space::W);
    let expect = l2(&f) * l2(&phi);
    assert!((m - expect).abs() / expect < 1e-6);
    assert!((w - m).abs() / m < 1e-12);
}

#[test]
fn grid_refinement_converges() {
    let norms = |n: usize| {
        let g = Grid::new(1, 16.0, n).unwrap();
        let f = SampledFunction::from_real_fn(g, |x| (-(x[0] - 0.3).powi(2)).exp()).unwrap();
        [
            weighted_lebesgue_norm(&f, Exponent::int(1), Weight::int(2)).unwrap(),
            weighted_lebesgue_norm(&f, Exponent::ratio(3, 2), Weight::new(-1, 2)).unwrap(),
            weighted_fl(&f),
        ]
    };
    fn weighted_fl(f: &SampledFunction) -> f64 {
        weighted_young::grid::fourier_lebesgue_norm(f, Exponent::int(1), Weight::int(1)).unwrap()
    }
    let (a, b) = (norms(512), norms(1024));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() / y < 1e-6, "{x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(seed in any::<u64>()) {
        let g = Grid::new(1, 16.0, 512).unwrap();
        let f = random_smooth(g, &mut ChaCha8Rng::seed_from_u64(seed));
        let fhat = fourier_transform(&f).unwrap();
        let (a, b) = (l2(&f), l2(&fhat));
        prop_assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn parseval_in_the_plane(seed in any::<u64>()) {
        let g = Grid::new(2, 12.0, 128).unwrap();
        let f = random_smooth(g, &mut ChaCha8Rng::seed_from_u64(seed));
        let fhat = fourier_transform(&f).unwrap();
        let (a, b) = (l2(&f), l2(&fhat));
        prop_assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn convolution_theorem(seed in any::<u64>()) {
        let g = Grid::new(1, 16.0, 512).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_smooth(g, &mut rng);
        let h = random_smooth(g, &mut rng);
        let lhs = fourier_transform(&convolve(&f, &h).unwrap()).unwrap();
        let rhs = fourier_transform(&f).unwrap()
            .mul(&fourier_transform(&h).unwrap()).unwrap()
            .scale(Complex64::new((2.0 * std::f64::consts::PI).sqrt(), 0.0));
        let scale = rhs.max_abs().max(1e-300);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-8 * scale);
    }

    #[test]
    fn weights_are_monotone(seed in any::<u64>(), p in 1.0f64..6.0, t in -3.0f64..3.0, dt in 0.0f64..2.0) {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let f = random_smooth(g, &mut ChaCha8Rng::seed_from_u64(seed));
        for exp in [p, f64::INFINITY] {
            let lo = weighted_lp_norm(&f, exp, t).unwrap();
            let hi = weighted_lp_norm(&f, exp, t + dt).unwrap();
            prop_assert!(lo <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn holder_on_samples(seed in any::<u64>(), p in 1.0f64..8.0) {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_smooth(g, &mut rng);
        let h = random_smooth(g, &mut rng);
        let prod = f.mul(&h).unwrap();
        let abs = |s: &SampledFunction| s.values().iter().map(|v| v.norm()).collect::<Vec<_>>();
        let conj = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        let lhs = lp_norm(&abs(&prod), 1.0, g.cell());
        let rhs = lp_norm(&abs(&f), p, g.cell()) * lp_norm(&abs(&h), conj, g.cell());
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }
}
