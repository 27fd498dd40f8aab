//! The weight kernel `F(x, y) = <x>^{-t0} <x-y>^{-t1} <y>^{-t2}`, the five
//! regions splitting `R^{2d}` around its singular directions, and the
//! bilinear maps `T_F`, `T_{Theta F}` built from a kernel.

mod transform;
mod verify;

pub use transform::{decomposition_residual, t_f, t_theta_f, theta};
pub use verify::{
    slice_norm, verify_lemma_intestimates, verify_prop_tf_bounds, BoundReport, PropBoundConfig, PropCase,
    LEMMA_SCAN_RATIO,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Weight;
use crate::grid::{bracket, Grid, SampledKernel2d};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelParams {
    pub d: usize,
    pub t: [Weight; 3],
}

impl KernelParams {
    pub fn new(d: usize, t: [Weight; 3]) -> Result<Self> {
        if !(d == 1 || d == 2) {
            return Err(Error::InvalidParams(format!("kernel dimension {d} not in {{1, 2}}")));
        }
        Ok(KernelParams { d, t })
    }

    fn exponents(&self) -> [f64; 3] {
        self.t.map(|w| w.to_f64())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    pub delta: f64,
    pub radius: f64,
}

impl RegionParams {
    pub fn new(delta: f64, radius: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta = {delta} not in (0, 1)")));
        }
        if !(radius >= 4.0 / delta) {
            return Err(Error::InvalidParams(format!("radius {radius} below 4/delta = {}", 4.0 / delta)));
        }
        Ok(RegionParams { delta, radius })
    }
}

impl Default for RegionParams {
    fn default() -> Self {
        RegionParams { delta: 0.5, radius: 8.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionId {
    Omega1,
    Omega2,
    Omega3,
    Omega4,
    Omega5,
}

impl RegionId {
    pub const ALL: [RegionId; 5] = [
        RegionId::Omega1,
        RegionId::Omega2,
        RegionId::Omega3,
        RegionId::Omega4,
        RegionId::Omega5,
    ];

    /// 1-based index.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn from_index(j: usize) -> Result<Self> {
        RegionId::ALL
            .get(j.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::InvalidParams(format!("region index {j} not in 1..=5")))
    }
}

fn diff(x: &[f64], y: &[f64]) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (k, (a, b)) in x.iter().zip(y).enumerate() {
        out[k] = a - b;
    }
    out
}

fn brackets(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let d = x.len();
    (bracket(x), bracket(&diff(x, y)[..d]), bracket(y))
}

/// Literal evaluation of the weight kernel.
pub fn kernel_f(x: &[f64], y: &[f64], kp: &KernelParams) -> f64 {
    let (bx, bxy, by) = brackets(x, y);
    let [t0, t1, t2] = kp.exponents();
    bx.powf(-t0) * bxy.powf(-t1) * by.powf(-t2)
}

/// Membership in region `j` as originally defined (without removing the
/// first region from the second).
pub fn in_region(j: RegionId, x: &[f64], y: &[f64], rp: &RegionParams) -> bool {
    let (bx, bxy, by) = brackets(x, y);
    let dx = rp.delta * bx;
    let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    match j {
        RegionId::Omega1 => by < dx,
        RegionId::Omega2 => bxy < dx,
        RegionId::Omega3 => dx <= by.min(bxy) && norm_x <= rp.radius,
        RegionId::Omega4 => dx <= bxy && bxy <= by && norm_x > rp.radius,
        RegionId::Omega5 => dx <= by && by <= bxy && norm_x > rp.radius,
    }
}

/// The region containing `(x, y)` once the second region has had the first
/// removed; ties go to the smaller index.
pub fn region_of(x: &[f64], y: &[f64], rp: &RegionParams) -> RegionId {
    let (bx, bxy, by) = brackets(x, y);
    let dx = rp.delta * bx;
    let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if by < dx {
        RegionId::Omega1
    } else if bxy < dx {
        RegionId::Omega2
    } else if norm_x <= rp.radius {
        RegionId::Omega3
    } else if bxy <= by {
        RegionId::Omega4
    } else {
        RegionId::Omega5
    }
}

/// Anything that yields kernel values `F(x_i, y_j)` on a square grid.
pub trait KernelSource: Sync {
    fn grid(&self) -> &Grid;
    fn value(&self, i: usize, j: usize) -> Complex64;

    /// Materializes the full `n^d x n^d` table.
    fn to_table(&self) -> SampledKernel2d {
        let g = *self.grid();
        let m = g.len();
        let values = (0..m * m).map(|k| self.value(k / m, k % m)).collect();
        SampledKernel2d::new(g, g, values).expect("kernel sources produce finite values")
    }
}

impl KernelSource for SampledKernel2d {
    fn grid(&self) -> &Grid {
        self.x_grid()
    }

    fn value(&self, i: usize, j: usize) -> Complex64 {
        self.get(i, j)
    }
}

/// The weight kernel evaluated on demand.
#[derive(Clone, Copy, Debug)]
pub struct WeightKernel {
    pub params: KernelParams,
    pub grid: Grid,
}

impl WeightKernel {
    pub fn new(params: KernelParams, grid: Grid) -> Result<Self> {
        if params.d != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "kernel dimension {} on a {}-dimensional grid",
                params.d,
                grid.dim()
            )));
        }
        Ok(WeightKernel { params, grid })
    }
}

impl KernelSource for WeightKernel {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn value(&self, i: usize, j: usize) -> Complex64 {
        let d = self.grid.dim();
        let (x, y) = (self.grid.point(i), self.grid.point(j));
        Complex64::new(kernel_f(&x[..d], &y[..d], &self.params), 0.0)
    }
}

/// `chi_{Omega_j} F` under the partition of [`region_of`].
#[derive(Clone, Copy, Debug)]
pub struct RegionKernel {
    pub kernel: WeightKernel,
    pub regions: RegionParams,
    pub region: RegionId,
}

impl KernelSource for RegionKernel {
    fn grid(&self) -> &Grid {
        &self.kernel.grid
    }

    fn value(&self, i: usize, j: usize) -> Complex64 {
        let g = &self.kernel.grid;
        let d = g.dim();
        let (x, y) = (g.point(i), g.point(j));
        if region_of(&x[..d], &y[..d], &self.regions) == self.region {
            self.kernel.value(i, j)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kp(t: [i64; 3]) -> KernelParams {
        KernelParams::new(1, t.map(Weight::int)).unwrap()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_f(&[0.0], &[0.0], &kp([3, -2, 5])), 1.0);
        assert!((kernel_f(&[3.0], &[1.0], &kp([1, 1, 1])) - 0.1).abs() < 1e-15);
        assert_eq!(kernel_f(&[5.0], &[5.0], &kp([0, 2, 0])), 1.0);
    }

    #[test]
    fn region_examples() {
        let rp = RegionParams::new(0.5, 8.0).unwrap();
        assert_eq!(region_of(&[10.0], &[1.0], &rp), RegionId::Omega1);
        assert_eq!(region_of(&[10.0], &[9.9], &rp), RegionId::Omega2);
        assert_eq!(region_of(&[0.0], &[0.0], &rp), RegionId::Omega3);
        assert_eq!(region_of(&[10.0], &[20.0], &rp), RegionId::Omega4);
        assert_eq!(region_of(&[10.0], &[-6.0], &rp), RegionId::Omega5);
        // <x-y> = <y>: both outer regions apply, the smaller index wins.
        assert_eq!(region_of(&[10.0], &[5.0], &rp), RegionId::Omega4);
    }

    #[test]
    fn region_params_validation() {
        assert!(RegionParams::new(0.5, 7.9).is_err());
        assert!(RegionParams::new(1.0, 8.0).is_err());
        assert!(RegionParams::new(0.25, 16.0).is_ok());
        assert_eq!(RegionId::from_index(3).unwrap(), RegionId::Omega3);
        assert!(RegionId::from_index(0).is_err());
        assert!(RegionId::from_index(6).is_err());
    }

    #[test]
    fn lazy_kernels_match_tables() {
        let g = Grid::new(1, 12.0, 32).unwrap();
        let k = WeightKernel::new(kp([1, -1, 2]), g).unwrap();
        let table = k.to_table();
        assert_eq!(table.value(5, 17), k.value(5, 17));
        let rk = RegionKernel {
            kernel: k,
            regions: RegionParams::default(),
            region: RegionId::Omega1,
        };
        assert_eq!(rk.value(16, 16).re, 0.0);
        assert!(WeightKernel::new(KernelParams::new(2, [Weight::zero(); 3]).unwrap(), g).is_err());
    }
}
