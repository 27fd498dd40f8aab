use serde::{Deserialize, Serialize};

use super::gaussian::gaussian_necessity_probe;
use super::translation::translation_probe_relabeled;
use super::{default_alpha_ladder, default_offset_ladder, ProbeConfig, ProbeReport};
use crate::error::Result;
use crate::exponent::{Flavor, ParamTuple};

/// Relabelings whose slots 1 and 2 hold the pairs `(t1, t2)`, `(t0, t1)`
/// and `(t0, t2)` of the original tuple.
pub const PAIR_PERMUTATIONS: [[usize; 3]; 3] = [[0, 1, 2], [2, 0, 1], [1, 0, 2]];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub reports: Vec<ProbeReport>,
    /// Largest operator-ratio growth slope among the probes that ran.
    pub max_growth_slope: f64,
    pub witnessed: bool,
    /// Probes that could not run, with the reason.
    pub skipped: Vec<String>,
}

/// Runs the Gaussian probe and the translation probe on all three weight
/// pairs with the default ladders. Multiplication questions are answered on
/// the mirrored tuple, where they become convolution questions.
pub fn necessity_witness(params: &ParamTuple, flavor: Flavor, config: &ProbeConfig) -> Result<WitnessSummary> {
    let probed = match flavor {
        Flavor::Convolution => *params,
        Flavor::Multiplication => params.mirrored(),
    };
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    match gaussian_necessity_probe(&probed, &default_alpha_ladder(), config) {
        Ok(r) => reports.push(r),
        Err(e) => skipped.push(format!("gaussian: {e}")),
    }
    let offsets = default_offset_ladder();
    for perm in PAIR_PERMUTATIONS {
        reports.push(translation_probe_relabeled(&probed, perm, &offsets, config)?);
    }
    let max_growth_slope = reports.iter().map(|r| r.growth_slope).fold(f64::NEG_INFINITY, f64::max);
    let witnessed = reports.iter().any(|r| r.necessity_witnessed);
    Ok(WitnessSummary {
        reports,
        max_growth_slope,
        witnessed,
        skipped,
    })
}
