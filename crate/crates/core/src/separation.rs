//! Ionization-threshold separation model.
//!
//! Population in `|3⟩` is ionized (with a configurable efficiency, 1 by
//! default) and extracted; population in `|1⟩`, `|2⟩` is retained. The
//! enantiomeric excess of each fraction follows from the initial mixture.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationModel {
    /// Fraction of left-handed molecules in the initial mixture.
    pub mixture_ratio: f64,
    /// Probability that a molecule in `|3⟩` is ionized.
    pub ionization_efficiency: f64,
}

impl Default for SeparationModel {
    fn default() -> Self {
        SeparationModel { mixture_ratio: 0.5, ionization_efficiency: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub ionized_fraction_l: f64,
    pub ionized_fraction_r: f64,
    pub retained_fraction_l: f64,
    pub retained_fraction_r: f64,
    /// `(N_L − N_R)/(N_L + N_R)` over the retained molecules; `None` if
    /// nothing is retained.
    pub enantiomeric_excess_retained: Option<f64>,
    /// Same over the ionized molecules; `None` if nothing is ionized.
    pub enantiomeric_excess_ionized: Option<f64>,
}

fn excess(left: f64, right: f64) -> Option<f64> {
    let total = left + right;
    if total > 0.0 {
        Some(((left - right) / total).clamp(-1.0, 1.0))
    } else {
        None
    }
}

impl SeparationModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.mixture_ratio > 0.0 && self.mixture_ratio < 1.0) {
            return Err(Error::config("mixture_ratio", "must lie strictly between 0 and 1"));
        }
        if !(0.0..=1.0).contains(&self.ionization_efficiency) {
            return Err(Error::config("ionization_efficiency", "must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn separate(&self, final_l: [f64; 3], final_r: [f64; 3]) -> Result<SeparationReport> {
        for p in [final_l, final_r] {
            if (p.iter().sum::<f64>() - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::PopulationSum(p));
            }
        }
        let ionized_l = (self.ionization_efficiency * final_l[2]).clamp(0.0, 1.0);
        let ionized_r = (self.ionization_efficiency * final_r[2]).clamp(0.0, 1.0);
        let (x_l, x_r) = (self.mixture_ratio, 1.0 - self.mixture_ratio);
        Ok(SeparationReport {
            ionized_fraction_l: ionized_l,
            ionized_fraction_r: ionized_r,
            retained_fraction_l: 1.0 - ionized_l,
            retained_fraction_r: 1.0 - ionized_r,
            enantiomeric_excess_retained: excess(x_l * (1.0 - ionized_l), x_r * (1.0 - ionized_r)),
            enantiomeric_excess_ionized: excess(x_l * ionized_l, x_r * ionized_r),
        })
    }
}

/// Separation of a racemic mixture with unit ionization efficiency.
pub fn separate(final_l: [f64; 3], final_r: [f64; 3]) -> Result<SeparationReport> {
    SeparationModel::default().separate(final_l, final_r)
}
