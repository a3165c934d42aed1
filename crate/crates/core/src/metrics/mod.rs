//! Expected-exposure metrics and the classic metrics they relate to.

mod curve;
mod fairness;
mod static_metrics;

use crate::error::{Error, Result};
use crate::exposure::ExposureVector;

pub use curve::{
    ee_auc, ee_auc_points, normalize_curve_point, CurveNormalizer, SweepCurve, SweepPoint,
};
pub use fairness::{
    group_fairness_loss, intent_aware_rbp, GroupAttribution, GroupMode, GroupNormalizer,
    IntentJudgments,
};
pub use static_metrics::{
    expected_static_metrics, generalized_entropy, relevant_generalized_entropy, static_err,
    static_rbp, StaticExpectation, DEFAULT_ENTROPY_EXPONENT,
};

/// Squared error between system and target exposure, split into parts.
///
/// `ee_l = ee_d − ee_r + target_norm_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EEBreakdown {
    /// `‖ε − ε*‖²`
    pub ee_l: f64,
    /// Disparity `‖ε‖²`.
    pub ee_d: f64,
    /// Relevance `2 εᵀε*`.
    pub ee_r: f64,
    /// `‖ε*‖²`, constant for a query.
    pub target_norm_sq: f64,
}

impl EEBreakdown {
    /// `εᵀε*`.
    pub fn relevance_dot(&self) -> f64 {
        self.ee_r / 2.0
    }
}

pub(crate) fn breakdown_of(system: &[f64], target: &[f64]) -> Result<EEBreakdown> {
    if system.len() != target.len() {
        return Err(Error::Dimension {
            left: system.len(),
            right: target.len(),
        });
    }
    let mut ee_l = 0.0;
    let mut ee_d = 0.0;
    let mut dot = 0.0;
    let mut target_norm_sq = 0.0;
    for (&e, &t) in system.iter().zip(target) {
        let diff = e - t;
        ee_l += diff * diff;
        ee_d += e * e;
        dot += e * t;
        target_norm_sq += t * t;
    }
    Ok(EEBreakdown {
        ee_l,
        ee_d,
        ee_r: 2.0 * dot,
        target_norm_sq,
    })
}

/// EE-L with its disparity and relevance components.
pub fn ee_breakdown(system: &ExposureVector, target: &ExposureVector) -> Result<EEBreakdown> {
    breakdown_of(system.values(), target.values())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[f64]) -> ExposureVector {
        ExposureVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identical_vectors_have_zero_loss() {
        let b = ee_breakdown(&ev(&[0.7, 0.2]), &ev(&[0.7, 0.2])).unwrap();
        assert_eq!(b.ee_l, 0.0);
    }

    #[test]
    fn zero_system_exposure() {
        let b = ee_breakdown(&ev(&[0.0, 0.0]), &ev(&[0.75, 0.75])).unwrap();
        assert_eq!(b.ee_l, 1.125);
        assert_eq!(b.ee_d, 0.0);
        assert_eq!(b.ee_r, 0.0);
    }

    #[test]
    fn hand_computed_breakdown() {
        let b = ee_breakdown(&ev(&[1.0, 0.5]), &ev(&[0.75, 0.75])).unwrap();
        assert!((b.ee_l - 0.125).abs() < 1e-15);
        assert!((b.ee_d - 1.25).abs() < 1e-15);
        assert!((b.ee_r - 2.25).abs() < 1e-15);
        assert!((b.ee_d - b.ee_r + b.target_norm_sq - b.ee_l).abs() < 1e-15);
    }

    #[test]
    fn pool_mismatch_is_a_dimension_error() {
        assert_eq!(
            ee_breakdown(&ev(&[1.0]), &ev(&[1.0, 0.0])),
            Err(Error::Dimension { left: 1, right: 2 })
        );
    }
}
