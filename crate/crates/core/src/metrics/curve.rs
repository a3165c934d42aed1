//! Disparity-relevance curves and their area.

use super::EEBreakdown;
use crate::error::{Error, Result};
use crate::exposure::uniform_expected_exposure;
use crate::judgments::RelevanceJudgments;
use crate::model::BrowsingModel;

/// Maps raw EE-D / EE-R onto the unit curve axes for one query.
///
/// Disparity is rescaled between the uniform-random policy (`D_lo`, maps to 0)
/// and a deterministic ranking under RBP weights (`D_hi = Σ_{i<δ} γ^{2i}`,
/// maps to 1), then clipped to `[0, 1]`. Relevance is reported relative to
/// the oracle: `r = εᵀε* / ε*ᵀε*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveNormalizer {
    d_lo: f64,
    d_hi: f64,
}

impl CurveNormalizer {
    pub fn new(model: &BrowsingModel, judgments: &RelevanceJudgments) -> Result<Self> {
        let d_hi = model.max_disparity(judgments.len());
        let d_lo = uniform_expected_exposure(model, judgments).norm_sq();
        if !(d_hi - d_lo > 1e-15) {
            return Err(Error::DegenerateNormalization(d_hi - d_lo));
        }
        Ok(CurveNormalizer { d_lo, d_hi })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.d_lo, self.d_hi)
    }

    pub fn normalize_disparity(&self, ee_d: f64) -> f64 {
        ((ee_d - self.d_lo) / (self.d_hi - self.d_lo)).clamp(0.0, 1.0)
    }

    pub fn normalize(&self, ee: &EEBreakdown) -> Result<(f64, f64)> {
        if !(ee.target_norm_sq > 0.0) {
            return Err(Error::DegenerateNormalization(ee.target_norm_sq));
        }
        Ok((
            self.normalize_disparity(ee.ee_d),
            ee.relevance_dot() / ee.target_norm_sq,
        ))
    }
}

/// One-off version of [`CurveNormalizer::normalize`].
pub fn normalize_curve_point(
    ee: &EEBreakdown,
    judgments: &RelevanceJudgments,
    model: &BrowsingModel,
) -> Result<(f64, f64)> {
    CurveNormalizer::new(model, judgments)?.normalize(ee)
}

/// A curve point annotated with the policy parameter that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub param: Option<f64>,
    pub breakdown: EEBreakdown,
    pub d_norm: f64,
    pub r_norm: f64,
}

/// Points sorted by ascending normalized disparity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepCurve {
    points: Vec<SweepPoint>,
}

impl SweepCurve {
    pub fn new(mut points: Vec<SweepPoint>) -> Self {
        points.sort_by(|a, b| a.d_norm.total_cmp(&b.d_norm));
        SweepCurve { points }
    }

    pub fn points(&self) -> &[SweepPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coordinates(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.d_norm, p.r_norm)).collect()
    }
}

/// EE-AUC of a sweep curve; see [`ee_auc_points`].
pub fn ee_auc(curve: &SweepCurve) -> Result<f64> {
    ee_auc_points(&curve.coordinates())
}

/// Trapezoidal area under `(d_norm, r_norm)` points on `[0, 1]`.
///
/// The curve is anchored at `(0, 0)` and extended flat from its largest
/// disparity to 1. Points sharing a disparity keep the largest relevance.
pub fn ee_auc_points(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .map(|&(d, r)| (d.clamp(0.0, 1.0), r))
        .collect();
    pts.push((0.0, 0.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    pts.dedup_by(|later, earlier| later.0 == earlier.0);
    let &(last_d, last_r) = pts.last().expect("nonempty");
    if last_d < 1.0 {
        pts.push((1.0, last_r));
    }
    Ok(pts
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_constant() {
        assert!((ee_auc_points(&[(0.0, 0.0), (1.0, 1.0)]).unwrap() - 0.5).abs() < 1e-15);
        assert!((ee_auc_points(&[(0.0, 1.0), (1.0, 1.0)]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_trapezoid() {
        let a = ee_auc_points(&[(0.0, 0.0), (0.5, 0.8), (1.0, 1.0)]).unwrap();
        assert!((a - 0.65).abs() < 1e-15);
    }

    #[test]
    fn extends_flat_to_one_and_keeps_max_duplicate() {
        // (0,0) -> (0.5, 1.0) -> flat to 1: 0.25 + 0.5
        let a = ee_auc_points(&[(0.5, 0.2), (0.5, 1.0)]).unwrap();
        assert!((a - 0.75).abs() < 1e-15);
    }

    #[test]
    fn needs_two_points() {
        assert_eq!(
            ee_auc_points(&[(0.3, 0.3)]),
            Err(Error::InsufficientPoints(1))
        );
    }

    #[test]
    fn degenerate_single_document_pool() {
        let j = RelevanceJudgments::from_grades("q", &[1]);
        let m = BrowsingModel::rbp(0.5).unwrap();
        assert!(matches!(
            CurveNormalizer::new(&m, &j),
            Err(Error::DegenerateNormalization(_))
        ));
    }
}
