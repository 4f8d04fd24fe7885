//! Sensitivity arithmetic: the |χ − 1| bound, the milestone ladder and the
//! decay-limited Ramsey optimum.

mod ladder;
mod ramsey;

use serde::{Deserialize, Serialize};

use crate::barriers::{BarrierError, SignalModel};
pub use ladder::{Era, Milestone, MilestoneLadder, MilestoneMatch};
pub use ramsey::{decay_penalty, optimal_interrogation_time, ramsey_plan, RamseyPlan};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BudgetError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("target {target:e} eV outside the ladder range [{low:e}, {high:e}] eV")]
    OutOfRange { target: f64, low: f64, high: f64 },
    #[error("ladder configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
}

/// `|χ − 1| ≲ δE_residual / ΔE_GM(χ = 1)`
pub fn chi_bound(residual_ev: f64, signal_at_chi1_ev: f64) -> Result<f64, BudgetError> {
    if !(signal_at_chi1_ev > 0.0) || !signal_at_chi1_ev.is_finite() {
        return Err(BudgetError::Domain(format!(
            "signal at chi = 1 must be positive, got {signal_at_chi1_ev}"
        )));
    }
    if !(residual_ev >= 0.0) {
        return Err(BudgetError::Domain(format!(
            "residual must be non-negative, got {residual_ev}"
        )));
    }
    Ok(crate::decimal::quotient(residual_ev, signal_at_chi1_ev))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiBandPoint {
    pub label: String,
    /// Absolute form factor on the [1, 100] scale.
    pub form_factor: f64,
    pub signal_ev: f64,
    pub chi_bound: f64,
}

/// |χ − 1| bound across the mass-current form-factor band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiBand {
    pub residual_ev: f64,
    pub points: Vec<ChiBandPoint>,
    /// [bound at nominal f̃, bound at the low edge of the band].
    pub conservative: [f64; 2],
}

/// Evaluates the bound at the low band edge, the nominal calibration and the
/// high band edge of the form factor.
pub fn chi_band(model: &SignalModel, residual_ev: f64) -> Result<ChiBand, BudgetError> {
    let nominal = model.nominal_band_form_factor()?;
    let base = model.baseline_shift()?;
    let mut points = Vec::new();
    for (label, f) in [
        ("band low (f=1)", 1.0),
        ("nominal", nominal),
        ("band high (f=100)", 100.0),
    ] {
        let m = model.at_band_form_factor(f)?;
        let signal_ev = crate::decimal::product(m.chi * m.f_tilde, base);
        points.push(ChiBandPoint {
            label: label.into(),
            form_factor: f,
            signal_ev,
            chi_bound: chi_bound(residual_ev, signal_ev)?,
        });
    }
    let conservative = [points[1].chi_bound, points[0].chi_bound];
    Ok(ChiBand {
        residual_ev,
        points,
        conservative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::AnchorConfig;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(chi_bound(1e-13, 2e-21).unwrap(), 5e7);
        assert!((chi_bound(1e-13, 1e-22).unwrap() / 1e9 - 1.0).abs() < 1e-15);
        assert_eq!(chi_bound(0.0, 2e-21).unwrap(), 0.0);
        assert!(chi_bound(1e-13, 0.0).is_err());
        assert!(chi_bound(1e-13, -1.0).is_err());
        assert!(chi_bound(-1.0, 1.0).is_err());
    }

    #[test]
    fn band_report() {
        let model = SignalModel::calibrated(&AnchorConfig::bundled().unwrap()).unwrap();
        let band = chi_band(&model, 1e-13).unwrap();
        assert_eq!(band.points[1].form_factor, 20.0);
        assert_eq!(band.points[1].chi_bound, 5e7);
        assert!((band.points[0].chi_bound / 1e9 - 1.0).abs() < 1e-12);
        assert!((band.points[2].chi_bound / 1e7 - 1.0).abs() < 1e-12);
        assert_eq!(
            band.conservative,
            [band.points[1].chi_bound, band.points[0].chi_bound]
        );
    }

    proptest! {
        #[test]
        fn homogeneous(r in 0.0f64..1e-10, s in 1e-25f64..1e-18, a in 1e-3f64..1e3) {
            let lhs = chi_bound(a * r, a * s).unwrap();
            let rhs = chi_bound(r, s).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(f64::MIN_POSITIVE));
        }
    }
}
