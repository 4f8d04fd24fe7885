use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::BudgetError;
use crate::constants::{hz_to_ev, PLANCK_EV_S};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamseyPlan {
    /// `None` for a stable isotope.
    pub half_life_s: Option<f64>,
    pub t_r_requested_s: f64,
    pub t_r_opt_s: Option<f64>,
    pub t_r_used_s: f64,
    pub per_shot_linewidth_hz: f64,
    pub repetitions: u64,
    pub campaign_sensitivity_hz: f64,
    #[serde(rename = "campaign_sensitivity_eV")]
    pub campaign_sensitivity_ev: f64,
    /// Penalty at the requested T_R, normalized to 1 at the optimum.
    pub decay_penalty_at_requested: Option<f64>,
    pub planck_ev_s: f64,
    pub warnings: Vec<String>,
}

fn positive(name: &str, x: f64) -> Result<(), BudgetError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(BudgetError::Domain(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

/// `t₁/₂ / (2 ln 2)`: minimizer of the decay penalty.
pub fn optimal_interrogation_time(half_life_s: f64) -> Result<f64, BudgetError> {
    positive("half-life", half_life_s)?;
    Ok(half_life_s / (2.0 * LN_2))
}

/// `e^(λt)/√t` with `λ = ln 2/t₁/₂`, equivalently `e^(t/(2 T_opt))/√t`, whose
/// stationary point is `T_opt = t₁/₂/(2 ln 2)`.
fn raw_penalty(t: f64, half_life_s: f64) -> f64 {
    (t * LN_2 / half_life_s).exp() / t.sqrt()
}

/// Frequency-noise penalty of interrogating for `t_r_s`, relative to the
/// decay-limited optimum.
pub fn decay_penalty(t_r_s: f64, half_life_s: f64) -> Result<f64, BudgetError> {
    positive("T_R", t_r_s)?;
    let t_opt = optimal_interrogation_time(half_life_s)?;
    Ok(raw_penalty(t_r_s, half_life_s) / raw_penalty(t_opt, half_life_s))
}

pub fn ramsey_plan(
    half_life_s: Option<f64>,
    t_r_requested_s: f64,
    repetitions: u64,
) -> Result<RamseyPlan, BudgetError> {
    positive("T_R", t_r_requested_s)?;
    if repetitions == 0 {
        return Err(BudgetError::Domain("repetitions must be at least 1".into()));
    }
    let mut warnings = Vec::new();
    let (t_r_opt_s, t_r_used_s, penalty) = match half_life_s {
        None => (None, t_r_requested_s, None),
        Some(h) => {
            let t_opt = optimal_interrogation_time(h)?;
            let penalty = decay_penalty(t_r_requested_s, h)?;
            if t_r_requested_s > t_opt {
                warnings.push(format!(
                    "requested T_R = {t_r_requested_s:.5e} s exceeds the decay-limited optimum {t_opt:.5e} s \
                     (penalty {penalty:.5e}); using the optimum"
                ));
            }
            (Some(t_opt), t_r_requested_s.min(t_opt), Some(penalty))
        }
    };
    let per_shot_linewidth_hz = 1.0 / (2.0 * PI * t_r_used_s);
    let campaign_sensitivity_hz = per_shot_linewidth_hz / (repetitions as f64).sqrt();
    Ok(RamseyPlan {
        half_life_s,
        t_r_requested_s,
        t_r_opt_s,
        t_r_used_s,
        per_shot_linewidth_hz,
        repetitions,
        campaign_sensitivity_hz,
        campaign_sensitivity_ev: hz_to_ev(campaign_sensitivity_hz),
        decay_penalty_at_requested: penalty,
        planck_ev_s: PLANCK_EV_S,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mo91_optimum() {
        let t = optimal_interrogation_time(930.0).unwrap();
        assert!((t - 670.853194).abs() < 1e-5, "{t}");
        assert!((t / 60.0 - 11.18).abs() < 0.01);
        let plan = ramsey_plan(Some(930.0), 1e4, 1).unwrap();
        assert_eq!(plan.t_r_used_s, t);
        assert!((plan.per_shot_linewidth_hz - 2.3725e-4).abs() < 1e-7);
        assert_eq!(plan.warnings.len(), 1);
        assert!(plan.decay_penalty_at_requested.unwrap() > 1.0);
    }

    #[test]
    fn stable_campaign() {
        let plan = ramsey_plan(None, 1.0, 1_000_000).unwrap();
        assert_eq!(plan.t_r_used_s, 1.0);
        assert!((plan.campaign_sensitivity_hz - 1.0 / (2.0 * PI) / 1e3).abs() < 1e-18);
        assert!(plan.warnings.is_empty());
        assert!(plan.decay_penalty_at_requested.is_none());
    }

    #[test]
    fn penalty_shape() {
        let h = 930.0;
        let t = optimal_interrogation_time(h).unwrap();
        assert!((decay_penalty(t, h).unwrap() - 1.0).abs() < 1e-15);
        assert!(decay_penalty(2.0 * t, h).unwrap() > 1.0);
        assert!(decay_penalty(0.5 * t, h).unwrap() > 1.0);
        assert!(decay_penalty(1e-12, h).unwrap() > 1e5);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(decay_penalty(0.0, 1.0).is_err());
        assert!(decay_penalty(1.0, -1.0).is_err());
        assert!(ramsey_plan(Some(0.0), 1.0, 1).is_err());
        assert!(ramsey_plan(None, 1.0, 0).is_err());
        assert!(ramsey_plan(None, -1.0, 1).is_err());
    }

    #[test]
    fn finite_difference_minimum() {
        // Central differences on a 1e-3 relative grid change sign once, at T_opt.
        let h = 930.0;
        let t_opt = optimal_interrogation_time(h).unwrap();
        let f = |t: f64| decay_penalty(t, h).unwrap();
        let mut sign_changes = Vec::new();
        let mut prev: Option<f64> = None;
        let mut t = 0.5 * t_opt;
        while t < 2.0 * t_opt {
            let dt = 1e-3 * t;
            let d = (f(t + dt) - f(t - dt)) / (2.0 * dt);
            if let Some(p) = prev {
                if p < 0.0 && d >= 0.0 {
                    sign_changes.push(t);
                }
            }
            prev = Some(d);
            t *= 1.001;
        }
        assert_eq!(sign_changes.len(), 1);
        assert!((sign_changes[0] / t_opt - 1.0).abs() < 2e-3);
    }
}
