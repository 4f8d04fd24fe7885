//! Calibrated scaling laws for the gravitomagnetic signal and the four
//! electromagnetic barriers that hide it.
//!
//! The absolute electronic matrix elements are not computed here. Every law is
//! its physical dependence (I²/M_N, Q_s, Q_s², B(E2)) multiplied through a
//! reference pair from [`AnchorConfig`].

pub mod anchors;
mod budget;

use serde::{Deserialize, Serialize};

use crate::angular::ElectronicChannel;
use crate::constants::{z_alpha_squared, FINE_STRUCTURE};
use crate::nucdata::{spin_mass_lever, IsotopeRecord};
pub use anchors::{AnchorConfig, ReferencePair, Scenario, ScenarioKind};
pub use budget::{build_budget, BarrierBudget, BarrierEntry};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BarrierError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("A={mass_number}: {field} is required but absent")]
    MissingData {
        mass_number: u32,
        field: &'static str,
    },
}

/// `γ′ = √(4 − (Zα)²)`
pub fn gamma_prime(z: u32) -> f64 {
    (4.0 - z_alpha_squared(z)).sqrt()
}

/// Angular factor of the rank-2 projection, `√(5/7)`.
pub fn c_k2() -> f64 {
    (5.0f64 / 7.0).sqrt()
}

/// Parameters of the gravitomagnetic spin-quadrupole shift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    /// Gyrogravitational ratio; 1 in general relativity.
    pub chi: f64,
    /// Phenomenological coupling fitted by the King-plot extraction; equals
    /// `chi` under the nominal calibration.
    pub alpha_manko: f64,
    /// Mass-current form factor relative to its nominal value.
    pub f_tilde: f64,
    pub atomic_number: u32,
    /// Nuclear radius (fm), informational.
    pub r_n_fm: Option<f64>,
    /// I²/M_N → eV at chi = 1, f̃ = nominal. Absorbs G, ħ, c, |ψ(R_N)|²,
    /// R_N^(2γ′−1) and C_K2.
    pub anchor: Option<ReferencePair>,
    /// Plausible range of the chi = 1 shift over the form-factor band (eV).
    pub band_ev: [f64; 2],
}

impl SignalModel {
    pub fn calibrated(cfg: &AnchorConfig) -> Result<Self, BarrierError> {
        Ok(SignalModel {
            chi: 1.0,
            alpha_manko: 1.0,
            f_tilde: 1.0,
            atomic_number: cfg.atomic_number,
            r_n_fm: Some(5.5),
            anchor: Some(cfg.pair(anchors::SIGNAL_ANCHOR)?),
            band_ev: cfg.signal_band_ev,
        })
    }

    pub fn gamma_prime(&self) -> f64 {
        gamma_prime(self.atomic_number)
    }

    pub fn z_alpha(&self) -> f64 {
        f64::from(self.atomic_number) * FINE_STRUCTURE
    }

    fn anchor(&self) -> Result<ReferencePair, BarrierError> {
        self.anchor
            .ok_or_else(|| BarrierError::Config("signal model is not calibrated".into()))
    }

    /// Shift of the anchor isotope at chi = 1 and nominal f̃.
    pub fn baseline_shift(&self) -> Result<f64, BarrierError> {
        Ok(self.anchor()?.output_ev)
    }

    /// Position of the nominal baseline on the absolute form-factor scale
    /// whose range [1, 100] maps onto the band edges.
    pub fn nominal_band_form_factor(&self) -> Result<f64, BarrierError> {
        Ok(crate::decimal::quotient(
            self.baseline_shift()?,
            self.band_ev[0],
        ))
    }

    /// Model with f̃ set from an absolute band form factor in [1, 100].
    pub fn at_band_form_factor(&self, f_band: f64) -> Result<Self, BarrierError> {
        let nominal = self.nominal_band_form_factor()?;
        Ok(SignalModel {
            f_tilde: crate::decimal::quotient(f_band, nominal),
            ..self.clone()
        })
    }
}

/// `ΔE_GM = χ f̃ (I²/M_N) / (I_ref²/M_ref) × baseline`.
pub fn gravitomagnetic_shift(
    model: &SignalModel,
    rec: &IsotopeRecord,
) -> Result<f64, BarrierError> {
    let anchor = model.anchor()?;
    Ok(model.chi * model.f_tilde * anchor.apply(spin_mass_lever(rec)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QedCorrection {
    /// `(Zα)²`
    pub fractional: f64,
    /// Uncancelled residual after isotopic β₂ variation (eV).
    pub residual_ev: f64,
}

pub fn qed_correction(
    model: &SignalModel,
    beta2_variation: f64,
) -> Result<QedCorrection, BarrierError> {
    if !(0.0..=1.0).contains(&beta2_variation) {
        return Err(BarrierError::Domain(format!(
            "beta2 variation must lie in [0, 1], got {beta2_variation}"
        )));
    }
    let fractional = z_alpha_squared(model.atomic_number);
    Ok(QedCorrection {
        fractional,
        residual_ev: beta2_variation * fractional * model.baseline_shift()?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderHfs {
    pub energy_ev: f64,
    /// Set when the channel cannot carry a rank-2 shift at all (j < 3/2).
    pub rank2_blind: bool,
}

/// First-order HFS-E2 shift, linear in Q_s.
pub fn hfs_e2_first_order(
    rec: &IsotopeRecord,
    channel: &ElectronicChannel,
    calib: &ReferencePair,
) -> FirstOrderHfs {
    if !channel.rank2_sensitive() {
        return FirstOrderHfs {
            energy_ev: 0.0,
            rank2_blind: true,
        };
    }
    let energy_ev = match rec.qs {
        Some(q) if rec.is_odd() => calib.apply(q.value),
        _ => 0.0,
    };
    FirstOrderHfs {
        energy_ev,
        rank2_blind: false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderHfs {
    pub raw_ev: f64,
    pub subtracted_ev: f64,
}

/// Centroid shift from second-order fine-structure mixing, `E²/ΔE_FS`, and
/// what survives a theory subtraction of accuracy `theory_fraction`.
pub fn hfs_second_order(
    e_hfs_ev: f64,
    fs_gap_ev: f64,
    theory_fraction: f64,
) -> Result<SecondOrderHfs, BarrierError> {
    if !(fs_gap_ev > 0.0) {
        return Err(BarrierError::Domain(format!(
            "fine-structure gap must be positive, got {fs_gap_ev}"
        )));
    }
    if !(theory_fraction > 0.0 && theory_fraction <= 1.0) {
        return Err(BarrierError::Domain(format!(
            "theory fraction must lie in (0, 1], got {theory_fraction}"
        )));
    }
    let raw_ev = e_hfs_ev * e_hfs_ev / fs_gap_ev;
    Ok(SecondOrderHfs {
        raw_ev,
        subtracted_ev: theory_fraction * raw_ev,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TnpShift {
    pub raw_ev: f64,
    pub residual_ev: f64,
}

/// Tensor nuclear polarizability shift, linear in B(E2).
pub fn tnp_shift(
    rec: &IsotopeRecord,
    calib: &ReferencePair,
    knowledge_fraction: f64,
) -> Result<TnpShift, BarrierError> {
    let be2 = rec.be2_up.ok_or(BarrierError::MissingData {
        mass_number: rec.mass_number,
        field: "BE2_up",
    })?;
    if !(0.0..=1.0).contains(&knowledge_fraction) {
        return Err(BarrierError::Domain(format!(
            "knowledge fraction must lie in [0, 1], got {knowledge_fraction}"
        )));
    }
    let raw_ev = calib.apply(be2.value);
    Ok(TnpShift {
        raw_ev,
        residual_ev: knowledge_fraction * raw_ev,
    })
}

/// Relative non-factorizable TNP correction, `(ΔE_electronic / ΔE_nuclear)²`.
pub fn tnp_factorization_error(
    e_nuclear_ev: f64,
    e_electronic_ev: f64,
) -> Result<f64, BarrierError> {
    if !(e_nuclear_ev > 0.0 && e_electronic_ev > 0.0) {
        return Err(BarrierError::Domain(format!(
            "energy scales must be positive, got nuclear {e_nuclear_ev}, electronic {e_electronic_ev}"
        )));
    }
    let r = e_electronic_ev / e_nuclear_ev;
    Ok(r * r)
}

/// Scalar non-linearity surviving the P1/2–P3/2 fine-structure difference:
/// `((Zα)²/4) × residual`.
pub fn fs_differential_suppression(z: u32, seltzer_residual_ev: f64) -> Result<f64, BarrierError> {
    if !(seltzer_residual_ev >= 0.0) {
        return Err(BarrierError::Domain(format!(
            "residual must be non-negative, got {seltzer_residual_ev}"
        )));
    }
    Ok(z_alpha_squared(z) / 4.0 * seltzer_residual_ev)
}
