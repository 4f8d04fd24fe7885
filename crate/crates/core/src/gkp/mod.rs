//! Generalized King plot rank-2 sector.
//!
//! After the even-even hyperplane is subtracted, each odd isotope A observed
//! on a rank-2-sensitive transition t leaves
//!
//! ```text
//! Δ_t^A = H_t Q_s^A x_Q + P_t α_T^A x_T + G_t (I_A²/M_A) α̃
//! ```
//!
//! where x_Q and x_T are background amplitudes (1 when the electronic
//! coefficients are exact) and α̃ is the gravitomagnetic coupling. The rows
//! are (isotope, transition) pairs; the columns are the unknowns.

mod design;
mod observations;
mod solve;
mod topology;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angular::ElectronicChannel;
pub use design::{
    alpha_t_from_be2, build_design, precondition, DesignMatrix, DesignOptions, RowKey,
};
pub use observations::{
    AssembledSystem, Observation, ObservationSet, ParameterOverride, Synthetic,
};
pub use solve::{
    condition_number, extract, singular_values, ExtractionResult, ParameterEstimate,
    SINGULAR_RTOL_FACTOR,
};
pub use topology::{requested_row, solvable, topology_table, Solvability, Topology, TopologyRow};

/// Relative non-factorizable correction to α_T, (10 keV / 10 MeV)².
pub const TNP_FACTORIZATION_REL: f64 = 1e-6;

/// Default number of background unknowns (static HFS-E2 and dynamic TNP).
pub const DEFAULT_N_BKG: u32 = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GkpError {
    #[error(
        "underdetermined: {equations} equations for {unknowns} unknowns; unique extraction needs \
         N_odd ≥ N_bkg + 1 per rank-2 transition (N_odd ≥ 3 with one transition)"
    )]
    Underdetermined { equations: usize, unknowns: usize },
    #[error("rank deficient: column {column} is identically zero")]
    ZeroColumn { column: String },
    #[error("singular system: sigma_min/sigma_max = {ratio:.3e} below tolerance")]
    Singular { ratio: f64 },
    #[error("A={mass_number}: {field} is required to build the design matrix")]
    MissingParameter {
        mass_number: u32,
        field: &'static str,
    },
    #[error("row {row}: uncertainty must be positive and finite, got {sigma}")]
    InvalidSigma { row: usize, sigma: f64 },
    #[error("no observed residuals attached to the design matrix")]
    NoRhs,
    #[error("no rank-2-sensitive transition available")]
    NoRank2Transition,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("coefficient configuration: {0}")]
    Config(String),
}

/// Electronic coefficients of one transition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionCoefficients {
    pub label: String,
    /// Upper state of the transition, e.g. `2p3/2`.
    pub upper: String,
    /// eV per barn of Q_s.
    #[serde(rename = "H")]
    pub h: f64,
    /// eV per unit of α_T (B(E2) proxy, W.u.).
    #[serde(rename = "P")]
    pub p: f64,
    /// eV per u⁻¹ of I²/M_N.
    #[serde(rename = "G")]
    pub g: f64,
    /// eV per barn² for the optional second-order HFS column.
    #[serde(rename = "H2", default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<f64>,
    #[serde(default)]
    pub provenance: String,
}

impl TransitionCoefficients {
    pub fn upper_channel(&self) -> Result<ElectronicChannel, GkpError> {
        self.upper
            .parse()
            .map_err(|e| GkpError::Config(format!("{}: {e}", self.label)))
    }

    pub fn rank2_sensitive(&self) -> bool {
        self.upper_channel()
            .map(|c| c.rank2_sensitive())
            .unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectronicCoefficients {
    pub version: String,
    #[serde(default)]
    pub provenance: String,
    pub transitions: Vec<TransitionCoefficients>,
}

impl ElectronicCoefficients {
    pub fn from_json_str(text: &str) -> Result<Self, GkpError> {
        let c: ElectronicCoefficients =
            serde_json::from_str(text).map_err(|e| GkpError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, GkpError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GkpError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn bundled() -> Result<Self, GkpError> {
        let text = crate::resources::text(crate::resources::MO41_COEFFS)
            .map_err(|e| GkpError::Config(e.to_string()))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<(), GkpError> {
        for t in &self.transitions {
            let channel = t.upper_channel()?;
            let values = [t.h, t.p, t.g, t.h2.unwrap_or(0.0)];
            if values.iter().any(|v| !v.is_finite()) {
                return Err(GkpError::Config(format!(
                    "{}: coefficients must be finite",
                    t.label
                )));
            }
            if !channel.rank2_sensitive() && values.iter().any(|&v| v != 0.0) {
                return Err(GkpError::Config(format!(
                    "{}: upper state {} has j < 3/2 and must have H = P = G = 0",
                    t.label, t.upper
                )));
            }
        }
        Ok(())
    }

    /// Rank-2-sensitive transitions in file order.
    pub fn rank2_transitions(&self) -> Vec<&TransitionCoefficients> {
        self.transitions
            .iter()
            .filter(|t| t.rank2_sensitive())
            .collect()
    }

    /// A copy restricted to the first `n` rank-2-sensitive transitions.
    pub fn first_rank2(&self, n: usize) -> Result<Self, GkpError> {
        let picked: Vec<_> = self
            .rank2_transitions()
            .into_iter()
            .take(n)
            .cloned()
            .collect();
        if picked.is_empty() {
            return Err(GkpError::NoRank2Transition);
        }
        if picked.len() < n {
            return Err(GkpError::Config(format!(
                "{} rank-2 transitions requested but {} has only {}",
                n,
                self.version,
                picked.len()
            )));
        }
        Ok(ElectronicCoefficients {
            version: self.version.clone(),
            provenance: self.provenance.clone(),
            transitions: picked,
        })
    }
}
