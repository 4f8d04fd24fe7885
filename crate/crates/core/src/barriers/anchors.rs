//! Calibration anchors: each scaling law is (stated dependence) × (one
//! reference input/output pair).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BarrierError;

pub const SIGNAL_ANCHOR: &str = "gravitomagnetic_signal";
pub const HFS_E2_ANCHOR: &str = "hfs_e2_first_order";
pub const TNP_ANCHOR: &str = "tnp";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Anchor {
    pub name: String,
    pub dependence: String,
    pub anchor_input: f64,
    #[serde(rename = "anchor_output_eV")]
    pub anchor_output_ev: f64,
    pub provenance: String,
}

/// A linear law through the origin: `output = output_ev * x / input`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePair {
    pub input: f64,
    pub output_ev: f64,
}

impl ReferencePair {
    pub fn new(input: f64, output_ev: f64) -> Result<Self, BarrierError> {
        if input == 0.0 || !input.is_finite() || !output_ev.is_finite() {
            return Err(BarrierError::Config(format!(
                "anchor input must be finite and nonzero (got {input} -> {output_ev} eV)"
            )));
        }
        Ok(ReferencePair { input, output_ev })
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.output_ev * (x / self.input)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Current,
    Projected,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Current => "current",
            ScenarioKind::Projected => "projected",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = BarrierError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "current" => Ok(ScenarioKind::Current),
            "projected" => Ok(ScenarioKind::Projected),
            other => Err(BarrierError::Config(format!("unknown scenario {other:?}"))),
        }
    }
}

/// Knowledge of the subtraction inputs in one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Fractional accuracy of the second-order HFS theory subtraction.
    pub hfs_theory_fraction: f64,
    /// Fractional knowledge of B(E2), hence of the TNP shift.
    pub tnp_knowledge_fraction: f64,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorConfig {
    pub version: String,
    #[serde(default)]
    pub description: String,
    pub atomic_number: u32,
    #[serde(rename = "fs_gap_eV")]
    pub fs_gap_ev: f64,
    #[serde(default)]
    pub fs_gap_provenance: String,
    #[serde(rename = "signal_band_eV")]
    pub signal_band_ev: [f64; 2],
    #[serde(default)]
    pub signal_band_provenance: String,
    pub anchors: Vec<Anchor>,
    pub scenarios: BTreeMap<ScenarioKind, Scenario>,
}

impl AnchorConfig {
    pub fn from_json_str(text: &str) -> Result<Self, BarrierError> {
        let cfg: AnchorConfig = serde_json::from_str(text)
            .map_err(|e| BarrierError::Config(format!("anchors: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, BarrierError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            BarrierError::Config(format!("cannot read anchors file {}: {e}", path.display()))
        })?;
        Self::from_json_str(&text)
    }

    pub fn bundled() -> Result<Self, BarrierError> {
        let text = crate::resources::text(crate::resources::MO41_ANCHORS)
            .map_err(|e| BarrierError::Config(e.to_string()))?;
        Self::from_json_str(&text)
    }

    fn validate(&self) -> Result<(), BarrierError> {
        if !(self.fs_gap_ev > 0.0) {
            return Err(BarrierError::Config(format!(
                "fs_gap_eV must be positive, got {}",
                self.fs_gap_ev
            )));
        }
        let [lo, hi] = self.signal_band_ev;
        if !(lo > 0.0 && hi > lo) {
            return Err(BarrierError::Config(format!(
                "signal band must satisfy 0 < low < high, got [{lo}, {hi}]"
            )));
        }
        for s in self.scenarios.values() {
            for (name, x) in [
                ("hfs_theory_fraction", s.hfs_theory_fraction),
                ("tnp_knowledge_fraction", s.tnp_knowledge_fraction),
            ] {
                if !(x > 0.0 && x <= 1.0) {
                    return Err(BarrierError::Config(format!(
                        "{name} must lie in (0, 1], got {x}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn anchor(&self, name: &str) -> Result<&Anchor, BarrierError> {
        self.anchors.iter().find(|a| a.name == name).ok_or_else(|| {
            BarrierError::Config(format!("missing anchor {name:?} in {}", self.version))
        })
    }

    pub fn pair(&self, name: &str) -> Result<ReferencePair, BarrierError> {
        let a = self.anchor(name)?;
        ReferencePair::new(a.anchor_input, a.anchor_output_ev)
    }

    pub fn scenario(&self, kind: ScenarioKind) -> Result<&Scenario, BarrierError> {
        self.scenarios.get(&kind).ok_or_else(|| {
            BarrierError::Config(format!("missing scenario {kind} in {}", self.version))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_is_complete() {
        let cfg = AnchorConfig::bundled().unwrap();
        assert_eq!(cfg.version, "mo41-anchors-v1");
        for name in [SIGNAL_ANCHOR, HFS_E2_ANCHOR, TNP_ANCHOR] {
            assert!(cfg.pair(name).is_ok(), "{name}");
        }
        assert_eq!(
            cfg.scenario(ScenarioKind::Current)
                .unwrap()
                .tnp_knowledge_fraction,
            0.1
        );
        assert_eq!(
            cfg.scenario(ScenarioKind::Projected)
                .unwrap()
                .hfs_theory_fraction,
            1e-5
        );
    }

    #[test]
    fn zero_anchor_input_rejected() {
        assert!(ReferencePair::new(0.0, 1.0).is_err());
    }

    #[test]
    fn missing_anchor_is_config_error() {
        let mut cfg = AnchorConfig::bundled().unwrap();
        cfg.anchors.retain(|a| a.name != TNP_ANCHOR);
        assert!(matches!(cfg.pair(TNP_ANCHOR), Err(BarrierError::Config(_))));
    }
}
