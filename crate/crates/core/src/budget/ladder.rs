use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BudgetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Era {
    ElectromagneticSubtraction,
    QuantumMetrology,
}

impl Era {
    pub fn label(self) -> &'static str {
        match self {
            Era::ElectromagneticSubtraction => "electromagnetic subtraction",
            Era::QuantumMetrology => "quantum metrology",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Milestone {
    #[serde(rename = "sensitivity_eV")]
    pub sensitivity_ev: f64,
    pub dominant_barrier: String,
    pub required_advance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MilestoneLadder {
    pub version: String,
    #[serde(default)]
    pub provenance: String,
    /// Rows at or above this sensitivity belong to the electromagnetic era.
    #[serde(rename = "em_era_min_eV")]
    pub em_era_min_ev: f64,
    /// Rows at or below this sensitivity belong to the quantum-metrology era.
    #[serde(rename = "qm_era_max_eV")]
    pub qm_era_max_ev: f64,
    pub rows: Vec<Milestone>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MilestoneMatch {
    #[serde(rename = "target_eV")]
    pub target_ev: f64,
    pub index: usize,
    pub row: Milestone,
    /// [lower, upper] edges of the row's bin in eV.
    #[serde(rename = "bin_eV")]
    pub bin_ev: [f64; 2],
    pub era: Era,
}

impl MilestoneLadder {
    pub fn from_json_str(text: &str) -> Result<Self, BudgetError> {
        let l: MilestoneLadder =
            serde_json::from_str(text).map_err(|e| BudgetError::Config(e.to_string()))?;
        l.validate()?;
        Ok(l)
    }

    pub fn load(path: &Path) -> Result<Self, BudgetError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BudgetError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn bundled() -> Result<Self, BudgetError> {
        let text = crate::resources::text(crate::resources::MILESTONES)
            .map_err(|e| BudgetError::Config(e.to_string()))?;
        Self::from_json_str(&text)
    }

    fn validate(&self) -> Result<(), BudgetError> {
        if self.rows.is_empty() {
            return Err(BudgetError::Config("ladder has no rows".into()));
        }
        if self
            .rows
            .iter()
            .any(|r| !(r.sensitivity_ev > 0.0 && r.sensitivity_ev.is_finite()))
        {
            return Err(BudgetError::Config(
                "sensitivities must be positive and finite".into(),
            ));
        }
        if self
            .rows
            .windows(2)
            .any(|w| w[1].sensitivity_ev >= w[0].sensitivity_ev)
        {
            return Err(BudgetError::Config(
                "sensitivities must be strictly decreasing".into(),
            ));
        }
        if !(self.qm_era_max_ev < self.em_era_min_ev) {
            return Err(BudgetError::Config(
                "era boundary must separate two rows".into(),
            ));
        }
        let straddles = self.rows.windows(2).any(|w| {
            w[0].sensitivity_ev == self.em_era_min_ev && w[1].sensitivity_ev == self.qm_era_max_ev
        });
        if !straddles {
            return Err(BudgetError::Config(
                "era boundary must lie between two adjacent rows".into(),
            ));
        }
        Ok(())
    }

    pub fn range(&self) -> (f64, f64) {
        (
            self.rows[self.rows.len() - 1].sensitivity_ev,
            self.rows[0].sensitivity_ev,
        )
    }

    /// Lower edge of row `i`'s bin: the log-midpoint to the next row, or the
    /// row itself for the last one.
    fn lower_edge(&self, i: usize) -> f64 {
        match self.rows.get(i + 1) {
            Some(next) => (self.rows[i].sensitivity_ev * next.sensitivity_ev).sqrt(),
            None => self.rows[i].sensitivity_ev,
        }
    }

    fn upper_edge(&self, i: usize) -> f64 {
        if i == 0 {
            self.rows[0].sensitivity_ev
        } else {
            self.lower_edge(i - 1)
        }
    }

    pub fn era_of(&self, sensitivity_ev: f64) -> Era {
        if sensitivity_ev >= self.em_era_min_ev {
            Era::ElectromagneticSubtraction
        } else {
            Era::QuantumMetrology
        }
    }

    /// Row whose half-decade bin contains `target_ev`.
    pub fn lookup(&self, target_ev: f64) -> Result<MilestoneMatch, BudgetError> {
        let (low, high) = self.range();
        if !(target_ev >= low && target_ev <= high) {
            return Err(BudgetError::OutOfRange {
                target: target_ev,
                low,
                high,
            });
        }
        let index = (0..self.rows.len())
            .find(|&i| target_ev >= self.lower_edge(i))
            .unwrap_or(self.rows.len() - 1);
        let row = self.rows[index].clone();
        Ok(MilestoneMatch {
            target_ev,
            index,
            era: self.era_of(row.sensitivity_ev),
            bin_ev: [self.lower_edge(index), self.upper_edge(index)],
            row,
        })
    }
}
