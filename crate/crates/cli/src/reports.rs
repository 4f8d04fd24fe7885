//! JSON report shapes. Unknown fields are rejected on deserialization, so
//! these types double as the output schemas.

use serde::{Deserialize, Serialize};

use gkpforge::barriers::{BarrierBudget, QedCorrection};
use gkpforge::budget::{ChiBand, MilestoneLadder, MilestoneMatch, RamseyPlan};
use gkpforge::gkp::{ExtractionResult, RowKey, TopologyRow};
use gkpforge::montecarlo::{HistogramBin, KappaSummary, SamplingSpec};

use crate::manifest::RunManifest;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetReport {
    pub manifest: RunManifest,
    pub budget: BarrierBudget,
    /// |χ − 1| bound from the combined residual of the selected scenario.
    pub chi_bound: f64,
    pub chi_band: ChiBand,
    pub qed: QedCorrection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolvabilityReport {
    pub manifest: RunManifest,
    pub n_bkg: u32,
    pub rows: Vec<TopologyRow>,
    pub requested: TopologyRow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionReport {
    pub manifest: RunManifest,
    pub spec: SamplingSpec,
    pub summary: KappaSummary,
    pub histogram: Vec<HistogramBin>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractReport {
    pub manifest: RunManifest,
    pub rows: Vec<RowKey>,
    pub columns: Vec<String>,
    pub result: ExtractionResult,
    /// Injected unknowns for synthetic residuals.
    pub truth: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MilestonesReport {
    pub manifest: RunManifest,
    pub ladder: MilestoneLadder,
    pub lookup: Option<MilestoneMatch>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamseyReport {
    pub manifest: RunManifest,
    pub plan: RamseyPlan,
}
