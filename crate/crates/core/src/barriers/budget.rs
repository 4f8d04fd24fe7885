use serde::{Deserialize, Serialize};

use super::anchors::{AnchorConfig, ScenarioKind, HFS_E2_ANCHOR, TNP_ANCHOR};
use super::{
    gravitomagnetic_shift, hfs_e2_first_order, hfs_second_order, tnp_shift, BarrierError,
    SignalModel,
};
use crate::angular::ElectronicChannel;
use crate::nucdata::IsotopeChain;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierEntry {
    pub name: String,
    pub scaling: String,
    pub raw_ev: Option<f64>,
    pub current_ev: Option<f64>,
    pub projected_ev: Option<f64>,
    pub note: String,
}

impl BarrierEntry {
    pub fn residual(&self, scenario: ScenarioKind) -> Option<f64> {
        match scenario {
            ScenarioKind::Current => self.current_ev,
            ScenarioKind::Projected => self.projected_ev,
        }
    }
}

/// Per-barrier residuals for one probe isotope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierBudget {
    pub probe_a: u32,
    pub channel: String,
    pub scenario: ScenarioKind,
    pub entries: Vec<BarrierEntry>,
    /// Plain sum of the residuals.
    pub combined_current_ev: f64,
    pub combined_projected_ev: f64,
    pub max_current_ev: f64,
    pub max_projected_ev: f64,
    pub signal_nominal_ev: f64,
    /// Largest contributor in the selected scenario.
    pub dominant: String,
    pub anchors_version: String,
}

impl BarrierBudget {
    pub fn combined(&self) -> f64 {
        match self.scenario {
            ScenarioKind::Current => self.combined_current_ev,
            ScenarioKind::Projected => self.combined_projected_ev,
        }
    }

    pub fn max(&self) -> f64 {
        match self.scenario {
            ScenarioKind::Current => self.max_current_ev,
            ScenarioKind::Projected => self.max_projected_ev,
        }
    }
}

fn sum_and_max(
    entries: &[BarrierEntry],
    scenario: ScenarioKind,
) -> (f64, f64, Option<&BarrierEntry>) {
    let mut sum = 0.0;
    let mut max = 0.0;
    let mut dominant = None;
    for e in entries {
        if let Some(r) = e.residual(scenario) {
            sum += r;
            if r > max {
                max = r;
                dominant = Some(e);
            }
        }
    }
    (sum, max, dominant)
}

/// Assembles the four-barrier table for the isotope `probe_a` of `chain`
/// observed in `channel`.
pub fn build_budget(
    chain: &IsotopeChain,
    channel: &ElectronicChannel,
    cfg: &AnchorConfig,
    probe_a: u32,
    scenario: ScenarioKind,
) -> Result<BarrierBudget, BarrierError> {
    let rec = chain
        .get(probe_a)
        .ok_or_else(|| BarrierError::Config(format!("probe isotope A={probe_a} not in chain")))?;
    let fs_gap = channel.fs_gap_ev.unwrap_or(cfg.fs_gap_ev);
    let current = cfg.scenario(ScenarioKind::Current)?;
    let projected = cfg.scenario(ScenarioKind::Projected)?;

    let signal = SignalModel::calibrated(cfg)?;
    let signal_nominal_ev = gravitomagnetic_shift(&signal, rec)?;

    let first = hfs_e2_first_order(rec, channel, &cfg.pair(HFS_E2_ANCHOR)?);
    let e1 = first.energy_ev.abs();
    let second_cur = hfs_second_order(e1, fs_gap, current.hfs_theory_fraction)?;
    let second_proj = hfs_second_order(e1, fs_gap, projected.hfs_theory_fraction)?;
    let tnp_pair = cfg.pair(TNP_ANCHOR)?;
    let tnp_cur = tnp_shift(rec, &tnp_pair, current.tnp_knowledge_fraction)?;
    let tnp_proj = tnp_shift(rec, &tnp_pair, projected.tnp_knowledge_fraction)?;

    let entries = vec![
        BarrierEntry {
            name: "I. Wigner-Eckart".into(),
            scaling: "---".into(),
            raw_ev: None,
            current_ev: None,
            projected_ev: None,
            note: if channel.rank2_sensitive() {
                "Resolved: use j >= 3/2".into()
            } else {
                format!("Channel {} is rank-2 blind (j < 3/2)", channel.label)
            },
        },
        BarrierEntry {
            name: "II. HFS-E2 (1st)".into(),
            scaling: "Qs".into(),
            raw_ev: Some(e1),
            current_ev: Some(0.0),
            projected_ev: Some(0.0),
            note: "Centroid extraction cancels 1st-order HFS exactly".into(),
        },
        BarrierEntry {
            name: "III. HFS (2nd)".into(),
            scaling: "Qs^2".into(),
            raw_ev: Some(second_cur.raw_ev),
            current_ev: Some(second_cur.subtracted_ev),
            projected_ev: Some(second_proj.subtracted_ev),
            note: format!(
                "theory subtraction to {} (current), {} (projected)",
                current.hfs_theory_fraction, projected.hfs_theory_fraction
            ),
        },
        BarrierEntry {
            name: "IV. TNP".into(),
            scaling: "B(E2)".into(),
            raw_ev: Some(tnp_cur.raw_ev),
            current_ev: Some(tnp_cur.residual_ev),
            projected_ev: Some(tnp_proj.residual_ev),
            note: format!(
                "B(E2) known to {} (current), {} (projected){}",
                current.tnp_knowledge_fraction,
                projected.tnp_knowledge_fraction,
                if rec.be2_effective {
                    "; effective fragmented-multiplet B(E2)"
                } else {
                    ""
                }
            ),
        },
    ];

    let (combined_current_ev, max_current_ev, _) = sum_and_max(&entries, ScenarioKind::Current);
    let (combined_projected_ev, max_projected_ev, _) =
        sum_and_max(&entries, ScenarioKind::Projected);
    let dominant = sum_and_max(&entries, scenario)
        .2
        .map(|e| e.name.clone())
        .unwrap_or_else(|| "none".into());

    Ok(BarrierBudget {
        probe_a,
        channel: channel.label.clone(),
        scenario,
        entries,
        combined_current_ev,
        combined_projected_ev,
        max_current_ev,
        max_projected_ev,
        signal_nominal_ev,
        dominant,
        anchors_version: cfg.version.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources;

    fn p32() -> ElectronicChannel {
        "2p3/2"
            .parse::<ElectronicChannel>()
            .unwrap()
            .with_gap(150.0)
    }

    #[test]
    fn mo95_current_and_projected() {
        let chain = resources::mo_chain().unwrap();
        let cfg = AnchorConfig::bundled().unwrap();
        let cur = build_budget(&chain, &p32(), &cfg, 95, ScenarioKind::Current).unwrap();
        assert!(
            cur.combined() > 0.7e-13 && cur.combined() < 2e-13,
            "{}",
            cur.combined()
        );
        assert_eq!(cur.dominant, "IV. TNP");
        assert_eq!(cur.entries[1].current_ev, Some(0.0));
        assert_eq!(cur.entries[1].projected_ev, Some(0.0));
        assert!(cur.max() <= cur.combined());

        let proj = build_budget(&chain, &p32(), &cfg, 95, ScenarioKind::Projected).unwrap();
        assert!(
            proj.combined() > 0.7e-14 && proj.combined() < 2e-14,
            "{}",
            proj.combined()
        );
        assert_eq!(proj.dominant, "IV. TNP");
        assert_eq!(proj.signal_nominal_ev, 2e-21);
    }

    #[test]
    fn zero_anchors_give_zero_budget() {
        let chain = resources::mo_chain().unwrap();
        let mut cfg = AnchorConfig::bundled().unwrap();
        for a in &mut cfg.anchors {
            a.anchor_output_ev = 0.0;
        }
        let b = build_budget(&chain, &p32(), &cfg, 95, ScenarioKind::Current).unwrap();
        assert_eq!(b.combined(), 0.0);
        assert_eq!(b.dominant, "none");
    }

    #[test]
    fn missing_anchor_or_probe() {
        let chain = resources::mo_chain().unwrap();
        let mut cfg = AnchorConfig::bundled().unwrap();
        assert!(build_budget(&chain, &p32(), &cfg, 101, ScenarioKind::Current).is_err());
        cfg.anchors.clear();
        assert!(matches!(
            build_budget(&chain, &p32(), &cfg, 95, ScenarioKind::Current),
            Err(BarrierError::Config(_))
        ));
    }

    #[test]
    fn projected_never_exceeds_current() {
        let chain = resources::mo_chain().unwrap();
        let base = AnchorConfig::bundled().unwrap();
        for (h, t) in [(1e-3, 0.1), (1e-2, 0.5), (1.0, 1.0), (1e-6, 1e-4)] {
            let mut cfg = base.clone();
            let cur = cfg.scenarios.get_mut(&ScenarioKind::Current).unwrap();
            cur.hfs_theory_fraction = h;
            cur.tnp_knowledge_fraction = t;
            let proj = cfg.scenarios.get_mut(&ScenarioKind::Projected).unwrap();
            proj.hfs_theory_fraction = h / 3.0;
            proj.tnp_knowledge_fraction = t / 2.0;
            for a in [95, 97] {
                let b = build_budget(&chain, &p32(), &cfg, a, ScenarioKind::Current).unwrap();
                assert!(b.combined_projected_ev <= b.combined_current_ev);
            }
        }
    }
}
