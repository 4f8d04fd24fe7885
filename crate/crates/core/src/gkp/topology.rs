use serde::{Deserialize, Serialize};

use crate::nucdata::{IsotopeChain, IsotopeRecord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    /// Even-even isotopes calibrating the hyperplane, reference excluded.
    pub n_ee: u32,
    pub n_odd: u32,
    pub n_trans_rank2: u32,
    #[serde(default)]
    pub notes: String,
}

impl Topology {
    pub fn new(n_ee: u32, n_odd: u32, n_trans_rank2: u32) -> Self {
        Topology {
            n_ee,
            n_odd,
            n_trans_rank2,
            notes: String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solvability {
    pub solvable: bool,
    pub n_equations: u32,
    pub n_unknowns: u32,
    /// `No (2 < 3)`, `Yes (3 = 3)`, `Yes (4 > 3)` or `Yes (6 ≫ 3)`; the last
    /// form marks at least twice as many equations as unknowns.
    pub verdict: String,
}

/// Equation counting for the rank-2 sector. Rank is checked separately.
pub fn solvable(top: &Topology, n_bkg: u32) -> Solvability {
    let n_equations = top.n_odd * top.n_trans_rank2;
    let n_unknowns = n_bkg + 1;
    let solvable = n_equations >= n_unknowns && top.n_odd >= 1 && top.n_trans_rank2 >= 1;
    let verdict = if !solvable {
        let rel = if n_equations < n_unknowns { "<" } else { "≥" };
        format!("No ({n_equations} {rel} {n_unknowns})")
    } else if n_equations == n_unknowns {
        format!("Yes ({n_equations} = {n_unknowns})")
    } else if n_equations >= 2 * n_unknowns {
        format!("Yes ({n_equations} ≫ {n_unknowns})")
    } else {
        format!("Yes ({n_equations} > {n_unknowns})")
    };
    Solvability {
        solvable,
        n_equations,
        n_unknowns,
        verdict,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyRow {
    pub label: String,
    pub topology: Topology,
    pub solvability: Solvability,
    pub feasibility: String,
    /// Radioactive isotopes added on top of the stable chain.
    pub added_isotopes: Vec<u32>,
}

fn feasibility(s: &Solvability, radioactive: &[u32]) -> String {
    if !s.solvable {
        "---".into()
    } else if radioactive.is_empty() {
        "Qual. Leap (g)".into()
    } else {
        "Qual. Leap (f, g)".into()
    }
}

fn counts(chain: &IsotopeChain) -> (u32, u32) {
    let (ee, odd) = chain.partition();
    let n_ee = ee.iter().filter(|r| !r.is_reference()).count() as u32;
    (n_ee, odd.len() as u32)
}

fn row(
    label: String,
    n_ee: u32,
    n_odd: u32,
    n_trans: u32,
    n_bkg: u32,
    added: &[u32],
) -> TopologyRow {
    let topology = Topology::new(n_ee, n_odd, n_trans);
    let solvability = solvable(&topology, n_bkg);
    let feasibility = feasibility(&solvability, added);
    TopologyRow {
        label,
        topology,
        solvability,
        feasibility,
        added_isotopes: added.to_vec(),
    }
}

/// The stable odd isotopes of `chain` plus the odd members of `added`,
/// observed in `n_trans` rank-2 transitions.
pub fn requested_row(
    chain: &IsotopeChain,
    added: &[IsotopeRecord],
    n_trans: u32,
    n_bkg: u32,
) -> TopologyRow {
    let (n_ee, _) = counts(chain);
    let stable_odd = chain
        .records()
        .iter()
        .filter(|r| r.is_stable() && r.is_odd())
        .count() as u32;
    let added_odd: Vec<u32> = added
        .iter()
        .filter(|r| r.is_odd())
        .map(|r| r.mass_number)
        .collect();
    let mut label = format!("Requested, {n_trans} trans.");
    if !added_odd.is_empty() {
        let names: Vec<String> = added_odd
            .iter()
            .map(|a| format!("{a}{}", chain.element))
            .collect();
        label = format!("Requested + {}, {n_trans} trans.", names.join(", "));
    }
    let n_odd = stable_odd + added_odd.len() as u32;
    row(label, n_ee, n_odd, n_trans, n_bkg, &added_odd)
}

/// The four minimum topologies for `chain` (stable or augmented by `frib`
/// isotopes, with one or two rank-2 transitions), followed by a row for
/// the requested configuration when it differs from all four.
pub fn topology_table(
    chain: &IsotopeChain,
    frib: &[IsotopeRecord],
    n_bkg: u32,
    requested: Option<(&[IsotopeRecord], u32)>,
) -> Vec<TopologyRow> {
    let stable: Vec<&IsotopeRecord> = chain.records().iter().filter(|r| r.is_stable()).collect();
    let stable_odd = stable.iter().filter(|r| r.is_odd()).count() as u32;
    let (n_ee, _) = counts(chain);
    let frib_odd: Vec<u32> = frib
        .iter()
        .filter(|r| r.is_odd())
        .map(|r| r.mass_number)
        .collect();
    let frib_label = frib_odd
        .iter()
        .map(|a| format!("{a}{}", chain.element))
        .collect::<Vec<_>>()
        .join(", ");
    let augmented = stable_odd + frib_odd.len() as u32;

    let mut rows = vec![row(
        "Stable, 1 trans.".into(),
        n_ee,
        stable_odd,
        1,
        n_bkg,
        &[],
    )];
    if !frib_odd.is_empty() {
        rows.push(row(
            format!("+ FRIB {frib_label}"),
            n_ee,
            augmented,
            1,
            n_bkg,
            &frib_odd,
        ));
    }
    rows.push(row(
        "Stable, 2 trans.".into(),
        n_ee,
        stable_odd,
        2,
        n_bkg,
        &[],
    ));
    if !frib_odd.is_empty() {
        rows.push(row(
            "+ FRIB + 2 trans.".into(),
            n_ee,
            augmented,
            2,
            n_bkg,
            &frib_odd,
        ));
    }

    if let Some((added, n_trans)) = requested {
        let req = requested_row(chain, added, n_trans, n_bkg);
        let exists = rows.iter().any(|r| {
            r.topology.n_odd == req.topology.n_odd
                && r.topology.n_trans_rank2 == n_trans
                && r.added_isotopes == req.added_isotopes
        });
        if !exists {
            rows.push(req);
        }
    }
    rows
}
