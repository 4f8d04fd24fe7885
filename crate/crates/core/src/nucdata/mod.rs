//! Isotope-chain nuclear parameter tables.
//!
//! Chains are loaded from CSV (parenthetical uncertainties) or JSON (explicit
//! `{value, sigma}` pairs), validated once, and then treated as immutable.

mod io;
pub mod notation;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::halfint::HalfInt;
pub use io::{chain_from_csv_str, chain_from_json_str, chain_to_csv_string, chain_to_json_string};
pub use io::{load_chain, load_records, records_from_csv_str, ChainFormat};
pub use notation::Measured;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at row {row}, field {field}: {message}")]
    Schema {
        row: usize,
        field: String,
        message: String,
    },
    #[error("invariant violated for A={mass_number}: {message}")]
    Invariant { mass_number: u32, message: String },
    #[error("chain invariant violated: {0}")]
    Chain(String),
    #[error("duplicate mass number A={0}")]
    DuplicateMass(u32),
    #[error("unknown resource {0:?}")]
    UnknownResource(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Parity {
    pub fn sign(self) -> i8 {
        match self {
            Parity::Positive => 1,
            Parity::Negative => -1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Positive => "+",
            Parity::Negative => "-",
        })
    }
}

/// One nucleus of a chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotopeRecord {
    #[serde(rename = "A")]
    pub mass_number: u32,
    #[serde(rename = "Z")]
    pub atomic_number: u32,
    #[serde(rename = "I")]
    pub spin: HalfInt,
    pub parity: Parity,
    /// fm; absent for isotopes without a tabulated radius.
    pub r_ch: Option<Measured>,
    pub beta2: Option<Measured>,
    /// barns; present exactly when I >= 1.
    #[serde(rename = "Qs")]
    pub qs: Option<Measured>,
    /// Weisskopf units.
    #[serde(rename = "BE2_up")]
    pub be2_up: Option<Measured>,
    /// Odd-A B(E2) values are effective sums over a fragmented multiplet.
    #[serde(rename = "BE2_effective", default)]
    pub be2_effective: bool,
    /// fm², relative to the chain reference isotope.
    pub delta_r2: Option<Measured>,
    pub beta4: Option<Measured>,
    /// Seconds; absent means stable.
    pub half_life_s: Option<f64>,
}

impl IsotopeRecord {
    /// Minimal record for a nucleus known only by A, Z and spin.
    pub fn bare(mass_number: u32, atomic_number: u32, spin: HalfInt, parity: Parity) -> Self {
        IsotopeRecord {
            mass_number,
            atomic_number,
            spin,
            parity,
            r_ch: None,
            beta2: None,
            qs: None,
            be2_up: None,
            be2_effective: false,
            delta_r2: None,
            beta4: None,
            half_life_s: None,
        }
    }

    /// Nuclear mass in atomic mass units, approximated by A.
    pub fn nuclear_mass_u(&self) -> f64 {
        f64::from(self.mass_number)
    }

    pub fn is_odd(&self) -> bool {
        self.spin > HalfInt::ZERO
    }

    pub fn is_stable(&self) -> bool {
        self.half_life_s.is_none()
    }

    pub fn is_reference(&self) -> bool {
        matches!(self.delta_r2, Some(d) if d.value == 0.0 && d.sigma.is_none_or(|s| s == 0.0))
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let fail = |message: String| {
            Err(DataError::Invariant {
                mass_number: self.mass_number,
                message,
            })
        };
        if self.atomic_number < 1 || self.mass_number < self.atomic_number {
            return fail(format!(
                "need A >= Z >= 1, got A={}, Z={}",
                self.mass_number, self.atomic_number
            ));
        }
        let quadrupole_allowed = self.spin >= HalfInt::ONE;
        match (&self.qs, quadrupole_allowed) {
            (Some(_), false) => return fail(format!("Qs given for I = {} < 1", self.spin)),
            (None, true) if self.is_stable() => {
                return fail(format!(
                    "Qs missing for stable isotope with I = {}",
                    self.spin
                ))
            }
            _ => {}
        }
        if let Some(r) = &self.r_ch {
            if !(r.value > 0.0) {
                return fail(format!("r_ch must be positive, got {}", r.value));
            }
        }
        let fields = [
            ("r_ch", &self.r_ch),
            ("beta2", &self.beta2),
            ("Qs", &self.qs),
            ("BE2_up", &self.be2_up),
            ("delta_r2", &self.delta_r2),
            ("beta4", &self.beta4),
        ];
        for (name, field) in fields {
            if let Some(m) = field {
                if !m.value.is_finite() {
                    return fail(format!("{name} is not finite"));
                }
                if let Some(s) = m.sigma {
                    if !(s >= 0.0) || !s.is_finite() {
                        return fail(format!("{name} uncertainty must be >= 0, got {s}"));
                    }
                }
            }
        }
        if let Some(b) = &self.be2_up {
            if b.value < 0.0 {
                return fail("BE2_up must be non-negative".into());
            }
        }
        if let Some(t) = self.half_life_s {
            if !(t > 0.0) || !t.is_finite() {
                return fail(format!("half-life must be positive, got {t}"));
            }
        }
        Ok(())
    }
}

/// The spin-mass lever `I² / M_N` (u⁻¹) multiplying the gravitomagnetic coupling.
pub fn spin_mass_lever(rec: &IsotopeRecord) -> f64 {
    let i = rec.spin.value();
    i * i / rec.nuclear_mass_u()
}

/// A validated isotope chain of one element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotopeChain {
    pub element: String,
    #[serde(rename = "reference_A")]
    pub reference_a: u32,
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
    #[serde(rename = "isotopes")]
    records: Vec<IsotopeRecord>,
}

impl IsotopeChain {
    /// Validates and sorts by mass number.
    pub fn new(
        element: impl Into<String>,
        provenance: BTreeMap<String, String>,
        mut records: Vec<IsotopeRecord>,
    ) -> Result<Self, DataError> {
        if records.is_empty() {
            return Err(DataError::Chain("chain has no records".into()));
        }
        records.sort_by_key(|r| r.mass_number);
        for w in records.windows(2) {
            if w[0].mass_number == w[1].mass_number {
                return Err(DataError::DuplicateMass(w[0].mass_number));
            }
        }
        for r in &records {
            r.validate()?;
        }
        let z = records[0].atomic_number;
        if let Some(r) = records.iter().find(|r| r.atomic_number != z) {
            return Err(DataError::Chain(format!(
                "mixed atomic numbers: A={} has Z={}, expected {z}",
                r.mass_number, r.atomic_number
            )));
        }
        let refs: Vec<u32> = records
            .iter()
            .filter(|r| r.is_reference())
            .map(|r| r.mass_number)
            .collect();
        let reference_a = match refs.as_slice() {
            [a] => *a,
            [] => {
                return Err(DataError::Chain(
                    "no reference isotope (delta_r2 = 0)".into(),
                ))
            }
            many => {
                return Err(DataError::Chain(format!(
                    "several reference isotopes: {many:?}"
                )))
            }
        };
        Ok(IsotopeChain {
            element: element.into(),
            reference_a,
            provenance,
            records,
        })
    }

    /// Re-runs every invariant; used after deserialization.
    pub fn validated(self) -> Result<Self, DataError> {
        let declared = self.reference_a;
        let chain = IsotopeChain::new(self.element, self.provenance, self.records)?;
        if chain.reference_a != declared {
            return Err(DataError::Chain(format!(
                "reference_A = {declared} but delta_r2 = 0 marks A = {}",
                chain.reference_a
            )));
        }
        Ok(chain)
    }

    pub fn records(&self) -> &[IsotopeRecord] {
        &self.records
    }

    pub fn atomic_number(&self) -> u32 {
        self.records[0].atomic_number
    }

    pub fn get(&self, mass_number: u32) -> Option<&IsotopeRecord> {
        self.records.iter().find(|r| r.mass_number == mass_number)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Returns a new chain with `extra` appended.
    pub fn with_records(
        &self,
        extra: impl IntoIterator<Item = IsotopeRecord>,
    ) -> Result<Self, DataError> {
        let mut records = self.records.clone();
        records.extend(extra);
        IsotopeChain::new(self.element.clone(), self.provenance.clone(), records)
    }

    /// Splits into (even-even, odd) = (I = 0, I > 0), preserving mass order.
    pub fn partition(&self) -> (Vec<&IsotopeRecord>, Vec<&IsotopeRecord>) {
        self.records.iter().partition(|r| !r.is_odd())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mo() -> IsotopeChain {
        crate::resources::mo_chain().unwrap()
    }

    #[test]
    fn partition_of_bundled_chain() {
        let chain = mo();
        let (ee, odd) = chain.partition();
        let ee: Vec<u32> = ee.iter().map(|r| r.mass_number).collect();
        let odd: Vec<u32> = odd.iter().map(|r| r.mass_number).collect();
        assert_eq!(ee, vec![92, 94, 96, 98, 100]);
        assert_eq!(odd, vec![95, 97]);
    }

    #[test]
    fn partition_with_frib_isotope() {
        let chain = mo();
        let mo91 = crate::resources::frib_candidate(91).unwrap();
        let extended = chain.with_records([mo91]).unwrap();
        assert_eq!(extended.partition().1.len(), 3);
        assert_eq!(extended.records()[0].mass_number, 91);
    }

    #[test]
    fn partition_single_even_record() {
        let mut rec = IsotopeRecord::bare(92, 42, HalfInt::ZERO, Parity::Positive);
        rec.delta_r2 = Some(Measured::exact(0.0));
        let chain = IsotopeChain::new("Mo", BTreeMap::new(), vec![rec.clone()]).unwrap();
        let (ee, odd) = chain.partition();
        assert_eq!(ee, vec![&rec]);
        assert!(odd.is_empty());
    }

    #[test]
    fn spin_mass_lever_values() {
        let chain = mo();
        let l95 = spin_mass_lever(chain.get(95).unwrap());
        assert!((l95 - 6.25 / 95.0).abs() < 1e-15);
        assert!((l95 - 0.0658).abs() < 1e-4);
        let mo91 = crate::resources::frib_candidate(91).unwrap();
        let l91 = spin_mass_lever(&mo91);
        assert!((l91 - 20.25 / 91.0).abs() < 1e-15);
        assert!((l91 - 0.2225).abs() < 1e-4);
        assert_eq!(spin_mass_lever(chain.get(92).unwrap()), 0.0);
    }

    #[test]
    fn qs_on_spin_zero_is_rejected() {
        let mut rec = IsotopeRecord::bare(92, 42, HalfInt::ZERO, Parity::Positive);
        rec.qs = Some(Measured::exact(0.1));
        assert!(matches!(
            rec.validate(),
            Err(DataError::Invariant {
                mass_number: 92,
                ..
            })
        ));
    }

    #[test]
    fn duplicate_and_mixed_z_rejected() {
        let mut a = IsotopeRecord::bare(92, 42, HalfInt::ZERO, Parity::Positive);
        a.delta_r2 = Some(Measured::exact(0.0));
        let b = IsotopeRecord::bare(92, 42, HalfInt::ZERO, Parity::Positive);
        assert!(matches!(
            IsotopeChain::new("Mo", BTreeMap::new(), vec![a.clone(), b]),
            Err(DataError::DuplicateMass(92))
        ));
        let c = IsotopeRecord::bare(94, 40, HalfInt::ZERO, Parity::Positive);
        assert!(matches!(
            IsotopeChain::new("Mo", BTreeMap::new(), vec![a, c]),
            Err(DataError::Chain(_))
        ));
    }

    #[test]
    fn exactly_one_reference_required() {
        let a = IsotopeRecord::bare(92, 42, HalfInt::ZERO, Parity::Positive);
        assert!(IsotopeChain::new("Mo", BTreeMap::new(), vec![a]).is_err());
    }
}
