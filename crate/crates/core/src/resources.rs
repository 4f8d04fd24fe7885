//! Bundled reference data, addressable by name.
//!
//! Setting `GKPFORGE_DATA_DIR` makes lookups prefer `<dir>/<file>` over the
//! copy compiled into the binary.

use std::path::PathBuf;

use crate::nucdata::{self, DataError, IsotopeChain, IsotopeRecord};

pub const DATA_DIR_ENV: &str = "GKPFORGE_DATA_DIR";

pub const MO_CHAIN: &str = "mo-chain-v1";
pub const MO_FRIB_CANDIDATES: &str = "mo-frib-candidates-v1";
pub const MO41_ANCHORS: &str = "mo41-anchors-v1";
pub const MO41_COEFFS: &str = "mo41-coeffs-v1";
pub const MILESTONES: &str = "milestones-v1";
pub const MO91_SAMPLING: &str = "mo91-sampling-v1";
pub const MO91_SAMPLING_POSITIVE: &str = "mo91-sampling-positive-v1";

/// (resource name, file name, embedded contents)
const BUNDLED: &[(&str, &str, &str)] = &[
    (
        MO_CHAIN,
        "mo-chain-v1.csv",
        include_str!("../data/mo-chain-v1.csv"),
    ),
    (
        MO_FRIB_CANDIDATES,
        "mo-frib-candidates-v1.csv",
        include_str!("../data/mo-frib-candidates-v1.csv"),
    ),
    (
        MO41_ANCHORS,
        "mo41-anchors-v1.json",
        include_str!("../data/mo41-anchors-v1.json"),
    ),
    (
        MO41_COEFFS,
        "mo41-coeffs-v1.json",
        include_str!("../data/mo41-coeffs-v1.json"),
    ),
    (
        MILESTONES,
        "milestones-v1.json",
        include_str!("../data/milestones-v1.json"),
    ),
    (
        MO91_SAMPLING,
        "mo91-sampling-v1.json",
        include_str!("../data/mo91-sampling-v1.json"),
    ),
    (
        MO91_SAMPLING_POSITIVE,
        "mo91-sampling-positive-v1.json",
        include_str!("../data/mo91-sampling-positive-v1.json"),
    ),
    (
        "extract-noiseless-v1",
        "extract-noiseless-v1.json",
        include_str!("../data/extract-noiseless-v1.json"),
    ),
    (
        "extract-noisy-v1",
        "extract-noisy-v1.json",
        include_str!("../data/extract-noisy-v1.json"),
    ),
    (
        "extract-stable-only-v1",
        "extract-stable-only-v1.json",
        include_str!("../data/extract-stable-only-v1.json"),
    ),
];

/// Names of every bundled resource.
pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _, _)| *n)
}

/// File name a resource is stored under, e.g. `mo-chain-v1.csv`.
pub fn file_name(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, f, _)| *f)
}

/// Returns the text of a named resource, honouring the data-dir override.
pub fn text(name: &str) -> Result<String, DataError> {
    let (_, file, embedded) = BUNDLED
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| DataError::UnknownResource(name.to_string()))?;
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        let path = PathBuf::from(dir).join(file);
        if path.is_file() {
            return std::fs::read_to_string(&path).map_err(|source| DataError::Io {
                path: path.display().to_string(),
                source,
            });
        }
    }
    Ok((*embedded).to_string())
}

pub fn mo_chain() -> Result<IsotopeChain, DataError> {
    nucdata::chain_from_csv_str(&text(MO_CHAIN)?)
}

pub fn frib_candidates() -> Result<Vec<IsotopeRecord>, DataError> {
    nucdata::records_from_csv_str(&text(MO_FRIB_CANDIDATES)?).map(|(_, r)| r)
}

pub fn frib_candidate(mass_number: u32) -> Result<IsotopeRecord, DataError> {
    frib_candidates()?
        .into_iter()
        .find(|r| r.mass_number == mass_number)
        .ok_or_else(|| DataError::UnknownResource(format!("{MO_FRIB_CANDIDATES}: A={mass_number}")))
}
