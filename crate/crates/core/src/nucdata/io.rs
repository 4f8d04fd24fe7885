use std::collections::BTreeMap;
use std::path::Path;

use super::notation::{self, Measured};
use super::{DataError, IsotopeChain, IsotopeRecord, Parity};
use crate::halfint::HalfInt;

const CSV_COLUMNS: [&str; 10] = [
    "A",
    "Z",
    "I",
    "parity",
    "r_ch",
    "beta2",
    "Qs",
    "BE2_up",
    "delta_r2",
    "half_life_s",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainFormat {
    Csv,
    Json,
}

impl ChainFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(ChainFormat::Csv),
            "json" => Some(ChainFormat::Json),
            _ => None,
        }
    }
}

fn read(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_chain(path: &Path, format: ChainFormat) -> Result<IsotopeChain, DataError> {
    let text = read(path)?;
    match format {
        ChainFormat::Csv => chain_from_csv_str(&text),
        ChainFormat::Json => chain_from_json_str(&text),
    }
}

/// Loads records without chain-level invariants (no reference isotope needed).
pub fn load_records(path: &Path) -> Result<Vec<IsotopeRecord>, DataError> {
    records_from_csv_str(&read(path)?).map(|(_, r)| r)
}

fn parse_meta(text: &str) -> CsvMeta {
    let mut meta = CsvMeta {
        element: None,
        reference_a: None,
        provenance: BTreeMap::new(),
    };
    for line in text.lines().map(str::trim).filter(|l| l.starts_with('#')) {
        let Some((key, value)) = line.trim_start_matches('#').split_once(':') else {
            continue;
        };
        let (key, value) = (key.trim(), value.trim().to_string());
        match key {
            "element" => meta.element = Some(value),
            "reference_A" => meta.reference_a = value.parse().ok(),
            _ => {
                if let Some(field) = key.strip_prefix("provenance.") {
                    meta.provenance.insert(field.to_string(), value);
                }
            }
        }
    }
    meta
}

fn schema(row: usize, field: &str, message: impl Into<String>) -> DataError {
    DataError::Schema {
        row,
        field: field.to_string(),
        message: message.into(),
    }
}

fn measured_cell(
    row: usize,
    field: &str,
    cell: &str,
) -> Result<Option<(Measured, bool)>, DataError> {
    if cell.trim().is_empty() {
        return Ok(None);
    }
    notation::parse(cell)
        .map(|n| Some((n.measured, n.approximate)))
        .map_err(|e| schema(row, field, e.to_string()))
}

fn plain_measured(row: usize, field: &str, cell: &str) -> Result<Option<Measured>, DataError> {
    match measured_cell(row, field, cell)? {
        Some((_, true)) => Err(schema(
            row,
            field,
            "the ~ marker is only meaningful for BE2_up",
        )),
        other => Ok(other.map(|(m, _)| m)),
    }
}

pub fn records_from_csv_str(text: &str) -> Result<(CsvMeta, Vec<IsotopeRecord>), DataError> {
    let meta = parse_meta(text);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| schema(0, "header", e.to_string()))?
        .clone();
    let index = |name: &str| headers.iter().position(|h| h == name);
    let mut columns = BTreeMap::new();
    for name in CSV_COLUMNS {
        let i = index(name).ok_or_else(|| schema(0, name, "required column missing"))?;
        columns.insert(name, i);
    }
    let beta4_col = index("beta4");
    for h in headers.iter() {
        if !CSV_COLUMNS.contains(&h) && h != "beta4" {
            return Err(schema(0, h, "unknown column"));
        }
    }

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| schema(row_no, "row", e.to_string()))?;
        let cell = |name: &str| row.get(columns[name]).unwrap_or("");

        let int = |name: &str| -> Result<u32, DataError> {
            cell(name).parse().map_err(|_| {
                schema(
                    row_no,
                    name,
                    format!("expected integer, got {:?}", cell(name)),
                )
            })
        };
        let mass_number = int("A")?;
        let atomic_number = int("Z")?;
        let spin: HalfInt = cell("I")
            .parse()
            .map_err(|e: crate::halfint::HalfIntParseError| schema(row_no, "I", e.to_string()))?;
        let parity = match cell("parity") {
            "+" | "+1" | "1" => Parity::Positive,
            "-" | "-1" | "\u{2212}" | "\u{2212}1" => Parity::Negative,
            other => {
                return Err(schema(
                    row_no,
                    "parity",
                    format!("expected + or -, got {other:?}"),
                ))
            }
        };
        let (be2_up, be2_effective) = match measured_cell(row_no, "BE2_up", cell("BE2_up"))? {
            Some((m, approx)) => (Some(m), approx),
            None => (None, false),
        };
        let half_life_s = match cell("half_life_s") {
            "" => None,
            t => Some(t.parse::<f64>().map_err(|_| {
                schema(
                    row_no,
                    "half_life_s",
                    format!("expected seconds, got {t:?}"),
                )
            })?),
        };
        let beta4 = match beta4_col {
            Some(c) => plain_measured(row_no, "beta4", row.get(c).unwrap_or(""))?,
            None => None,
        };
        let rec = IsotopeRecord {
            mass_number,
            atomic_number,
            spin,
            parity,
            r_ch: plain_measured(row_no, "r_ch", cell("r_ch"))?,
            beta2: plain_measured(row_no, "beta2", cell("beta2"))?,
            qs: plain_measured(row_no, "Qs", cell("Qs"))?,
            be2_up,
            be2_effective,
            delta_r2: plain_measured(row_no, "delta_r2", cell("delta_r2"))?,
            beta4,
            half_life_s,
        };
        rec.validate()?;
        records.push(rec);
    }
    Ok((meta, records))
}

/// Chain-level metadata carried in `# key: value` comment lines.
#[derive(Clone, Debug, Default)]
pub struct CsvMeta {
    pub element: Option<String>,
    pub reference_a: Option<u32>,
    pub provenance: BTreeMap<String, String>,
}

pub fn chain_from_csv_str(text: &str) -> Result<IsotopeChain, DataError> {
    let (meta, records) = records_from_csv_str(text)?;
    let element = meta.element.unwrap_or_else(|| {
        records
            .first()
            .map(|r| format!("Z{}", r.atomic_number))
            .unwrap_or_default()
    });
    let chain = IsotopeChain::new(element, meta.provenance, records)?;
    if let Some(declared) = meta.reference_a {
        if declared != chain.reference_a {
            return Err(DataError::Chain(format!(
                "reference_A = {declared} but delta_r2 = 0 marks A = {}",
                chain.reference_a
            )));
        }
    }
    Ok(chain)
}

pub fn chain_from_json_str(text: &str) -> Result<IsotopeChain, DataError> {
    let chain: IsotopeChain = serde_json::from_str(text).map_err(|e| DataError::Schema {
        row: e.line(),
        field: "json".into(),
        message: e.to_string(),
    })?;
    chain.validated()
}

pub fn chain_to_json_string(chain: &IsotopeChain) -> String {
    serde_json::to_string_pretty(chain).expect("chain serializes")
}

pub fn chain_to_csv_string(chain: &IsotopeChain) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# element: {}\n# reference_A: {}\n",
        chain.element, chain.reference_a
    ));
    for (k, v) in &chain.provenance {
        out.push_str(&format!("# provenance.{k}: {v}\n"));
    }
    let with_beta4 = chain.records().iter().any(|r| r.beta4.is_some());
    out.push_str(&CSV_COLUMNS.join(","));
    if with_beta4 {
        out.push_str(",beta4");
    }
    out.push('\n');
    let opt = |m: &Option<Measured>| {
        m.as_ref()
            .map(|m| notation::format(m, false))
            .unwrap_or_default()
    };
    for r in chain.records() {
        let be2 = r
            .be2_up
            .as_ref()
            .map(|m| notation::format(m, r.be2_effective))
            .unwrap_or_default();
        let mut cells = vec![
            r.mass_number.to_string(),
            r.atomic_number.to_string(),
            r.spin.to_string(),
            r.parity.to_string(),
            opt(&r.r_ch),
            opt(&r.beta2),
            opt(&r.qs),
            be2,
            opt(&r.delta_r2),
            r.half_life_s.map(|t| t.to_string()).unwrap_or_default(),
        ];
        if with_beta4 {
            cells.push(opt(&r.beta4));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
