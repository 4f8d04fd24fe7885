use serde::{Deserialize, Serialize};

/// Linear-interpolation percentile (`q` in [0, 100]) of sorted data.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = (q / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaSummary {
    /// Statistics over the full-rank draws.
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub p5: f64,
    pub p95: f64,
    pub p99: f64,
    pub max: f64,
    pub rank_deficient_fraction: f64,
    /// Share of raw draws rejected by guard bands.
    pub guard_excluded_fraction: f64,
    pub seed: u64,
    pub sample_count: usize,
}

impl KappaSummary {
    pub fn from_values(values: &[f64], seed: u64, guard_excluded_fraction: f64) -> Self {
        let mut finite: Vec<f64> = values.iter().copied().filter(|k| k.is_finite()).collect();
        let n = finite.len();
        let mean = finite.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (finite.iter().map(|k| (k - mean) * (k - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        finite.sort_by(f64::total_cmp);
        KappaSummary {
            mean,
            std,
            median: percentile(&finite, 50.0),
            p5: percentile(&finite, 5.0),
            p95: percentile(&finite, 95.0),
            p99: percentile(&finite, 99.0),
            max: finite.last().copied().unwrap_or(f64::NAN),
            rank_deficient_fraction: (values.len() - n) as f64 / values.len().max(1) as f64,
            guard_excluded_fraction,
            seed,
            sample_count: values.len(),
        }
    }

    pub fn standard_error(&self) -> f64 {
        let n = (self.sample_count as f64 * (1.0 - self.rank_deficient_fraction)).max(1.0);
        self.std / n.sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramBin {
    /// `1-2`, …, `49-50`, `50+` or `rank_deficient`.
    pub bin: String,
    pub low: Option<f64>,
    /// `None` for the open overflow bin.
    pub high: Option<f64>,
    pub count: u64,
}

/// Unit-width bins [1, 2), …, [49, 50), an overflow bin [50, ∞) and a final
/// bin counting rank-deficient draws.
pub fn kappa_histogram(values: &[f64]) -> Vec<HistogramBin> {
    let mut bins: Vec<HistogramBin> = (1..50)
        .map(|k| HistogramBin {
            bin: format!("{k}-{}", k + 1),
            low: Some(f64::from(k)),
            high: Some(f64::from(k + 1)),
            count: 0,
        })
        .collect();
    bins.push(HistogramBin {
        bin: "50+".into(),
        low: Some(50.0),
        high: None,
        count: 0,
    });
    bins.push(HistogramBin {
        bin: "rank_deficient".into(),
        low: None,
        high: None,
        count: 0,
    });
    for &k in values {
        let idx = if !k.is_finite() {
            50
        } else if k >= 50.0 {
            49
        } else {
            (k.floor() as usize).clamp(1, 49) - 1
        };
        bins[idx].count += 1;
    }
    bins
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bin", "low", "high", "count"])
        .expect("in-memory write");
    for b in bins {
        let fmt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([b.bin.clone(), fmt(b.low), fmt(b.high), b.count.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}
