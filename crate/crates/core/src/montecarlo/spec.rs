use std::path::Path;

use rand::distr::{Distribution as _, Uniform};
use rand::Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use super::McError;

/// Attempts per draw before a guard band is declared unsatisfiable.
const MAX_GUARD_ATTEMPTS: u32 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    Uniform { low: f64, high: f64 },
    LogUniform { low: f64, high: f64 },
    Gaussian { mean: f64, sigma: f64 },
}

impl Distribution {
    fn validate(&self, name: &str) -> Result<(), McError> {
        let bad = |msg: String| Err(McError::Spec(format!("{name}: {msg}")));
        match *self {
            Distribution::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return bad(format!(
                        "uniform bounds must be finite with low < high, got [{low}, {high}]"
                    ));
                }
            }
            Distribution::LogUniform { low, high } => {
                if !(low > 0.0 && high.is_finite() && low < high) {
                    return bad(format!(
                        "log-uniform bounds must satisfy 0 < low < high, got [{low}, {high}]"
                    ));
                }
            }
            Distribution::Gaussian { mean, sigma } => {
                if !(mean.is_finite() && sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!(
                        "gaussian needs finite mean and positive sigma, got ({mean}, {sigma})"
                    ));
                }
            }
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Uniform { low, high } => Uniform::new(low, high)
                .expect("validated bounds")
                .sample(rng),
            Distribution::LogUniform { low, high } => Uniform::new(low.ln(), high.ln())
                .expect("validated bounds")
                .sample(rng)
                .exp(),
            Distribution::Gaussian { mean, sigma } => {
                rng.sample(Normal::new(mean, sigma).expect("validated sigma"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    /// `Qs` or `BE2_up`.
    pub name: String,
    pub distribution: Distribution,
    pub units: String,
    /// Factor taking a drawn value to canonical units (b, W.u.).
    #[serde(default = "one")]
    pub to_canonical: f64,
    /// Draws with |x| below this (in spec units) are rejected and redrawn.
    #[serde(default)]
    pub guard_abs_min: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl ParameterSpec {
    /// Draws one value in canonical units, returning it with the number of
    /// guard-band rejections it took.
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, u32), McError> {
        let guard = self.guard_abs_min.unwrap_or(0.0);
        for rejected in 0..MAX_GUARD_ATTEMPTS {
            let x = self.distribution.draw(rng);
            if x.abs() >= guard {
                return Ok((x * self.to_canonical, rejected));
            }
        }
        Err(McError::Spec(format!(
            "{}: guard band rejects every draw",
            self.name
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub version: String,
    #[serde(default)]
    pub provenance: String,
    /// Isotope whose unmeasured parameters are sampled.
    pub probe_mass_number: u32,
    #[serde(default = "one_transition")]
    pub n_transitions: usize,
    pub parameters: Vec<ParameterSpec>,
    pub sample_count: usize,
    pub seed: u64,
}

fn one_transition() -> usize {
    1
}

impl SamplingSpec {
    pub fn from_json_str(text: &str) -> Result<Self, McError> {
        let s: SamplingSpec =
            serde_json::from_str(text).map_err(|e| McError::Spec(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, McError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| McError::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn bundled(name: &str) -> Result<Self, McError> {
        Self::from_json_str(
            &crate::resources::text(name).map_err(|e| McError::Spec(e.to_string()))?,
        )
    }

    pub fn validate(&self) -> Result<(), McError> {
        if self.sample_count == 0 {
            return Err(McError::Spec("sample_count must be at least 1".into()));
        }
        if self.n_transitions == 0 {
            return Err(McError::Spec("n_transitions must be at least 1".into()));
        }
        for p in &self.parameters {
            p.distribution.validate(&p.name)?;
            if !(p.to_canonical > 0.0 && p.to_canonical.is_finite()) {
                return Err(McError::Spec(format!(
                    "{}: to_canonical must be positive",
                    p.name
                )));
            }
            if let Some(g) = p.guard_abs_min {
                if !(g >= 0.0 && g.is_finite()) {
                    return Err(McError::Spec(format!(
                        "{}: guard_abs_min must be non-negative",
                        p.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn parameter(&self, name: &str) -> Result<&ParameterSpec, McError> {
        self.parameters
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| McError::MissingParameter(name.to_string()))
    }
}
