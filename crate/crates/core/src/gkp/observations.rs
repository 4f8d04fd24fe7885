//! Residual files consumed by `extract`: either measured residuals or a
//! synthetic injection that is evaluated against the design matrix.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{
    alpha_t_from_be2, build_design, DesignMatrix, DesignOptions, ElectronicCoefficients, GkpError,
};
use crate::nucdata::{IsotopeChain, IsotopeRecord, Measured};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterOverride {
    #[serde(rename = "A")]
    pub mass_number: u32,
    #[serde(rename = "Qs", default)]
    pub qs: Option<f64>,
    #[serde(rename = "BE2_up", default)]
    pub be2_up: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observation {
    #[serde(rename = "A")]
    pub mass_number: u32,
    pub transition: String,
    #[serde(rename = "delta_eV")]
    pub delta_ev: f64,
    #[serde(rename = "sigma_eV")]
    pub sigma_ev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Synthetic {
    /// Unknowns in column order, α̃ last.
    pub truth: Vec<f64>,
    /// Gaussian noise added to every row (eV); zero for exact residuals.
    #[serde(rename = "noise_eV")]
    pub noise_ev: f64,
    /// Row uncertainty used as the fit weight (eV).
    #[serde(rename = "sigma_eV")]
    pub sigma_ev: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationSet {
    pub version: String,
    #[serde(default)]
    pub description: String,
    /// Odd isotopes entering the rank-2 sector, in row order.
    pub isotopes: Vec<u32>,
    #[serde(default = "one")]
    pub n_transitions: usize,
    #[serde(default)]
    pub second_order_column: bool,
    #[serde(default)]
    pub overrides: Vec<ParameterOverride>,
    #[serde(default)]
    pub observations: Option<Vec<Observation>>,
    #[serde(default)]
    pub synthetic: Option<Synthetic>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssembledSystem {
    pub design: DesignMatrix,
    pub sigma_ev: Vec<f64>,
    pub truth: Option<Vec<f64>>,
}

impl ObservationSet {
    pub fn from_json_str(text: &str) -> Result<Self, GkpError> {
        let s: ObservationSet =
            serde_json::from_str(text).map_err(|e| GkpError::Config(e.to_string()))?;
        if s.observations.is_some() == s.synthetic.is_some() {
            return Err(GkpError::Config(
                "exactly one of `observations` and `synthetic` must be given".into(),
            ));
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, GkpError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GkpError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    fn records(&self, chain: &IsotopeChain) -> Result<Vec<IsotopeRecord>, GkpError> {
        self.isotopes
            .iter()
            .map(|&a| {
                let mut rec = match chain.get(a) {
                    Some(r) => r.clone(),
                    None => crate::resources::frib_candidate(a).map_err(|_| {
                        GkpError::Config(format!(
                            "isotope A={a} is neither in the chain nor a known candidate"
                        ))
                    })?,
                };
                for o in self.overrides.iter().filter(|o| o.mass_number == a) {
                    if let Some(q) = o.qs {
                        rec.qs = Some(Measured::exact(q));
                    }
                    if let Some(b) = o.be2_up {
                        rec.be2_up = Some(Measured::exact(b));
                    }
                }
                Ok(rec)
            })
            .collect()
    }

    /// Builds the design matrix with residuals attached. `seed` replaces the
    /// synthetic seed stored in the file.
    pub fn assemble(
        &self,
        chain: &IsotopeChain,
        coeffs: &ElectronicCoefficients,
        seed: Option<u64>,
    ) -> Result<AssembledSystem, GkpError> {
        let records = self.records(chain)?;
        let refs: Vec<&IsotopeRecord> = records.iter().collect();
        let at = alpha_t_from_be2(&refs)?;
        let coeffs = coeffs.first_rank2(self.n_transitions)?;
        let options = DesignOptions {
            second_order_column: self.second_order_column,
        };
        let design = build_design(&refs, &coeffs, &at, options)?;

        if let Some(syn) = &self.synthetic {
            let clean = design.predict(&syn.truth)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(syn.seed));
            let rhs = clean
                .iter()
                .map(|c| {
                    if syn.noise_ev > 0.0 {
                        c + syn.noise_ev * rng.sample::<f64, _>(StandardNormal)
                    } else {
                        *c
                    }
                })
                .collect();
            let sigma = vec![syn.sigma_ev; design.nrows()];
            return Ok(AssembledSystem {
                design: design.with_rhs(rhs)?,
                sigma_ev: sigma,
                truth: Some(syn.truth.clone()),
            });
        }

        let obs = self.observations.as_ref().expect("checked on load");
        let mut rhs = Vec::with_capacity(design.nrows());
        let mut sigma = Vec::with_capacity(design.nrows());
        for key in &design.rows {
            let o = obs
                .iter()
                .find(|o| o.mass_number == key.mass_number && o.transition == key.transition)
                .ok_or_else(|| {
                    GkpError::Config(format!(
                        "no residual for A={} on {}",
                        key.mass_number, key.transition
                    ))
                })?;
            rhs.push(o.delta_ev);
            sigma.push(o.sigma_ev);
        }
        Ok(AssembledSystem {
            design: design.with_rhs(rhs)?,
            sigma_ev: sigma,
            truth: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkp::extract;
    use crate::resources;

    fn bundled(name: &str) -> ObservationSet {
        ObservationSet::from_json_str(&resources::text(name).unwrap()).unwrap()
    }

    #[test]
    fn noiseless_fixture_recovers_truth() {
        let chain = resources::mo_chain().unwrap();
        let coeffs = ElectronicCoefficients::bundled().unwrap();
        let sys = bundled("extract-noiseless-v1")
            .assemble(&chain, &coeffs, None)
            .unwrap();
        let r = extract(&sys.design, &sys.sigma_ev).unwrap();
        let truth = sys.truth.unwrap();
        let mut est: Vec<f64> = r.background_estimates.iter().map(|e| e.value).collect();
        est.push(r.alpha_manko_hat.value);
        for (e, t) in est.iter().zip(&truth) {
            assert!(((e - t) / t).abs() < 1e-10, "{e} vs {t}");
        }
    }

    #[test]
    fn stable_only_fixture_is_refused() {
        let chain = resources::mo_chain().unwrap();
        let coeffs = ElectronicCoefficients::bundled().unwrap();
        let sys = bundled("extract-stable-only-v1")
            .assemble(&chain, &coeffs, None)
            .unwrap();
        let err = extract(&sys.design, &sys.sigma_ev).unwrap_err();
        assert!(err.to_string().contains("N_odd ≥ 3"), "{err}");
    }

    #[test]
    fn measured_residuals_are_matched_by_row() {
        let chain = resources::mo_chain().unwrap();
        let coeffs = ElectronicCoefficients::bundled().unwrap();
        let set = ObservationSet {
            version: "t".into(),
            description: String::new(),
            isotopes: vec![95, 97],
            n_transitions: 2,
            second_order_column: false,
            overrides: vec![],
            observations: Some(vec![
                Observation {
                    mass_number: 97,
                    transition: "1s1/2-3d5/2".into(),
                    delta_ev: 4.0,
                    sigma_ev: 1.0,
                },
                Observation {
                    mass_number: 95,
                    transition: "1s1/2-2p3/2".into(),
                    delta_ev: 1.0,
                    sigma_ev: 1.0,
                },
                Observation {
                    mass_number: 95,
                    transition: "1s1/2-3d5/2".into(),
                    delta_ev: 2.0,
                    sigma_ev: 1.0,
                },
                Observation {
                    mass_number: 97,
                    transition: "1s1/2-2p3/2".into(),
                    delta_ev: 3.0,
                    sigma_ev: 1.0,
                },
            ]),
            synthetic: None,
        };
        let sys = set.assemble(&chain, &coeffs, None).unwrap();
        assert_eq!(sys.design.rhs, Some(vec![1.0, 2.0, 3.0, 4.0]));
        let mut missing = set.clone();
        missing.observations.as_mut().unwrap().pop();
        assert!(missing.assemble(&chain, &coeffs, None).is_err());
    }

    #[test]
    fn requires_exactly_one_source() {
        assert!(ObservationSet::from_json_str(r#"{"version":"x","isotopes":[95]}"#).is_err());
    }
}
