//! Seeded Monte Carlo engines: κ sampling over unmeasured nuclear
//! parameters and injection-recovery campaigns.
//!
//! Draws are grouped into fixed-size batches. Batch `b` owns ChaCha stream
//! `b` of the run seed, so results do not depend on how batches are spread
//! over threads.

mod recovery;
mod spec;
mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gkp::{
    self, alpha_t_from_be2, build_design, precondition, DesignOptions, ElectronicCoefficients,
    GkpError,
};
use crate::nucdata::{IsotopeChain, IsotopeRecord, Measured};
pub use recovery::{injection_recovery, InjectionSpec, RecoveryStats};
pub use spec::{Distribution, ParameterSpec, SamplingSpec};
pub use stats::{histogram_csv, kappa_histogram, percentile, HistogramBin, KappaSummary};

/// Draws per RNG stream.
pub const BATCH_SIZE: usize = 1024;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McError {
    #[error("sampling spec: {0}")]
    Spec(String),
    #[error("sampling spec does not cover required parameter {0:?}")]
    MissingParameter(String),
    #[error("chain: {0}")]
    Chain(String),
    #[error(transparent)]
    Gkp(#[from] GkpError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing when built with the `parallel` feature, otherwise
    /// identical to `Sequential`.
    #[default]
    Parallel,
}

/// Runs `f` on every batch index in `0..n_batches`, returning results in
/// batch order.
pub(crate) fn run_batches<T, F>(n_batches: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n_batches).into_par_iter().map(f).collect()
        }
        _ => (0..n_batches).map(f).collect(),
    }
}

pub(crate) fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Everything fixed across draws: the measured odd isotopes, the probe
/// template and the coefficients.
struct KappaProblem {
    measured: Vec<IsotopeRecord>,
    probe: IsotopeRecord,
    coeffs: ElectronicCoefficients,
    qs: ParameterSpec,
    be2: ParameterSpec,
}

impl KappaProblem {
    fn new(
        chain: &IsotopeChain,
        coeffs: &ElectronicCoefficients,
        spec: &SamplingSpec,
    ) -> Result<Self, McError> {
        spec.validate()?;
        let qs = spec.parameter("Qs")?.clone();
        let be2 = spec.parameter("BE2_up")?.clone();
        let (_, odd) = chain.partition();
        let measured: Vec<IsotopeRecord> = odd
            .into_iter()
            .filter(|r| r.mass_number != spec.probe_mass_number)
            .cloned()
            .collect();
        if measured.len() < 2 {
            return Err(McError::Chain(format!(
                "need two measured odd isotopes, chain has {}",
                measured.len()
            )));
        }
        let probe = match chain.get(spec.probe_mass_number) {
            Some(r) => r.clone(),
            None => crate::resources::frib_candidate(spec.probe_mass_number)
                .map_err(|e| McError::Chain(e.to_string()))?,
        };
        if !probe.is_odd() {
            return Err(McError::Chain(format!(
                "probe A={} has I = 0",
                probe.mass_number
            )));
        }
        let coeffs = coeffs.first_rank2(spec.n_transitions)?;
        Ok(KappaProblem {
            measured,
            probe,
            coeffs,
            qs,
            be2,
        })
    }

    fn kappa(&self, qs: f64, be2: f64) -> Result<f64, GkpError> {
        let mut probe = self.probe.clone();
        probe.qs = Some(Measured::exact(qs));
        probe.be2_up = Some(Measured::exact(be2));
        let mut recs: Vec<&IsotopeRecord> = vec![&probe];
        recs.extend(self.measured.iter());
        let at = alpha_t_from_be2(&recs)?;
        let m = build_design(&recs, &self.coeffs, &at, DesignOptions::default())?;
        match precondition(&m) {
            Ok(p) => gkp::condition_number(&p),
            Err(GkpError::ZeroColumn { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }
}

struct BatchOut {
    kappas: Vec<f64>,
    rejected: u64,
}

/// Samples κ of the preconditioned design matrix and returns the summary
/// with the raw κ values in draw order.
pub fn sample_kappa_values(
    chain: &IsotopeChain,
    coeffs: &ElectronicCoefficients,
    spec: &SamplingSpec,
    exec: Execution,
) -> Result<(KappaSummary, Vec<f64>), McError> {
    let problem = KappaProblem::new(chain, coeffs, spec)?;
    let n = spec.sample_count;
    let n_batches = n.div_ceil(BATCH_SIZE);
    let batches = run_batches(n_batches, exec, |b| -> Result<BatchOut, McError> {
        let mut rng = batch_rng(spec.seed, b);
        let count = BATCH_SIZE.min(n - b * BATCH_SIZE);
        let mut out = BatchOut {
            kappas: Vec::with_capacity(count),
            rejected: 0,
        };
        for _ in 0..count {
            let (qs, rq) = problem.qs.draw(&mut rng)?;
            let (be2, rb) = problem.be2.draw(&mut rng)?;
            out.rejected += u64::from(rq) + u64::from(rb);
            out.kappas.push(problem.kappa(qs, be2)?);
        }
        Ok(out)
    });
    let mut kappas = Vec::with_capacity(n);
    let mut rejected = 0u64;
    for b in batches {
        let b = b?;
        rejected += b.rejected;
        kappas.extend(b.kappas);
    }
    let excluded = rejected as f64 / (rejected as f64 + n as f64);
    let summary = KappaSummary::from_values(&kappas, spec.seed, excluded);
    Ok((summary, kappas))
}

pub fn sample_kappa(
    chain: &IsotopeChain,
    coeffs: &ElectronicCoefficients,
    spec: &SamplingSpec,
    exec: Execution,
) -> Result<KappaSummary, McError> {
    sample_kappa_values(chain, coeffs, spec, exec).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources;

    fn spec(n: usize) -> SamplingSpec {
        let mut s = SamplingSpec::bundled(resources::MO91_SAMPLING).unwrap();
        s.sample_count = n;
        s
    }

    fn inputs() -> (IsotopeChain, ElectronicCoefficients) {
        (
            resources::mo_chain().unwrap(),
            ElectronicCoefficients::bundled().unwrap(),
        )
    }

    #[test]
    fn same_seed_same_bits_any_execution() {
        let (chain, coeffs) = inputs();
        let s = spec(3000);
        let (a, va) = sample_kappa_values(&chain, &coeffs, &s, Execution::Parallel).unwrap();
        let (b, vb) = sample_kappa_values(&chain, &coeffs, &s, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            va.iter().map(|k| k.to_bits()).collect::<Vec<_>>(),
            vb.iter().map(|k| k.to_bits()).collect::<Vec<_>>()
        );
        let mut other = s.clone();
        other.seed ^= 1;
        assert_ne!(
            sample_kappa(&chain, &coeffs, &other, Execution::Parallel)
                .unwrap()
                .mean,
            a.mean
        );
    }

    #[test]
    fn single_draw_matches_condition_number() {
        let (chain, coeffs) = inputs();
        let s = spec(1);
        let (summary, values) =
            sample_kappa_values(&chain, &coeffs, &s, Execution::Sequential).unwrap();
        let mut rng = batch_rng(s.seed, 0);
        let (qs, _) = s.parameter("Qs").unwrap().draw(&mut rng).unwrap();
        let (be2, _) = s.parameter("BE2_up").unwrap().draw(&mut rng).unwrap();

        let mut mo91 = resources::frib_candidate(91).unwrap();
        mo91.qs = Some(Measured::exact(qs));
        mo91.be2_up = Some(Measured::exact(be2));
        let recs = vec![&mo91, chain.get(95).unwrap(), chain.get(97).unwrap()];
        let at = alpha_t_from_be2(&recs).unwrap();
        let m = build_design(
            &recs,
            &coeffs.first_rank2(1).unwrap(),
            &at,
            DesignOptions::default(),
        )
        .unwrap();
        let k = gkp::condition_number(&precondition(&m).unwrap()).unwrap();
        assert_eq!(values, vec![k]);
        assert_eq!(summary.mean, k);
        assert_eq!(summary.median, k);
        assert_eq!(summary.std, 0.0);
    }

    #[test]
    fn unit_rescaling_leaves_kappa_unchanged() {
        let (chain, coeffs) = inputs();
        let s = spec(500);
        let mut mb = s.clone();
        for p in mb.parameters.iter_mut().filter(|p| p.name == "Qs") {
            if let Distribution::Uniform { low, high } = &mut p.distribution {
                *low *= 1000.0;
                *high *= 1000.0;
            }
            p.guard_abs_min = p.guard_abs_min.map(|g| g * 1000.0);
            p.units = "mb".into();
            p.to_canonical = 1e-3;
        }
        let (_, a) = sample_kappa_values(&chain, &coeffs, &s, Execution::Parallel).unwrap();
        let (_, b) = sample_kappa_values(&chain, &coeffs, &mb, Execution::Parallel).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-10 * x.abs(), "{x} vs {y}");
        }
    }

    #[test]
    fn missing_parameter_is_reported() {
        let (chain, coeffs) = inputs();
        let mut s = spec(10);
        s.parameters.retain(|p| p.name != "BE2_up");
        assert_eq!(
            sample_kappa(&chain, &coeffs, &s, Execution::Sequential),
            Err(McError::MissingParameter("BE2_up".into()))
        );
    }

    #[test]
    fn guard_band_excludes_and_reports() {
        let (chain, coeffs) = inputs();
        let mut s = spec(2000);
        for p in s.parameters.iter_mut().filter(|p| p.name == "Qs") {
            p.distribution = Distribution::Uniform {
                low: -0.1,
                high: 0.1,
            };
            p.guard_abs_min = Some(0.05);
        }
        let summary = sample_kappa(&chain, &coeffs, &s, Execution::Parallel).unwrap();
        // Half of [-0.1, 0.1] lies inside the guard band.
        assert!(
            (summary.guard_excluded_fraction - 0.5).abs() < 0.03,
            "{}",
            summary.guard_excluded_fraction
        );
    }

    #[test]
    fn more_samples_concentrate_the_mean() {
        let (chain, coeffs) = inputs();
        let small = sample_kappa(&chain, &coeffs, &spec(200), Execution::Parallel).unwrap();
        let large = sample_kappa(&chain, &coeffs, &spec(20_000), Execution::Parallel).unwrap();
        let ratio = small.standard_error() / large.standard_error();
        assert!(ratio > 7.0 && ratio < 14.0, "{ratio}");
    }
}
