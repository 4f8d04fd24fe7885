use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{batch_rng, run_batches, stats::percentile, Execution, McError, BATCH_SIZE};
use crate::gkp::{extract, DesignMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectionSpec {
    /// Injected unknowns in column order; the last is α̃.
    pub truth: Vec<f64>,
    /// Gaussian noise standard deviation per row (eV); also the fit weights.
    #[serde(rename = "noise_eV")]
    pub noise_ev: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoveryStats {
    pub trials: usize,
    pub seed: u64,
    pub alpha_truth: f64,
    /// Mean of (α̂ − α_truth).
    pub alpha_bias: f64,
    /// Mean of (x̂ − x_truth) per unknown, column order.
    pub bias: Vec<f64>,
    /// Largest relative error over all unknowns and trials.
    pub max_relative_error: f64,
    pub coverage_1sigma: f64,
    pub coverage_2sigma: f64,
    pub chi_bound_median: f64,
    pub chi_bound_p5: f64,
    pub chi_bound_p95: f64,
    pub condition_number: f64,
}

struct Trial {
    estimates: Vec<f64>,
    alpha_sigma: f64,
    chi_bound: f64,
    kappa: f64,
}

/// Repeats extraction on `design` with rhs = A·truth + noise.
pub fn injection_recovery(
    design: &DesignMatrix,
    spec: &InjectionSpec,
    exec: Execution,
) -> Result<RecoveryStats, McError> {
    if spec.trials == 0 {
        return Err(McError::Spec("trials must be at least 1".into()));
    }
    if spec.noise_ev.len() != design.nrows() {
        return Err(McError::Spec(format!(
            "{} noise values for {} rows",
            spec.noise_ev.len(),
            design.nrows()
        )));
    }
    let clean = design.predict(&spec.truth)?;
    let n = spec.trials;
    let batches = run_batches(
        n.div_ceil(BATCH_SIZE),
        exec,
        |b| -> Result<Vec<Trial>, McError> {
            let mut rng = batch_rng(spec.seed, b);
            let count = BATCH_SIZE.min(n - b * BATCH_SIZE);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let rhs: Vec<f64> = clean
                    .iter()
                    .zip(&spec.noise_ev)
                    .map(|(c, s)| c + s * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let m = design.clone().with_rhs(rhs)?;
                let r = extract(&m, &spec.noise_ev)?;
                let mut estimates: Vec<f64> =
                    r.background_estimates.iter().map(|e| e.value).collect();
                estimates.push(r.alpha_manko_hat.value);
                out.push(Trial {
                    estimates,
                    alpha_sigma: r.alpha_manko_hat.std_error,
                    chi_bound: r.chi_bound,
                    kappa: r.condition_number,
                });
            }
            Ok(out)
        },
    );
    let mut trials = Vec::with_capacity(n);
    for b in batches {
        trials.extend(b?);
    }

    let g = spec.truth.len() - 1;
    let alpha_truth = spec.truth[g];
    let mut bias = vec![0.0; spec.truth.len()];
    let mut max_relative_error: f64 = 0.0;
    let (mut in1, mut in2) = (0usize, 0usize);
    for t in &trials {
        for (c, (est, truth)) in t.estimates.iter().zip(&spec.truth).enumerate() {
            bias[c] += (est - truth) / n as f64;
            let scale = if *truth != 0.0 { truth.abs() } else { 1.0 };
            max_relative_error = max_relative_error.max((est - truth).abs() / scale);
        }
        let dev = (t.estimates[g] - alpha_truth).abs();
        if dev <= t.alpha_sigma {
            in1 += 1;
        }
        if dev <= 2.0 * t.alpha_sigma {
            in2 += 1;
        }
    }
    let mut bounds: Vec<f64> = trials.iter().map(|t| t.chi_bound).collect();
    bounds.sort_by(f64::total_cmp);
    Ok(RecoveryStats {
        trials: n,
        seed: spec.seed,
        alpha_truth,
        alpha_bias: bias[g],
        bias,
        max_relative_error,
        coverage_1sigma: in1 as f64 / n as f64,
        coverage_2sigma: in2 as f64 / n as f64,
        chi_bound_median: percentile(&bounds, 50.0),
        chi_bound_p5: percentile(&bounds, 5.0),
        chi_bound_p95: percentile(&bounds, 95.0),
        condition_number: trials[0].kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkp::RowKey;

    fn line(n: usize) -> DesignMatrix {
        let rows = (0..n)
            .map(|i| RowKey {
                mass_number: i as u32,
                transition: "t".into(),
            })
            .collect();
        let values = (0..n).flat_map(|i| [1.0, i as f64]).collect();
        DesignMatrix::from_rows(rows, vec!["b".into(), "a".into()], values).unwrap()
    }

    #[test]
    fn vanishing_noise_recovers_truth() {
        let spec = InjectionSpec {
            truth: vec![2.0, -3.0],
            noise_ev: vec![1e-14; 6],
            trials: 50,
            seed: 1,
        };
        let r = injection_recovery(&line(6), &spec, Execution::Parallel).unwrap();
        assert!(r.max_relative_error < 1e-12, "{}", r.max_relative_error);
        assert!(r.alpha_bias.abs() < 1e-12);
    }

    #[test]
    fn gaussian_coverage() {
        let spec = InjectionSpec {
            truth: vec![0.5, 0.0],
            noise_ev: vec![0.1; 8],
            trials: 4000,
            seed: 99,
        };
        let r = injection_recovery(&line(8), &spec, Execution::Parallel).unwrap();
        assert!(
            (r.coverage_1sigma - 0.6827).abs() < 0.03,
            "{}",
            r.coverage_1sigma
        );
        assert!(
            (r.coverage_2sigma - 0.9545).abs() < 0.02,
            "{}",
            r.coverage_2sigma
        );
        let seq = injection_recovery(&line(8), &spec, Execution::Sequential).unwrap();
        assert_eq!(r, seq);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut spec = InjectionSpec {
            truth: vec![1.0, 1.0],
            noise_ev: vec![1.0; 3],
            trials: 1,
            seed: 0,
        };
        assert!(injection_recovery(&line(4), &spec, Execution::Sequential).is_err());
        spec.noise_ev = vec![1.0; 4];
        spec.trials = 0;
        assert!(injection_recovery(&line(4), &spec, Execution::Sequential).is_err());
    }
}
