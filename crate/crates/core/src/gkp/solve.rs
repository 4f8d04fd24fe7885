use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::design::{precondition, DesignMatrix};
use super::GkpError;

/// σ_min below `SINGULAR_RTOL_FACTOR · ε · σ_max` counts as exactly singular.
pub const SINGULAR_RTOL_FACTOR: f64 = 1e3;

fn check_shape(m: &DesignMatrix) -> Result<(), GkpError> {
    if m.ncols() == 0 {
        return Err(GkpError::Dimension("matrix has no columns".into()));
    }
    if m.nrows() < m.ncols() {
        return Err(GkpError::Underdetermined {
            equations: m.nrows(),
            unknowns: m.ncols(),
        });
    }
    Ok(())
}

fn sorted_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn kappa_from(s: &[f64]) -> f64 {
    let max = s[0];
    let min = s[s.len() - 1];
    if !(max > 0.0) || min < SINGULAR_RTOL_FACTOR * f64::EPSILON * max {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &DesignMatrix) -> Result<Vec<f64>, GkpError> {
    check_shape(m)?;
    Ok(sorted_singular_values(&m.matrix()))
}

/// σ_max/σ_min of the matrix as stored; `+inf` for numerically singular
/// matrices. Callers wanting the geometric κ precondition first.
pub fn condition_number(m: &DesignMatrix) -> Result<f64, GkpError> {
    Ok(kappa_from(&singular_values(m)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterEstimate {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionResult {
    pub alpha_manko_hat: ParameterEstimate,
    pub background_estimates: Vec<ParameterEstimate>,
    /// κ of the column-normalized, unweighted design matrix.
    pub condition_number: f64,
    /// ‖A x̂ − Δ‖₂ in eV.
    pub residual_norm: f64,
    /// Σ ((A x̂ − Δ)/σ)².
    pub chi_squared: f64,
    pub degrees_of_freedom: usize,
    /// Full covariance of the estimates in column order.
    pub covariance: Vec<Vec<f64>>,
    /// |χ − 1| bound implied by the α̃ standard error.
    pub chi_bound: f64,
    pub notes: Vec<String>,
}

/// Inverse-variance weighted least squares for the unknowns of `m`.
///
/// The system is column-normalized, solved through the SVD of the weighted
/// matrix, and the estimates are scaled back to physical units. Singular
/// systems are refused; no regularization is ever applied.
pub fn extract(m: &DesignMatrix, rhs_sigma: &[f64]) -> Result<ExtractionResult, GkpError> {
    check_shape(m)?;
    let rhs = m.rhs.as_ref().ok_or(GkpError::NoRhs)?;
    if rhs_sigma.len() != m.nrows() {
        return Err(GkpError::Dimension(format!(
            "{} sigmas for {} rows",
            rhs_sigma.len(),
            m.nrows()
        )));
    }
    for (row, &sigma) in rhs_sigma.iter().enumerate() {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(GkpError::InvalidSigma { row, sigma });
        }
    }

    let p = precondition(m)?;
    let a = p.matrix();
    let s_geom = sorted_singular_values(&a);
    let kappa = kappa_from(&s_geom);
    if !kappa.is_finite() {
        return Err(GkpError::Singular {
            ratio: s_geom[s_geom.len() - 1] / s_geom[0],
        });
    }

    let (nr, nc) = (p.nrows(), p.ncols());
    let w = DVector::from_iterator(nr, rhs_sigma.iter().map(|s| 1.0 / s));
    let mut aw = a.clone();
    for r in 0..nr {
        for c in 0..nc {
            aw[(r, c)] *= w[r];
        }
    }
    let bw = DVector::from_iterator(nr, rhs.iter().zip(w.iter()).map(|(b, wi)| b * wi));

    let svd = aw.svd(true, true);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| GkpError::Dimension("SVD returned no U".into()))?;
    let vt = svd
        .v_t
        .as_ref()
        .ok_or_else(|| GkpError::Dimension("SVD returned no V".into()))?;
    let s = &svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    if smin < SINGULAR_RTOL_FACTOR * f64::EPSILON * smax {
        return Err(GkpError::Singular { ratio: smin / smax });
    }

    // y = V Σ⁻¹ Uᵀ b_w ; cov_y = V Σ⁻² Vᵀ
    let utb = u.transpose() * &bw;
    let mut y = DVector::zeros(nc);
    let mut cov_y = DMatrix::zeros(nc, nc);
    for k in 0..nc {
        let vk = vt.row(k).transpose();
        y += &vk * (utb[k] / s[k]);
        cov_y += &vk * vk.transpose() / (s[k] * s[k]);
    }

    let norms = &p.column_norms;
    let x: Vec<f64> = (0..nc).map(|c| y[c] / norms[c]).collect();
    let covariance: Vec<Vec<f64>> = (0..nc)
        .map(|i| {
            (0..nc)
                .map(|j| cov_y[(i, j)] / (norms[i] * norms[j]))
                .collect()
        })
        .collect();

    let fitted = m.predict(&x)?;
    let mut residual_sq = 0.0;
    let mut chi_squared = 0.0;
    for ((f, b), sigma) in fitted.iter().zip(rhs).zip(rhs_sigma) {
        let r = f - b;
        residual_sq += r * r;
        chi_squared += (r / sigma) * (r / sigma);
    }

    let estimates: Vec<ParameterEstimate> = (0..nc)
        .map(|c| ParameterEstimate {
            name: m.columns[c].clone(),
            value: x[c],
            std_error: covariance[c][c].max(0.0).sqrt(),
        })
        .collect();
    let g = m.gravitomagnetic_column();
    let alpha = estimates[g].clone();
    let background_estimates = estimates
        .into_iter()
        .enumerate()
        .filter(|(c, _)| *c != g)
        .map(|(_, e)| e)
        .collect();
    // α̃ = 1 is the χ = 1 signal, so the bound is the α̃ standard error.
    let chi_bound = crate::budget::chi_bound(alpha.std_error, 1.0)
        .map_err(|e| GkpError::Dimension(e.to_string()))?;

    let mut notes =
        vec!["row correlations from shared theory subtraction are not modeled".to_string()];
    if nr == nc {
        notes.push(
            "exactly determined: residual is zero and chi-squared carries no information".into(),
        );
    }

    Ok(ExtractionResult {
        alpha_manko_hat: alpha,
        background_estimates,
        condition_number: kappa,
        residual_norm: residual_sq.sqrt(),
        chi_squared,
        degrees_of_freedom: nr - nc,
        covariance,
        chi_bound,
        notes,
    })
}
