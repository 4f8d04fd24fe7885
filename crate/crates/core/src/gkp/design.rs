use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ElectronicCoefficients, GkpError, TNP_FACTORIZATION_REL};
use crate::nucdata::{spin_mass_lever, IsotopeRecord};

pub const COL_QS: &str = "Qs-background";
pub const COL_ALPHA_T: &str = "alphaT-background";
pub const COL_QS2: &str = "Qs2-background";
pub const COL_GM: &str = "gravitomagnetic";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignOptions {
    /// Promote the second-order HFS residual (∝ Q_s²) to its own column.
    pub second_order_column: bool,
}

impl DesignOptions {
    pub fn n_bkg(&self) -> u32 {
        if self.second_order_column {
            3
        } else {
            2
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowKey {
    pub mass_number: u32,
    pub transition: String,
}

/// Rows (isotope × transition) by columns (rank-2 unknowns), row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignMatrix {
    pub rows: Vec<RowKey>,
    pub columns: Vec<String>,
    values: Vec<f64>,
    pub rhs: Option<Vec<f64>>,
    pub preconditioned: bool,
    /// Original column norms once preconditioned; ones otherwise.
    pub column_norms: Vec<f64>,
    /// Relative α_T uncertainty per row, including the factorization error.
    pub alpha_t_rel_sigma: Vec<f64>,
}

impl DesignMatrix {
    pub fn from_rows(
        rows: Vec<RowKey>,
        columns: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self, GkpError> {
        if values.len() != rows.len() * columns.len() {
            return Err(GkpError::Dimension(format!(
                "{} values for {}x{} matrix",
                values.len(),
                rows.len(),
                columns.len()
            )));
        }
        let n = columns.len();
        let m = rows.len();
        Ok(DesignMatrix {
            rows,
            columns,
            values,
            rhs: None,
            preconditioned: false,
            column_norms: vec![1.0; n],
            alpha_t_rel_sigma: vec![0.0; m],
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.ncols() + col]
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.nrows(), self.ncols(), &self.values)
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.nrows()).map(|r| self.get(r, col)).collect()
    }

    /// Multiplies one column by `factor` (a change of units for that unknown).
    pub fn scale_column(&mut self, col: usize, factor: f64) {
        let n = self.ncols();
        for r in 0..self.nrows() {
            self.values[r * n + col] *= factor;
        }
    }

    /// Column-permuted copy; `order[k]` is the source column of column k.
    pub fn permute_columns(&self, order: &[usize]) -> Self {
        let mut out = self.clone();
        out.columns = order.iter().map(|&c| self.columns[c].clone()).collect();
        out.column_norms = order.iter().map(|&c| self.column_norms[c]).collect();
        for r in 0..self.nrows() {
            for (k, &c) in order.iter().enumerate() {
                out.values[r * self.ncols() + k] = self.get(r, c);
            }
        }
        out
    }

    /// `rhs = A x` for the given physical unknowns.
    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, GkpError> {
        if x.len() != self.ncols() {
            return Err(GkpError::Dimension(format!(
                "{} unknowns for {} columns",
                x.len(),
                self.ncols()
            )));
        }
        Ok((0..self.nrows())
            .map(|r| {
                (0..self.ncols())
                    .map(|c| self.get(r, c) / self.column_norms[c] * x[c])
                    .sum()
            })
            .collect())
    }

    pub fn with_rhs(mut self, rhs: Vec<f64>) -> Result<Self, GkpError> {
        if rhs.len() != self.nrows() {
            return Err(GkpError::Dimension(format!(
                "{} residuals for {} rows",
                rhs.len(),
                self.nrows()
            )));
        }
        self.rhs = Some(rhs);
        Ok(self)
    }

    pub fn gravitomagnetic_column(&self) -> usize {
        self.ncols() - 1
    }
}

/// α_T^A proxy: proportional to B(E2)↑, one value per record.
pub fn alpha_t_from_be2(records: &[&IsotopeRecord]) -> Result<Vec<f64>, GkpError> {
    records
        .iter()
        .map(|r| {
            r.be2_up.map(|b| b.value).ok_or(GkpError::MissingParameter {
                mass_number: r.mass_number,
                field: "BE2_up",
            })
        })
        .collect()
}

/// Builds the design matrix for `odd` isotopes on every transition in
/// `coeffs` that is rank-2 sensitive.
pub fn build_design(
    odd: &[&IsotopeRecord],
    coeffs: &ElectronicCoefficients,
    alpha_t: &[f64],
    options: DesignOptions,
) -> Result<DesignMatrix, GkpError> {
    if alpha_t.len() != odd.len() {
        return Err(GkpError::Dimension(format!(
            "{} alpha_T values for {} isotopes",
            alpha_t.len(),
            odd.len()
        )));
    }
    let transitions = coeffs.rank2_transitions();
    if transitions.is_empty() {
        return Err(GkpError::NoRank2Transition);
    }
    let mut columns = vec![COL_QS.to_string(), COL_ALPHA_T.to_string()];
    if options.second_order_column {
        columns.push(COL_QS2.to_string());
    }
    columns.push(COL_GM.to_string());

    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut alpha_t_rel_sigma = Vec::new();
    for (rec, &at) in odd.iter().zip(alpha_t) {
        let qs = rec.qs.ok_or(GkpError::MissingParameter {
            mass_number: rec.mass_number,
            field: "Qs",
        })?;
        if !rec.is_odd() {
            return Err(GkpError::MissingParameter {
                mass_number: rec.mass_number,
                field: "I > 0",
            });
        }
        let lever = spin_mass_lever(rec);
        let be2_rel = rec.be2_up.map(|b| b.relative_sigma()).unwrap_or(0.0);
        let at_rel = be2_rel.hypot(TNP_FACTORIZATION_REL);
        for t in &transitions {
            rows.push(RowKey {
                mass_number: rec.mass_number,
                transition: t.label.clone(),
            });
            values.push(t.h * qs.value);
            values.push(t.p * at);
            if options.second_order_column {
                let h2 = t.h2.ok_or_else(|| {
                    GkpError::Config(format!(
                        "{}: H2 required for the second-order column",
                        t.label
                    ))
                })?;
                values.push(h2 * qs.value * qs.value);
            }
            values.push(t.g * lever);
            alpha_t_rel_sigma.push(at_rel);
        }
    }
    let mut m = DesignMatrix::from_rows(rows, columns, values)?;
    m.alpha_t_rel_sigma = alpha_t_rel_sigma;
    Ok(m)
}

/// Scales every column to unit Euclidean norm, accumulating the original
/// norms in `column_norms`. The right-hand side is untouched.
pub fn precondition(m: &DesignMatrix) -> Result<DesignMatrix, GkpError> {
    let mut out = m.clone();
    for c in 0..m.ncols() {
        let norm = m.column(c).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(GkpError::ZeroColumn {
                column: m.columns[c].clone(),
            });
        }
        out.scale_column(c, 1.0 / norm);
        out.column_norms[c] *= norm;
    }
    out.preconditioned = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources;

    fn odd_records(with91: bool) -> Vec<IsotopeRecord> {
        let chain = resources::mo_chain().unwrap();
        let mut v: Vec<IsotopeRecord> = chain.partition().1.into_iter().cloned().collect();
        if with91 {
            let mut r = resources::frib_candidate(91).unwrap();
            r.qs = Some(crate::nucdata::Measured::exact(0.3));
            r.be2_up = Some(crate::nucdata::Measured::exact(12.0));
            v.insert(0, r);
        }
        v
    }

    fn design(with91: bool, n_trans: usize) -> DesignMatrix {
        let recs = odd_records(with91);
        let refs: Vec<&IsotopeRecord> = recs.iter().collect();
        let at = alpha_t_from_be2(&refs).unwrap();
        let coeffs = ElectronicCoefficients::bundled()
            .unwrap()
            .first_rank2(n_trans)
            .unwrap();
        build_design(&refs, &coeffs, &at, DesignOptions::default()).unwrap()
    }

    #[test]
    fn shapes_follow_topology() {
        assert_eq!((design(false, 1).nrows(), design(false, 1).ncols()), (2, 3));
        assert_eq!((design(true, 1).nrows(), design(true, 1).ncols()), (3, 3));
        assert_eq!((design(false, 2).nrows(), design(false, 2).ncols()), (4, 3));
        assert_eq!(design(true, 2).nrows(), 6);
    }

    #[test]
    fn entries_follow_rank2_decomposition() {
        let m = design(false, 1);
        let c = &ElectronicCoefficients::bundled().unwrap().transitions[0];
        assert_eq!(m.rows[0].mass_number, 95);
        assert_eq!(m.get(0, 0), c.h * -0.022);
        assert_eq!(m.get(0, 1), c.p * 8.0);
        assert_eq!(m.get(0, 2), c.g * (6.25 / 95.0));
        assert_eq!(m.get(1, 0), c.h * 0.255);
        assert!((m.get(0, 2) - 2e-21).abs() < 1e-36);
        // 95Mo B(E2) = 8(1): 12.5% relative, factorization error in quadrature.
        assert!((m.alpha_t_rel_sigma[0] - 0.125).abs() < 1e-9);
    }

    #[test]
    fn missing_parameter_names_isotope() {
        let chain = resources::mo_chain().unwrap();
        let mo91 = resources::frib_candidate(91).unwrap();
        let recs: Vec<&IsotopeRecord> = vec![&mo91, chain.get(95).unwrap()];
        assert_eq!(
            alpha_t_from_be2(&recs),
            Err(GkpError::MissingParameter {
                mass_number: 91,
                field: "BE2_up"
            })
        );
        let coeffs = ElectronicCoefficients::bundled().unwrap();
        let err = build_design(&recs, &coeffs, &[1.0, 8.0], DesignOptions::default()).unwrap_err();
        assert_eq!(
            err,
            GkpError::MissingParameter {
                mass_number: 91,
                field: "Qs"
            }
        );
    }

    #[test]
    fn second_order_column_adds_unknown() {
        let recs = odd_records(true);
        let refs: Vec<&IsotopeRecord> = recs.iter().collect();
        let at = alpha_t_from_be2(&refs).unwrap();
        let coeffs = ElectronicCoefficients::bundled().unwrap();
        let m = build_design(
            &refs,
            &coeffs,
            &at,
            DesignOptions {
                second_order_column: true,
            },
        )
        .unwrap();
        assert_eq!(m.ncols(), 4);
        assert_eq!(m.columns[2], COL_QS2);
    }

    #[test]
    fn precondition_normalizes_columns() {
        let p = precondition(&design(true, 2)).unwrap();
        for c in 0..p.ncols() {
            let n: f64 = p.column(c).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert!(p.preconditioned);
        let again = precondition(&p).unwrap();
        for c in 0..p.ncols() {
            assert!((again.column_norms[c] / p.column_norms[c] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_column_is_rank_deficiency() {
        let m = DesignMatrix::from_rows(
            (0..3)
                .map(|i| RowKey {
                    mass_number: i,
                    transition: "t".into(),
                })
                .collect(),
            vec!["a".into(), "b".into()],
            vec![1.0, 0.0, 2.0, 0.0, 3.0, 0.0],
        )
        .unwrap();
        assert_eq!(
            precondition(&m),
            Err(GkpError::ZeroColumn { column: "b".into() })
        );
    }
}
