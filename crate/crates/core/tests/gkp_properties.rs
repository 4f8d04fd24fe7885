//! Condition numbers against a one-sided Jacobi SVD, plus invariances of
//! preconditioning and extraction.

use gkpforge::gkp::{
    condition_number, extract, precondition, singular_values, DesignMatrix, RowKey,
};
use proptest::prelude::*;

/// One-sided Jacobi: orthogonalise column pairs until every pair is
/// orthogonal; the column norms are then the singular values.
fn jacobi_singular_values(rows: usize, cols: usize, values: &[f64]) -> Vec<f64> {
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|c| (0..rows).map(|r| values[r * cols + c]).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a[p].iter().map(|x| x * x).sum();
                let beta: f64 = a[q].iter().map(|x| x * x).sum();
                let gamma: f64 = a[p].iter().zip(&a[q]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = a.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    (*x, *y) = (c * *x - s * *y, s * *x + c * *y);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

fn design(rows: usize, cols: usize, values: Vec<f64>) -> DesignMatrix {
    let keys = (0..rows)
        .map(|i| RowKey {
            mass_number: 90 + i as u32,
            transition: "t".into(),
        })
        .collect();
    let names = (0..cols).map(|c| format!("c{c}")).collect();
    DesignMatrix::from_rows(keys, names, values).unwrap()
}

fn well_conditioned_4x3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 12).prop_filter("full rank", |v| {
        let sv = jacobi_singular_values(4, 3, v);
        sv[2] > 1e-3 * sv[0]
    })
}

#[test]
fn frozen_kappa() {
    // Columns (1,0,0,0), (1,1,0,0), (0,0,1,0): σ² = (3 ± √5)/2 and 1.
    let m = design(
        4,
        3,
        vec![1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    );
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((condition_number(&m).unwrap() - golden * golden).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn singular_values_match_jacobi(v in well_conditioned_4x3()) {
        let m = design(4, 3, v.clone());
        let ours = singular_values(&m).unwrap();
        let oracle = jacobi_singular_values(4, 3, &v);
        for (a, b) in ours.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-10 * oracle[0]);
        }
        let kappa = condition_number(&m).unwrap();
        let k_oracle = oracle[0] / oracle[2];
        prop_assert!((kappa - k_oracle).abs() <= 1e-10 * k_oracle);
    }

    #[test]
    fn preconditioned_kappa_ignores_column_scale(v in well_conditioned_4x3(), s in prop::collection::vec(-8.0f64..8.0, 3)) {
        let m = design(4, 3, v);
        let mut scaled = m.clone();
        for (c, e) in s.iter().enumerate() {
            scaled.scale_column(c, 10f64.powf(*e));
        }
        let k1 = condition_number(&precondition(&m).unwrap()).unwrap();
        let k2 = condition_number(&precondition(&scaled).unwrap()).unwrap();
        prop_assert!((k1 - k2).abs() <= 1e-9 * k1);
    }

    #[test]
    fn kappa_ignores_column_order(v in well_conditioned_4x3(), perm in Just([2usize, 0, 1])) {
        let m = design(4, 3, v);
        let k1 = condition_number(&m).unwrap();
        let k2 = condition_number(&m.permute_columns(&perm)).unwrap();
        prop_assert!((k1 - k2).abs() <= 1e-10 * k1);
    }

    #[test]
    fn noiseless_round_trip(v in well_conditioned_4x3(), x in prop::collection::vec(-5.0f64..5.0, 3), s in prop::collection::vec(-6.0f64..6.0, 3)) {
        let mut m = design(4, 3, v);
        for (c, e) in s.iter().enumerate() {
            m.scale_column(c, 10f64.powf(*e));
        }
        let rhs = m.predict(&x).unwrap();
        let rhs_norm = rhs.iter().map(|y| y * y).sum::<f64>().sqrt();
        let norms: Vec<f64> = (0..3).map(|c| m.column(c).iter().map(|a| a * a).sum::<f64>().sqrt()).collect();
        let m = m.with_rhs(rhs).unwrap();
        let r = extract(&m, &[1.0; 4]).unwrap();
        let est: Vec<f64> = r.background_estimates.iter().chain(std::iter::once(&r.alpha_manko_hat)).map(|e| e.value).collect();
        // Backward-stable accuracy: each error measured by its contribution to the fit.
        for ((e, t), n) in est.iter().zip(&x).zip(&norms) {
            prop_assert!((e - t).abs() * n <= 1e-10 * rhs_norm, "{:?} vs {:?}", est, x);
        }
    }

    #[test]
    fn extraction_commutes_with_permutation(v in well_conditioned_4x3(), x in prop::collection::vec(-5.0f64..5.0, 3)) {
        let m = design(4, 3, v);
        let rhs: Vec<f64> = m.predict(&x).unwrap().iter().enumerate().map(|(i, y)| y + 1e-3 * i as f64).collect();
        let a = extract(&m.clone().with_rhs(rhs.clone()).unwrap(), &[1.0; 4]).unwrap();
        let order = [2usize, 0, 1];
        let b = extract(&m.permute_columns(&order).with_rhs(rhs).unwrap(), &[1.0; 4]).unwrap();
        let ea: Vec<f64> = a.background_estimates.iter().chain(std::iter::once(&a.alpha_manko_hat)).map(|e| e.value).collect();
        let eb: Vec<f64> = b.background_estimates.iter().chain(std::iter::once(&b.alpha_manko_hat)).map(|e| e.value).collect();
        for (k, &src) in order.iter().enumerate() {
            prop_assert!((eb[k] - ea[src]).abs() <= 1e-8 * (1.0 + ea[src].abs()));
        }
    }
}
