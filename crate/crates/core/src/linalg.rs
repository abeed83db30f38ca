//! Small dense linear algebra over any [`Scalar`].

use crate::scalar::Scalar;

/// Determinant and inverse by Gauss-Jordan elimination with partial pivoting
/// on the point values. Returns `None` for a singular pivot.
pub fn invert_with_det<S: Scalar>(m: &[Vec<S>]) -> Option<(Vec<Vec<S>>, S)> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| {
            a[x][col]
                .value()
                .abs()
                .partial_cmp(&a[y][col].value().abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].value() == 0.0 {
            return None;
        }
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = det.mul_ref(&p);
        let pinv = p.recip();
        for j in 0..n {
            a[col][j] = a[col][j].mul_ref(&pinv);
            inv[col][j] = inv[col][j].mul_ref(&pinv);
        }
        for row in 0..n {
            if row == col || a[row][col].is_exact_zero() {
                continue;
            }
            let f = a[row][col].clone();
            for j in 0..n {
                let da = a[col][j].mul_ref(&f);
                a[row][j] -= da;
                let di = inv[col][j].mul_ref(&f);
                inv[row][j] -= di;
            }
        }
    }
    Some((inv, det))
}

pub fn invert<S: Scalar>(m: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    invert_with_det(m).map(|(inv, _)| inv)
}

pub fn determinant<S: Scalar>(m: &[Vec<S>]) -> S {
    invert_with_det(m).map(|(_, d)| d).unwrap_or_else(S::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = vec![
            vec![0.0, 2.0, 1.0],
            vec![1.0, -1.0, 0.5],
            vec![3.0, 0.2, 4.0],
        ];
        let (inv, det) = invert_with_det(&m).unwrap();
        let expected_det: f64 = 0.0 * (-4.0 - 0.1) - 2.0 * (4.0 - 1.5) + 1.0 * (0.2 + 3.0);
        assert!((det - expected_det).abs() < 1e-14);
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_matrix() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(invert(&m).is_none());
        assert_eq!(determinant(&m), 0.0);
    }
}
