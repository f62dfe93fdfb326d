use super::{axpy, dot, SparseSymMatrix};
use crate::error::{FracError, Result};

/// Columns orthonormal in the `M` inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct MOrthonormalBasis {
    columns: Vec<Vec<f64>>,
    m_columns: Vec<Vec<f64>>,
    kept_indices: Vec<usize>,
}

impl MOrthonormalBasis {
    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// `M v_j` for every basis column, cached from the orthogonalization.
    pub fn m_columns(&self) -> &[Vec<f64>] {
        &self.m_columns
    }

    pub fn kept(&self) -> usize {
        self.columns.len()
    }

    /// Input positions of the columns that survived.
    pub fn kept_indices(&self) -> &[usize] {
        &self.kept_indices
    }

    pub fn into_columns(self) -> Vec<Vec<f64>> {
        self.columns
    }
}

/// Chronological Gram-Schmidt in the `M` inner product, with one full
/// reorthogonalization pass per column.
///
/// A candidate whose `M`-norm after orthogonalization falls below
/// `drop_tol` times its original `M`-norm is treated as linearly dependent
/// and discarded.
pub fn gram_schmidt_m(
    columns: &[Vec<f64>],
    m: &SparseSymMatrix,
    drop_tol: f64,
) -> Result<MOrthonormalBasis> {
    let n = m.n();
    let Some(first) = columns.first() else {
        return Err(FracError::Invalid("no columns to orthonormalize".into()));
    };
    if let Some(bad) = columns.iter().find(|c| c.len() != n) {
        return Err(FracError::Dimension {
            expected: n,
            found: bad.len(),
        });
    }
    if !(drop_tol >= 0.0 && drop_tol < 1.0) {
        return Err(FracError::domain("drop_tol", drop_tol, "must lie in [0, 1)"));
    }
    let mut mw = vec![0.0; n];
    m.spmv_into(first, &mut mw);
    if !(dot(first, &mw) > 0.0) {
        return Err(FracError::Invalid("first column has zero M-norm".into()));
    }

    let mut basis = MOrthonormalBasis {
        columns: Vec::new(),
        m_columns: Vec::new(),
        kept_indices: Vec::new(),
    };
    for (idx, col) in columns.iter().enumerate() {
        let mut w = col.clone();
        m.spmv_into(&w, &mut mw);
        let initial = dot(&w, &mw).max(0.0).sqrt();
        if initial == 0.0 {
            continue;
        }
        for _pass in 0..2 {
            for (v, mv) in basis.columns.iter().zip(&basis.m_columns) {
                let coeff = dot(mv, &w);
                axpy(-coeff, v, &mut w);
            }
        }
        m.spmv_into(&w, &mut mw);
        let remaining = dot(&w, &mw).max(0.0).sqrt();
        if remaining < drop_tol * initial || remaining == 0.0 {
            continue;
        }
        let inv = 1.0 / remaining;
        w.iter_mut().for_each(|x| *x *= inv);
        mw.iter_mut().for_each(|x| *x *= inv);
        basis.columns.push(w);
        basis.m_columns.push(mw.clone());
        basis.kept_indices.push(idx);
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(basis: &MOrthonormalBasis) -> Vec<Vec<f64>> {
        basis
            .columns()
            .iter()
            .map(|v| basis.m_columns().iter().map(|mw| dot(v, mw)).collect())
            .collect()
    }

    #[test]
    fn orthonormal_input_is_preserved() {
        let m = SparseSymMatrix::from_diagonal(&[4.0, 1.0, 9.0]);
        let cols = vec![vec![0.5, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0 / 3.0]];
        let basis = gram_schmidt_m(&cols, &m, 1e-10).unwrap();
        assert_eq!(basis.kept(), 3);
        for (got, want) in basis.columns().iter().zip(&cols) {
            for (g, w) in got.iter().zip(want) {
                assert!((g.abs() - w.abs()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn duplicate_column_is_dropped() {
        let m = SparseSymMatrix::identity(4);
        let cols = vec![
            vec![1.0, 2.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0],
        ];
        let basis = gram_schmidt_m(&cols, &m, 1e-10).unwrap();
        assert_eq!(basis.kept(), 2);
        assert_eq!(basis.kept_indices(), &[0, 1]);
        let g = gram(&basis);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[i][j] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_first_column_rejected() {
        let m = SparseSymMatrix::identity(2);
        assert!(gram_schmidt_m(&[vec![0.0, 0.0], vec![1.0, 0.0]], &m, 1e-10).is_err());
        assert!(gram_schmidt_m(&[], &m, 1e-10).is_err());
        assert!(gram_schmidt_m(&[vec![1.0]], &m, 1e-10).is_err());
    }

    #[test]
    fn first_column_is_normalized_input() {
        let m = SparseSymMatrix::from_diagonal(&[2.0, 3.0]);
        let u = vec![1.0, -1.0];
        let basis = gram_schmidt_m(&[u.clone(), vec![1.0, 1.0]], &m, 1e-10).unwrap();
        let beta = (2.0f64 + 3.0).sqrt();
        assert!((basis.columns()[0][0] - 1.0 / beta).abs() < 1e-15);
        assert!((basis.columns()[0][1] + 1.0 / beta).abs() < 1e-15);
    }
}
