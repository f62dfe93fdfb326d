use super::{axpy, dot, norm2, SparseSymMatrix};
use crate::error::{FracError, Result};

/// Iteration budget floor; the actual cap is `max(10 n, CG_MIN_ITERATIONS)`.
pub const CG_MIN_ITERATIONS: usize = 10_000;

/// Jacobi-preconditioned conjugate gradients for an SPD operator.
///
/// Stops once the *true* residual satisfies `‖b − Op x‖₂ ≤ rel_tol ‖b‖₂`.
/// When the recursively updated residual claims convergence but the true
/// one does not, the iteration is restarted from the current iterate.
pub fn pcg<F>(apply: F, diag: &[f64], b: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    if diag.len() != n {
        return Err(FracError::Dimension {
            expected: n,
            found: diag.len(),
        });
    }
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(FracError::Invalid("preconditioner diagonal must be positive".into()));
    }
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let target = rel_tol * b_norm;

    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut residual = b_norm;

    for _ in 0..max_iter {
        apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(FracError::Invalid("operator is not positive definite".into()));
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        residual = norm2(&r);

        if residual <= target {
            apply(&x, &mut q);
            for i in 0..n {
                r[i] = b[i] - q[i];
            }
            residual = norm2(&r);
            if residual <= target {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }

        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(FracError::NotConverged {
        method: "preconditioned CG",
        iterations: max_iter,
        residual: residual / b_norm,
    })
}

/// Solves `(M + t² A) x = b` by Jacobi-preconditioned CG.
pub fn cg_shifted_solve(
    m: &SparseSymMatrix,
    a: &SparseSymMatrix,
    t: f64,
    b: &[f64],
    rel_tol: f64,
) -> Result<Vec<f64>> {
    let n = m.n();
    if a.n() != n {
        return Err(FracError::Dimension {
            expected: n,
            found: a.n(),
        });
    }
    if b.len() != n {
        return Err(FracError::Dimension {
            expected: n,
            found: b.len(),
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(FracError::domain("t", t, "shift must be finite and nonnegative"));
    }
    if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
        return Err(FracError::domain("rel_tol", rel_tol, "must lie in (0, 1e-6]"));
    }
    let shift = t * t;
    let diag: Vec<f64> = m
        .diagonal()
        .iter()
        .zip(a.diagonal())
        .map(|(dm, da)| dm + shift * da)
        .collect();
    let max_iter = (10 * n).max(CG_MIN_ITERATIONS);
    if shift == 0.0 {
        return pcg(|x, y| m.spmv_into(x, y), &diag, b, rel_tol, max_iter);
    }
    let scratch = std::cell::RefCell::new(vec![0.0; n]);
    pcg(
        |x, y| {
            let mut ax = scratch.borrow_mut();
            m.spmv_into(x, y);
            a.spmv_into(x, &mut ax);
            axpy(shift, &ax, y);
        },
        &diag,
        b,
        rel_tol,
        max_iter,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fem_1d(n: usize) -> (SparseSymMatrix, SparseSymMatrix) {
        let h = 1.0 / (n + 1) as f64;
        let mut mt = Vec::new();
        let mut at = Vec::new();
        for i in 0..n {
            mt.push((i, i, 4.0 * h / 6.0));
            at.push((i, i, 2.0 / h));
            if i + 1 < n {
                for (p, q) in [(i, i + 1), (i + 1, i)] {
                    mt.push((p, q, h / 6.0));
                    at.push((p, q, -1.0 / h));
                }
            }
        }
        (
            SparseSymMatrix::from_triplets(n, mt).unwrap(),
            SparseSymMatrix::from_triplets(n, at).unwrap(),
        )
    }

    /// Dense Gaussian elimination with partial pivoting; test oracle only.
    fn dense_solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap();
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row * n + col] / a[col * n + col];
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let mut acc = b[row];
            for k in row + 1..n {
                acc -= a[row * n + k] * x[k];
            }
            x[row] = acc / a[row * n + row];
        }
        x
    }

    #[test]
    fn identity_system() {
        let i = SparseSymMatrix::identity(5);
        let a = SparseSymMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = vec![1.0, -2.0, 3.0, 0.5, 0.25];
        let x = cg_shifted_solve(&i, &a, 0.0, &b, 1e-12).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-15);
        }
    }

    #[test]
    fn fem_pencil_matches_dense_solve() {
        let (m, a) = fem_1d(8);
        let b = m.spmv(&[1.0; 8]).unwrap();
        let x = cg_shifted_solve(&m, &a, 1.0, &b, 1e-13).unwrap();
        let dm = m.to_dense();
        let da = a.to_dense();
        let op: Vec<f64> = dm.iter().zip(&da).map(|(p, q)| p + q).collect();
        let want = dense_solve(op, b);
        for (xi, wi) in x.iter().zip(&want) {
            assert!((xi - wi).abs() < 1e-10 * wi.abs().max(1.0));
        }
    }

    #[test]
    fn large_shift_scales_inverse_square() {
        let (m, a) = fem_1d(8);
        let b = m.spmv(&[1.0; 8]).unwrap();
        let x1 = cg_shifted_solve(&m, &a, 1e6, &b, 1e-12).unwrap();
        let x2 = cg_shifted_solve(&m, &a, 2e6, &b, 1e-12).unwrap();
        let ratio = norm2(&x1) / norm2(&x2);
        assert!((ratio - 4.0).abs() < 1e-6, "ratio {ratio}");
        assert!(norm2(&x1) < 1e-10 * norm2(&b));
    }

    #[test]
    fn parameter_validation() {
        let (m, a) = fem_1d(4);
        let b = vec![1.0; 4];
        assert!(cg_shifted_solve(&m, &a, -1.0, &b, 1e-12).is_err());
        assert!(cg_shifted_solve(&m, &a, 1.0, &b, 1e-3).is_err());
        assert!(cg_shifted_solve(&m, &a, 1.0, &[1.0; 3], 1e-12).is_err());
        assert_eq!(cg_shifted_solve(&m, &a, 1.0, &[0.0; 4], 1e-12).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn exhausted_budget_reports_residual() {
        let (m, a) = fem_1d(50);
        let b = vec![1.0; 50];
        let err = pcg(
            |x, y| {
                m.spmv_into(x, y);
                let mut ax = vec![0.0; 50];
                a.spmv_into(x, &mut ax);
                axpy(100.0, &ax, y);
            },
            &vec![1.0; 50],
            &b,
            1e-14,
            2,
        )
        .unwrap_err();
        match err {
            FracError::NotConverged { iterations, residual, .. } => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-14);
            }
            other => panic!("unexpected {other}"),
        }
    }
}
