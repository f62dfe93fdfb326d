//! Reference computations: dense generalized eigendecomposition, the
//! K-functional quadrature, the Zolotarëv min-max product and error sweeps.

mod minmax;
mod quadrature;
mod sweep;

pub use minmax::{minmax_product, GridKind, MinMaxReport};
pub use quadrature::{gauss_legendre, k_functional_sq, k_norm_quadrature};
pub use sweep::{error_sweep, fit_rate, fit_rates_by_s, ErrorField, ErrorRecord, Truth, SURROGATE_EXTRA};

use crate::error::{FracError, Result};
use crate::linalg::{cholesky_lower, dot, sym_eig, DenseSymMatrix, SparseSymMatrix};
use crate::models::Pencil;

/// Largest dimension accepted by [`full_eig`].
pub const MAX_DENSE_N: usize = 4096;

/// `M`-orthonormal generalized eigenpairs `A φ_k = λ_k² M φ_k`, ascending.
#[derive(Debug, Clone)]
pub struct SpectralOracle {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
}

impl SpectralOracle {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `λ_k²`
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.eigenvectors[k]
    }

    /// `⟨u, φ_k⟩₀` for every `k`.
    pub fn coefficients(&self, m: &SparseSymMatrix, u: &[f64]) -> Result<Vec<f64>> {
        if m.n() != self.n() {
            return Err(FracError::Dimension {
                expected: self.n(),
                found: m.n(),
            });
        }
        let mu = m.spmv(u)?;
        Ok(self.eigenvectors.iter().map(|phi| dot(phi, &mu)).collect())
    }
}

/// Forward substitution `L Z = B` for all columns of the row-major `B` at once.
fn forward_solve_rows(l: &[f64], b: &mut [f64], n: usize) {
    for i in 0..n {
        let (done, rest) = b.split_at_mut(i * n);
        let row = &mut rest[..n];
        for k in 0..i {
            let lik = l[i * n + k];
            if lik != 0.0 {
                let zk = &done[k * n..(k + 1) * n];
                row.iter_mut().zip(zk).for_each(|(r, z)| *r -= lik * z);
            }
        }
        let d = l[i * n + i];
        row.iter_mut().for_each(|r| *r /= d);
    }
}

fn transpose(x: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = x[i * n + j];
        }
    }
    t
}

/// Dense generalized eigendecomposition through the Cholesky reduction
/// `L⁻¹ A L⁻ᵀ y = λ² y`, `φ = L⁻ᵀ y`.
pub fn full_eig(pencil: &Pencil) -> Result<SpectralOracle> {
    let n = pencil.n();
    if n > MAX_DENSE_N {
        return Err(FracError::Invalid(format!(
            "dense eigendecomposition refused for n = {n} > {MAX_DENSE_N}"
        )));
    }
    let a = pencil.stiffness().to_dense();
    let identity_mass = pencil.mass().is_identity();
    let (c, l) = if identity_mass {
        (a, None)
    } else {
        let m = DenseSymMatrix::new(n, pencil.mass().to_dense())?;
        let l = cholesky_lower(&m)?;
        let mut x = a;
        forward_solve_rows(&l, &mut x, n);
        let mut c = transpose(&x, n);
        forward_solve_rows(&l, &mut c, n);
        (c, Some(l))
    };
    let sym = DenseSymMatrix::from_fn(n, |i, j| 0.5 * (c[i * n + j] + c[j * n + i]))?;
    let eig = sym_eig(&sym);

    let mut eigenvectors = Vec::with_capacity(n);
    for k in 0..n {
        let mut phi = eig.vector(k).to_vec();
        if let Some(l) = &l {
            // back substitution Lᵀ φ = y
            for i in (0..n).rev() {
                let mut acc = phi[i];
                for j in i + 1..n {
                    acc -= l[j * n + i] * phi[j];
                }
                phi[i] = acc / l[i * n + i];
            }
        }
        let mnorm = pencil.mass().quad_form(&phi)?.sqrt();
        let pivot = phi
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        let scale = pivot.signum() / mnorm;
        phi.iter_mut().for_each(|v| *v *= scale);
        eigenvectors.push(phi);
    }
    Ok(SpectralOracle {
        eigenvalues: eig.values().to_vec(),
        eigenvectors,
    })
}

fn check_order(s: f64) -> Result<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(FracError::domain("s", s, "order must be finite and nonnegative"));
    }
    Ok(())
}

/// `‖u‖_{H^s} = √(Σ λ_k^{2s} ⟨u, φ_k⟩₀²)`
pub fn h_norm_exact(oracle: &SpectralOracle, m: &SparseSymMatrix, u: &[f64], s: f64) -> Result<f64> {
    check_order(s)?;
    let c = oracle.coefficients(m, u)?;
    let sum: f64 = c
        .iter()
        .zip(oracle.eigenvalues())
        .map(|(ck, lam)| lam.powf(s) * ck * ck)
        .sum();
    Ok(sum.sqrt())
}

/// `(M⁻¹A)^s u = Σ λ_k^{2s} ⟨u, φ_k⟩₀ φ_k`
pub fn op_exact(oracle: &SpectralOracle, m: &SparseSymMatrix, u: &[f64], s: f64) -> Result<Vec<f64>> {
    check_order(s)?;
    let c = oracle.coefficients(m, u)?;
    let mut out = vec![0.0; oracle.n()];
    for (k, (ck, lam)) in c.iter().zip(oracle.eigenvalues()).enumerate() {
        crate::linalg::axpy(lam.powf(s) * ck, oracle.eigenvector(k), &mut out);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::models::{laplace_1d_fem, laplace_2d_fd, synthetic_diagonal};

    #[test]
    fn diagonal_eigenpairs_are_coordinates() {
        let p = synthetic_diagonal(&[1.0, 4.0, 9.0, 16.0]).unwrap();
        let o = full_eig(&p).unwrap();
        assert_eq!(o.eigenvalues(), &[1.0, 4.0, 9.0, 16.0]);
        for k in 0..4 {
            let mut e = vec![0.0; 4];
            e[k] = 1.0;
            assert_eq!(o.eigenvector(k), e.as_slice());
        }
    }

    #[test]
    fn fd_2d_matches_closed_form() {
        let p = laplace_2d_fd(4).unwrap();
        let o = full_eig(&p).unwrap();
        for (got, want) in o.eigenvalues().iter().zip(p.exact_eigenvalues().unwrap()) {
            assert!((got - want).abs() < 1e-10 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn fem_residuals_and_orthonormality() {
        let p = laplace_1d_fem(16).unwrap();
        let o = full_eig(&p).unwrap();
        for (got, want) in o.eigenvalues().iter().zip(p.exact_eigenvalues().unwrap()) {
            assert!((got - want).abs() < 1e-10 * want);
        }
        for k in 0..16 {
            let phi = o.eigenvector(k);
            let lam = o.eigenvalues()[k];
            let aphi = p.stiffness().spmv(phi).unwrap();
            let mphi = p.mass().spmv(phi).unwrap();
            let res: Vec<f64> = aphi.iter().zip(&mphi).map(|(a, m)| a - lam * m).collect();
            assert!(norm2(&res) <= 1e-8 * lam * norm2(&mphi));
            for j in 0..16 {
                let g = dot(o.eigenvector(j), &mphi);
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exact_norm_examples() {
        let p = synthetic_diagonal(&[1.0, 4.0, 9.0, 16.0]).unwrap();
        let o = full_eig(&p).unwrap();
        let u = vec![1.0; 4];
        assert!((h_norm_exact(&o, p.mass(), &u, 0.5).unwrap() - 10f64.sqrt()).abs() < 1e-14);
        assert!((h_norm_exact(&o, p.mass(), &u, 0.0).unwrap() - 2.0).abs() < 1e-14);
        let phi = o.eigenvector(2).to_vec();
        assert!((h_norm_exact(&o, p.mass(), &phi, 0.3).unwrap() - 3f64.powf(0.3)).abs() < 1e-14);
        assert!(h_norm_exact(&o, p.mass(), &u, -0.1).is_err());
    }

    #[test]
    fn op_exact_first_power_is_mass_inverse_stiffness() {
        let p = laplace_1d_fem(12).unwrap();
        let o = full_eig(&p).unwrap();
        let u: Vec<f64> = (0..12).map(|i| ((i * 5 % 7) as f64) - 3.0).collect();
        let got = op_exact(&o, p.mass(), &u, 1.0).unwrap();
        let mgot = p.mass().spmv(&got).unwrap();
        let au = p.stiffness().spmv(&u).unwrap();
        for (x, y) in mgot.iter().zip(&au) {
            assert!((x - y).abs() < 1e-9 * norm2(&au));
        }
        let half = op_exact(&o, p.mass(), &u, 0.5).unwrap();
        let chained = dot(&p.mass().spmv(&u).unwrap(), &half);
        let h = h_norm_exact(&o, p.mass(), &u, 0.5).unwrap();
        assert!((chained - h * h).abs() < 1e-12 * h * h);
    }

    #[test]
    fn size_guard() {
        let p = synthetic_diagonal(&vec![1.0; MAX_DENSE_N + 1]).unwrap();
        assert!(full_eig(&p).is_err());
    }
}
