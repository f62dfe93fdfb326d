//! Mass/stiffness pencils for model problems.

mod matrix_market;

use std::f64::consts::PI;

pub use matrix_market::{load_matrix_market, read_matrix_market, write_matrix_market};

use crate::error::{FracError, Result};
use crate::linalg::{lambda_max_estimate, lambda_min_estimate, SparseSymMatrix};
use crate::oracle::SpectralOracle;
use crate::rng::XorShift64Star;
use crate::zolotarev::SpectralInterval;

const SPD_SAMPLES: usize = 20;
const SPD_SEED: u64 = 0x5bd1;

/// A discrete pair `(M, A)`: `M` induces `‖·‖₀`, `A` induces `‖·‖₁`.
#[derive(Debug, Clone)]
pub struct Pencil {
    m: SparseSymMatrix,
    a: SparseSymMatrix,
    exact_eigenvalues: Option<Vec<f64>>,
}

impl Pencil {
    /// Checks matching dimensions and positivity of both quadratic forms on
    /// a fixed sample of random vectors.
    pub fn new(m: SparseSymMatrix, a: SparseSymMatrix) -> Result<Self> {
        if m.n() != a.n() {
            return Err(FracError::Dimension {
                expected: m.n(),
                found: a.n(),
            });
        }
        if m.n() == 0 {
            return Err(FracError::Invalid("empty pencil".into()));
        }
        let pencil = Self {
            m,
            a,
            exact_eigenvalues: None,
        };
        pencil.check_spd_sampled()?;
        Ok(pencil)
    }

    pub(crate) fn with_eigenvalues(mut self, eigenvalues: Vec<f64>) -> Self {
        self.exact_eigenvalues = Some(eigenvalues);
        self
    }

    fn check_spd_sampled(&self) -> Result<()> {
        let n = self.n();
        let mut rng = XorShift64Star::new(SPD_SEED);
        for _ in 0..SPD_SAMPLES {
            let x = rng.vector(n, -1.0, 1.0);
            for (name, q) in [("mass", &self.m), ("stiffness", &self.a)] {
                if !(q.quad_form(&x)? > 0.0) {
                    return Err(FracError::Invalid(format!(
                        "{name} matrix failed the positive-definiteness sample"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn mass(&self) -> &SparseSymMatrix {
        &self.m
    }

    pub fn stiffness(&self) -> &SparseSymMatrix {
        &self.a
    }

    /// Generalized eigenvalues `λ_k²`, ascending, when known in closed form.
    pub fn exact_eigenvalues(&self) -> Option<&[f64]> {
        self.exact_eigenvalues.as_deref()
    }

    /// `‖u‖₀ = √(uᵀ M u)`
    pub fn norm0(&self, u: &[f64]) -> Result<f64> {
        Ok(self.m.quad_form(u)?.max(0.0).sqrt())
    }

    /// `‖u‖₁ = √(uᵀ A u)`
    pub fn norm1(&self, u: &[f64]) -> Result<f64> {
        Ok(self.a.quad_form(u)?.max(0.0).sqrt())
    }

    /// Spectral enclosure from the power and inverse-iteration estimates,
    /// including their safety margins. Known eigenvalues are not consulted.
    pub fn estimated_interval(&self, tol: f64) -> Result<SpectralInterval> {
        SpectralInterval::new(
            lambda_min_estimate(&self.m, &self.a, tol)?,
            lambda_max_estimate(&self.m, &self.a, tol)?,
        )
    }
}

fn tridiagonal(n: usize, diag: f64, off: f64) -> SparseSymMatrix {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        t.push((i, i, diag));
        if i + 1 < n {
            t.push((i, i + 1, off));
            t.push((i + 1, i, off));
        }
    }
    SparseSymMatrix::from_triplets(n, t).expect("tridiagonal pattern is symmetric")
}

/// Piecewise-linear finite elements on the unit interval with homogeneous
/// Dirichlet conditions, `n` interior nodes.
pub fn laplace_1d_fem(n: usize) -> Result<Pencil> {
    if n < 2 {
        return Err(FracError::Invalid(format!("laplace_1d_fem needs n >= 2, got {n}")));
    }
    let h = 1.0 / (n + 1) as f64;
    let a = tridiagonal(n, 2.0 / h, -1.0 / h);
    let m = tridiagonal(n, 4.0 * h / 6.0, h / 6.0);
    // sin(kπx_i) diagonalizes both Toeplitz factors.
    let eig = (1..=n)
        .map(|k| {
            let c = (k as f64 * PI * h).cos();
            6.0 / (h * h) * (1.0 - c) / (2.0 + c)
        })
        .collect();
    Ok(Pencil::new(m, a)?.with_eigenvalues(eig))
}

/// Five-point finite differences on an `n × n` interior grid of the unit
/// square, `M = I`. Node `(i, j)` has index `i n + j`.
pub fn laplace_2d_fd(n: usize) -> Result<Pencil> {
    if n < 2 {
        return Err(FracError::Invalid(format!("laplace_2d_fd needs n >= 2, got {n}")));
    }
    let h = 1.0 / (n + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let idx = |i: usize, j: usize| i * n + j;
    let mut t = Vec::with_capacity(5 * n * n);
    for i in 0..n {
        for j in 0..n {
            let p = idx(i, j);
            t.push((p, p, 4.0 * inv_h2));
            if i + 1 < n {
                t.push((p, idx(i + 1, j), -inv_h2));
                t.push((idx(i + 1, j), p, -inv_h2));
            }
            if j + 1 < n {
                t.push((p, idx(i, j + 1), -inv_h2));
                t.push((idx(i, j + 1), p, -inv_h2));
            }
        }
    }
    let a = SparseSymMatrix::from_triplets(n * n, t)?;
    let m = SparseSymMatrix::identity(n * n);
    let s2 = |k: usize| (k as f64 * PI * h / 2.0).sin().powi(2);
    let mut eig: Vec<f64> = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .map(|(i, j)| 4.0 * inv_h2 * (s2(i) + s2(j)))
        .collect();
    eig.sort_by(f64::total_cmp);
    Ok(Pencil::new(m, a)?.with_eigenvalues(eig))
}

/// `M = I`, `A = diag(eigenvalues_sq)`; eigenvectors are unit coordinates.
pub fn synthetic_diagonal(eigenvalues_sq: &[f64]) -> Result<Pencil> {
    if eigenvalues_sq.is_empty() {
        return Err(FracError::Invalid("empty spectrum".into()));
    }
    if let Some(&bad) = eigenvalues_sq.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(FracError::domain("eigenvalue", bad, "must be positive and finite"));
    }
    if eigenvalues_sq.windows(2).any(|w| w[1] < w[0]) {
        return Err(FracError::Invalid("spectrum must be ascending".into()));
    }
    let m = SparseSymMatrix::identity(eigenvalues_sq.len());
    let a = SparseSymMatrix::from_diagonal(eigenvalues_sq);
    Ok(Pencil::new(m, a)?.with_eigenvalues(eigenvalues_sq.to_vec()))
}

/// Dirichlet Laplacian eigenvalues of the unit square, `π²(i² + j²) ≤ upper`,
/// ascending (ties ordered by `(i, j)`).
pub fn unit_square_spectrum(upper: f64) -> Vec<f64> {
    let pi2 = PI * PI;
    let imax = (upper / pi2).sqrt().floor() as usize + 1;
    let mut vals: Vec<(f64, usize, usize)> = (1..=imax)
        .flat_map(|i| (1..=imax).map(move |j| (i, j)))
        .map(|(i, j)| (pi2 * (i * i + j * j) as f64, i, j))
        .filter(|&(v, _, _)| v <= upper)
        .collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    vals.into_iter().map(|(v, _, _)| v).collect()
}

/// `u = Σ_{k < active_count} c_k φ_k` with `c_k` uniform in `(−1, 1)`,
/// drawn in order of ascending eigenvalue from the documented generator.
pub fn random_combination(oracle: &SpectralOracle, active_count: usize, seed: u64) -> Result<Vec<f64>> {
    let n = oracle.n();
    if active_count > n {
        return Err(FracError::Invalid(format!(
            "active_count {active_count} exceeds dimension {n}"
        )));
    }
    let mut rng = XorShift64Star::new(seed);
    let mut u = vec![0.0; n];
    for k in 0..active_count {
        let c = rng.uniform(-1.0, 1.0);
        crate::linalg::axpy(c, oracle.eigenvector(k), &mut u);
    }
    Ok(u)
}

/// Nodal vector with entries uniform in `(−1, 1)`.
pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    XorShift64Star::new(seed).vector(n, -1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fem_1d_assembly() {
        let p = laplace_1d_fem(2).unwrap();
        let h = 1.0 / 3.0;
        assert!((p.stiffness().get(0, 0) - 2.0 / h).abs() < 1e-14);
        assert!((p.stiffness().get(0, 1) + 1.0 / h).abs() < 1e-14);
        assert!((p.mass().get(1, 1) - 4.0 * h / 6.0).abs() < 1e-15);
        assert!((p.mass().get(1, 0) - h / 6.0).abs() < 1e-15);
        assert!(laplace_1d_fem(1).is_err());
    }

    #[test]
    fn fem_1d_continuum_limit() {
        let p = laplace_1d_fem(256).unwrap();
        let l1 = p.exact_eigenvalues().unwrap()[0];
        assert!((l1 - PI * PI).abs() < 0.01 * PI * PI);
    }

    #[test]
    fn fd_2d_structure() {
        let n = 4;
        let p = laplace_2d_fd(n).unwrap();
        let h = 1.0 / 5.0;
        let ones = vec![1.0; n * n];
        let sums = p.stiffness().spmv(&ones).unwrap();
        // corner: diagonal 4/h² with two neighbours
        assert!((sums[0] - 2.0 / (h * h)).abs() < 1e-10);
        // interior node (1,1) has all four neighbours
        assert!(sums[n + 1].abs() < 1e-10);
        assert!(p.mass().is_identity());
        assert!(laplace_2d_fd(1).is_err());
    }

    #[test]
    fn fd_2d_continuum_limit() {
        let p = laplace_2d_fd(64).unwrap();
        let l1 = p.exact_eigenvalues().unwrap()[0];
        assert!((l1 - 2.0 * PI * PI).abs() < 0.02 * 2.0 * PI * PI);
    }

    #[test]
    fn synthetic_validation() {
        let p = synthetic_diagonal(&[1.0]).unwrap();
        assert_eq!(p.n(), 1);
        assert_eq!(p.exact_eigenvalues().unwrap(), &[1.0]);
        assert!(synthetic_diagonal(&[1.0, -2.0]).is_err());
        assert!(synthetic_diagonal(&[2.0, 1.0]).is_err());
        assert!(synthetic_diagonal(&[]).is_err());
    }

    #[test]
    fn unit_square_spectrum_matches_reference_setup() {
        let spec = unit_square_spectrum(4200.0);
        assert!(spec.len() >= 300);
        assert!((spec[0] - 2.0 * PI * PI).abs() < 1e-12);
        assert!((spec[1] - 5.0 * PI * PI).abs() < 1e-12);
        assert_eq!(spec[1], spec[2]);
        assert!(*spec.last().unwrap() <= 4200.0);
        assert!(spec.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pencil_dimension_mismatch() {
        let r = Pencil::new(SparseSymMatrix::identity(2), SparseSymMatrix::identity(3));
        assert!(r.is_err());
        let indefinite = SparseSymMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(Pencil::new(SparseSymMatrix::identity(2), indefinite).is_err());
    }

    #[test]
    fn random_vector_is_deterministic() {
        assert_eq!(random_vector(17, 3), random_vector(17, 3));
        assert_ne!(random_vector(17, 3), random_vector(17, 4));
    }
}
