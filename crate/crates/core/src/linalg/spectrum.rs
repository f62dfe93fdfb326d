use super::{dot, pcg, SparseSymMatrix, CG_MIN_ITERATIONS};
use crate::error::{FracError, Result};
use crate::rng::XorShift64Star;

/// Relative safety margin applied to power-iteration estimates.
pub const SAFETY_FACTOR: f64 = 0.05;

const MAX_POWER_STEPS: usize = 10_000;
const INNER_TOL: f64 = 1e-12;
const START_SEED: u64 = 0x5eed;

fn check_pair(m: &SparseSymMatrix, a: &SparseSymMatrix, tol: f64) -> Result<()> {
    if m.n() != a.n() {
        return Err(FracError::Dimension {
            expected: m.n(),
            found: a.n(),
        });
    }
    if m.n() == 0 {
        return Err(FracError::Invalid("empty pencil".into()));
    }
    if !(tol > 0.0 && tol < 0.1) {
        return Err(FracError::domain("tol", tol, "must lie in (0, 0.1)"));
    }
    Ok(())
}

/// Solves `Q z = y` (diagonal shortcut when `Q` is diagonal).
fn solve(q: &SparseSymMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let diag = q.diagonal();
    if q.nnz() == q.n() {
        return Ok(y.iter().zip(&diag).map(|(v, d)| v / d).collect());
    }
    let max_iter = (10 * q.n()).max(CG_MIN_ITERATIONS);
    pcg(|x, out| q.spmv_into(x, out), &diag, y, INNER_TOL, max_iter)
}

/// Rayleigh-quotient iteration driver shared by both estimates.
/// `step` maps the current vector to the next (unnormalized) iterate.
fn iterate<F>(m: &SparseSymMatrix, a: &SparseSymMatrix, tol: f64, step: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = m.n();
    let mut x = XorShift64Star::new(START_SEED).vector(n, -1.0, 1.0);
    let mut prev = f64::NAN;
    let mut mx = vec![0.0; n];
    let mut ax = vec![0.0; n];
    for _ in 0..MAX_POWER_STEPS {
        m.spmv_into(&x, &mut mx);
        let mnorm = dot(&x, &mx).sqrt();
        if !(mnorm > 0.0) {
            return Err(FracError::Invalid("power iteration collapsed to zero".into()));
        }
        x.iter_mut().for_each(|v| *v /= mnorm);
        a.spmv_into(&x, &mut ax);
        let rho = dot(&x, &ax);
        if (rho - prev).abs() < tol * rho.abs() {
            return Ok(rho);
        }
        prev = rho;
        x = step(&x)?;
    }
    Err(FracError::NotConverged {
        method: "power iteration",
        iterations: MAX_POWER_STEPS,
        residual: f64::NAN,
    })
}

/// Upper bound for the largest generalized eigenvalue of `A x = λ² M x`:
/// power iteration estimate, inflated by 5% and shifted by one.
pub fn lambda_max_estimate(m: &SparseSymMatrix, a: &SparseSymMatrix, tol: f64) -> Result<f64> {
    check_pair(m, a, tol)?;
    let rho = iterate(m, a, tol, |x| solve(m, &a.spmv(x)?))?;
    Ok(rho * (1.0 + SAFETY_FACTOR) + 1.0)
}

/// Lower bound for the smallest generalized eigenvalue: inverse iteration
/// estimate, deflated by 5%.
pub fn lambda_min_estimate(m: &SparseSymMatrix, a: &SparseSymMatrix, tol: f64) -> Result<f64> {
    check_pair(m, a, tol)?;
    let rho = iterate(m, a, tol, |x| solve(a, &m.spmv(x)?))?;
    Ok(rho * (1.0 - SAFETY_FACTOR))
}
