use std::f64::consts::PI;

use crate::error::{FracError, Result};
use crate::linalg::{cg_shifted_solve, dot, lambda_max_estimate, lambda_min_estimate};
use crate::models::Pencil;

const GL_ORDER: usize = 10;
const MAX_DEPTH: u32 = 40;
const SOLVE_TOL: f64 = 1e-12;
const CUTOFF: f64 = 1e8;

/// Gauss-Legendre nodes and weights on `[−1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// `K²(t; u) = ‖u − x‖₀² + t²‖x‖₁²` at the minimizer `x = (M + t²A)⁻¹ M u`.
///
/// Evaluated as `t² xᵀ A u`, which equals `uᵀMu − uᵀMx` but does not lose
/// digits to cancellation when `t` is small.
pub fn k_functional_sq(pencil: &Pencil, u: &[f64], t: f64, rel_tol: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(FracError::domain("t", t, "must be finite and nonnegative"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let mu = pencil.mass().spmv(u)?;
    let x = cg_shifted_solve(pencil.mass(), pencil.stiffness(), t, &mu, rel_tol)?;
    let au = pencil.stiffness().spmv(u)?;
    Ok((t * t * dot(&x, &au)).max(0.0))
}

struct Integrand<'a> {
    pencil: &'a Pencil,
    u: &'a [f64],
    s: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Integrand<'_> {
    /// `∫_a^b e^{−2sτ} K²(e^τ) dτ`
    fn panel(&self, a: f64, b: f64) -> Result<f64> {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let tau = mid + half * x;
            let k2 = k_functional_sq(self.pencil, self.u, tau.exp(), SOLVE_TOL)?;
            acc += w * (-2.0 * self.s * tau).exp() * k2;
        }
        Ok(half * acc)
    }
}

/// `‖u‖_K = (∫₀^∞ t^{−2s−1} K²(t; u) dt)^{1/2}`.
///
/// With `t = e^τ` the integrand is smooth; `[T₋, T₊]` is covered by
/// adaptive Gauss-Legendre panels and the two tails are added in closed
/// form from `K² ≈ t²‖u‖₁²` below `T₋ = ln(10⁻⁸/λ_N)` and `K² ≈ ‖u‖₀²`
/// above `T₊ = ln(10⁸/λ₁)`.
pub fn k_norm_quadrature(pencil: &Pencil, u: &[f64], s: f64, quad_tol: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(FracError::domain("s", s, "must lie in (0, 1)"));
    }
    if !(quad_tol > 0.0 && quad_tol < 1.0) {
        return Err(FracError::domain("quad_tol", quad_tol, "must lie in (0, 1)"));
    }
    if u.len() != pencil.n() {
        return Err(FracError::Dimension {
            expected: pencil.n(),
            found: u.len(),
        });
    }
    let (lo, hi) = match pencil.exact_eigenvalues() {
        Some(e) => (e[0], e[e.len() - 1]),
        None => (
            lambda_min_estimate(pencil.mass(), pencil.stiffness(), 1e-6)?,
            lambda_max_estimate(pencil.mass(), pencil.stiffness(), 1e-6)?,
        ),
    };
    let t_plus = (CUTOFF / lo.sqrt()).ln();
    let t_minus = (1.0 / (CUTOFF * hi.sqrt())).ln();

    let n0 = pencil.norm0(u)?;
    let n1 = pencil.norm1(u)?;
    let tails = n0 * n0 * (-2.0 * s * t_plus).exp() / (2.0 * s)
        + n1 * n1 * ((2.0 - 2.0 * s) * t_minus).exp() / (2.0 - 2.0 * s);

    let (nodes, weights) = gauss_legendre(GL_ORDER);
    let f = Integrand {
        pencil,
        u,
        s,
        nodes,
        weights,
    };

    let panels = (t_plus - t_minus).ceil().max(1.0) as usize;
    let width = (t_plus - t_minus) / panels as f64;
    let mut coarse = Vec::with_capacity(panels);
    for i in 0..panels {
        let a = t_minus + i as f64 * width;
        let b = if i + 1 == panels { t_plus } else { a + width };
        coarse.push((a, b, f.panel(a, b)?, 0u32));
    }
    let scale = coarse.iter().map(|p| p.2).sum::<f64>() + tails;

    let mut total = tails;
    let mut stack: Vec<_> = coarse.into_iter().rev().collect();
    while let Some((a, b, whole, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = f.panel(a, m)?;
        let right = f.panel(m, b)?;
        let refined = left + right;
        let err = (refined - whole).abs();
        if err <= quad_tol * refined.abs().max(1e-3 * scale) {
            total += refined;
        } else if depth >= MAX_DEPTH {
            return Err(FracError::NotConverged {
                method: "K-norm quadrature",
                iterations: depth as usize,
                residual: err / scale,
            });
        } else {
            stack.push((m, b, right, depth + 1));
            stack.push((a, m, left, depth + 1));
        }
    }
    Ok(total.sqrt())
}
