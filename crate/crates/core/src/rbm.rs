//! Reduced basis evaluation of fractional norms and fractional operator
//! actions.
//!
//! For an argument `u` the reduced space is spanned by the snapshots
//! `(M + t_j² A)⁻¹ M u`, `j = 0..r`, with `t₀ = 0` so that `u` itself is the
//! first snapshot. After `M`-orthonormalization into `V`, the projected
//! stiffness `A_r = Vᵀ A V` is diagonalized once (offline); every fractional
//! order `s` then only needs `A_r^s e₁` (online):
//!
//! ```text
//! ‖u‖_{H_r^s} = β ‖e₁‖_{A_r^s},     L_r^s u = β V A_r^s e₁,     β = ‖u‖₀
//! ```

use rayon::prelude::*;

use crate::error::{FracError, Result};
use crate::linalg::{cg_shifted_solve, dot, gram_schmidt_m, sym_eig, DenseSymMatrix, EigenDecomposition};
use crate::models::Pencil;
use crate::zolotarev::{snapshot_times, SnapshotTimes, SpectralInterval};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbOptions {
    /// Relative residual target of each snapshot solve.
    pub rel_tol: f64,
    /// Relative `M`-norm below which an orthogonalized snapshot is dropped.
    pub drop_tol: f64,
}

impl Default for RbOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            drop_tol: 1e-10,
        }
    }
}

/// Admissible fractional orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderRange {
    /// `s ∈ (0, 1)`.
    #[default]
    Open,
    /// `s ∈ [0, 1]`; the endpoints reproduce `‖u‖₀` and `‖u‖₁`.
    Closed,
}

impl OrderRange {
    pub fn check(self, s: f64) -> Result<()> {
        let ok = match self {
            OrderRange::Open => s > 0.0 && s < 1.0,
            OrderRange::Closed => (0.0..=1.0).contains(&s),
        };
        if ok {
            Ok(())
        } else {
            Err(FracError::domain("s", s, "fractional order out of range"))
        }
    }
}

/// Snapshots `(M + t_j² A)⁻¹ M u`; the `t₀ = 0` entry is `u` itself.
///
/// Solves run in parallel and are returned in the order of `times`.
pub fn solve_snapshots(pencil: &Pencil, u: &[f64], times: &SnapshotTimes, rel_tol: f64) -> Result<Vec<Vec<f64>>> {
    if u.len() != pencil.n() {
        return Err(FracError::Dimension {
            expected: pencil.n(),
            found: u.len(),
        });
    }
    if u.iter().all(|&x| x == 0.0) {
        return Err(FracError::Invalid("argument u must be nonzero".into()));
    }
    let mu = pencil.mass().spmv(u)?;
    let rest: Vec<Vec<f64>> = times.as_slice()[1..]
        .par_iter()
        .map(|&t| {
            cg_shifted_solve(pencil.mass(), pencil.stiffness(), t, &mu, rel_tol).map_err(|e| {
                FracError::Snapshot {
                    t,
                    source: Box::new(e),
                }
            })
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(times.len());
    out.push(u.to_vec());
    out.extend(rest);
    Ok(out)
}

/// An `M`-orthonormal reduced basis bound to the argument it was built from.
#[derive(Debug, Clone)]
pub struct ReducedBasis {
    times: SnapshotTimes,
    argument: Vec<f64>,
    columns: Vec<Vec<f64>>,
    a_r: DenseSymMatrix,
    eig: EigenDecomposition,
    beta: f64,
    projected_u: Vec<f64>,
}

impl ReducedBasis {
    pub fn build(pencil: &Pencil, u: &[f64], times: &SnapshotTimes, opts: &RbOptions) -> Result<Self> {
        let snapshots = solve_snapshots(pencil, u, times, opts.rel_tol)?;
        let ortho = gram_schmidt_m(&snapshots, pencil.mass(), opts.drop_tol)?;
        let kept = ortho.kept();
        let a_cols: Vec<Vec<f64>> = ortho
            .columns()
            .iter()
            .map(|v| pencil.stiffness().spmv(v))
            .collect::<Result<_>>()?;
        let cols = ortho.columns();
        let a_r = DenseSymMatrix::from_fn(kept, |i, j| dot(&cols[i], &a_cols[j]))?;
        let eig = sym_eig(&a_r);
        let projected_u: Vec<f64> = ortho.m_columns().iter().map(|mv| dot(mv, u)).collect();
        let beta = pencil.norm0(u)?;
        Ok(Self {
            times: times.clone(),
            argument: u.to_vec(),
            columns: ortho.into_columns(),
            a_r,
            eig,
            beta,
            projected_u,
        })
    }

    /// Builds on the Zolotarëv snapshot times of `interval`.
    pub fn build_zolotarev(
        pencil: &Pencil,
        u: &[f64],
        interval: &SpectralInterval,
        r: usize,
        opts: &RbOptions,
    ) -> Result<Self> {
        let times = snapshot_times(interval, r)?;
        Self::build(pencil, u, &times, opts)
    }

    pub fn times(&self) -> &SnapshotTimes {
        &self.times
    }

    pub fn argument(&self) -> &[f64] {
        &self.argument
    }

    /// Dimension of the reduced space.
    pub fn kept(&self) -> usize {
        self.columns.len()
    }

    /// True when Gram-Schmidt discarded snapshots, i.e. the reduced space
    /// already contains every eigencomponent of the argument and the
    /// reduced quantities coincide with the full discrete ones.
    pub fn is_exact(&self) -> bool {
        self.kept() < self.times.len()
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn projected_stiffness(&self) -> &DenseSymMatrix {
        &self.a_r
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// `β = ‖u‖₀`
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `Vᵀ M u`, equal to `β e₁` up to rounding.
    pub fn projected_u(&self) -> &[f64] {
        &self.projected_u
    }

    fn e1(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.kept()];
        e[0] = 1.0;
        e
    }

    pub fn norm(&self, s: f64) -> Result<f64> {
        self.norm_in(s, OrderRange::Open)
    }

    pub fn norm_in(&self, s: f64, range: OrderRange) -> Result<f64> {
        range.check(s)?;
        Ok(self.beta * self.eig.quad_form_pow(s, &self.e1())?.max(0.0).sqrt())
    }

    /// Coefficients of `L_r^s u = β V A_r^s e₁`.
    pub fn apply(&self, s: f64) -> Result<Vec<f64>> {
        self.apply_in(s, OrderRange::Open)
    }

    pub fn apply_in(&self, s: f64, range: OrderRange) -> Result<Vec<f64>> {
        range.check(s)?;
        let coeffs = self.eig.pow_apply(s, &self.e1())?;
        let n = self.argument.len();
        let mut out = vec![0.0; n];
        for (c, v) in coeffs.iter().zip(&self.columns) {
            crate::linalg::axpy(self.beta * c, v, &mut out);
        }
        Ok(out)
    }

    /// Applies the reduced operator to `u`, which must be the argument the
    /// basis was built from: the reduced operator is nonlinear in `u`.
    pub fn apply_to(&self, u: &[f64], s: f64) -> Result<Vec<f64>> {
        if u != self.argument.as_slice() {
            return Err(FracError::Invalid(
                "reduced basis was built for a different argument".into(),
            ));
        }
        self.apply(s)
    }
}

pub fn rb_norm(basis: &ReducedBasis, s: f64) -> Result<f64> {
    basis.norm(s)
}

pub fn rb_apply(basis: &ReducedBasis, pencil: &Pencil, s: f64) -> Result<Vec<f64>> {
    if pencil.n() != basis.argument.len() {
        return Err(FracError::Dimension {
            expected: basis.argument.len(),
            found: pencil.n(),
        });
    }
    basis.apply(s)
}

/// Result of one online evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FracResult {
    pub s: f64,
    pub norm: Option<f64>,
    pub action: Option<Vec<f64>>,
    /// Reduced space dimension.
    pub kept: usize,
    pub exact: bool,
}

/// One offline basis build followed by an online evaluation per `s`.
pub fn rb_eval_many(
    pencil: &Pencil,
    u: &[f64],
    interval: &SpectralInterval,
    r: usize,
    s_list: &[f64],
    opts: &RbOptions,
) -> Result<Vec<FracResult>> {
    if s_list.is_empty() {
        return Err(FracError::Invalid("empty list of fractional orders".into()));
    }
    for &s in s_list {
        OrderRange::Open.check(s)?;
    }
    let basis = ReducedBasis::build_zolotarev(pencil, u, interval, r, opts)?;
    s_list
        .par_iter()
        .map(|&s| {
            Ok(FracResult {
                s,
                norm: Some(basis.norm(s)?),
                action: Some(basis.apply(s)?),
                kept: basis.kept(),
                exact: basis.is_exact(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{laplace_1d_fem, synthetic_diagonal};

    fn diag4() -> Pencil {
        synthetic_diagonal(&[1.0, 4.0, 9.0, 16.0]).unwrap()
    }

    #[test]
    fn zero_time_returns_argument() {
        let p = diag4();
        let u = vec![1.0, 2.0, 3.0, 4.0];
        let snaps = solve_snapshots(&p, &u, &SnapshotTimes::new(vec![0.0]).unwrap(), 1e-12).unwrap();
        assert_eq!(snaps, vec![u]);
    }

    #[test]
    fn diagonal_snapshot_formula() {
        let p = diag4();
        let u = vec![0.0, 0.0, 1.0, 0.0];
        let times = SnapshotTimes::new(vec![0.0, 0.3, 2.0]).unwrap();
        let snaps = solve_snapshots(&p, &u, &times, 1e-12).unwrap();
        for (snap, &t) in snaps.iter().zip(times.as_slice()) {
            let want = 1.0 / (1.0 + t * t * 9.0);
            assert!((snap[2] - want).abs() < 1e-14);
            assert_eq!(snap[0], 0.0);
        }
    }

    #[test]
    fn zero_argument_rejected() {
        let p = diag4();
        let times = SnapshotTimes::new(vec![0.0, 1.0]).unwrap();
        assert!(solve_snapshots(&p, &[0.0; 4], &times, 1e-12).is_err());
        assert!(solve_snapshots(&p, &[1.0; 3], &times, 1e-12).is_err());
    }

    #[test]
    fn single_eigenvector_gives_one_dimensional_space() {
        let p = diag4();
        let u = vec![0.0, 2.0, 0.0, 0.0];
        let interval = SpectralInterval::new(1.0, 16.0).unwrap();
        let basis = ReducedBasis::build_zolotarev(&p, &u, &interval, 5, &RbOptions::default()).unwrap();
        assert_eq!(basis.kept(), 1);
        assert!(basis.is_exact());
        assert!((basis.projected_stiffness().get(0, 0) - 4.0).abs() < 1e-14);
        let s = 0.3;
        assert!((basis.norm(s).unwrap() - 4f64.powf(s / 2.0) * 2.0).abs() < 1e-13);
        let act = basis.apply(s).unwrap();
        assert!((act[1] - 4f64.powf(s) * 2.0).abs() < 1e-13);
    }

    #[test]
    fn exact_half_norm_of_ones() {
        let p = diag4();
        let u = vec![1.0; 4];
        let interval = SpectralInterval::new(1.0, 16.0).unwrap();
        let basis = ReducedBasis::build_zolotarev(&p, &u, &interval, 8, &RbOptions::default()).unwrap();
        assert_eq!(basis.kept(), 4);
        assert!((basis.norm(0.5).unwrap() - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn small_order_limit() {
        let p = diag4();
        let u = vec![1.0, -1.0, 0.5, 2.0];
        let interval = SpectralInterval::new(1.0, 16.0).unwrap();
        let basis = ReducedBasis::build_zolotarev(&p, &u, &interval, 3, &RbOptions::default()).unwrap();
        assert!((basis.norm(1e-8).unwrap() - basis.beta()).abs() < 1e-6);
    }

    #[test]
    fn order_range_enforced() {
        let p = diag4();
        let u = vec![1.0; 4];
        let interval = SpectralInterval::new(1.0, 16.0).unwrap();
        let basis = ReducedBasis::build_zolotarev(&p, &u, &interval, 2, &RbOptions::default()).unwrap();
        assert!(basis.norm(0.0).is_err());
        assert!(basis.apply(1.0).is_err());
        assert!(basis.norm_in(0.0, OrderRange::Closed).is_ok());
        assert!(basis.norm_in(1.2, OrderRange::Closed).is_err());
    }

    #[test]
    fn endpoint_identities() {
        let p = laplace_1d_fem(20).unwrap();
        let u: Vec<f64> = (0..20).map(|i| ((i * 7 % 11) as f64 - 5.0) / 5.0).collect();
        let interval = SpectralInterval::new(9.0, 5000.0).unwrap();
        let basis = ReducedBasis::build_zolotarev(&p, &u, &interval, 4, &RbOptions::default()).unwrap();
        let n0 = p.norm0(&u).unwrap();
        let n1 = p.norm1(&u).unwrap();
        assert!((basis.norm_in(0.0, OrderRange::Closed).unwrap() - n0).abs() < 1e-10 * n0);
        assert!((basis.norm_in(1.0, OrderRange::Closed).unwrap() - n1).abs() < 1e-10 * n1);
        assert!((basis.projected_u()[0] - basis.beta()).abs() < 1e-10 * basis.beta());
        for &c in &basis.projected_u()[1..] {
            assert!(c.abs() < 1e-10 * basis.beta());
        }
    }

    #[test]
    fn basis_is_bound_to_its_argument() {
        let p = diag4();
        let u = vec![1.0; 4];
        let interval = SpectralInterval::new(1.0, 16.0).unwrap();
        let basis = ReducedBasis::build_zolotarev(&p, &u, &interval, 2, &RbOptions::default()).unwrap();
        assert!(basis.apply_to(&u, 0.5).is_ok());
        assert!(basis.apply_to(&[1.0, 1.0, 1.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn eval_many_is_order_independent() {
        let p = laplace_1d_fem(16).unwrap();
        let u: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
        let interval = SpectralInterval::new(9.0, 1200.0).unwrap();
        let opts = RbOptions::default();
        let a = rb_eval_many(&p, &u, &interval, 4, &[0.25, 0.5, 0.75], &opts).unwrap();
        let b = rb_eval_many(&p, &u, &interval, 4, &[0.75, 0.25, 0.5], &opts).unwrap();
        for res in &a {
            let other = b.iter().find(|x| x.s == res.s).unwrap();
            assert_eq!(res, other);
        }
        let single = rb_eval_many(&p, &u, &interval, 4, &[0.5], &opts).unwrap();
        let basis = ReducedBasis::build_zolotarev(&p, &u, &interval, 4, &opts).unwrap();
        assert_eq!(single[0].norm.unwrap(), rb_norm(&basis, 0.5).unwrap());
        assert_eq!(single[0].action.as_ref().unwrap(), &rb_apply(&basis, &p, 0.5).unwrap());
        assert!(rb_eval_many(&p, &u, &interval, 4, &[], &opts).is_err());
        assert!(rb_eval_many(&p, &u, &interval, 4, &[1.0], &opts).is_err());
    }
}
