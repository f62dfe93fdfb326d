use rayon::prelude::*;

use super::{h_norm_exact, op_exact, SpectralOracle};
use crate::error::{FracError, Result};
use crate::linalg::{cg_shifted_solve, dot};
use crate::models::Pencil;
use crate::rbm::{RbOptions, ReducedBasis};
use crate::zolotarev::SpectralInterval;

/// Extra snapshots of the surrogate reference beyond the largest tested `r`.
pub const SURROGATE_EXTRA: usize = 20;

const MIN_FIT_POINTS: usize = 4;
/// Errors within this factor of the sweep minimum count as floor.
const PLATEAU_FACTOR: f64 = 10.0;

/// Reference against which reduced quantities are measured.
#[derive(Debug, Clone, Copy)]
pub enum Truth<'a> {
    Oracle(&'a SpectralOracle),
    /// A reduced basis with `max(r_list) + extra` snapshots.
    Surrogate { extra: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub r: usize,
    pub s: f64,
    /// `‖u‖²_{H_r^s} − ‖u‖²_{H^s}`
    pub e_norm: f64,
    /// `‖L_r^s u − L^s u‖₀`
    pub e_op: f64,
    pub norm_u_1: f64,
    /// `‖M⁻¹ A u‖₀`
    pub norm_u_2: f64,
    /// `|‖u‖²_{H_r^s} − uᵀM L_r^s u| / ‖u‖²_{H_r^s}`
    pub consistency: f64,
    pub kept: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorField {
    Norm,
    Op,
}

impl ErrorField {
    fn value(self, rec: &ErrorRecord) -> f64 {
        match self {
            ErrorField::Norm => rec.e_norm,
            ErrorField::Op => rec.e_op,
        }
    }

    fn scale(self, rec: &ErrorRecord) -> f64 {
        match self {
            ErrorField::Norm => rec.norm_u_1 * rec.norm_u_1,
            ErrorField::Op => rec.norm_u_2,
        }
    }
}

struct Reference {
    norm_sq: f64,
    action: Vec<f64>,
}

fn m_norm_diff(pencil: &Pencil, x: &[f64], y: &[f64]) -> Result<f64> {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    pencil.norm0(&d)
}

/// Errors of the reduced norm and operator for every `(s, r)` pair, sorted
/// by `s` then `r`. Bases for different `r` are built in parallel.
pub fn error_sweep(
    pencil: &Pencil,
    u: &[f64],
    interval: &SpectralInterval,
    s_list: &[f64],
    r_list: &[usize],
    opts: &RbOptions,
    truth: Truth<'_>,
) -> Result<Vec<ErrorRecord>> {
    if s_list.is_empty() || r_list.is_empty() {
        return Err(FracError::Invalid("empty s or r list".into()));
    }
    for &s in s_list {
        if !(s > 0.0 && s < 1.0) {
            return Err(FracError::domain("s", s, "must lie in (0, 1)"));
        }
    }
    let references: Vec<Reference> = match truth {
        Truth::Oracle(oracle) => s_list
            .iter()
            .map(|&s| {
                let h = h_norm_exact(oracle, pencil.mass(), u, s)?;
                Ok(Reference {
                    norm_sq: h * h,
                    action: op_exact(oracle, pencil.mass(), u, s)?,
                })
            })
            .collect::<Result<_>>()?,
        Truth::Surrogate { extra } => {
            let r_star = r_list.iter().max().copied().unwrap_or(0) + extra;
            let basis = ReducedBasis::build_zolotarev(pencil, u, interval, r_star, opts)?;
            s_list
                .iter()
                .map(|&s| {
                    let h = basis.norm(s)?;
                    Ok(Reference {
                        norm_sq: h * h,
                        action: basis.apply(s)?,
                    })
                })
                .collect::<Result<_>>()?
        }
    };

    let norm_u_1 = pencil.norm1(u)?;
    let au = pencil.stiffness().spmv(u)?;
    let m_inv_au = cg_shifted_solve(pencil.mass(), pencil.stiffness(), 0.0, &au, opts.rel_tol)?;
    let norm_u_2 = dot(&m_inv_au, &au).max(0.0).sqrt();
    let mu = pencil.mass().spmv(u)?;

    let per_r: Vec<Vec<ErrorRecord>> = r_list
        .par_iter()
        .map(|&r| {
            let basis = ReducedBasis::build_zolotarev(pencil, u, interval, r, opts)?;
            s_list
                .iter()
                .zip(&references)
                .map(|(&s, reference)| {
                    let norm = basis.norm(s)?;
                    let action = basis.apply(s)?;
                    let norm_sq = norm * norm;
                    Ok(ErrorRecord {
                        r,
                        s,
                        e_norm: norm_sq - reference.norm_sq,
                        e_op: m_norm_diff(pencil, &action, &reference.action)?,
                        norm_u_1,
                        norm_u_2,
                        consistency: (norm_sq - dot(&mu, &action)).abs() / norm_sq,
                        kept: basis.kept(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut records: Vec<ErrorRecord> = per_r.into_iter().flatten().collect();
    records.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.r.cmp(&b.r)));
    Ok(records)
}

/// Decay rate `c` of `e ≈ C e^{−c r}`: negated least-squares slope of
/// `ln e` against `r` over the leading run of records above the floor.
///
/// The floor is the larger of `100 · solve_tol · scale` (`scale = ‖u‖₁²`
/// for norms, `‖u‖₂` for operators) and ten times the smallest error in
/// the sweep. The second term catches the roundoff plateau that inexact
/// snapshots produce well above the solver tolerance. All records must
/// share one `s`.
pub fn fit_rate(records: &[ErrorRecord], field: ErrorField, solve_tol: f64) -> Result<f64> {
    if let Some(first) = records.first() {
        if records.iter().any(|r| r.s != first.s) {
            return Err(FracError::Invalid("fit_rate needs records of a single s".into()));
        }
    }
    let mut sorted: Vec<&ErrorRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.r);
    let plateau = PLATEAU_FACTOR
        * sorted
            .iter()
            .map(|rec| field.value(rec))
            .filter(|&e| e > 0.0)
            .fold(f64::INFINITY, f64::min);
    let pts: Vec<(f64, f64)> = sorted
        .iter()
        .map(|rec| {
            let floor = (100.0 * solve_tol * field.scale(rec)).max(plateau);
            (rec.r as f64, field.value(rec), floor)
        })
        .take_while(|&(_, e, floor)| e > floor && e > 0.0)
        .map(|(r, e, _)| (r, e.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(FracError::Invalid(format!(
            "only {} error values above the numerical floor, need at least {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(-sxy / sxx)
}

/// [`fit_rate`] for each distinct `s` in the (sorted) records.
pub fn fit_rates_by_s(records: &[ErrorRecord], field: ErrorField, solve_tol: f64) -> Vec<(f64, Result<f64>)> {
    let mut out = Vec::new();
    for group in records.chunk_by(|a, b| a.s == b.s) {
        out.push((group[0].s, fit_rate(group, field, solve_tol)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::synthetic_diagonal;
    use crate::oracle::full_eig;

    fn rec(r: usize, e: f64) -> ErrorRecord {
        ErrorRecord {
            r,
            s: 0.5,
            e_norm: e,
            e_op: e,
            norm_u_1: 1.0,
            norm_u_2: 1.0,
            consistency: 0.0,
            kept: r + 1,
        }
    }

    #[test]
    fn exact_exponential_fit() {
        let recs: Vec<_> = (1..=10).map(|r| rec(r, (-0.5 * r as f64).exp())).collect();
        let rate = fit_rate(&recs, ErrorField::Norm, 1e-14).unwrap();
        assert!((rate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn floor_points_excluded() {
        let recs: Vec<_> = (1..=40).map(|r| rec(r, (-(r as f64)).exp().max(1e-12))).collect();
        let rate = fit_rate(&recs, ErrorField::Op, 1e-13).unwrap();
        assert!((rate - 1.0).abs() < 1e-12);
        // a roundoff plateau far above the solver floor
        let noisy: Vec<_> = (1..=40)
            .map(|r| rec(r, (-(r as f64)).exp().max(1e-6 * (1.0 + 0.3 * (r as f64).sin()))))
            .collect();
        let rate = fit_rate(&noisy, ErrorField::Op, 1e-13).unwrap();
        assert!((rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let recs: Vec<_> = (1..=3).map(|r| rec(r, (-(r as f64)).exp())).collect();
        assert!(fit_rate(&recs, ErrorField::Norm, 1e-12).is_err());
        assert!(fit_rate(&[rec(5, 0.1)], ErrorField::Norm, 1e-12).is_err());
    }

    #[test]
    fn exact_regime_and_sorting() {
        let p = synthetic_diagonal(&[1.0, 4.0, 9.0, 16.0]).unwrap();
        let o = full_eig(&p).unwrap();
        let interval = SpectralInterval::new(1.0, 16.0).unwrap();
        let u = vec![1.0, -0.5, 0.25, 2.0];
        let recs = error_sweep(
            &p,
            &u,
            &interval,
            &[0.75, 0.25],
            &[5, 3, 4],
            &RbOptions::default(),
            Truth::Oracle(&o),
        )
        .unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!((recs[0].s, recs[0].r), (0.25, 3));
        assert_eq!((recs[5].s, recs[5].r), (0.75, 5));
        for r in &recs {
            assert!(r.e_norm.abs() <= 1e-9 && r.e_op <= 1e-9, "{r:?}");
            assert!(r.consistency < 1e-12);
        }
        assert!((recs[0].norm_u_2 - (1.0f64 + 4.0 + 81.0 / 16.0 + 1024.0).sqrt()).abs() < 1e-10);
    }
}
