//! Zolotarëv points and the snapshot times derived from them.

use crate::error::{FracError, Result};
use crate::specfun::{cstar, EllipticModulus};

/// Two snapshot times closer than this (relative) count as one.
const COLLISION_RTOL: f64 = 1e-14;

/// Enclosure `[λ_L², λ_U²]` of the generalized spectrum of a pencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralInterval {
    lambda_l_sq: f64,
    lambda_u_sq: f64,
}

impl SpectralInterval {
    pub fn new(lambda_l_sq: f64, lambda_u_sq: f64) -> Result<Self> {
        if !(lambda_l_sq > 0.0 && lambda_l_sq.is_finite()) {
            return Err(FracError::domain("lambda_l_sq", lambda_l_sq, "must be positive"));
        }
        if !(lambda_u_sq > lambda_l_sq && lambda_u_sq.is_finite()) {
            return Err(FracError::domain(
                "lambda_u_sq",
                lambda_u_sq,
                "must exceed the lower bound",
            ));
        }
        Ok(Self {
            lambda_l_sq,
            lambda_u_sq,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lambda_l_sq
    }

    pub fn upper(&self) -> f64 {
        self.lambda_u_sq
    }

    /// `δ = λ_L² / λ_U²`, the inverse condition number of the enclosure.
    pub fn delta(&self) -> f64 {
        self.lambda_l_sq / self.lambda_u_sq
    }

    /// The reciprocal interval `[λ_U⁻², λ_L⁻²]` on which the squared
    /// snapshot times live.
    pub fn inverse(&self) -> (f64, f64) {
        (1.0 / self.lambda_u_sq, 1.0 / self.lambda_l_sq)
    }

    pub fn cstar(&self) -> Result<f64> {
        cstar(self.delta())
    }
}

/// Ascending snapshot times `0 = t₀ < t₁ < … < t_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotTimes(Vec<f64>);

impl SnapshotTimes {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        match times.first() {
            Some(&t0) if t0 == 0.0 => {}
            Some(&t0) => return Err(FracError::domain("t0", t0, "first snapshot time must be 0")),
            None => return Err(FracError::Invalid("empty snapshot time list".into())),
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(FracError::domain(
                    "t",
                    w[1],
                    "snapshot times must be finite and strictly increasing",
                ));
            }
        }
        Ok(Self(times))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Number of nonzero times.
    pub fn r(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Zolotarëv points `Z₁ < … < Z_r` on `[δ, 1]`:
/// `Z_j = dn(((2(r−j)+1)/(2r)) K(δ'), δ')` with `δ' = √(1 − δ²)`.
pub fn zolotarev_points(delta: f64, r: usize) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(FracError::domain("delta", delta, "must lie in (0, 1)"));
    }
    // dn has range [δ, 1] exactly when the complementary modulus is δ.
    let modulus = EllipticModulus::from_kprime(delta)?;
    let quarter = modulus.complete_integral();
    let denom = 2.0 * r as f64;
    Ok((1..=r)
        .map(|j| {
            let frac = (2 * (r - j) + 1) as f64 / denom;
            modulus.dn(frac * quarter)
        })
        .collect())
}

/// Zolotarëv points transported to `[a, b]`: `Ẑ_j = b · Z_j` with `Z_j`
/// the points on `[a/b, 1]`.
pub fn transformed_points(a: f64, b: f64, r: usize) -> Result<Vec<f64>> {
    if !(a > 0.0) {
        return Err(FracError::domain("a", a, "must be positive"));
    }
    if !(b > a) || !b.is_finite() {
        return Err(FracError::domain("b", b, "must exceed a"));
    }
    Ok(zolotarev_points(a / b, r)?
        .into_iter()
        .map(|z| b * z)
        .collect())
}

/// Snapshot times of a Zolotarëv space: `t₀ = 0` and `t_j = √Ẑ_j` for the
/// transformed points on `[λ_U⁻², λ_L⁻²]`.
///
/// Times that coincide to within rounding are merged, so the result may
/// hold fewer than `r + 1` entries for nearly degenerate intervals.
pub fn snapshot_times(interval: &SpectralInterval, r: usize) -> Result<SnapshotTimes> {
    let (a, b) = interval.inverse();
    let mut times = Vec::with_capacity(r + 1);
    times.push(0.0);
    for z in transformed_points(a, b, r)? {
        let t = z.sqrt();
        let last = *times.last().unwrap();
        if t - last > COLLISION_RTOL * t {
            times.push(t);
        }
    }
    SnapshotTimes::new(times)
}

/// Smallest `r` for which the bound `2 e^{−C* r}` drops below `eps`.
pub fn r_for_tolerance(eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(FracError::domain("eps", eps, "must lie in (0, 2)"));
    }
    let c = cstar(delta)?;
    if c.is_infinite() {
        return Ok(1);
    }
    Ok(((2.0 / eps).ln() / c).ceil().max(1.0) as usize)
}
