//! Special functions and the analytic constants of the method.
//!
//! Elliptic functions use the *modulus* convention throughout: `ellipk(k)`
//! is `∫₀^{π/2} dθ / √(1 − k² sin²θ)`, not the parameter form `K(m = k²)`
//! used by some libraries.

use std::f64::consts::PI;

use crate::error::{FracError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Below this complementary modulus the AGM is replaced by the logarithmic
/// expansion of K around k = 1 (corresponds to 1 − k ≲ 1e-12).
const KPRIME_ASYMPTOTIC: f64 = 1.5e-6;

const MAX_AGM_STEPS: usize = 64;
/// Quadratic convergence makes one more step after this exact to rounding.
const GAUSS_RTOL: f64 = 1e-8;

/// Gamma function for positive real arguments (Lanczos, g = 7, n = 9).
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(FracError::domain("x", x, "gamma is only provided for x > 0"));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the series in its accurate range.
        return Ok(lanczos(x + 1.0) / x);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * sum
}

/// Elliptic modulus `k` together with its complement `k' = √(1 − k²)`.
///
/// Both are stored so that moduli close to one can be built from an exactly
/// known complement without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    kprime: f64,
}

impl EllipticModulus {
    pub fn from_k(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(FracError::domain("k", k, "elliptic modulus must lie in [0, 1)"));
        }
        let kprime = ((1.0 - k) * (1.0 + k)).sqrt();
        Ok(Self { k, kprime })
    }

    /// Builds the modulus from its complement `k' ∈ (0, 1]`.
    pub fn from_kprime(kprime: f64) -> Result<Self> {
        if !(kprime > 0.0 && kprime <= 1.0) {
            return Err(FracError::domain(
                "kprime",
                kprime,
                "complementary modulus must lie in (0, 1]",
            ));
        }
        let k = ((1.0 - kprime) * (1.0 + kprime)).sqrt();
        Ok(Self { k, kprime })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kprime(&self) -> f64 {
        self.kprime
    }

    /// Complete elliptic integral of the first kind for this modulus.
    pub fn complete_integral(&self) -> f64 {
        let kp = self.kprime;
        if kp < KPRIME_ASYMPTOTIC {
            let l = (4.0 / kp).ln();
            return l + 0.25 * kp * kp * (l - 1.0);
        }
        PI / (2.0 * agm(1.0, kp))
    }

    /// Bulirsch's descending Gauss transformation, parametrized by the
    /// complementary parameter `k'²`. The backward recurrence for dn has no
    /// cancellation, which keeps it accurate for `k'` down to about 1e-150.
    fn gauss(&self, u: f64) -> (f64, f64, f64) {
        if self.k == 0.0 {
            return (u.sin(), u.cos(), 1.0);
        }
        let mut emc = self.kprime * self.kprime;
        if emc == 0.0 {
            let sech = 1.0 / u.cosh();
            return (u.tanh(), sech, sech);
        }
        let mut em = [0.0f64; MAX_AGM_STEPS];
        let mut en = [0.0f64; MAX_AGM_STEPS];
        let mut a = 1.0;
        let mut c = 1.0;
        let mut l = 0;
        while l < MAX_AGM_STEPS {
            em[l] = a;
            emc = emc.sqrt();
            en[l] = emc;
            c = 0.5 * (a + emc);
            l += 1;
            if (a - emc).abs() <= GAUSS_RTOL * a {
                break;
            }
            emc *= a;
            a = c;
        }
        let w = u * c;
        let (mut sn, mut cn) = w.sin_cos();
        let mut dn = 1.0;
        if sn != 0.0 {
            let mut a = cn / sn;
            let mut c = c * a;
            for i in (0..l).rev() {
                let b = em[i];
                a *= c;
                c *= dn;
                dn = (en[i] + a) / (b + a);
                a = c / b;
            }
            let a = 1.0 / (c * c + 1.0).sqrt();
            sn = if sn >= 0.0 { a } else { -a };
            cn = c * sn;
        }
        (sn, cn, dn)
    }

    /// Jacobi elliptic functions (sn, cn, dn) at `u`.
    pub(crate) fn sn_cn_dn(&self, u: f64) -> (f64, f64, f64) {
        let (sn, cn, _) = self.gauss(u);
        (sn, cn, self.dn(u))
    }

    /// Jacobi `dn(u, k)`. Reduced to `[0, K]` by evenness and the period
    /// `2K`; on `(K/2, K]` the reflection `dn(K − v) = k'/dn(v)` is used.
    pub fn dn(&self, u: f64) -> f64 {
        if self.k == 0.0 {
            return 1.0;
        }
        let quarter = self.complete_integral();
        let mut v = u.abs().rem_euclid(2.0 * quarter);
        if v > quarter {
            v = 2.0 * quarter - v;
        }
        if v <= 0.5 * quarter {
            self.gauss(v).2
        } else {
            self.kprime / self.gauss(quarter - v).2
        }
    }
}

/// Arithmetic-geometric mean, iterated until the two sequences stagnate.
fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind `K(k)`, modulus convention.
pub fn ellipk(k: f64) -> Result<f64> {
    Ok(EllipticModulus::from_k(k)?.complete_integral())
}

/// Jacobi elliptic function `dn(u, k)`, modulus convention.
pub fn jacobi_dn(u: f64, k: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(FracError::domain("u", u, "argument must be finite"));
    }
    Ok(EllipticModulus::from_k(k)?.dn(u))
}

fn check_order(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(FracError::domain("s", s, "fractional order must lie in (0, 1)"))
    }
}

/// Ratio between extension and Hilbert interpolation norms,
/// `d_s = 2^{1−2s} Γ(1−s) / Γ(s)`.
pub fn d_s(s: f64) -> Result<f64> {
    check_order(s)?;
    Ok(2f64.powf(1.0 - 2.0 * s) * gamma(1.0 - s)? / gamma(s)?)
}

/// Ratio between Hilbert and K-method interpolation norms,
/// `C_s = √(2 sin(πs) / π)`.
pub fn c_s(s: f64) -> Result<f64> {
    check_order(s)?;
    Ok((2.0 * (PI * s).sin() / PI).sqrt())
}

/// Rate constant `C*(δ) = π K(μ₁) / (4 K(μ))` with
/// `μ = ((1 − √δ)/(1 + √δ))²` and `μ₁ = √(1 − μ²)`.
///
/// The Zolotarëv product on `[δ, 1]` with `r` points is bounded by
/// `2 e^{−C* r}`. Returns `+∞` when `μ` underflows to zero (δ numerically 1).
pub fn cstar(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(FracError::domain("delta", delta, "must lie in (0, 1)"));
    }
    let q = delta.sqrt();
    let mu = ((1.0 - q) / (1.0 + q)).powi(2);
    if mu == 0.0 {
        return Ok(f64::INFINITY);
    }
    // 1 − μ = 4√δ / (1 + √δ)², so the complement of μ is free of cancellation.
    let one_minus_mu = 4.0 * q / (1.0 + q).powi(2);
    let mu_comp = (one_minus_mu * (1.0 + mu)).sqrt();
    let k_mu = EllipticModulus { k: mu, kprime: mu_comp }.complete_integral();
    // μ₁ has complement μ.
    let k_mu1 = EllipticModulus { k: mu_comp, kprime: mu }.complete_integral();
    Ok(PI * k_mu1 / (4.0 * k_mu))
}

/// The analytic constants that govern a run at fractional order `s` on a
/// spectral interval with ratio `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConstants {
    pub s: f64,
    pub d_s: f64,
    pub c_s: f64,
    pub cstar: f64,
    pub delta: f64,
}

impl RateConstants {
    pub fn new(s: f64, delta: f64) -> Result<Self> {
        Ok(Self {
            s,
            d_s: d_s(s)?,
            c_s: c_s(s)?,
            cstar: cstar(delta)?,
            delta,
        })
    }

    /// Predicted decay rate of the squared-norm error, `2 C*`.
    pub fn norm_rate(&self) -> f64 {
        2.0 * self.cstar
    }
}
