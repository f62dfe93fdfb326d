//! Browser demo bindings. The plain functions are the testable core; the
//! `wasm32` exports wrap them for `www/index.html`.

use fracrb::models::{laplace_1d_fem, random_vector};
use fracrb::oracle::{error_sweep, full_eig, minmax_product, GridKind, Truth};
use fracrb::rbm::{RbOptions, ReducedBasis};
use fracrb::specfun::cstar;
use fracrb::zolotarev::{transformed_points, SpectralInterval};

#[cfg(target_arch = "wasm32")]
use wasm_bindgen::prelude::{wasm_bindgen, JsError};

const MAX_N: usize = 400;
const MAX_R: usize = 60;

fn check(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

/// Samples of the Zolotarëv product on `[δ, 1]`, geometric in `x`:
/// `[x₀, p₀, x₁, p₁, …]`, followed by the bound `2e^{−C* r}` and the
/// observed maximum.
pub fn product_curve(delta: f64, r: usize, samples: usize) -> Result<Vec<f64>, String> {
    check((1..=MAX_R).contains(&r), "r must lie in 1..=60")?;
    check((2..=20_000).contains(&samples), "samples must lie in 2..=20000")?;
    let bound = 2.0 * (-cstar(delta).map_err(|e| e.to_string())? * r as f64).exp();
    let points = transformed_points(1.0, 1.0 / delta, r).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * samples + 2);
    let (lo, hi) = (delta.ln(), 0.0);
    for i in 0..samples {
        let x = (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp();
        let p: f64 = points.iter().map(|z| ((1.0 - z * x) / (1.0 + z * x)).abs()).product();
        out.extend([x, p]);
    }
    let max = minmax_product(&points, delta, 1.0, 20_000, GridKind::Geometric)
        .map_err(|e| e.to_string())?
        .max;
    out.extend([bound, max]);
    Ok(out)
}

/// Relative errors of the reduced norm and operator on the 1D model with a
/// random argument: `[r, E^Norm/‖u‖₁², E^Op/‖u‖₂, …]` for `r = 1..=r_max`,
/// followed by `C*`.
pub fn convergence_curve(n: usize, s: f64, r_max: usize, seed: u64) -> Result<Vec<f64>, String> {
    check((2..=MAX_N).contains(&n), "n must lie in 2..=400")?;
    check(s > 0.0 && s < 1.0, "s must lie in (0, 1)")?;
    check((1..=MAX_R).contains(&r_max), "r must lie in 1..=60")?;
    let pencil = laplace_1d_fem(n).map_err(|e| e.to_string())?;
    let oracle = full_eig(&pencil).map_err(|e| e.to_string())?;
    let e = pencil.exact_eigenvalues().expect("closed-form spectrum");
    let iv = SpectralInterval::new(e[0], e[e.len() - 1]).map_err(|e| e.to_string())?;
    let u = random_vector(n, seed);
    let r: Vec<usize> = (1..=r_max).collect();
    let recs = error_sweep(&pencil, &u, &iv, &[s], &r, &RbOptions::default(), Truth::Oracle(&oracle))
        .map_err(|e| e.to_string())?;
    let mut out: Vec<f64> = recs
        .iter()
        .flat_map(|rec| [rec.r as f64, rec.e_norm / (rec.norm_u_1 * rec.norm_u_1), rec.e_op / rec.norm_u_2])
        .collect();
    out.push(iv.cstar().map_err(|e| e.to_string())?);
    Ok(out)
}

/// `(M⁻¹A)^s` applied to the indicator of `[a, b]` on the 1D model:
/// `[u₁ … u_n, v₁ … v_n]` at the interior nodes `x_i = i/(n+1)`.
pub fn fractional_profile(n: usize, s: f64, r: usize, a: f64, b: f64) -> Result<Vec<f64>, String> {
    check((2..=MAX_N * 10).contains(&n), "n must lie in 2..=4000")?;
    check((0.0..=1.0).contains(&s), "s must lie in [0, 1]")?;
    check((1..=MAX_R).contains(&r), "r must lie in 1..=60")?;
    let h = 1.0 / (n + 1) as f64;
    let u: Vec<f64> = (1..=n)
        .map(|i| {
            let x = i as f64 * h;
            if x >= a && x <= b {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    check(u.iter().any(|&v| v != 0.0), "the interval [a, b] contains no node")?;
    let pencil = laplace_1d_fem(n).map_err(|e| e.to_string())?;
    let e = pencil.exact_eigenvalues().expect("closed-form spectrum");
    let iv = SpectralInterval::new(e[0], e[e.len() - 1]).map_err(|e| e.to_string())?;
    let basis = ReducedBasis::build_zolotarev(&pencil, &u, &iv, r, &RbOptions::default()).map_err(|e| e.to_string())?;
    let v = basis
        .apply_in(s, fracrb::rbm::OrderRange::Closed)
        .map_err(|e| e.to_string())?;
    Ok(u.into_iter().chain(v).collect())
}

#[cfg(target_arch = "wasm32")]
#[wasm_bindgen(js_name = productCurve)]
pub fn product_curve_js(delta: f64, r: usize, samples: usize) -> Result<Vec<f64>, JsError> {
    product_curve(delta, r, samples).map_err(|e| JsError::new(&e))
}

#[cfg(target_arch = "wasm32")]
#[wasm_bindgen(js_name = convergenceCurve)]
pub fn convergence_curve_js(n: usize, s: f64, r_max: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    convergence_curve(n, s, r_max, seed as u64).map_err(|e| JsError::new(&e))
}

#[cfg(target_arch = "wasm32")]
#[wasm_bindgen(js_name = fractionalProfile)]
pub fn fractional_profile_js(n: usize, s: f64, r: usize, a: f64, b: f64) -> Result<Vec<f64>, JsError> {
    fractional_profile(n, s, r, a, b).map_err(|e| JsError::new(&e))
}
