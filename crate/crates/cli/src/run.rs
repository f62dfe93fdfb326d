//! Subcommand implementations. Each writes its CSV in one piece so the
//! bytes do not depend on scheduling.

use std::fmt::Write as _;
use std::path::Path;

use fracrb::models::{
    laplace_1d_fem, laplace_2d_fd, load_matrix_market, random_combination, random_vector,
    synthetic_diagonal, unit_square_spectrum, Pencil,
};
use fracrb::oracle::{
    error_sweep, fit_rate, full_eig, k_norm_quadrature, ErrorField, SpectralOracle, Truth, SURROGATE_EXTRA,
};
use fracrb::rbm::{rb_eval_many, RbOptions};
use fracrb::specfun::c_s;
use fracrb::verify::run_suite;
use fracrb::zolotarev::{transformed_points, zolotarev_points, SpectralInterval};

use crate::config::Settings;
use crate::Failure;

/// Largest dimension for which `truth = auto` runs the dense oracle.
pub const ORACLE_MAX_N: usize = 1024;
/// Tolerance of the power and inverse iterations behind auto bounds.
pub const ESTIMATE_TOL: f64 = 1e-8;
const DEFAULT_SEED: u64 = 1;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(settings: &Settings, key: &str, text: &str) -> Result<(), Failure> {
    match settings.str(key) {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_pencil(settings: &Settings) -> Result<Pencil, Failure> {
    let problem = settings.str("problem").unwrap_or("laplace1d");
    let pencil = match problem {
        "laplace1d" => laplace_1d_fem(settings.require("n")?)?,
        "laplace2d" => laplace_2d_fd(settings.require("n")?)?,
        "diagonal" => {
            let spec = settings
                .str("spectrum")
                .ok_or_else(|| Failure::usage("diagonal problem needs `spectrum`"))?;
            let eigs = match spec.strip_prefix("square:") {
                Some(upper) => {
                    let upper: f64 = upper
                        .trim()
                        .parse()
                        .map_err(|_| Failure::usage(format!("spectrum: cannot parse {upper:?}")))?;
                    unit_square_spectrum(upper)
                }
                None => settings.f64_list("spectrum")?.unwrap_or_default(),
            };
            synthetic_diagonal(&eigs)?
        }
        "matrixmarket" => {
            let m = settings.str("mass").ok_or_else(|| Failure::usage("matrixmarket needs `mass`"))?;
            let a = settings
                .str("stiffness")
                .ok_or_else(|| Failure::usage("matrixmarket needs `stiffness`"))?;
            load_matrix_market(Path::new(m), Path::new(a))?
        }
        other => return Err(Failure::usage(format!("problem: unknown {other:?}"))),
    };
    Ok(pencil)
}

fn read_vector(path: &str, n: usize) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?;
    let u = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Failure::usage(format!("{path}: cannot parse {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if u.len() != n {
        return Err(Failure::usage(format!("{path}: {} entries, pencil dimension {n}", u.len())));
    }
    Ok(u)
}

/// The argument vector, plus the oracle if one had to be computed for it.
fn build_u(settings: &Settings, pencil: &Pencil) -> Result<(Vec<f64>, Option<SpectralOracle>), Failure> {
    if let Some(path) = settings.str("u") {
        return Ok((read_vector(path, pencil.n())?, None));
    }
    let seed = settings.parse("seed")?.unwrap_or(DEFAULT_SEED);
    match settings.parse::<usize>("active")? {
        Some(active) => {
            let oracle = full_eig(pencil)?;
            let u = random_combination(&oracle, active, seed)?;
            Ok((u, Some(oracle)))
        }
        None => Ok((random_vector(pencil.n(), seed), None)),
    }
}

/// Explicit bounds where given, power/inverse-iteration estimates otherwise.
fn interval(settings: &Settings, pencil: &Pencil) -> Result<SpectralInterval, Failure> {
    let lo: Option<f64> = settings.parse("lambda-l")?;
    let hi: Option<f64> = settings.parse("lambda-u")?;
    let (m, a) = (pencil.mass(), pencil.stiffness());
    let lo = match lo {
        Some(v) => v,
        None => fracrb::linalg::lambda_min_estimate(m, a, ESTIMATE_TOL)?,
    };
    let hi = match hi {
        Some(v) => v,
        None => fracrb::linalg::lambda_max_estimate(m, a, ESTIMATE_TOL)?,
    };
    Ok(SpectralInterval::new(lo, hi)?)
}

fn options(settings: &Settings) -> Result<RbOptions, Failure> {
    let mut opts = RbOptions::default();
    if let Some(tol) = settings.parse("rel-tol")? {
        opts.rel_tol = tol;
    }
    Ok(opts)
}

fn s_values(settings: &Settings) -> Result<Vec<f64>, Failure> {
    let s = settings
        .f64_list("s")?
        .ok_or_else(|| Failure::usage("missing required setting `s`"))?;
    if let Some(bad) = s.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
        return Err(Failure::usage(format!("s = {bad} must lie in (0, 1)")));
    }
    Ok(s)
}

fn single_r(settings: &Settings) -> Result<usize, Failure> {
    match settings.r_list()?.as_deref() {
        Some([r]) => Ok(*r),
        Some(_) => Err(Failure::usage("this subcommand takes a single r")),
        None => Err(Failure::usage("missing required setting `r`")),
    }
}

pub fn points(settings: &Settings) -> Result<(), Failure> {
    let r = single_r(settings)?;
    let (z, zhat) = match settings.parse::<f64>("delta")? {
        Some(delta) => {
            let z = zolotarev_points(delta, r)?;
            (z, transformed_points(1.0, 1.0 / delta, r)?)
        }
        None => {
            let lo: Option<f64> = settings.parse("lambda-l")?;
            let hi: Option<f64> = settings.parse("lambda-u")?;
            let iv = match (lo, hi) {
                (Some(lo), Some(hi)) => SpectralInterval::new(lo, hi)?,
                (None, None) if settings.str("problem").is_some() => interval(settings, &build_pencil(settings)?)?,
                _ => return Err(Failure::usage("points needs `delta` or both `lambda-l` and `lambda-u`")),
            };
            let (a, b) = iv.inverse();
            (zolotarev_points(iv.delta(), r)?, transformed_points(a, b, r)?)
        }
    };
    let mut out = String::from("j,Z_j,Zhat_j,t_j\n");
    writeln!(out, "0,,,{}", fmt(0.0)).unwrap();
    for (j, (z, zh)) in z.iter().zip(&zhat).enumerate() {
        writeln!(out, "{},{},{},{}", j + 1, fmt(*z), fmt(*zh), fmt(zh.sqrt())).unwrap();
    }
    emit(settings, "out", &out)
}

pub fn apply(settings: &Settings) -> Result<(), Failure> {
    let pencil = build_pencil(settings)?;
    let (u, _) = build_u(settings, &pencil)?;
    let iv = interval(settings, &pencil)?;
    let r = single_r(settings)?;
    let s_list = s_values(settings)?;
    let results = rb_eval_many(&pencil, &u, &iv, r, &s_list, &options(settings)?)?;
    let quad_tol: Option<f64> = settings.parse("quad-tol")?;

    let mut out = String::from("s,r,norm,kept,exact");
    if quad_tol.is_some() {
        out.push_str(",quadrature_norm");
    }
    out.push('\n');
    for res in &results {
        let norm = res.norm.expect("rb_eval_many fills norms");
        write!(out, "{},{r},{},{},{}", fmt(res.s), fmt(norm), res.kept, res.exact).unwrap();
        if let Some(tol) = quad_tol {
            let k = k_norm_quadrature(&pencil, &u, res.s, tol)?;
            write!(out, ",{}", fmt(c_s(res.s)? * k)).unwrap();
        }
        out.push('\n');
    }
    eprintln!(
        "reduced dimension {} of {}{}",
        results[0].kept,
        r + 1,
        if results[0].exact { " (exact regime)" } else { "" }
    );
    emit(settings, "out", &out)?;

    if settings.str("vector-out").is_some() {
        let mut vec_out = String::from("i");
        for res in &results {
            write!(vec_out, ",s={}", res.s).unwrap();
        }
        vec_out.push('\n');
        for i in 0..pencil.n() {
            write!(vec_out, "{i}").unwrap();
            for res in &results {
                write!(vec_out, ",{}", fmt(res.action.as_ref().expect("rb_eval_many fills actions")[i])).unwrap();
            }
            vec_out.push('\n');
        }
        emit(settings, "vector-out", &vec_out)?;
    }
    Ok(())
}

pub fn convergence(settings: &Settings) -> Result<(), Failure> {
    let pencil = build_pencil(settings)?;
    let (u, oracle) = build_u(settings, &pencil)?;
    let iv = interval(settings, &pencil)?;
    let s_list = s_values(settings)?;
    let r_list = settings
        .r_list()?
        .ok_or_else(|| Failure::usage("missing required setting `r`"))?;
    let opts = options(settings)?;
    let field = match settings.str("rate").unwrap_or("norm") {
        "norm" => ErrorField::Norm,
        "op" => ErrorField::Op,
        other => return Err(Failure::usage(format!("rate: expected norm or op, got {other:?}"))),
    };
    let use_oracle = match settings.str("truth").unwrap_or("auto") {
        "oracle" => true,
        "surrogate" => false,
        "auto" => oracle.is_some() || pencil.n() <= ORACLE_MAX_N,
        other => return Err(Failure::usage(format!("truth: expected oracle, surrogate or auto, got {other:?}"))),
    };
    let oracle = match (use_oracle, oracle) {
        (true, Some(o)) => Some(o),
        (true, None) => Some(full_eig(&pencil)?),
        (false, _) => None,
    };
    let truth = match &oracle {
        Some(o) => Truth::Oracle(o),
        None => Truth::Surrogate { extra: SURROGATE_EXTRA },
    };
    let records = error_sweep(&pencil, &u, &iv, &s_list, &r_list, &opts, truth)?;
    let cstar = iv.cstar()?;

    let mut out = String::from("s,r,e_norm,e_op,norm_u_1,norm_u_2,cstar,fitted_rate\n");
    for group in records.chunk_by(|a, b| a.s == b.s) {
        let rate = match fit_rate(group, field, opts.rel_tol) {
            Ok(rate) => fmt(rate),
            Err(e) => {
                eprintln!("warning: s = {}: no fitted rate: {e}", group[0].s);
                String::new()
            }
        };
        for (i, rec) in group.iter().enumerate() {
            let last = i + 1 == group.len();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt(rec.s),
                rec.r,
                fmt(rec.e_norm),
                fmt(rec.e_op),
                fmt(rec.norm_u_1),
                fmt(rec.norm_u_2),
                fmt(cstar),
                if last { rate.as_str() } else { "" }
            )
            .unwrap();
        }
    }
    emit(settings, "out", &out)
}

pub fn verify(suite: &str) -> Result<(), Failure> {
    let checks = run_suite(suite)?;
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} {}: observed {:e}, expected {:e}, tolerance {:e}",
            c.name, c.observed, c.expected, c.tolerance
        );
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        return Err(Failure::verify(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("{} checks passed", checks.len());
    Ok(())
}
