use crate::error::{FracError, Result};

pub const MIN_GRID: usize = 1000;
/// Local maxima within this fraction of the global maximum count as
/// alternance points.
const NEAR_EXTREMAL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridKind {
    #[default]
    Uniform,
    /// Log-spaced; resolves the region near `lo` when `hi/lo` is large.
    Geometric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxReport {
    pub max: f64,
    pub argmax: f64,
    /// Locations of local maxima of the product within 5% of `max`.
    pub extremal: Vec<f64>,
}

fn product(points: &[f64], x: f64) -> f64 {
    points
        .iter()
        .map(|p| ((1.0 - p * x) / (1.0 + p * x)).abs())
        .product()
}

/// `max_{x ∈ [lo, hi]} Π_j |(1 − p_j x)/(1 + p_j x)|` over a sampling grid.
pub fn minmax_product(points: &[f64], lo: f64, hi: f64, grid_size: usize, grid: GridKind) -> Result<MinMaxReport> {
    if grid_size < MIN_GRID {
        return Err(FracError::Invalid(format!(
            "grid_size {grid_size} below the minimum of {MIN_GRID}"
        )));
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(FracError::domain("lo", lo, "need 0 < lo < hi < inf"));
    }
    let last = (grid_size - 1) as f64;
    let xs: Vec<f64> = (0..grid_size)
        .map(|i| {
            let f = i as f64 / last;
            match grid {
                GridKind::Uniform => lo + (hi - lo) * f,
                GridKind::Geometric => lo * (hi / lo).powf(f),
            }
        })
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| product(points, x)).collect();

    let (imax, &max) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let mut extremal = Vec::new();
    let mut i = 0;
    while i < ys.len() {
        // treat runs of equal values as one plateau
        let mut j = i;
        while j + 1 < ys.len() && ys[j + 1] == ys[i] {
            j += 1;
        }
        let left_ok = i == 0 || ys[i - 1] < ys[i];
        let right_ok = j + 1 == ys.len() || ys[j + 1] < ys[i];
        if left_ok && right_ok && ys[i] >= NEAR_EXTREMAL * max {
            extremal.push(xs[(i + j) / 2]);
        }
        i = j + 1;
    }
    Ok(MinMaxReport {
        max,
        argmax: xs[imax],
        extremal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_product_is_one() {
        let rep = minmax_product(&[], 0.1, 1.0, 1000, GridKind::Uniform).unwrap();
        assert_eq!(rep.max, 1.0);
    }

    #[test]
    fn single_factor_endpoints() {
        let delta: f64 = 1e-2;
        let rep = minmax_product(&[delta.sqrt()], 1.0, 1.0 / delta, 4001, GridKind::Uniform).unwrap();
        let want = (1.0 - delta.sqrt()) / (1.0 + delta.sqrt());
        assert!((rep.max - want).abs() < 1e-14);
        assert_eq!(rep.extremal.len(), 2);
    }

    #[test]
    fn grid_validation() {
        assert!(minmax_product(&[1.0], 0.1, 1.0, 999, GridKind::Uniform).is_err());
        assert!(minmax_product(&[1.0], 1.0, 0.1, 1000, GridKind::Uniform).is_err());
        assert!(minmax_product(&[1.0], 0.0, 1.0, 1000, GridKind::Geometric).is_err());
    }
}
