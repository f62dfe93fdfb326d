use crate::error::{FracError, Result};

const SYMMETRY_RTOL: f64 = 1e-12;
/// Sweeps stop once the off-diagonal Frobenius mass is below this fraction
/// of the initial Frobenius norm.
const MAX_SWEEPS: usize = 100;

/// Small dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(FracError::Dimension {
                expected: n * n,
                found: data.len(),
            });
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > SYMMETRY_RTOL * scale {
                    return Err(FracError::Invalid(format!(
                        "dense matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let mut out = Self { n, data };
        out.symmetrize();
        Ok(out)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::new(n, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self { n, data }
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(FracError::Dimension {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.n.max(1))
            .take(self.n)
            .map(|row| super::dot(row, x))
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    // Row j holds eigenvector j, so Φ = vt^T.
    vt: Vec<f64>,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvector `j` (unit Euclidean norm).
    pub fn vector(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.vt[j * n..(j + 1) * n]
    }

    /// `Φᵀ x`
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n()).map(|j| super::dot(self.vector(j), x)).collect()
    }

    /// `Φ c`
    pub fn expand(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for (j, c) in coeffs.iter().enumerate() {
            super::axpy(*c, self.vector(j), &mut out);
        }
        out
    }

    fn check_positive(&self) -> Result<()> {
        match self.values.first() {
            Some(&v) if !(v > 0.0) => Err(FracError::domain(
                "eigenvalue",
                v,
                "fractional powers need a positive definite matrix",
            )),
            _ => Ok(()),
        }
    }

    /// `Φ Λ^s Φᵀ x`
    pub fn pow_apply(&self, s: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.check_positive()?;
        let coeffs: Vec<f64> = self
            .project(x)
            .into_iter()
            .zip(&self.values)
            .map(|(c, lam)| c * lam.powf(s))
            .collect();
        Ok(self.expand(&coeffs))
    }

    /// `xᵀ Φ Λ^s Φᵀ x`
    pub fn quad_form_pow(&self, s: f64, x: &[f64]) -> Result<f64> {
        self.check_positive()?;
        Ok(self
            .project(x)
            .into_iter()
            .zip(&self.values)
            .map(|(c, lam)| lam.powf(s) * c * c)
            .sum())
    }
}

/// Cyclic Jacobi eigenvalue algorithm.
pub fn sym_eig(q: &DenseSymMatrix) -> EigenDecomposition {
    let n = q.n;
    let mut a = q.data.clone();
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }

    // Sweep until every off-diagonal entry is negligible relative to its
    // diagonal pair; this gives eigenvectors accurate to roundoff rather
    // than to a norm-wise threshold.
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for qq in p + 1..n {
                rotated |= rotate(&mut a, &mut vt, n, p, qq);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep rotation order
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut sorted_vt = Vec::with_capacity(n * n);
    for &i in &order {
        sorted_vt.extend_from_slice(&vt[i * n..(i + 1) * n]);
    }
    EigenDecomposition {
        values,
        vt: sorted_vt,
    }
}

/// One Jacobi rotation annihilating `a[p][q]`; false when the entry was
/// already negligible.
fn rotate(a: &mut [f64], vt: &mut [f64], n: usize, p: usize, q: usize) -> bool {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return false;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    if apq.abs() <= f64::EPSILON * (app * aqq).abs().sqrt() {
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        return false;
    }
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[p * n + k];
        let akq = a[q * n + k];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[p * n + k] = new_p;
        a[q * n + k] = new_q;
        a[k * n + p] = new_p;
        a[k * n + q] = new_q;
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;

    let (head, tail) = vt.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for (vp, vq) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (x, y) = (*vp, *vq);
        *vp = c * x - s * y;
        *vq = s * x + c * y;
    }
    true
}

fn check_exponent(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(FracError::domain("s", s, "exponent must lie in [0, 1]"))
    }
}

/// `Q^s = Φ Λ^s Φᵀ` for SPD `Q`.
pub fn mat_pow_s(q: &DenseSymMatrix, s: f64) -> Result<DenseSymMatrix> {
    check_exponent(s)?;
    let eig = sym_eig(q);
    eig.check_positive()?;
    if s == 0.0 {
        return Ok(DenseSymMatrix::identity(q.n));
    }
    if s == 1.0 {
        return Ok(q.clone());
    }
    let n = q.n;
    let powered: Vec<f64> = eig.values.iter().map(|v| v.powf(s)).collect();
    let mut data = vec![0.0; n * n];
    for (j, w) in powered.iter().enumerate() {
        let v = eig.vector(j);
        for i in 0..n {
            let vi = w * v[i];
            for k in 0..n {
                data[i * n + k] += vi * v[k];
            }
        }
    }
    let mut out = DenseSymMatrix { n, data };
    out.symmetrize();
    Ok(out)
}

/// `xᵀ Q^s x` from the eigendecomposition, without forming `Q^s`.
pub fn quad_form_pow(q: &DenseSymMatrix, s: f64, x: &[f64]) -> Result<f64> {
    check_exponent(s)?;
    if x.len() != q.n {
        return Err(FracError::Dimension {
            expected: q.n,
            found: x.len(),
        });
    }
    sym_eig(q).quad_form_pow(s, x)
}

/// Lower Cholesky factor `L` with `Q = L Lᵀ`, row-major.
pub fn cholesky_lower(q: &DenseSymMatrix) -> Result<Vec<f64>> {
    let n = q.n;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = q.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return Err(FracError::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut acc = q.get(i, j);
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            acc -= super::dot(ri, rj);
            l[i * n + j] = acc / d;
        }
    }
    Ok(l)
}
