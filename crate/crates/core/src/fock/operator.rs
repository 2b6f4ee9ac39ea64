use rayon::prelude::*;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};

/// Dense N×N complex matrix on the truncated Fock space, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    dim: usize,
    prec: u32,
    data: Vec<Complex>,
    pub label: String,
}

impl FockOperator {
    pub fn zeros(dim: usize, prec: u32, label: impl Into<String>) -> Self {
        Self {
            dim,
            prec,
            data: vec![Complex::new(prec); dim * dim],
            label: label.into(),
        }
    }

    pub fn identity(dim: usize, prec: u32) -> Self {
        let mut out = Self::zeros(dim, prec, format!("I[N={dim}]"));
        for i in 0..dim {
            out.data[i * dim + i] = Complex::with_val(prec, 1);
        }
        out
    }

    pub fn from_fn(
        dim: usize,
        prec: u32,
        label: impl Into<String>,
        f: impl Fn(usize, usize) -> Complex + Sync,
    ) -> Self {
        let data = (0..dim * dim)
            .into_par_iter()
            .map(|idx| Complex::with_val(prec, f(idx / dim, idx % dim)))
            .collect();
        Self {
            dim,
            prec,
            data,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn get(&self, row: usize, col: usize) -> &Complex {
        &self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex) {
        self.data[row * self.dim + col] = Complex::with_val(self.prec, value);
    }

    pub fn row(&self, row: usize) -> &[Complex] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, self.prec, format!("{}^H", self.label), |i, j| {
            self.get(j, i).clone().conj()
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let n = self.dim;
        let prec = self.prec.max(other.prec);
        let rows: Vec<Vec<Complex>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![Complex::new(prec); n];
                let mut t = Complex::new(prec);
                for (k, a) in self.row(i).iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, out) in row.iter_mut().enumerate() {
                        let b = other.get(k, j);
                        if b.is_zero() {
                            continue;
                        }
                        t.assign(a * b);
                        *out += &t;
                    }
                }
                row
            })
            .collect();
        Ok(Self {
            dim: n,
            prec,
            data: rows.into_iter().flatten().collect(),
            label: format!("{}*{}", self.label, other.label),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, "+", |a, b| Complex::with_val(a.prec().0, a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, "-", |a, b| Complex::with_val(a.prec().0, a - b))
    }

    pub fn scale(&self, c: &Complex) -> Self {
        Self {
            dim: self.dim,
            prec: self.prec,
            data: self.data.iter().map(|a| Complex::with_val(self.prec, a * c)).collect(),
            label: format!("c*{}", self.label),
        }
    }

    fn zip(&self, other: &Self, op: &str, f: impl Fn(&Complex, &Complex) -> Complex) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self {
            dim: self.dim,
            prec: self.prec,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
            label: format!("({}{op}{})", self.label, other.label),
        })
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// M·v
    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        self.check_len(v)?;
        Ok((0..self.dim)
            .into_par_iter()
            .map(|i| dot(self.row(i), v, self.prec))
            .collect())
    }

    /// Mᴴ·v without forming the adjoint.
    pub fn apply_adjoint(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        self.check_len(v)?;
        let n = self.dim;
        Ok((0..n)
            .into_par_iter()
            .map(|j| {
                let mut acc = Complex::new(self.prec);
                let mut t = Complex::new(self.prec);
                for (i, vi) in v.iter().enumerate() {
                    let m = self.get(i, j);
                    if m.is_zero() {
                        continue;
                    }
                    t.assign(&m.clone().conj() * vi);
                    acc += &t;
                }
                acc
            })
            .collect())
    }

    fn check_len(&self, v: &[Complex]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "vector length {} does not match N = {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// max |M_ij − O_ij| over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.max_abs_diff_block(other, self.dim)
    }

    /// max |M_ij − O_ij| over the leading block × block corner.
    pub fn max_abs_diff_block(&self, other: &Self, block: usize) -> Result<f64> {
        self.check_dims(other)?;
        let block = block.min(self.dim);
        let mut worst = 0f64;
        for i in 0..block {
            for j in 0..block {
                let d = Complex::with_val(self.prec, self.get(i, j) - other.get(i, j));
                worst = worst.max(d.abs().real().to_f64());
            }
        }
        Ok(worst)
    }
}

/// Σ_i u_i v_i (no conjugation).
fn dot(u: &[Complex], v: &[Complex], prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    let mut t = Complex::new(prec);
    for (a, b) in u.iter().zip(v) {
        if a.is_zero() {
            continue;
        }
        t.assign(a * b);
        acc += &t;
    }
    acc
}

/// ⟨u, v⟩ = Σ conj(u_i) v_i
pub fn inner(u: &[Complex], v: &[Complex], prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    let mut t = Complex::new(prec);
    for (a, b) in u.iter().zip(v) {
        t.assign(&a.clone().conj() * b);
        acc += &t;
    }
    acc
}

pub fn norm_sqr(v: &[Complex], prec: u32) -> Float {
    let mut acc = Float::new(prec);
    for a in v {
        acc += Float::with_val(prec, a.norm_ref());
    }
    acc
}

/// Lowering operator: A[n−1, n] = √n.
pub fn annihilation_matrix(dim: usize, prec: u32) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!(
            "annihilation matrix needs N >= 2, got {dim}"
        )));
    }
    let mut out = FockOperator::zeros(dim, prec, format!("a[N={dim}]"));
    for n in 1..dim {
        out.set(n - 1, n, Complex::with_val(prec, Float::with_val(prec, n).sqrt()));
    }
    Ok(out)
}

/// a·v on the truncation: out[n] = √(n+1) v[n+1].
pub fn lower(v: &[Complex], prec: u32) -> Vec<Complex> {
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i + 1 < n {
            let s = Float::with_val(prec, i + 1).sqrt();
            out.push(Complex::with_val(prec, &v[i + 1] * &s));
        } else {
            out.push(Complex::new(prec));
        }
    }
    out
}

/// a†·v on the truncation: out[n] = √n v[n−1]; the top component is lost.
pub fn raise(v: &[Complex], prec: u32) -> Vec<Complex> {
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    out.push(Complex::new(prec));
    for i in 1..n {
        let s = Float::with_val(prec, i).sqrt();
        out.push(Complex::with_val(prec, &v[i - 1] * &s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::cplx;

    #[test]
    fn two_dimensional_lowering() {
        let a = annihilation_matrix(2, 64).unwrap();
        let expect = [[0.0, 1.0], [0.0, 0.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(a.get(i, j).real().to_f64(), *v);
                assert!(a.get(i, j).imag().is_zero());
            }
        }
        assert!(annihilation_matrix(1, 64).is_err());
    }

    #[test]
    fn truncated_commutator_has_corner_defect() {
        let n = 6;
        let a = annihilation_matrix(n, 64).unwrap();
        let ad = a.adjoint();
        let c = a.matmul(&ad).unwrap().sub(&ad.matmul(&a).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let want = if i != j {
                    0.0
                } else if i == n - 1 {
                    -(n as f64 - 1.0)
                } else {
                    1.0
                };
                assert_eq!(c.get(i, j).real().to_f64(), want, "({i},{j})");
            }
        }
    }

    #[test]
    fn adjoint_is_an_involution() {
        let m = FockOperator::from_fn(5, 64, "m", |i, j| cplx(64, i as f64 - j as f64 * 0.5, (i * j) as f64));
        assert_eq!(m.adjoint().adjoint().max_abs_diff(&m).unwrap(), 0.0);
    }

    #[test]
    fn shift_helpers_match_matrices() {
        let n = 7;
        let v: Vec<Complex> = (0..n).map(|i| cplx(64, 1.0 + i as f64, -0.5 * i as f64)).collect();
        let a = annihilation_matrix(n, 64).unwrap();
        let lhs = a.apply(&v).unwrap();
        let rhs = lower(&v, 64);
        let up = a.apply_adjoint(&v).unwrap();
        let up2 = raise(&v, 64);
        for i in 0..n {
            assert_eq!(lhs[i], rhs[i]);
            assert_eq!(up[i], up2[i]);
        }
    }
}
