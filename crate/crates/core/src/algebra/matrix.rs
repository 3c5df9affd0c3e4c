use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Serialize for SquareMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // Real matrices are written as plain numbers.
        if self.is_real() {
            let rows: Vec<Vec<f64>> = (0..self.n)
                .map(|i| (0..self.n).map(|j| self.get(i, j).re).collect())
                .collect();
            rows.serialize(s)
        } else {
            crate::cser::vec2::serialize(&self.rows(), s)
        }
    }
}

impl<'de> Deserialize<'de> for SquareMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = crate::cser::vec2::deserialize(d)?;
        SquareMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::default(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("matrix must be square and non-empty".into()));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// `M·v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                .unwrap();
            if a[piv * n + col].norm() == 0.0 {
                return Complex64::default();
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let f = a[row * n + col] / p;
                for k in col..n {
                    let v = a[col * n + k];
                    a[row * n + k] -= f * v;
                }
            }
        }
        det
    }
}

/// Orthogonal diagonalisation `Λ = Cᵀ A C` of a symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymFactorisation {
    pub a: SquareMatrix,
    pub c: SquareMatrix,
    #[serde(with = "crate::cser::vec")]
    pub lambda: Vec<Complex64>,
}

impl SymFactorisation {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// The support map `C Λ^{1/2}` (principal square roots).
    pub fn support_map(&self) -> SquareMatrix {
        let sqrt: Vec<Complex64> = self.lambda.iter().map(|l| l.sqrt()).collect();
        self.c.mul(&SquareMatrix::diagonal(&sqrt))
    }
}

fn symmetry_defect(a: &SquareMatrix) -> f64 {
    a.sub(&a.transpose()).norm()
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Complex input is rejected: complex symmetric matrices must come with a
/// factorisation that is checked by [`verify_factorisation`].
pub fn factor_symmetric(a: &SquareMatrix, tol: f64) -> Result<SymFactorisation> {
    let defect = symmetry_defect(a);
    if defect > tol {
        return Err(Error::NotSymmetric { deviation: defect });
    }
    if !a.is_real() {
        return Err(Error::Factorisation(
            "complex symmetric matrices require a user-supplied (C, Λ) pair".into(),
        ));
    }
    let n = a.dim();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (a.get(i, j).re + a.get(j, i).re)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in m.iter_mut() {
                    let mkp = row[p];
                    let mkq = row[q];
                    row[p] = c * mkp - s * mkq;
                    row[q] = s * mkp + c * mkq;
                }
                let (rp, rq) = (m[p].clone(), m[q].clone());
                for k in 0..n {
                    m[p][k] = c * rp[k] - s * rq[k];
                    m[q][k] = s * rp[k] + c * rq[k];
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let max_eig = order.iter().map(|&i| m[i][i].abs()).fold(0.0, f64::max);
    if order.iter().any(|&i| m[i][i].abs() <= tol * max_eig.max(1.0)) {
        return Err(Error::Singular);
    }
    let mut c = SquareMatrix::zeros(n);
    let mut lambda = Vec::with_capacity(n);
    for (col, &i) in order.iter().enumerate() {
        lambda.push(Complex64::new(m[i][i], 0.0));
        // Sign convention: first nonzero component positive.
        let sign = v
            .iter()
            .map(|row| row[i])
            .find(|x| x.abs() > 1e-12)
            .map_or(1.0, f64::signum);
        for (r, row) in v.iter().enumerate() {
            c.set(r, col, Complex64::new(sign * row[i], 0.0));
        }
    }
    let fact = SymFactorisation {
        a: a.clone(),
        c,
        lambda,
    };
    verify_factorisation(&fact, tol)?;
    Ok(fact)
}

/// Checks `CᵀC = I`, `CᵀAC = Λ` and that `Λ` is nonsingular.
pub fn verify_factorisation(f: &SymFactorisation, tol: f64) -> Result<()> {
    let n = f.a.dim();
    if f.c.dim() != n || f.lambda.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.c.dim().min(f.lambda.len()),
        });
    }
    let defect = symmetry_defect(&f.a);
    if defect > tol {
        return Err(Error::NotSymmetric { deviation: defect });
    }
    let ct = f.c.transpose();
    let orth = ct.mul(&f.c).sub(&SquareMatrix::identity(n)).norm();
    if orth > tol {
        return Err(Error::Factorisation(format!("CᵀC deviates from I by {orth:e}")));
    }
    let diag = ct.mul(&f.a).mul(&f.c).sub(&SquareMatrix::diagonal(&f.lambda)).norm();
    if diag > tol * f.a.norm().max(1.0) {
        return Err(Error::Factorisation(format!("CᵀAC deviates from Λ by {diag:e}")));
    }
    let max_l = f.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max);
    if f.lambda.iter().any(|l| l.norm() <= tol * max_l.max(1.0)) {
        return Err(Error::Singular);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_TOL;

    #[test]
    fn diagonal_input_is_unchanged() {
        let a = SquareMatrix::from_real(&[vec![4.0, 0.0], vec![0.0, 9.0]]).unwrap();
        let f = factor_symmetric(&a, DEFAULT_TOL).unwrap();
        assert_eq!(f.lambda, vec![Complex64::new(4.0, 0.0), Complex64::new(9.0, 0.0)]);
        assert!(f.c.sub(&SquareMatrix::identity(2)).norm() < 1e-15);
    }

    #[test]
    fn two_by_two_rotation() {
        let a = SquareMatrix::from_real(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let f = factor_symmetric(&a, DEFAULT_TOL).unwrap();
        assert!((f.lambda[0].re - 1.0).abs() < 1e-14 && (f.lambda[1].re - 3.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = SquareMatrix::from_real(&[vec![r, r], vec![-r, r]]).unwrap();
        assert!(f.c.sub(&expected).norm() < 1e-14, "{:?}", f.c);
    }

    #[test]
    fn singular_and_nonsymmetric_rejected() {
        let a = SquareMatrix::from_real(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(factor_symmetric(&a, DEFAULT_TOL), Err(Error::Singular));
        let b = SquareMatrix::from_real(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(factor_symmetric(&b, DEFAULT_TOL), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn user_supplied_complex_factorisation_is_verified() {
        // A = diag(1, -1) written in a complex orthogonal frame is still itself.
        let a = SquareMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        assert!(factor_symmetric(&a, DEFAULT_TOL).is_err());
        let good = SymFactorisation {
            a: a.clone(),
            c: SquareMatrix::identity(2),
            lambda: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        };
        assert!(verify_factorisation(&good, DEFAULT_TOL).is_ok());
        let bad = SymFactorisation {
            lambda: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)],
            ..good
        };
        assert!(matches!(verify_factorisation(&bad, DEFAULT_TOL), Err(Error::Factorisation(_))));
    }

    #[test]
    fn determinant() {
        let a = SquareMatrix::from_real(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!((a.det() - Complex64::new(3.0, 0.0)).norm() < 1e-14);
    }
}
