//! Small dense matrices and a cyclic-Jacobi symmetric eigensolver.
//!
//! The eigensolver is self-contained on purpose: everything downstream
//! (symmetric inverses, PSD square roots, covariance updates) reduces to it,
//! and Jacobi rotations are robust for the symmetric matrices that show up
//! here (Q up to a few hundred).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense matrix of f64.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("Mat::from_rows", "no rows"));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::invalid("Mat::from_rows", "zero-width row"));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::shape(
                    "Mat::from_rows",
                    format!("{cols} entries in row {i}"),
                    format!("{}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Ok(Mat { rows: rows.len(), cols, data })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "Mat::from_vec",
                format!("{} elements for {rows}x{cols}", rows * cols),
                format!("{}", data.len()),
            ));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Mat::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// self * other
    pub fn matmul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::shape(
                "Mat::matmul",
                format!("lhs cols == rhs rows ({})", self.cols),
                format!("{}", other.rows),
            ));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = k * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    out.data[dst + j] += a * other.data[orow + j];
                }
            }
        }
        Ok(out)
    }

    /// selfᵀ * self (always symmetric).
    pub fn gram(&self) -> Mat {
        let q = self.cols;
        let mut out = Mat::zeros(q, q);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..q {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..q {
                    out.data[i * q + j] += ri * row[j];
                }
            }
        }
        for i in 0..q {
            for j in 0..i {
                out.data[i * q + j] = out.data[j * q + i];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::shape(
                "Mat::add",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest |a_ij - a_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

/// Result of a symmetric eigendecomposition: `a == vectors * diag(values) * vectorsᵀ`.
/// Eigenvalues are sorted ascending; `vectors` holds the eigenvectors as columns.
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

fn require_symmetric(op: &'static str, a: &Mat, tol: f64) -> Result<()> {
    if a.rows != a.cols {
        return Err(Error::shape(op, "square matrix".to_string(), format!("{}x{}", a.rows, a.cols)));
    }
    let asym = a.asymmetry();
    if asym > tol {
        return Err(Error::NotSymmetric { op, asymmetry: asym });
    }
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps plane rotations over every off-diagonal pivot until the
/// off-diagonal Frobenius norm falls below 1e-12 (relative to the matrix
/// scale once the scale exceeds one). Quadratic convergence makes the sweep
/// cap generous.
pub fn jacobi_eigh(a: &Mat) -> Result<SymEig> {
    require_symmetric("jacobi_eigh", a, 1e-10)?;
    let n = a.rows;
    let mut m = a.clone();
    // symmetrize exactly so rotations preserve symmetry bit-for-bit
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, avg);
            m.set(j, i, avg);
        }
    }
    let mut v = Mat::identity(n);
    let tol = 1e-12 * m.frobenius().max(1.0);
    const MAX_SWEEPS: usize = 100;

    for _ in 0..MAX_SWEEPS {
        let mut off_sq = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let x = m.get(i, j);
                off_sq += 2.0 * x * x;
            }
        }
        if off_sq.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = m.get(i, p);
                    let aiq = m.get(i, q);
                    let new_ip = c * aip - s * aiq;
                    let new_iq = s * aip + c * aiq;
                    m.set(i, p, new_ip);
                    m.set(p, i, new_ip);
                    m.set(i, q, new_iq);
                    m.set(q, i, new_iq);
                }
                m.set(p, p, app - t * apq);
                m.set(q, q, aqq + t * apq);
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);

                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }

    // sort eigenpairs ascending for a deterministic decomposition
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, dst, v.get(r, src));
        }
    }
    Ok(SymEig { values, vectors })
}

/// Reassemble `vectors * diag(f(values)) * vectorsᵀ`.
pub fn sym_reassemble(eig: &SymEig, f: impl Fn(f64) -> f64) -> Mat {
    let n = eig.values.len();
    let mut out = Mat::zeros(n, n);
    for k in 0..n {
        let fv = f(eig.values[k]);
        if fv == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = eig.vectors.get(i, k);
            if vik == 0.0 {
                continue;
            }
            for j in 0..n {
                let add = fv * vik * eig.vectors.get(j, k);
                out.data[i * n + j] += add;
            }
        }
    }
    // exact symmetry despite rounding
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (out.get(i, j) + out.get(j, i));
            out.set(i, j, avg);
            out.set(j, i, avg);
        }
    }
    out
}

/// Inverse of the stabilized symmetric matrix `a + ridge*I`, via the Jacobi
/// factorization. Errors when any stabilized eigenvalue is not positive.
pub fn sym_inverse(a: &Mat, ridge: f64) -> Result<Mat> {
    require_symmetric("sym_inverse", a, 1e-10)?;
    let eig = jacobi_eigh(a)?;
    if let Some(bad) = eig.values.iter().map(|l| l + ridge).find(|&l| l <= 0.0) {
        return Err(Error::invalid(
            "sym_inverse",
            format!("stabilized eigenvalue {bad:e} is not positive"),
        ));
    }
    Ok(sym_reassemble(&eig, |l| 1.0 / (l + ridge)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-1.0..1.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    #[test]
    fn matmul_matches_hand_example() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Mat::from_rows(&[vec![5.0, 6.0], vec![7.0, 8.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.row(0), &[19.0, 22.0]);
        assert_eq!(c.row(1), &[43.0, 50.0]);
    }

    #[test]
    fn gram_equals_at_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = Mat::from_vec(3, 4, data).unwrap();
        let explicit = w.transpose().matmul(&w).unwrap();
        let gram = w.gram();
        for i in 0..4 {
            for j in 0..4 {
                assert!((explicit.get(i, j) - gram.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let eig = jacobi_eigh(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 16, 33] {
            let a = random_symmetric(n, &mut rng);
            let eig = jacobi_eigh(&a).unwrap();
            let rec = sym_reassemble(&eig, |l| l);
            for i in 0..n {
                for j in 0..n {
                    assert!(
                        (rec.get(i, j) - a.get(i, j)).abs() < 1e-10,
                        "n={n} entry ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobi_rejects_asymmetric() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(jacobi_eigh(&a), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn sym_inverse_matches_identity_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = random_symmetric(6, &mut rng);
        // make it comfortably positive definite
        let a = b.matmul(&b).unwrap().add(&Mat::identity(6).scale(0.5)).unwrap();
        let inv = sym_inverse(&a, 0.0).unwrap();
        let prod = a.matmul(&inv).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sym_inverse_rejects_non_positive() {
        let a = Mat::diag(&[1.0, 0.0]);
        assert!(sym_inverse(&a, 0.0).is_err());
        assert!(sym_inverse(&a, 1e-8).is_ok());
    }
}
