//! Small dense complex matrices and a cyclic-Jacobi Hermitian eigensolver.
//!
//! Everything here is sized for desk-scale work: subspace matrices up to
//! 16x16 and exact-diagonalization oracles up to a few thousand rows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "mul_vec shape mismatch");
        let mut y = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = Complex64::ZERO;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |a_ij - conj(a_ji)| over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Replace the matrix with its Hermitian part (A + A*)/2.
    pub fn hermitize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in i..self.cols {
                let h = 0.5 * (self[(i, j)] + self[(j, i)].conj());
                self[(i, j)] = h;
                self[(j, i)] = h.conj();
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Serialized form: dimensions plus row-major (re, im) pairs.
#[derive(Serialize, Deserialize)]
struct CMatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        CMatrixRepr {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = CMatrixRepr::deserialize(de)?;
        if repr.data.len() != repr.rows * repr.cols {
            return Err(serde::de::Error::custom("matrix data length mismatch"));
        }
        Ok(CMatrix {
            rows: repr.rows,
            cols: repr.cols,
            data: repr.data.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        })
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary whose columns are
/// the matching eigenvectors. Sweeps run until the off-diagonal Frobenius
/// norm falls below `1e-12` (scaled up only when rounding noise for large
/// matrices sits above that floor).
pub fn hermitian_eigen(a: &CMatrix, hermiticity_tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eigen needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dev = a.hermitian_deviation();
    if dev > hermiticity_tol {
        return Err(Error::Consistency(format!(
            "matrix is not Hermitian: deviation {dev:.3e} exceeds {hermiticity_tol:.1e}"
        )));
    }
    let mut m = a.clone();
    m.hermitize();
    let mut v = CMatrix::identity(n);

    let tol = 1e-12f64.max(m.frobenius_norm() * n as f64 * 1e-15);
    let max_sweeps = 100;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() < tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Consistency(format!(
            "Jacobi sweeps did not converge for a {n}x{n} matrix"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigenvalues: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));

    let sorted_vals: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let mut sorted_vecs = CMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            sorted_vecs[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok((sorted_vals, sorted_vecs))
}

/// One Jacobi rotation annihilating m[(p, q)]; accumulates into `v`.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    // Factor the phase out so the remaining 2x2 problem is real symmetric.
    let phase = apq / r;
    let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sp = s * phase.conj();

    let n = m.rows();
    m[(p, p)] = Complex64::new(m[(p, p)].re - t * r, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re + t * r, 0.0);
    m[(p, q)] = Complex64::ZERO;
    m[(q, p)] = Complex64::ZERO;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let new_p = c * akp - sp * akq;
        let new_q = s * akp + c * phase.conj() * akq;
        m[(k, p)] = new_p;
        m[(k, q)] = new_q;
        m[(p, k)] = new_p.conj();
        m[(q, k)] = new_q.conj();
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - sp * vkq;
        v[(k, q)] = s * vkp + c * phase.conj() * vkq;
    }
}

/// Singular values of a rectangular matrix, descending, via the Gram matrix.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    let gram_dim = a.cols().min(a.rows());
    let (small, _transposed) = if a.cols() <= a.rows() {
        (a.conj_transpose().matmul(a), false)
    } else {
        (a.matmul(&a.conj_transpose()), true)
    };
    debug_assert_eq!(small.rows(), gram_dim);
    let (vals, _) = hermitian_eigen(&small, 1e-10)?;
    let mut sv: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    sv.reverse();
    Ok(sv)
}
