//! Dense exact-diagonalization oracle and the overlap-rank diagnostic.

use std::io::Write;

use crate::linalg::{hermitian_eigen, singular_values, CMatrix};
use crate::pauli::{dense_matrix, PauliSum};
use crate::{Error, Result};

/// Exact diagonalization is only needed at desk scale.
pub const EXACT_QUBIT_LIMIT: usize = 12;

/// Acceptable residual `||H v - E v||` per returned eigenpair.
const RESIDUAL_TOL: f64 = 1e-8;

/// Default relative singular-value cutoff for [`overlap_rank`].
pub const RANK_TOL: f64 = 1e-8;

/// The `k` lowest eigenpairs of a Hermitian operator, eigenvalues ascending,
/// eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `i` is the eigenvector of `eigenvalues()[i]`.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Restrict to the lowest `k` pairs.
    pub fn truncated(&self, k: usize) -> Spectrum {
        let k = k.min(self.len());
        let mut vecs = CMatrix::zeros(self.eigenvectors.rows(), k);
        for j in 0..k {
            for i in 0..self.eigenvectors.rows() {
                vecs[(i, j)] = self.eigenvectors[(i, j)];
            }
        }
        Spectrum { eigenvalues: self.eigenvalues[..k].to_vec(), eigenvectors: vecs }
    }
}

/// Lowest `k` eigenpairs of `dense_matrix(h)` by cyclic Jacobi rotations.
pub fn exact_eigenpairs(h: &PauliSum, k: usize) -> Result<Spectrum> {
    if h.n_qubits() > EXACT_QUBIT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "exact diagonalization limited to {EXACT_QUBIT_LIMIT} qubits, got {}",
            h.n_qubits()
        )));
    }
    let dim = 1usize << h.n_qubits();
    if k == 0 || k > dim {
        return Err(Error::InvalidArgument(format!("k = {k} out of 1..={dim}")));
    }
    let m = dense_matrix(h)?;
    let (vals, vecs) = hermitian_eigen(&m, 1e-10)?;

    let mut eigenvectors = CMatrix::zeros(dim, k);
    for j in 0..k {
        let col = vecs.column(j);
        let hv = m.mul_vec(&col);
        let residual: f64 =
            hv.iter().zip(&col).map(|(a, b)| (a - vals[j] * b).norm_sqr()).sum::<f64>().sqrt();
        if residual > RESIDUAL_TOL {
            return Err(Error::Consistency(format!(
                "eigenpair {j} residual {residual:.3e} exceeds {RESIDUAL_TOL:.1e}"
            )));
        }
        for i in 0..dim {
            eigenvectors[(i, j)] = col[i];
        }
    }
    Ok(Spectrum { eigenvalues: vals[..k].to_vec(), eigenvectors })
}

/// Basis-state index of the initial physical state `|alpha, p>`: the first
/// `n_ancilla` physical qubits spell `alpha`, the rest are 0.
pub fn initial_basis_index(alpha: usize, n_physical: usize, n_ancilla: usize) -> usize {
    alpha << (n_physical - n_ancilla)
}

/// Overlap matrix `M[i][alpha] = <E_i | alpha, p>` between `spectrum`'s
/// eigenvectors and the `2^{n_ancilla}` initial physical basis states.
pub fn overlap_matrix(spectrum: &Spectrum, n_ancilla: usize) -> Result<CMatrix> {
    let dim = spectrum.eigenvectors().rows();
    if !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!("eigenvector length {dim}")));
    }
    let n_physical = dim.trailing_zeros() as usize;
    if n_ancilla > n_physical {
        return Err(Error::InvalidArgument(format!(
            "{n_ancilla} ancillas with only {n_physical} physical qubits"
        )));
    }
    let m = 1usize << n_ancilla;
    let mut overlaps = CMatrix::zeros(spectrum.len(), m);
    for i in 0..spectrum.len() {
        for alpha in 0..m {
            let idx = initial_basis_index(alpha, n_physical, n_ancilla);
            overlaps[(i, alpha)] = spectrum.eigenvectors()[(idx, i)].conj();
        }
    }
    Ok(overlaps)
}

/// Numerical rank of the overlap matrix: singular values above
/// `tol * sigma_max` count. This bounds how many of the spectrum's
/// eigenstates are reachable from the initial basis subspace.
pub fn overlap_rank(spectrum: &Spectrum, n_ancilla: usize, tol: f64) -> Result<usize> {
    let overlaps = overlap_matrix(spectrum, n_ancilla)?;
    let sv = singular_values(&overlaps)?;
    let max = sv.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * max).count())
}

/// Write a spectrum as `index,eigenvalue` CSV (regression baselines).
pub fn write_spectrum_csv<W: Write>(spectrum: &Spectrum, mut out: W) -> Result<()> {
    writeln!(out, "index,eigenvalue")?;
    for (i, e) in spectrum.eigenvalues().iter().enumerate() {
        writeln!(out, "{i},{e:.15e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{build_tfim, BoundaryCondition, PauliSum};

    #[test]
    fn single_x_spectrum() {
        let h = PauliSum::from_terms(1, &[(0.5, "X")]).unwrap();
        let s = exact_eigenpairs(&h, 2).unwrap();
        assert!((s.eigenvalues()[0] + 0.5).abs() < 1e-12);
        assert!((s.eigenvalues()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zz_spectrum_with_degeneracy() {
        let h = PauliSum::from_terms(2, &[(-0.25, "ZZ")]).unwrap();
        let s = exact_eigenpairs(&h, 4).unwrap();
        let want = [-0.25, -0.25, 0.25, 0.25];
        for (a, b) in s.eigenvalues().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let h = build_tfim(4, 1.0, 0.5, BoundaryCondition::Open).unwrap();
        let s = exact_eigenpairs(&h, 16).unwrap();
        let m = dense_matrix(&h).unwrap();
        for j in 0..s.len() {
            let v = s.eigenvectors().column(j);
            let hv = m.mul_vec(&v);
            let res: f64 = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - s.eigenvalues()[j] * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-9);
        }
    }

    #[test]
    fn diagonal_hamiltonian_has_full_overlap_rank() {
        // A diagonal H whose four lowest eigenstates are exactly the four
        // initial basis states |b0 b1 0 0>: eigenvectors are basis states,
        // so the overlap matrix is a permutation and has full rank.
        let h = PauliSum::from_terms(
            4,
            &[(-1.0, "IIZI"), (-1.0, "IIIZ"), (0.1, "ZIII"), (0.05, "IZII")],
        )
        .unwrap();
        let s = exact_eigenpairs(&h, 4).unwrap();
        let rank = overlap_rank(&s, 2, RANK_TOL).unwrap();
        assert_eq!(rank, 4);
    }

    #[test]
    fn rank_is_invariant_under_degenerate_remixing() {
        use num_complex::Complex64;
        use rand::{Rng, SeedableRng};
        let h = build_tfim(4, 1.0, 0.0, BoundaryCondition::Open).unwrap();
        let mut s = exact_eigenpairs(&h, 4).unwrap();
        // degenerate pairs may be remixed by any unitary without changing rank
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let base = overlap_rank(&s, 2, RANK_TOL).unwrap();
        for _ in 0..5 {
            let mut remixed = s.eigenvectors().clone();
            let mut i = 0;
            while i + 1 < s.len() {
                if (s.eigenvalues()[i] - s.eigenvalues()[i + 1]).abs() < 1e-12 {
                    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    let (c, sn) = (phi.cos(), phi.sin());
                    for r in 0..remixed.rows() {
                        let a = remixed[(r, i)];
                        let b = remixed[(r, i + 1)];
                        remixed[(r, i)] = c * a + sn * b;
                        remixed[(r, i + 1)] = -sn * a + c * b;
                    }
                    i += 2;
                } else {
                    i += 1;
                }
            }
            let phase = Complex64::from_polar(1.0, rng.random_range(0.0..1.0));
            for r in 0..remixed.rows() {
                let v = remixed[(r, 0)];
                remixed[(r, 0)] = phase * v;
            }
            s = Spectrum { eigenvalues: s.eigenvalues.clone(), eigenvectors: remixed };
            assert_eq!(overlap_rank(&s, 2, RANK_TOL).unwrap(), base);
        }
    }

    #[test]
    fn csv_round_trip_format() {
        let h = PauliSum::from_terms(1, &[(0.5, "X")]).unwrap();
        let s = exact_eigenpairs(&h, 2).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("index,eigenvalue"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,"));
        let val: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
        assert!((val + 0.5).abs() < 1e-12);
    }

    #[test]
    fn size_limit_is_enforced() {
        let h = PauliSum::new(EXACT_QUBIT_LIMIT + 1);
        assert!(matches!(exact_eigenpairs(&h, 1), Err(Error::SizeLimit(_))));
    }
}
