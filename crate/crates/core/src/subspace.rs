//! Post-optimization measurement layer.
//!
//! Rotating the ancillas stands in for rotating the physical trial states:
//! every matrix element `<beta~|H|alpha~>` of the Hamiltonian in the trial
//! basis is a fixed linear combination of the `4^{N_a}` expectation values
//! `h_mu = <psi| H (x) A_mu |psi>` over ancilla Pauli strings `A_mu`.
//! Diagonalizing the resulting small Hermitian matrix yields the eigenpairs,
//! and a diagonal ancilla operator turns the same trick into thermal averages.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigen, CMatrix};
use crate::pauli::{tensor_with_ancilla, PauliAxis, PauliString, PauliSum};
use crate::statevector::{accumulate_pauli, StateVector};
use crate::{Error, Result};

/// Largest subspace matrix dimension worth diagonalizing here.
const SUBSPACE_DIM_LIMIT: usize = 16;

const HERMITICITY_TOL: f64 = 1e-10;

/// The change-of-basis tensor between ancilla basis-transfer operators and
/// Pauli operators: `|b><a| = sum_mu v[(b,a)][mu] sigma_mu`, extended to
/// several ancillas as a product over per-ancilla factors.
#[derive(Clone, Debug)]
pub struct VTensor {
    v: [[Complex64; 4]; 4],
}

/// The single-ancilla block: rows indexed by (beta, alpha) in order
/// 00, 01, 10, 11; columns by I, X, Y, Z.
pub fn v_matrix() -> VTensor {
    let h = 0.5;
    let z = Complex64::ZERO;
    let r = Complex64::new(h, 0.0);
    let i = Complex64::new(0.0, h);
    VTensor {
        v: [
            [r, z, z, r],  // |0><0| = (I + Z)/2
            [z, r, i, z],  // |0><1| = (X + iY)/2
            [z, r, -i, z], // |1><0| = (X - iY)/2
            [r, z, z, -r], // |1><1| = (I - Z)/2
        ],
    }
}

impl VTensor {
    /// Entry `v[(beta_bit, alpha_bit)][axis]`.
    pub fn entry(&self, beta_bit: usize, alpha_bit: usize, axis: PauliAxis) -> Complex64 {
        let col = match axis {
            PauliAxis::I => 0,
            PauliAxis::X => 1,
            PauliAxis::Y => 2,
            PauliAxis::Z => 3,
        };
        self.v[2 * beta_bit + alpha_bit][col]
    }

    /// Product form `V[(beta, alpha)][mu] = prod_i v[(beta_i, alpha_i)][mu_i]`
    /// over the ancilla register (ancilla 0 is the most significant bit).
    pub fn weight(&self, beta: usize, alpha: usize, mu: &PauliString) -> Complex64 {
        let n_ancilla = mu.len();
        let mut w = Complex64::ONE;
        for (i, &axis) in mu.axes().iter().enumerate() {
            let shift = n_ancilla - 1 - i;
            let b = (beta >> shift) & 1;
            let a = (alpha >> shift) & 1;
            w *= self.entry(b, a, axis);
        }
        w
    }
}

/// Which block of the trial basis to reconstruct and diagonalize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceMode {
    /// The K x K block over the loss-optimized trial states.
    KBlock(usize),
    /// All M = 2^{N_a} trial states, as in the full measurement protocol.
    Full,
}

/// `h_mu = <psi| H (x) A_mu |psi>` for one ancilla Pauli string.
pub fn measure_h_mu(psi: &StateVector, h: &PauliSum, mu: &PauliString) -> Result<f64> {
    if h.n_qubits() + mu.len() != psi.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "H on {} qubits + mu on {} does not span the {}-qubit state",
            h.n_qubits(),
            mu.len(),
            psi.n_qubits()
        )));
    }
    psi.expectation(&tensor_with_ancilla(h, mu))
}

/// All `4^{n_ancilla}` ancilla Pauli strings, indexed by base-4 digits with
/// ancilla 0 as the most significant digit.
fn mu_string(index: usize, n_ancilla: usize) -> PauliString {
    let axes = (0..n_ancilla)
        .map(|i| PauliAxis::ALL[(index >> (2 * (n_ancilla - 1 - i))) & 3])
        .collect();
    PauliString::new(axes)
}

/// Reconstruct the trial-basis Hamiltonian `H[beta][alpha] = <beta~|H|alpha~>`
/// from the `4^{n_ancilla}` measured `h_mu` values (one final state, no extra
/// circuit depth). The result must come out Hermitian to tolerance.
pub fn assemble_subspace_matrix(
    psi: &StateVector,
    h: &PauliSum,
    n_ancilla: usize,
    mode: SubspaceMode,
) -> Result<CMatrix> {
    if h.n_qubits() + n_ancilla != psi.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "H on {} qubits with {n_ancilla} ancillas does not span the {}-qubit state",
            h.n_qubits(),
            psi.n_qubits()
        )));
    }
    let m = 1usize << n_ancilla;
    let dim = match mode {
        SubspaceMode::KBlock(k) => k,
        SubspaceMode::Full => m,
    };
    if dim == 0 || dim > m {
        return Err(Error::OutOfRange(format!("block dimension {dim} out of 1..={m}")));
    }

    let mu_count = 1usize << (2 * n_ancilla);
    let mut h_mu = Vec::with_capacity(mu_count);
    for idx in 0..mu_count {
        h_mu.push(measure_h_mu(psi, h, &mu_string(idx, n_ancilla))?);
    }

    let v = v_matrix();
    let mut matrix = CMatrix::zeros(dim, dim);
    for beta in 0..dim {
        for alpha in 0..dim {
            let mut acc = Complex64::ZERO;
            for (idx, &value) in h_mu.iter().enumerate() {
                let w = v.weight(beta, alpha, &mu_string(idx, n_ancilla));
                if w != Complex64::ZERO {
                    acc += w * value;
                }
            }
            matrix[(beta, alpha)] = acc * m as f64;
        }
    }

    let dev = matrix.hermitian_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::Consistency(format!(
            "reconstructed subspace matrix deviates from Hermitian by {dev:.3e}"
        )));
    }
    matrix.hermitize();
    Ok(matrix)
}

/// Diagonalize a trial-basis matrix: ascending eigenvalues and the unitary
/// `S` whose columns are eigenvectors (`S^ H S` diagonal).
pub fn eigenpairs_from_subspace(matrix: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if matrix.rows() != matrix.cols() {
        return Err(Error::DimensionMismatch(format!(
            "subspace matrix is {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    if matrix.rows() > SUBSPACE_DIM_LIMIT {
        return Err(Error::SizeLimit(format!(
            "subspace dimension {} exceeds {SUBSPACE_DIM_LIMIT}",
            matrix.rows()
        )));
    }
    let (vals, vecs) = hermitian_eigen(matrix, HERMITICITY_TOL)?;
    // S^ H S must be diagonal to 1e-9
    let check = vecs.conj_transpose().matmul(&matrix.matmul(&vecs));
    for i in 0..check.rows() {
        for j in 0..check.cols() {
            let want = if i == j { Complex64::new(vals[i], 0.0) } else { Complex64::ZERO };
            if (check[(i, j)] - want).norm() > 1e-9 {
                return Err(Error::Consistency(format!(
                    "S^ H S is not diagonal at ({i},{j}): {:.3e}",
                    (check[(i, j)] - want).norm()
                )));
            }
        }
    }
    Ok((vals, vecs))
}

/// Physical eigenstate `|E_i,p> = sum_alpha S[alpha][i] |alpha~,p>` where the
/// trial states `|alpha~,p>` are recovered by ancilla projection.
pub fn reconstruct_eigenstate(
    psi: &StateVector,
    n_ancilla: usize,
    rotation: &CMatrix,
    i: usize,
) -> Result<StateVector> {
    let dim = rotation.rows();
    if i >= dim {
        return Err(Error::OutOfRange(format!("eigenstate index {i} out of {dim}")));
    }
    let m = 1usize << n_ancilla;
    if dim > m || n_ancilla >= psi.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "rotation dimension {dim} with {n_ancilla} ancillas on a {}-qubit state",
            psi.n_qubits()
        )));
    }
    let phys_dim = 1usize << (psi.n_qubits() - n_ancilla);
    let scale = (m as f64).sqrt(); // trial states carry norm 1/sqrt(M)
    let mut amps = vec![Complex64::ZERO; phys_dim];
    for alpha in 0..dim {
        let s = rotation[(alpha, i)] * scale;
        if s == Complex64::ZERO {
            continue;
        }
        for (p, a) in amps.iter_mut().enumerate() {
            *a += s * psi.amplitudes()[(p << n_ancilla) | alpha];
        }
    }
    let mut state = StateVector::from_amplitudes(amps)?;
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "reconstructed eigenstate has norm {norm:.12}"
        )));
    }
    state.normalize();
    Ok(state)
}

/// Thermal average of `observable` over the computed eigen-subspace at
/// inverse temperature `beta`, evaluated as `M <psi| O (x) T |psi>` with a
/// diagonal-in-the-eigenbasis ancilla operator `T`.
///
/// `T` is built from the complex-conjugated columns of `S`; for real `S` this
/// is the textbook projector sum, and the conjugation is what makes the
/// identity with the classical ensemble average hold for complex `S`.
pub fn thermal_expectation(
    psi: &StateVector,
    observable: &PauliSum,
    eigenvalues: &[f64],
    rotation: &CMatrix,
    beta: f64,
) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::InvalidArgument(format!("negative inverse temperature {beta}")));
    }
    let n_ancilla = psi
        .n_qubits()
        .checked_sub(observable.n_qubits())
        .ok_or_else(|| Error::DimensionMismatch("observable larger than the state".into()))?;
    let m = 1usize << n_ancilla;
    let dim = rotation.rows();
    if dim > m || rotation.cols() != dim || eigenvalues.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "rotation {}x{} with {} eigenvalues over {n_ancilla} ancillas",
            rotation.rows(),
            rotation.cols(),
            eigenvalues.len()
        )));
    }

    let weights = boltzmann_weights(eigenvalues, beta);

    // T[b][a] = sum_i w_i conj(S[b][i]) S[a][i]
    let mut t = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        for a in 0..dim {
            let mut acc = Complex64::ZERO;
            for (i, w) in weights.iter().enumerate() {
                acc += w * rotation[(b, i)].conj() * rotation[(a, i)];
            }
            t[(b, a)] = acc;
        }
    }

    // z = (1 (x) T) psi, then w = (O (x) 1) z
    let phys_dim = 1usize << observable.n_qubits();
    let mut z = vec![Complex64::ZERO; psi.dim()];
    for p in 0..phys_dim {
        let base = p << n_ancilla;
        for b in 0..dim {
            let mut acc = Complex64::ZERO;
            for a in 0..dim {
                acc += t[(b, a)] * psi.amplitudes()[base | a];
            }
            z[base | b] = acc;
        }
    }
    let wide = tensor_with_ancilla(observable, &PauliString::identity(n_ancilla));
    let mut oz = vec![Complex64::ZERO; psi.dim()];
    for term in wide.terms() {
        let (flip, phase, n_y) = term.string.masks();
        accumulate_pauli(&mut oz, &z, term.coefficient, flip, phase, n_y);
    }
    let value: Complex64 =
        psi.amplitudes().iter().zip(&oz).map(|(a, b)| a.conj() * b).sum::<Complex64>()
            * m as f64;
    if value.im.abs() > 1e-9 {
        return Err(Error::Consistency(format!(
            "thermal expectation has imaginary part {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Classical ensemble route for the same quantity: reconstruct each
/// eigenstate and average `<E_i|O|E_i>` with Boltzmann weights.
pub fn thermal_expectation_classical(
    psi: &StateVector,
    observable: &PauliSum,
    eigenvalues: &[f64],
    rotation: &CMatrix,
    beta: f64,
) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::InvalidArgument(format!("negative inverse temperature {beta}")));
    }
    let n_ancilla = psi
        .n_qubits()
        .checked_sub(observable.n_qubits())
        .ok_or_else(|| Error::DimensionMismatch("observable larger than the state".into()))?;
    let weights = boltzmann_weights(eigenvalues, beta);
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let state = reconstruct_eigenstate(psi, n_ancilla, rotation, i)?;
        acc += w * state.expectation(observable)?;
    }
    Ok(acc)
}

/// Normalized `exp(-beta E_i)` weights, stabilized against overflow by
/// shifting energies so the smallest is zero.
fn boltzmann_weights(eigenvalues: &[f64], beta: f64) -> Vec<f64> {
    let e_min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = eigenvalues.iter().map(|e| (-beta * (e - e_min)).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// Everything the measurement layer produces for one converged state,
/// serializable as a JSON document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceResult {
    pub mode: SubspaceMode,
    pub matrix: CMatrix,
    pub eigenvalues: Vec<f64>,
    pub rotation: CMatrix,
    /// `E_i - E_i^exact` per eigenvalue when an oracle was available.
    pub oracle_errors: Option<Vec<f64>>,
}

impl SubspaceResult {
    pub fn compute(
        psi: &StateVector,
        h: &PauliSum,
        n_ancilla: usize,
        mode: SubspaceMode,
    ) -> Result<Self> {
        let matrix = assemble_subspace_matrix(psi, h, n_ancilla, mode)?;
        let (eigenvalues, rotation) = eigenpairs_from_subspace(&matrix)?;
        Ok(Self { mode, matrix, eigenvalues, rotation, oracle_errors: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{apply_ansatz, build_initial_state, build_layered_ansatz};
    use crate::pauli::{build_tfim, dense_matrix, BoundaryCondition};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn v_rows_reproduce_transfer_operators_exactly() {
        let v = v_matrix();
        for beta in 0..2usize {
            for alpha in 0..2usize {
                let mut m = [[Complex64::ZERO; 2]; 2];
                for axis in PauliAxis::ALL {
                    let w = v.entry(beta, alpha, axis);
                    let p = axis.matrix();
                    for r in 0..2 {
                        for cc in 0..2 {
                            m[r][cc] += w * p[r][cc];
                        }
                    }
                }
                for r in 0..2 {
                    for cc in 0..2 {
                        let want =
                            if r == beta && cc == alpha { Complex64::ONE } else { Complex64::ZERO };
                        assert_eq!(m[r][cc], want, "block ({beta},{alpha}) entry ({r},{cc})");
                    }
                }
            }
        }
    }

    #[test]
    fn v_rows_have_squared_norm_one_half() {
        let v = v_matrix();
        for row in 0..4 {
            let norm: f64 = PauliAxis::ALL
                .iter()
                .map(|&a| v.entry(row / 2, row % 2, a).norm_sqr())
                .sum();
            assert!((2.0 * norm - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn h_mu_on_a_bell_pair() {
        let psi = build_initial_state(1, 1).unwrap();
        let h = PauliSum::from_terms(1, &[(1.0, "Z")]).unwrap();
        let zz = measure_h_mu(&psi, &h, &PauliString::parse("Z").unwrap()).unwrap();
        assert!((zz - 1.0).abs() < 1e-12);
        let zi = measure_h_mu(&psi, &h, &PauliString::identity(1)).unwrap();
        assert!(zi.abs() < 1e-12);
    }

    #[test]
    fn bell_pair_reconstructs_x_matrix() {
        let psi = build_initial_state(1, 1).unwrap();
        let h = PauliSum::from_terms(1, &[(1.0, "X")]).unwrap();
        let m = assemble_subspace_matrix(&psi, &h, 1, SubspaceMode::Full).unwrap();
        assert!((m[(0, 1)] - Complex64::ONE).norm() < 1e-12);
        assert!((m[(1, 0)] - Complex64::ONE).norm() < 1e-12);
        assert!(m[(0, 0)].norm() < 1e-12);
        assert!(m[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn identity_circuit_gives_diagonal_ising_energies() {
        let h = build_tfim(4, 1.0, 0.0, BoundaryCondition::Open).unwrap();
        let psi = build_initial_state(4, 2).unwrap();
        let m = assemble_subspace_matrix(&psi, &h, 2, SubspaceMode::Full).unwrap();
        // diagonal H: no off-diagonal mixing between basis states
        for b in 0..4 {
            for a in 0..4 {
                if a != b {
                    assert!(m[(b, a)].norm() < 1e-12);
                }
            }
        }
        // |00 00>, |01 00>, |10 00>, |11 00> bond energies on 4 sites
        let want = [-0.75, 0.25, -0.25, -0.25];
        for (i, w) in want.iter().enumerate() {
            assert!((m[(i, i)].re - w).abs() < 1e-12, "{} vs {}", m[(i, i)].re, w);
        }
    }

    #[test]
    fn assembled_matrix_matches_projection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (n_p, n_a) in [(3usize, 1usize), (3, 2), (4, 2)] {
            let h = build_tfim(n_p, 1.0, 0.5, BoundaryCondition::Open).unwrap();
            let circuit =
                build_layered_ansatz(n_p, 2, BoundaryCondition::Open).unwrap().with_ancillas(n_a);
            let initial = build_initial_state(n_p, n_a).unwrap();
            let theta: Vec<f64> =
                (0..circuit.n_params()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let psi = apply_ansatz(&initial, &circuit, &theta).unwrap();
            let m = 1usize << n_a;
            let assembled = assemble_subspace_matrix(&psi, &h, n_a, SubspaceMode::Full).unwrap();

            let hd = dense_matrix(&h).unwrap();
            let phys_dim = 1usize << n_p;
            for b in 0..m {
                for a in 0..m {
                    let slice = |alpha: usize| -> Vec<Complex64> {
                        (0..phys_dim).map(|p| psi.amplitudes()[(p << n_a) | alpha]).collect()
                    };
                    let sb = slice(b);
                    let sa = slice(a);
                    let hsa = hd.mul_vec(&sa);
                    let want: Complex64 =
                        sb.iter().zip(&hsa).map(|(x, y)| x.conj() * y).sum::<Complex64>()
                            * m as f64;
                    assert!(
                        (assembled[(b, a)] - want).norm() < 1e-9,
                        "({b},{a}): {} vs {want}",
                        assembled[(b, a)]
                    );
                }
            }
        }
    }

    #[test]
    fn eigenpairs_sorted_and_diagonalizing() {
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 0)] = c(3.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(2, 2)] = c(2.0, 0.0);
        let (vals, s) = eigenpairs_from_subspace(&m).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.column(0)[1].norm(), 1.0);

        let mut x = CMatrix::zeros(2, 2);
        x[(0, 1)] = Complex64::ONE;
        x[(1, 0)] = Complex64::ONE;
        let (vals, s) = eigenpairs_from_subspace(&x).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.column(0)[0].norm() - r).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_subspace_matrix_rejected() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::ONE;
        assert!(eigenpairs_from_subspace(&m).is_err());
    }

    #[test]
    fn identity_rotation_reconstructs_trial_states() {
        let psi = build_initial_state(3, 2).unwrap();
        let s = CMatrix::identity(4);
        for alpha in 0..4 {
            let e = reconstruct_eigenstate(&psi, 2, &s, alpha).unwrap();
            let (trial, _) = psi.project_ancilla(2, alpha).unwrap();
            let overlap = e.inner(&trial).unwrap();
            assert!((overlap.norm() - 1.0).abs() < 1e-12);
        }
        assert!(reconstruct_eigenstate(&psi, 2, &s, 4).is_err());
    }

    #[test]
    fn reconstructed_eigenstates_are_orthonormal_energy_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = build_tfim(3, 1.0, 0.5, BoundaryCondition::Open).unwrap();
        let circuit = build_layered_ansatz(3, 2, BoundaryCondition::Open).unwrap().with_ancillas(2);
        let initial = build_initial_state(3, 2).unwrap();
        let theta: Vec<f64> = (0..circuit.n_params()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let psi = apply_ansatz(&initial, &circuit, &theta).unwrap();
        let result = SubspaceResult::compute(&psi, &h, 2, SubspaceMode::Full).unwrap();
        let states: Vec<_> = (0..4)
            .map(|i| reconstruct_eigenstate(&psi, 2, &result.rotation, i).unwrap())
            .collect();
        for i in 0..4 {
            let e = states[i].expectation(&h).unwrap();
            assert!((e - result.eigenvalues[i]).abs() < 1e-9);
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((states[i].inner(&states[j]).unwrap().norm() - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn thermal_limits_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let h = build_tfim(4, 1.0, 0.5, BoundaryCondition::Open).unwrap();
        let circuit = build_layered_ansatz(4, 2, BoundaryCondition::Open).unwrap().with_ancillas(2);
        let initial = build_initial_state(4, 2).unwrap();
        let theta: Vec<f64> = (0..circuit.n_params()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let psi = apply_ansatz(&initial, &circuit, &theta).unwrap();
        let r = SubspaceResult::compute(&psi, &h, 2, SubspaceMode::Full).unwrap();

        // observable: total transverse magnetization sum_i X_i / 2
        let mut obs = PauliSum::new(4);
        for q in 0..4 {
            obs.add(0.5, PauliString::single(4, q, PauliAxis::X).unwrap()).unwrap();
        }

        // beta = 0: uniform average over the M computed states
        let at_zero = thermal_expectation(&psi, &obs, &r.eigenvalues, &r.rotation, 0.0).unwrap();
        let uniform: f64 = (0..4)
            .map(|i| {
                let s = reconstruct_eigenstate(&psi, 2, &r.rotation, i).unwrap();
                s.expectation(&obs).unwrap() / 4.0
            })
            .sum();
        assert!((at_zero - uniform).abs() < 1e-10);

        // large beta: ground-state expectation dominates
        let gap = r.eigenvalues[1] - r.eigenvalues[0];
        let big = 1e3 / gap;
        let frozen = thermal_expectation(&psi, &obs, &r.eigenvalues, &r.rotation, big).unwrap();
        let ground = reconstruct_eigenstate(&psi, 2, &r.rotation, 0)
            .unwrap()
            .expectation(&obs)
            .unwrap();
        assert!((frozen - ground).abs() < 1e-6);

        // ancilla route equals the classical ensemble sum for random beta
        for _ in 0..5 {
            let beta = rng.random_range(0.0..10.0);
            let eq = thermal_expectation(&psi, &obs, &r.eigenvalues, &r.rotation, beta).unwrap();
            let cl =
                thermal_expectation_classical(&psi, &obs, &r.eigenvalues, &r.rotation, beta)
                    .unwrap();
            assert!((eq - cl).abs() < 1e-9, "beta={beta}: {eq} vs {cl}");
        }

        assert!(thermal_expectation(&psi, &obs, &r.eigenvalues, &r.rotation, -1.0).is_err());
    }

    #[test]
    fn subspace_result_serializes() {
        let psi = build_initial_state(2, 1).unwrap();
        let h = build_tfim(2, 1.0, 0.5, BoundaryCondition::Open).unwrap();
        let r = SubspaceResult::compute(&psi, &h, 1, SubspaceMode::KBlock(2)).unwrap();
        let json = serde_json::to_string_pretty(&r).unwrap();
        let back: SubspaceResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.eigenvalues, r.eigenvalues);
        assert_eq!(back.matrix, r.matrix);
    }
}
