//! Pauli-string algebra and Hamiltonian construction.
//!
//! Qubit ordering convention used everywhere in this crate: qubit 0 is the
//! most significant bit of a basis-state index. Physical qubits occupy
//! indices `0..n_physical`, ancillas occupy `n_physical..n_physical + n_ancilla`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Largest qubit count for which a dense matrix may be materialized.
pub const DENSE_QUBIT_LIMIT: usize = 14;

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 4] = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::ZERO;
        let l = Complex64::ONE;
        let i = Complex64::I;
        match self {
            PauliAxis::I => [[l, o], [o, l]],
            PauliAxis::X => [[o, l], [l, o]],
            PauliAxis::Y => [[o, -i], [i, o]],
            PauliAxis::Z => [[l, o], [o, -l]],
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(PauliAxis::I),
            'X' => Ok(PauliAxis::X),
            'Y' => Ok(PauliAxis::Y),
            'Z' => Ok(PauliAxis::Z),
            other => Err(Error::InvalidArgument(format!("unknown Pauli axis '{other}'"))),
        }
    }
}

/// Tensor product of single-qubit Paulis, one axis per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<PauliAxis>,
}

impl PauliString {
    pub fn new(axes: Vec<PauliAxis>) -> Self {
        Self { axes }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { axes: vec![PauliAxis::I; n_qubits] }
    }

    /// A string acting as `axis` on `qubit` and as identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, axis: PauliAxis) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::OutOfRange(format!("qubit {qubit} out of {n_qubits}")));
        }
        let mut axes = vec![PauliAxis::I; n_qubits];
        axes[qubit] = axis;
        Ok(Self { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|a| *a == PauliAxis::I)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let axes: Result<Vec<_>> = s.chars().map(PauliAxis::from_char).collect();
        Ok(Self { axes: axes? })
    }

    /// Bit masks driving the strided kernels: qubit `q` maps to index bit
    /// `len - 1 - q`. Returns (flip mask for X/Y, phase mask for Z/Y, #Y).
    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let n = self.axes.len();
        let mut flip = 0usize;
        let mut phase = 0usize;
        let mut n_y = 0u32;
        for (q, axis) in self.axes.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match axis {
                PauliAxis::I => {}
                PauliAxis::X => flip |= bit,
                PauliAxis::Y => {
                    flip |= bit;
                    phase |= bit;
                    n_y += 1;
                }
                PauliAxis::Z => phase |= bit,
            }
        }
        (flip, phase, n_y)
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for a in &self.axes {
            write!(f, "{}", a.to_char())?;
        }
        Ok(())
    }
}

/// One weighted Pauli string of a Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

/// Weighted sum of Pauli strings over a fixed qubit count.
///
/// Coefficients are real, so the represented operator is Hermitian. Inserting
/// a string twice merges the coefficients; terms that cancel are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn add(&mut self, coefficient: f64, string: PauliString) -> Result<()> {
        if string.len() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "string has {} axes, operator has {} qubits",
                string.len(),
                self.n_qubits
            )));
        }
        if !coefficient.is_finite() {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        if let Some(pos) = self.terms.iter().position(|t| t.string == string) {
            self.terms[pos].coefficient += coefficient;
            if self.terms[pos].coefficient == 0.0 {
                self.terms.remove(pos);
            }
        } else if coefficient != 0.0 {
            self.terms.push(PauliTerm { coefficient, string });
        }
        Ok(())
    }

    /// Convenience constructor from (coefficient, axes-string) pairs.
    pub fn from_terms(n_qubits: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let mut sum = Self::new(n_qubits);
        for (c, s) in terms {
            sum.add(*c, PauliString::parse(s)?)?;
        }
        Ok(sum)
    }
}

/// Chain boundary condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Open,
    Periodic,
}

/// Transverse-field Ising chain `H = -J sum_i S^z_i S^z_{i+1} + h_x sum_i S^x_i`
/// with spin-1/2 operators `S = sigma/2`, so ZZ terms carry `-J/4` and X terms `h_x/2`.
pub fn build_tfim(n: usize, j: f64, h_x: f64, bc: BoundaryCondition) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("TFIM needs at least 2 sites, got {n}")));
    }
    let mut sum = PauliSum::new(n);
    let bonds = match bc {
        BoundaryCondition::Open => n - 1,
        BoundaryCondition::Periodic => n,
    };
    for i in 0..bonds {
        let mut axes = vec![PauliAxis::I; n];
        axes[i] = PauliAxis::Z;
        axes[(i + 1) % n] = PauliAxis::Z;
        sum.add(-j / 4.0, PauliString::new(axes))?;
    }
    if h_x != 0.0 {
        for i in 0..n {
            sum.add(h_x / 2.0, PauliString::single(n, i, PauliAxis::X)?)?;
        }
    }
    Ok(sum)
}

/// Extend every term of `h` by the ancilla string `mu`: `h -> h (x) mu`.
/// The result acts on `h.n_qubits() + mu.len()` qubits with ancillas last.
pub fn tensor_with_ancilla(h: &PauliSum, mu: &PauliString) -> PauliSum {
    let n_total = h.n_qubits() + mu.len();
    let mut out = PauliSum::new(n_total);
    for term in h.terms() {
        let mut axes = Vec::with_capacity(n_total);
        axes.extend_from_slice(term.string.axes());
        axes.extend_from_slice(mu.axes());
        // strings stay distinct, so add() cannot fail or merge unexpectedly
        out.add(term.coefficient, PauliString::new(axes)).expect("consistent lengths");
    }
    out
}

/// Dense Hermitian matrix of the operator, dimension `2^n_qubits`.
pub fn dense_matrix(p: &PauliSum) -> Result<CMatrix> {
    if p.n_qubits() > DENSE_QUBIT_LIMIT {
        return Err(Error::SizeLimit(format!(
            "{} qubits exceeds the dense limit of {DENSE_QUBIT_LIMIT}",
            p.n_qubits()
        )));
    }
    let dim = 1usize << p.n_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    for term in p.terms() {
        let (flip, phase_mask, n_y) = term.string.masks();
        let y_factor = Complex64::I.powu(n_y);
        for col in 0..dim {
            let sign = if (col & phase_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            let row = col ^ flip;
            m[(row, col)] += term.coefficient * sign * y_factor;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tfim_term_counts_and_coefficients() {
        let h = build_tfim(2, 1.0, 0.0, BoundaryCondition::Open).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].coefficient, -0.25);
        assert_eq!(h.terms()[0].string.to_string(), "ZZ");

        let h = build_tfim(3, 1.0, 0.5, BoundaryCondition::Open).unwrap();
        let zz: Vec<_> = h.terms().iter().filter(|t| t.coefficient == -0.25).collect();
        let x: Vec<_> = h.terms().iter().filter(|t| t.coefficient == 0.25).collect();
        assert_eq!(zz.len(), 2);
        assert_eq!(x.len(), 3);
        assert_eq!(zz[0].string.to_string(), "ZZI");
        assert_eq!(zz[1].string.to_string(), "IZZ");

        let h = build_tfim(8, 1.0, 0.5, BoundaryCondition::Open).unwrap();
        assert_eq!(h.terms().len(), 15);
        let h = build_tfim(8, 1.0, 0.5, BoundaryCondition::Periodic).unwrap();
        assert_eq!(h.terms().len(), 16);
    }

    #[test]
    fn tfim_rejects_tiny_chains() {
        assert!(matches!(
            build_tfim(1, 1.0, 0.5, BoundaryCondition::Open),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn merging_sums_coefficients_and_drops_zero() {
        let mut sum = PauliSum::new(2);
        let zz = PauliString::parse("ZZ").unwrap();
        sum.add(0.5, zz.clone()).unwrap();
        sum.add(0.25, zz.clone()).unwrap();
        assert_eq!(sum.terms().len(), 1);
        assert_eq!(sum.terms()[0].coefficient, 0.75);
        sum.add(0.0, PauliString::parse("XX").unwrap()).unwrap();
        assert_eq!(sum.terms().len(), 1);
        sum.add(-0.75, zz).unwrap();
        assert!(sum.terms().is_empty());
    }

    #[test]
    fn tensor_extends_strings() {
        let h = PauliSum::from_terms(1, &[(1.0, "Z")]).unwrap();
        let out = tensor_with_ancilla(&h, &PauliString::identity(1));
        assert_eq!(out.terms()[0].string.to_string(), "ZI");
        let out = tensor_with_ancilla(&h, &PauliString::parse("X").unwrap());
        assert_eq!(out.terms()[0].string.to_string(), "ZX");
        assert_eq!(out.terms()[0].coefficient, 1.0);

        let tfim = build_tfim(8, 1.0, 0.5, BoundaryCondition::Open).unwrap();
        let out = tensor_with_ancilla(&tfim, &PauliString::identity(2));
        assert_eq!(out.n_qubits(), 10);
        assert_eq!(out.terms().len(), 15);
    }

    #[test]
    fn dense_single_qubit_x() {
        let p = PauliSum::from_terms(1, &[(0.5, "X")]).unwrap();
        let m = dense_matrix(&p).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.5, 0.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.5, 0.0));
        assert_eq!(m[(0, 0)], Complex64::ZERO);
    }

    #[test]
    fn dense_zz_is_diagonal() {
        let p = PauliSum::from_terms(2, &[(-0.25, "ZZ")]).unwrap();
        let m = dense_matrix(&p).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![-0.25, 0.25, 0.25, -0.25]);
    }

    #[test]
    fn dense_respects_qubit_zero_msb() {
        // Z on qubit 0 of two qubits: diag(+1, +1, -1, -1)
        let p = PauliSum::from_terms(2, &[(1.0, "ZI")]).unwrap();
        let m = dense_matrix(&p).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn dense_is_hermitian() {
        let h = build_tfim(5, 1.3, 0.7, BoundaryCondition::Periodic).unwrap();
        let m = dense_matrix(&h).unwrap();
        assert_eq!(m.hermitian_deviation(), 0.0);
    }

    #[test]
    fn dense_limit_enforced() {
        let p = PauliSum::new(DENSE_QUBIT_LIMIT + 1);
        assert!(matches!(dense_matrix(&p), Err(Error::SizeLimit(_))));
    }
}
