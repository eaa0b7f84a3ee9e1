//! Dense complex-amplitude simulation.
//!
//! Gates are applied in place over strided amplitude slices, O(2^n) per gate;
//! two-qubit rotations act as exact 4x4 blocks on index quadruples. Qubit 0
//! is the most significant bit of the amplitude index.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pauli::PauliSum;
use crate::{Error, Result};

/// Tolerance on the imaginary part of an expectation value of a Hermitian
/// operator before it is declared an internal inconsistency.
const IMAG_TOL: f64 = 1e-10;

/// Gate vocabulary of the simulator. Rotations are `exp(-i theta Q / 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    Rx,
    Rz,
    Ryy,
    Rzz,
    Hadamard,
    Cnot,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Rz | GateKind::Hadamard => 1,
            GateKind::Ryy | GateKind::Rzz | GateKind::Cnot => 2,
        }
    }

    pub fn is_parameterized(self) -> bool {
        !matches!(self, GateKind::Hadamard | GateKind::Cnot)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Rz => "RZ",
            GateKind::Ryy => "RYY",
            GateKind::Rzz => "RZZ",
            GateKind::Hadamard => "H",
            GateKind::Cnot => "CNOT",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "RX" => Ok(GateKind::Rx),
            "RZ" => Ok(GateKind::Rz),
            "RYY" => Ok(GateKind::Ryy),
            "RZZ" => Ok(GateKind::Rzz),
            "H" => Ok(GateKind::Hadamard),
            "CNOT" => Ok(GateKind::Cnot),
            other => Err(Error::InvalidArgument(format!("unknown gate kind '{other}'"))),
        }
    }
}

/// One gate instance: kind, operand qubits, and for parameterized kinds the
/// index of its angle in the parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateSpec {
    kind: GateKind,
    qubits: [usize; 2],
    param_index: Option<usize>,
}

impl GateSpec {
    pub fn one(kind: GateKind, qubit: usize, param_index: Option<usize>) -> Result<Self> {
        if kind.arity() != 1 {
            return Err(Error::InvalidArgument(format!("{} is not a one-qubit gate", kind.name())));
        }
        Self::check_param(kind, param_index)?;
        Ok(Self { kind, qubits: [qubit, qubit], param_index })
    }

    pub fn two(kind: GateKind, q0: usize, q1: usize, param_index: Option<usize>) -> Result<Self> {
        if kind.arity() != 2 {
            return Err(Error::InvalidArgument(format!("{} is not a two-qubit gate", kind.name())));
        }
        if q0 == q1 {
            return Err(Error::InvalidArgument(format!(
                "two-qubit gate {} needs distinct qubits, got {q0} twice",
                kind.name()
            )));
        }
        Self::check_param(kind, param_index)?;
        Ok(Self { kind, qubits: [q0, q1], param_index })
    }

    fn check_param(kind: GateKind, param_index: Option<usize>) -> Result<()> {
        match (kind.is_parameterized(), param_index) {
            (true, None) => {
                Err(Error::InvalidArgument(format!("{} requires a param_index", kind.name())))
            }
            (false, Some(_)) => {
                Err(Error::InvalidArgument(format!("{} takes no param_index", kind.name())))
            }
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn param_index(&self) -> Option<usize> {
        self.param_index
    }
}

/// Normalized complex amplitude vector over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state described by a bitstring like `"010"`
    /// (first character = qubit 0 = most significant index bit).
    pub fn init_basis_state(n_qubits: usize, bits: &str) -> Result<Self> {
        if bits.len() != n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "bitstring '{bits}' has {} bits, expected {n_qubits}",
                bits.len()
            )));
        }
        let mut index = 0usize;
        for c in bits.chars() {
            index <<= 1;
            match c {
                '0' => {}
                '1' => index |= 1,
                other => {
                    return Err(Error::InvalidArgument(format!("bit character '{other}'")));
                }
            }
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[index] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wrap raw amplitudes; the length must be a power of two. Normalization
    /// is the caller's responsibility (see [`StateVector::normalize`]).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "inner product between {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn bit_mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            return Err(Error::OutOfRange(format!(
                "qubit {qubit} out of {} qubits",
                self.n_qubits
            )));
        }
        Ok(1usize << (self.n_qubits - 1 - qubit))
    }

    /// Apply `gate` in place. `angle` must be present exactly for
    /// parameterized kinds; norm is preserved to machine precision.
    pub fn apply_gate(&mut self, gate: &GateSpec, angle: Option<f64>) -> Result<()> {
        match (gate.kind().is_parameterized(), angle) {
            (true, None) => {
                return Err(Error::InvalidArgument(format!(
                    "{} needs an angle",
                    gate.kind().name()
                )));
            }
            (false, Some(_)) => {
                return Err(Error::InvalidArgument(format!(
                    "{} takes no angle",
                    gate.kind().name()
                )));
            }
            _ => {}
        }
        match gate.kind() {
            GateKind::Rx => {
                let theta = angle.unwrap();
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let m = [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ];
                self.apply_one_qubit(gate.qubits()[0], &m)
            }
            GateKind::Rz => {
                let theta = angle.unwrap();
                let lower = Complex64::from_polar(1.0, -theta / 2.0);
                let upper = Complex64::from_polar(1.0, theta / 2.0);
                let mask = self.bit_mask(gate.qubits()[0])?;
                for chunk in self.amps.chunks_exact_mut(2 * mask) {
                    let (zero, one) = chunk.split_at_mut(mask);
                    for a in zero {
                        *a *= lower;
                    }
                    for a in one {
                        *a *= upper;
                    }
                }
                Ok(())
            }
            GateKind::Hadamard => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let m = [[h, h], [h, -h]];
                self.apply_one_qubit(gate.qubits()[0], &m)
            }
            GateKind::Ryy => {
                let theta = angle.unwrap();
                let c = Complex64::new((theta / 2.0).cos(), 0.0);
                let is = Complex64::new(0.0, (theta / 2.0).sin());
                // exp(-i theta YY / 2): pairs (00,11) couple with +i sin,
                // pairs (01,10) with -i sin.
                self.apply_two_qubit(gate.qubits()[0], gate.qubits()[1], |a00, a01, a10, a11| {
                    let n00 = c * *a00 + is * *a11;
                    let n11 = is * *a00 + c * *a11;
                    let n01 = c * *a01 - is * *a10;
                    let n10 = -is * *a01 + c * *a10;
                    (*a00, *a01, *a10, *a11) = (n00, n01, n10, n11);
                })
            }
            GateKind::Rzz => {
                let theta = angle.unwrap();
                let aligned = Complex64::from_polar(1.0, -theta / 2.0);
                let opposed = Complex64::from_polar(1.0, theta / 2.0);
                self.apply_two_qubit(gate.qubits()[0], gate.qubits()[1], |a00, a01, a10, a11| {
                    *a00 *= aligned;
                    *a01 *= opposed;
                    *a10 *= opposed;
                    *a11 *= aligned;
                })
            }
            GateKind::Cnot => {
                let control = self.bit_mask(gate.qubits()[0])?;
                let target = self.bit_mask(gate.qubits()[1])?;
                let (hi, lo) = (control.max(target), control.min(target));
                for chunk2 in self.amps.chunks_exact_mut(2 * hi) {
                    let (h0, h1) = chunk2.split_at_mut(hi);
                    for (s0, s1) in h0.chunks_exact_mut(2 * lo).zip(h1.chunks_exact_mut(2 * lo)) {
                        let (_b00, b01) = s0.split_at_mut(lo);
                        let (b10, b11) = s1.split_at_mut(lo);
                        // control bit set selects the half to swap on the target bit
                        if control == hi {
                            for (x, y) in b10.iter_mut().zip(b11.iter_mut()) {
                                std::mem::swap(x, y);
                            }
                        } else {
                            for (x, y) in b01.iter_mut().zip(b11.iter_mut()) {
                                std::mem::swap(x, y);
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn apply_one_qubit(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) -> Result<()> {
        let mask = self.bit_mask(qubit)?;
        for chunk in self.amps.chunks_exact_mut(2 * mask) {
            let (zero, one) = chunk.split_at_mut(mask);
            for (a, b) in zero.iter_mut().zip(one.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        }
        Ok(())
    }

    /// Visit amplitude quadruples as (a00, a01, a10, a11) where the first bit
    /// belongs to `q0` and the second to `q1`.
    fn apply_two_qubit<F>(&mut self, q0: usize, q1: usize, mut f: F) -> Result<()>
    where
        F: FnMut(&mut Complex64, &mut Complex64, &mut Complex64, &mut Complex64),
    {
        let m0 = self.bit_mask(q0)?;
        let m1 = self.bit_mask(q1)?;
        let (hi, lo) = (m0.max(m1), m0.min(m1));
        let q0_is_hi = m0 == hi;
        for chunk2 in self.amps.chunks_exact_mut(2 * hi) {
            let (h0, h1) = chunk2.split_at_mut(hi);
            for (s0, s1) in h0.chunks_exact_mut(2 * lo).zip(h1.chunks_exact_mut(2 * lo)) {
                let (b00, b01) = s0.split_at_mut(lo);
                let (b10, b11) = s1.split_at_mut(lo);
                for (((x00, x01), x10), x11) in
                    b00.iter_mut().zip(b01.iter_mut()).zip(b10.iter_mut()).zip(b11.iter_mut())
                {
                    // (x00, x01, x10, x11) are indexed by (bit_hi, bit_lo)
                    if q0_is_hi {
                        f(x00, x01, x10, x11);
                    } else {
                        f(x00, x10, x01, x11);
                    }
                }
            }
        }
        Ok(())
    }

    /// `<self| P |self>`; fails if the imaginary residue exceeds tolerance.
    pub fn expectation(&self, p: &PauliSum) -> Result<f64> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "operator on {} qubits, state on {}",
                p.n_qubits(),
                self.n_qubits
            )));
        }
        let mut acc = Complex64::ZERO;
        for term in p.terms() {
            let (flip, phase_mask, n_y) = term.string.masks();
            acc += term.coefficient * pauli_bilinear(&self.amps, &self.amps, flip, phase_mask, n_y);
        }
        if acc.im.abs() > IMAG_TOL {
            return Err(Error::Consistency(format!(
                "expectation of a Hermitian operator has imaginary part {:.3e}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    /// `<self| H (x) |alpha><alpha| |self>` where `H` covers the physical
    /// qubits and `alpha` indexes an ancilla basis state. Multiplying by
    /// `M = 2^{n_ancilla}` gives the energy of the alpha-th trial state.
    pub fn expectation_with_ancilla_projector(&self, h: &PauliSum, alpha: usize) -> Result<f64> {
        if h.n_qubits() > self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "operator on {} qubits, state on {}",
                h.n_qubits(),
                self.n_qubits
            )));
        }
        let n_ancilla = self.n_qubits - h.n_qubits();
        let m = 1usize << n_ancilla;
        if alpha >= m {
            return Err(Error::OutOfRange(format!(
                "ancilla index {alpha} out of range for {n_ancilla} ancillas"
            )));
        }
        let phys_dim = 1usize << h.n_qubits();
        let mut projected = vec![Complex64::ZERO; phys_dim];
        for p in 0..phys_dim {
            projected[p] = self.amps[(p << n_ancilla) | alpha];
        }
        let mut acc = Complex64::ZERO;
        for term in h.terms() {
            let (flip, phase_mask, n_y) = term.string.masks();
            acc += term.coefficient * pauli_bilinear(&projected, &projected, flip, phase_mask, n_y);
        }
        if acc.im.abs() > IMAG_TOL {
            return Err(Error::Consistency(format!(
                "projector expectation has imaginary part {:.3e}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    /// Project the ancilla register onto basis state `alpha`; returns the
    /// renormalized physical state together with the pre-normalization norm.
    pub fn project_ancilla(&self, n_ancilla: usize, alpha: usize) -> Result<(StateVector, f64)> {
        if n_ancilla > self.n_qubits {
            return Err(Error::OutOfRange(format!(
                "{n_ancilla} ancillas out of {} qubits",
                self.n_qubits
            )));
        }
        let m = 1usize << n_ancilla;
        if alpha >= m {
            return Err(Error::OutOfRange(format!("ancilla index {alpha} out of {m}")));
        }
        let phys_dim = 1usize << (self.n_qubits - n_ancilla);
        let mut projected = vec![Complex64::ZERO; phys_dim];
        for p in 0..phys_dim {
            projected[p] = self.amps[(p << n_ancilla) | alpha];
        }
        let mut state = StateVector::from_amplitudes(projected)?;
        let norm = state.norm();
        state.normalize();
        Ok((state, norm))
    }

    /// Draw `shots` computational-basis samples from |amplitude|^2;
    /// deterministic for a fixed seed.
    pub fn sample_bitstrings(&self, shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut total = 0.0f64;
        for a in &self.amps {
            total += a.norm_sqr();
            cumulative.push(total);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots {
            let r: f64 = rng.random::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c <= r).min(self.amps.len() - 1);
            let bits = format!("{:0width$b}", idx, width = self.n_qubits);
            *counts.entry(bits).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// `<a| P |b>` for the Pauli string described by its index masks:
/// `P |i> = i^{n_y} (-1)^{popcount(i & phase_mask)} |i ^ flip>`.
pub(crate) fn pauli_bilinear(
    a: &[Complex64],
    b: &[Complex64],
    flip: usize,
    phase_mask: usize,
    n_y: u32,
) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for (i, bi) in b.iter().enumerate() {
        let sign = 1.0 - 2.0 * ((i & phase_mask).count_ones() & 1) as f64;
        acc += a[i ^ flip].conj() * (sign * bi);
    }
    acc * Complex64::I.powu(n_y)
}

/// `out += coeff * P * x` for the Pauli string described by its masks.
pub(crate) fn accumulate_pauli(
    out: &mut [Complex64],
    x: &[Complex64],
    coeff: f64,
    flip: usize,
    phase_mask: usize,
    n_y: u32,
) {
    let scale = Complex64::I.powu(n_y) * coeff;
    for (i, xi) in x.iter().enumerate() {
        let sign = 1.0 - 2.0 * ((i & phase_mask).count_ones() & 1) as f64;
        out[i ^ flip] += scale * sign * xi;
    }
}
