//! Purified initial state and the layered brick-wall variational circuit.

use crate::statevector::{GateKind, GateSpec, StateVector};
use crate::pauli::BoundaryCondition;
use crate::{Error, Result};

/// Tolerance on the state norm after a full circuit application.
const CIRCUIT_NORM_TOL: f64 = 1e-10;

/// Ordered gate list with a parameter table. Parameterized gates act on
/// physical qubits only; ancillas are never touched after initialization.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_physical: usize,
    n_ancilla: usize,
    gates: Vec<GateSpec>,
    n_params: usize,
}

impl Circuit {
    /// Checks that every gate stays on physical qubits when parameterized and
    /// that every parameter index below `n_params` is used by at least one
    /// gate (exactly one unless parameters are deliberately shared).
    pub fn new(
        n_physical: usize,
        n_ancilla: usize,
        gates: Vec<GateSpec>,
        n_params: usize,
    ) -> Result<Self> {
        let n_total = n_physical + n_ancilla;
        let mut uses = vec![0usize; n_params];
        for gate in &gates {
            for &q in gate.qubits() {
                if q >= n_total {
                    return Err(Error::OutOfRange(format!(
                        "gate {} acts on qubit {q}, circuit has {n_total}",
                        gate.kind().name()
                    )));
                }
            }
            if let Some(p) = gate.param_index() {
                if p >= n_params {
                    return Err(Error::OutOfRange(format!(
                        "param index {p} out of {n_params}"
                    )));
                }
                if gate.qubits().iter().any(|&q| q >= n_physical) {
                    return Err(Error::InvalidArgument(format!(
                        "parameterized gate {} must stay on physical qubits",
                        gate.kind().name()
                    )));
                }
                uses[p] += 1;
            }
        }
        if let Some(unused) = uses.iter().position(|&u| u == 0) {
            return Err(Error::InvalidArgument(format!("param index {unused} is never used")));
        }
        Ok(Self { n_physical, n_ancilla, gates, n_params })
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn n_qubits(&self) -> usize {
        self.n_physical + self.n_ancilla
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    /// Per-gate angles resolved from a parameter vector; fixed gates get None.
    pub fn resolve_angles(&self, theta: &[f64]) -> Result<Vec<Option<f64>>> {
        if theta.len() != self.n_params {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters supplied, circuit has {}",
                theta.len(),
                self.n_params
            )));
        }
        Ok(self.gates.iter().map(|g| g.param_index().map(|p| theta[p])).collect())
    }

    /// Line-oriented text form: one gate per line as
    /// `KIND qubit [qubit] param_index|-`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "circuit physical={} ancilla={} params={}\n",
            self.n_physical, self.n_ancilla, self.n_params
        ));
        for g in &self.gates {
            out.push_str(g.kind().name());
            for q in g.qubits() {
                out.push_str(&format!(" {q}"));
            }
            match g.param_index() {
                Some(p) => out.push_str(&format!(" {p}\n")),
                None => out.push_str(" -\n"),
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty circuit text".into()))?;
        let mut n_physical = None;
        let mut n_ancilla = None;
        let mut n_params = None;
        for field in header.split_whitespace().skip(1) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("bad header field '{field}'")))?;
            let value: usize = value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad header value '{value}'")))?;
            match key {
                "physical" => n_physical = Some(value),
                "ancilla" => n_ancilla = Some(value),
                "params" => n_params = Some(value),
                other => {
                    return Err(Error::InvalidArgument(format!("unknown header key '{other}'")));
                }
            }
        }
        let (n_physical, n_ancilla, n_params) = match (n_physical, n_ancilla, n_params) {
            (Some(p), Some(a), Some(n)) => (p, a, n),
            _ => return Err(Error::InvalidArgument("incomplete circuit header".into())),
        };
        let mut gates = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let kind = GateKind::parse(
                parts.next().ok_or_else(|| Error::InvalidArgument("empty gate line".into()))?,
            )?;
            let mut qubits = Vec::new();
            for _ in 0..kind.arity() {
                let q: usize = parts
                    .next()
                    .ok_or_else(|| Error::InvalidArgument(format!("missing qubit in '{line}'")))?
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad qubit in '{line}'")))?;
                qubits.push(q);
            }
            let param = match parts.next() {
                Some("-") | None => None,
                Some(p) => Some(p.parse::<usize>().map_err(|_| {
                    Error::InvalidArgument(format!("bad param index in '{line}'"))
                })?),
            };
            let gate = match kind.arity() {
                1 => GateSpec::one(kind, qubits[0], param)?,
                _ => GateSpec::two(kind, qubits[0], qubits[1], param)?,
            };
            gates.push(gate);
        }
        Self::new(n_physical, n_ancilla, gates, n_params)
    }
}

/// Purified initial state: physical qubit `i < n_ancilla` is Bell-paired with
/// ancilla `i` (Hadamard on the physical qubit, then CNOT onto the ancilla);
/// the remaining physical qubits stay in |0>.
pub fn build_initial_state(n_physical: usize, n_ancilla: usize) -> Result<StateVector> {
    if n_ancilla == 0 || n_ancilla > n_physical {
        return Err(Error::InvalidArgument(format!(
            "ancilla count {n_ancilla} must be in 1..={n_physical}"
        )));
    }
    let n = n_physical + n_ancilla;
    let mut state = StateVector::init_basis_state(n, &"0".repeat(n))?;
    for i in 0..n_ancilla {
        state.apply_gate(&GateSpec::one(GateKind::Hadamard, i, None)?, None)?;
        state.apply_gate(&GateSpec::two(GateKind::Cnot, i, n_physical + i, None)?, None)?;
    }
    Ok(state)
}

fn brick_wall_pairs(n_physical: usize, bc: BoundaryCondition) -> Vec<(usize, usize)> {
    let mut even: Vec<(usize, usize)> = (0..n_physical - 1).step_by(2).map(|i| (i, i + 1)).collect();
    let mut odd: Vec<(usize, usize)> = (1..n_physical - 1).step_by(2).map(|i| (i, i + 1)).collect();
    if bc == BoundaryCondition::Periodic {
        let wrap = (n_physical - 1, 0);
        if (n_physical - 1) % 2 == 0 {
            even.push(wrap);
        } else {
            odd.push(wrap);
        }
    }
    even.extend(odd);
    even
}

/// Layered ansatz: per layer an RYY brick-wall sublayer (even nearest-neighbor
/// pairs, then odd), an RZZ sublayer in the same pattern, then `W = RX RZ RX`
/// on every physical qubit. Every gate carries its own parameter, so open
/// boundaries give `n_params = layers * (2 (n_physical - 1) + 3 n_physical)`.
pub fn build_layered_ansatz(
    n_physical: usize,
    layers: usize,
    bc: BoundaryCondition,
) -> Result<Circuit> {
    build_layered_ansatz_with_sharing(n_physical, layers, bc, false)
}

/// Like [`build_layered_ansatz`] but optionally sharing one angle per sublayer
/// within a layer (five parameters per layer: RYY, RZZ, RX, RZ, RX).
pub fn build_layered_ansatz_with_sharing(
    n_physical: usize,
    layers: usize,
    bc: BoundaryCondition,
    shared: bool,
) -> Result<Circuit> {
    if n_physical < 2 {
        return Err(Error::InvalidArgument(format!(
            "ansatz needs at least 2 physical qubits, got {n_physical}"
        )));
    }
    if layers == 0 {
        return Err(Error::InvalidArgument("ansatz needs at least one layer".into()));
    }
    let pairs = brick_wall_pairs(n_physical, bc);
    let mut gates = Vec::new();
    let mut next_param = 0usize;
    for layer in 0..layers {
        let base = layer * 5;
        let mut param = |slot: usize| -> usize {
            if shared {
                base + slot
            } else {
                let p = next_param;
                next_param += 1;
                p
            }
        };
        for &(a, b) in &pairs {
            gates.push(GateSpec::two(GateKind::Ryy, a, b, Some(param(0)))?);
        }
        for &(a, b) in &pairs {
            gates.push(GateSpec::two(GateKind::Rzz, a, b, Some(param(1)))?);
        }
        for q in 0..n_physical {
            gates.push(GateSpec::one(GateKind::Rx, q, Some(param(2)))?);
            gates.push(GateSpec::one(GateKind::Rz, q, Some(param(3)))?);
            gates.push(GateSpec::one(GateKind::Rx, q, Some(param(4)))?);
        }
    }
    let n_params = if shared { layers * 5 } else { next_param };
    // the ancilla count is fixed when the circuit is bound to an initial
    // state; a bare ansatz is physical-only
    Circuit::new(n_physical, 0, gates, n_params)
}

impl Circuit {
    /// Rebind the circuit to a register with `n_ancilla` trailing ancillas.
    /// Gate indices are unchanged since ancillas come after physical qubits.
    pub fn with_ancillas(mut self, n_ancilla: usize) -> Self {
        self.n_ancilla = n_ancilla;
        self
    }
}

/// Apply `U(theta) (x) 1_ancilla` to `initial` and return the new state.
pub fn apply_ansatz(initial: &StateVector, circuit: &Circuit, theta: &[f64]) -> Result<StateVector> {
    let angles = circuit.resolve_angles(theta)?;
    apply_with_gate_angles(initial, circuit, &angles)
}

/// Apply the circuit with one explicit angle per gate (used by the
/// parameter-shift rule, which shifts a single gate at a time).
pub fn apply_with_gate_angles(
    initial: &StateVector,
    circuit: &Circuit,
    angles: &[Option<f64>],
) -> Result<StateVector> {
    if initial.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has {} qubits, circuit needs {}",
            initial.n_qubits(),
            circuit.n_qubits()
        )));
    }
    if angles.len() != circuit.gates().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} angles for {} gates",
            angles.len(),
            circuit.gates().len()
        )));
    }
    let mut state = initial.clone();
    for (gate, angle) in circuit.gates().iter().zip(angles) {
        state.apply_gate(gate, *angle)?;
    }
    let drift = (state.norm() - 1.0).abs();
    if drift > CIRCUIT_NORM_TOL {
        return Err(Error::Consistency(format!("norm drifted by {drift:.3e} over the circuit")));
    }
    Ok(state)
}
