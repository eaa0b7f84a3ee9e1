//! Loss evaluation, gradients, and first-order optimization with restarts.
//!
//! The loss is the summed energy of the `K` trial states selected by the
//! first `K` ancilla basis states,
//! `L(theta) = sum_{alpha<K} M <psi| H (x) |alpha><alpha| |psi>`,
//! which upper-bounds the sum of the `K` lowest eigenvalues. Gradients come
//! either from the parameter-shift rule (every parameterized gate is
//! `exp(-i theta Q/2)` with `Q^2 = 1`) or from a reverse adjoint sweep.

use std::collections::VecDeque;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{apply_with_gate_angles, build_initial_state, Circuit};
use crate::pauli::{tensor_with_ancilla, PauliString, PauliSum};
use crate::statevector::{accumulate_pauli, pauli_bilinear, GateKind, GateSpec, StateVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    PlainGradientDescent,
    AdaptiveMoment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMode {
    ParameterShift,
    Adjoint,
}

/// Optimization settings. `iterations` counts recorded steps (`m` in traces);
/// `refine_after`, when set, switches from the configured first-order update
/// to a quasi-Newton (L-BFGS) refinement phase at that iteration, which is
/// what pushes final energies to the 1e-6..1e-8 regime.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub learning_rate: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub init_low: f64,
    pub init_high: f64,
    pub seed: u64,
    pub gradient_mode: GradientMode,
    pub refine_after: Option<usize>,
    pub early_stop_grad_norm: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::AdaptiveMoment,
            learning_rate: 0.01,
            iterations: 6001,
            restarts: 21,
            init_low: 0.0,
            init_high: 0.1,
            seed: 1,
            gradient_mode: GradientMode::Adjoint,
            refine_after: Some(1500),
            early_stop_grad_norm: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.init_low > self.init_high {
            return Err(Error::InvalidConfig(format!(
                "init_low {} exceeds init_high {}",
                self.init_low, self.init_high
            )));
        }
        Ok(())
    }
}

/// One optimization step: loss, the `K` per-state energies, and their sum's
/// gradient, all at the same parameter vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub loss: f64,
    pub energies: Vec<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TrainTrace {
    pub records: Vec<TraceRecord>,
}

impl TrainTrace {
    /// CSV columns: `m,loss,E_0..E_{K-1}`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let k = self.records.first().map_or(0, |r| r.energies.len());
        write!(out, "m,loss")?;
        for i in 0..k {
            write!(out, ",E_{i}")?;
        }
        writeln!(out)?;
        for r in &self.records {
            write!(out, "{},{:.17e}", r.iteration, r.loss)?;
            for e in &r.energies {
                write!(out, ",{e:.17e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub final_loss: f64,
    pub best_loss: f64,
    pub iterations_run: usize,
    pub aborted: Option<String>,
}

/// Result of [`optimize`]: the winning restart plus per-restart summaries.
#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub theta: Vec<f64>,
    pub final_loss: f64,
    pub restart_index: usize,
    pub trace: TrainTrace,
    pub summaries: Vec<RestartSummary>,
}

/// Precomputed machinery for repeated loss/gradient evaluation of one
/// (circuit, Hamiltonian, K) triple.
pub struct LossEvaluator {
    circuit: Circuit,
    k: usize,
    m: usize,
    n_ancilla: usize,
    initial: StateVector,
    /// (coefficient, flip mask, phase mask, #Y) per term of H over the full register.
    term_masks: Vec<(f64, usize, usize, u32)>,
    /// same masks restricted to the physical register, for per-slice energies
    phys_masks: Vec<(f64, usize, usize, u32)>,
}

impl LossEvaluator {
    pub fn new(circuit: &Circuit, hamiltonian: &PauliSum, k: usize) -> Result<Self> {
        if hamiltonian.n_qubits() != circuit.n_physical() {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian on {} qubits, circuit has {} physical",
                hamiltonian.n_qubits(),
                circuit.n_physical()
            )));
        }
        let n_ancilla = circuit.n_ancilla();
        let m = 1usize << n_ancilla;
        if k == 0 || k > m {
            return Err(Error::OutOfRange(format!(
                "K = {k} out of 1..={m} trial states for {n_ancilla} ancillas"
            )));
        }
        let initial = if n_ancilla == 0 {
            StateVector::init_basis_state(circuit.n_physical(), &"0".repeat(circuit.n_physical()))?
        } else {
            build_initial_state(circuit.n_physical(), n_ancilla)?
        };
        let h_full = tensor_with_ancilla(hamiltonian, &PauliString::identity(n_ancilla));
        let term_masks = h_full
            .terms()
            .iter()
            .map(|t| {
                let (flip, phase, n_y) = t.string.masks();
                (t.coefficient, flip, phase, n_y)
            })
            .collect();
        let phys_masks = hamiltonian
            .terms()
            .iter()
            .map(|t| {
                let (flip, phase, n_y) = t.string.masks();
                (t.coefficient, flip, phase, n_y)
            })
            .collect();
        Ok(Self { circuit: circuit.clone(), k, m, n_ancilla, initial, term_masks, phys_masks })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of purified trial states, `M = 2^{n_ancilla}`.
    pub fn trial_states(&self) -> usize {
        self.m
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial
    }

    fn energies_from_state(&self, state: &StateVector) -> Vec<f64> {
        let phys_dim = 1usize << self.circuit.n_physical();
        let mut energies = Vec::with_capacity(self.k);
        let mut slice = vec![Complex64::ZERO; phys_dim];
        for alpha in 0..self.k {
            for (p, a) in slice.iter_mut().enumerate() {
                *a = state.amplitudes()[(p << self.n_ancilla) | alpha];
            }
            let mut acc = Complex64::ZERO;
            for &(coeff, flip, phase, n_y) in &self.phys_masks {
                acc += coeff * pauli_bilinear(&slice, &slice, flip, phase, n_y);
            }
            energies.push(acc.re * self.m as f64);
        }
        energies
    }

    pub fn loss_and_energies(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let angles = self.circuit.resolve_angles(theta)?;
        let state = apply_with_gate_angles(&self.initial, &self.circuit, &angles)?;
        let energies = self.energies_from_state(&state);
        Ok((energies.iter().sum(), energies))
    }

    pub fn loss(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.loss_and_energies(theta)?.0)
    }

    /// Loss, per-state energies, and the full gradient from one forward pass
    /// plus one reverse sweep.
    pub fn eval_adjoint(&self, theta: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let angles = self.circuit.resolve_angles(theta)?;
        let mut phi = apply_with_gate_angles(&self.initial, &self.circuit, &angles)?;
        let energies = self.energies_from_state(&phi);
        let loss: f64 = energies.iter().sum();

        // lambda = M * (H (x) P_K) |phi>
        let dim = phi.dim();
        let mut projected = phi.amplitudes().to_vec();
        if self.k < self.m {
            let keep = self.k;
            for (i, a) in projected.iter_mut().enumerate() {
                if (i & (self.m - 1)) >= keep {
                    *a = Complex64::ZERO;
                }
            }
        }
        let mut lam_amps = vec![Complex64::ZERO; dim];
        for &(coeff, flip, phase, n_y) in &self.term_masks {
            accumulate_pauli(&mut lam_amps, &projected, coeff * self.m as f64, flip, phase, n_y);
        }
        let mut lam = StateVector::from_amplitudes(lam_amps)?;

        let mut grad = vec![0.0f64; self.circuit.n_params()];
        let n = self.circuit.n_qubits();
        for (gate, angle) in self.circuit.gates().iter().zip(&angles).rev() {
            if let Some(p) = gate.param_index() {
                grad[p] += generator_overlap(&lam, &phi, gate, n);
            }
            undo_gate(&mut phi, gate, *angle)?;
            undo_gate(&mut lam, gate, *angle)?;
        }
        Ok((loss, energies, grad))
    }

    /// Gradient by the +-pi/2 parameter-shift rule. With shared parameters the
    /// rule is applied per gate occurrence and summed.
    pub fn grad_parameter_shift(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let mut angles = self.circuit.resolve_angles(theta)?;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut grad = vec![0.0f64; self.circuit.n_params()];
        for gate_idx in 0..self.circuit.gates().len() {
            let Some(p) = self.circuit.gates()[gate_idx].param_index() else {
                continue;
            };
            let base = angles[gate_idx].expect("parameterized gate has an angle");
            angles[gate_idx] = Some(base + half_pi);
            let plus = self.loss_from_angles(&angles)?;
            angles[gate_idx] = Some(base - half_pi);
            let minus = self.loss_from_angles(&angles)?;
            angles[gate_idx] = Some(base);
            grad[p] += (plus - minus) / 2.0;
        }
        Ok(grad)
    }

    fn loss_from_angles(&self, angles: &[Option<f64>]) -> Result<f64> {
        let state = apply_with_gate_angles(&self.initial, &self.circuit, angles)?;
        Ok(self.energies_from_state(&state).iter().sum())
    }

    fn eval(&self, theta: &[f64], mode: GradientMode) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        match mode {
            GradientMode::Adjoint => self.eval_adjoint(theta),
            GradientMode::ParameterShift => {
                let (loss, energies) = self.loss_and_energies(theta)?;
                let grad = self.grad_parameter_shift(theta)?;
                Ok((loss, energies, grad))
            }
        }
    }
}

/// `Im <lam| Q |phi>` where `Q` is the gate's rotation generator; this equals
/// `2 Re <lam| dU/dtheta U^dag |state>` for `U = exp(-i theta Q / 2)`.
fn generator_overlap(lam: &StateVector, phi: &StateVector, gate: &GateSpec, n_qubits: usize) -> f64 {
    let mask = |q: usize| 1usize << (n_qubits - 1 - q);
    let qs = gate.qubits();
    let (flip, phase, n_y) = match gate.kind() {
        GateKind::Rx => (mask(qs[0]), 0, 0),
        GateKind::Rz => (0, mask(qs[0]), 0),
        GateKind::Ryy => (mask(qs[0]) | mask(qs[1]), mask(qs[0]) | mask(qs[1]), 2),
        GateKind::Rzz => (0, mask(qs[0]) | mask(qs[1]), 0),
        GateKind::Hadamard | GateKind::Cnot => unreachable!("fixed gates carry no parameter"),
    };
    pauli_bilinear(lam.amplitudes(), phi.amplitudes(), flip, phase, n_y).im
}

fn undo_gate(state: &mut StateVector, gate: &GateSpec, angle: Option<f64>) -> Result<()> {
    match gate.kind() {
        GateKind::Hadamard | GateKind::Cnot => state.apply_gate(gate, None),
        _ => state.apply_gate(gate, Some(-angle.expect("parameterized gate has an angle"))),
    }
}

/// Spec-level wrapper: total energy of the first `k` trial states.
pub fn loss(theta: &[f64], circuit: &Circuit, hamiltonian: &PauliSum, k: usize) -> Result<f64> {
    LossEvaluator::new(circuit, hamiltonian, k)?.loss(theta)
}

pub fn grad_parameter_shift(
    theta: &[f64],
    circuit: &Circuit,
    hamiltonian: &PauliSum,
    k: usize,
) -> Result<Vec<f64>> {
    LossEvaluator::new(circuit, hamiltonian, k)?.grad_parameter_shift(theta)
}

pub fn grad_adjoint(
    theta: &[f64],
    circuit: &Circuit,
    hamiltonian: &PauliSum,
    k: usize,
) -> Result<Vec<f64>> {
    Ok(LossEvaluator::new(circuit, hamiltonian, k)?.eval_adjoint(theta)?.2)
}

struct RestartRun {
    summary: RestartSummary,
    theta: Vec<f64>,
    trace: TrainTrace,
}

/// Run `config.restarts` independent seeded optimizations and return the one
/// with the lowest final loss. Restarts are embarrassingly parallel; results
/// are reduced in index order so the thread count cannot change the outcome.
pub fn optimize(
    config: &OptimizerConfig,
    circuit: &Circuit,
    hamiltonian: &PauliSum,
    k: usize,
) -> Result<OptimizeOutcome> {
    config.validate()?;
    let evaluator = LossEvaluator::new(circuit, hamiltonian, k)?;
    let runs: Vec<Result<RestartRun>> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| run_restart(&evaluator, config, restart))
        .collect();

    let mut best: Option<RestartRun> = None;
    let mut summaries = Vec::with_capacity(config.restarts);
    for run in runs {
        let run = run?;
        summaries.push(run.summary.clone());
        if run.summary.aborted.is_none() {
            let better = match &best {
                Some(b) => run.summary.final_loss < b.summary.final_loss,
                None => true,
            };
            if better {
                best = Some(run);
            }
        }
    }
    let best = best.ok_or_else(|| {
        Error::Optimization("every restart aborted with a non-finite loss".into())
    })?;
    Ok(OptimizeOutcome {
        theta: best.theta,
        final_loss: best.summary.final_loss,
        restart_index: best.summary.index,
        trace: best.trace,
        summaries,
    })
}

fn run_restart(
    evaluator: &LossEvaluator,
    config: &OptimizerConfig,
    restart: usize,
) -> Result<RestartRun> {
    let n_params = evaluator.circuit().n_params();
    let mut rng =
        ChaCha8Rng::seed_from_u64(config.seed.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    let mut theta: Vec<f64> = if config.init_low == config.init_high {
        vec![config.init_low; n_params]
    } else {
        (0..n_params).map(|_| rng.random_range(config.init_low..config.init_high)).collect()
    };

    let mut trace = TrainTrace::default();
    let mut adam_m = vec![0.0f64; n_params];
    let mut adam_v = vec![0.0f64; n_params];
    let mut lbfgs = Lbfgs::new(10);
    let refine_at = config.refine_after.unwrap_or(usize::MAX);

    let mut aborted = None;
    let mut best_loss = f64::INFINITY;
    let mut current = evaluator.eval(&theta, config.gradient_mode)?;

    let mut it = 0;
    while it < config.iterations {
        let (loss_v, energies, grad) = &current;
        if !loss_v.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            aborted = Some(format!("non-finite loss or gradient at iteration {it}"));
            break;
        }
        trace.records.push(TraceRecord { iteration: it, loss: *loss_v, energies: energies.clone() });
        best_loss = best_loss.min(*loss_v);
        if let Some(eps) = config.early_stop_grad_norm {
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm < eps {
                it += 1;
                break;
            }
        }
        if it + 1 == config.iterations {
            it += 1;
            break;
        }

        if it >= refine_at {
            current = lbfgs.step(&mut theta, current, |t| evaluator.eval(t, config.gradient_mode))?;
        } else {
            let grad = &current.2;
            match config.algorithm {
                Algorithm::PlainGradientDescent => {
                    for (t, g) in theta.iter_mut().zip(grad) {
                        *t -= config.learning_rate * g;
                    }
                }
                Algorithm::AdaptiveMoment => {
                    let t_step = (it + 1) as i32;
                    let (b1, b2, eps) = (0.9, 0.999, 1e-8);
                    for i in 0..n_params {
                        adam_m[i] = b1 * adam_m[i] + (1.0 - b1) * grad[i];
                        adam_v[i] = b2 * adam_v[i] + (1.0 - b2) * grad[i] * grad[i];
                        let m_hat = adam_m[i] / (1.0 - b1.powi(t_step));
                        let v_hat = adam_v[i] / (1.0 - b2.powi(t_step));
                        theta[i] -= config.learning_rate * m_hat / (v_hat.sqrt() + eps);
                    }
                }
            }
            current = evaluator.eval(&theta, config.gradient_mode)?;
        }
        it += 1;
    }

    let final_loss = trace.records.last().map_or(f64::NAN, |r| r.loss);
    Ok(RestartRun {
        summary: RestartSummary {
            index: restart,
            final_loss,
            best_loss,
            iterations_run: it,
            aborted,
        },
        theta,
        trace,
    })
}

/// Limited-memory BFGS with a strong-Wolfe line search; gradient-only, used
/// as the refinement phase of [`optimize`].
struct Lbfgs {
    history: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    max_history: usize,
}

type Eval = (f64, Vec<f64>, Vec<f64>);

impl Lbfgs {
    fn new(max_history: usize) -> Self {
        Self { history: VecDeque::new(), max_history }
    }

    fn direction(&self, grad: &[f64]) -> Vec<f64> {
        let mut q: Vec<f64> = grad.to_vec();
        let mut alphas = Vec::with_capacity(self.history.len());
        for (s, y, rho) in self.history.iter().rev() {
            let alpha = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= alpha * yi;
            }
            alphas.push(alpha);
        }
        if let Some((s, y, _)) = self.history.back() {
            let gamma = dot(s, y) / dot(y, y);
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
        for ((s, y, rho), alpha) in self.history.iter().zip(alphas.iter().rev()) {
            let beta = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (alpha - beta) * si;
            }
        }
        for qi in q.iter_mut() {
            *qi = -*qi;
        }
        q
    }

    /// One outer L-BFGS iteration: pick a descent direction, line-search it,
    /// update the curvature history. Returns the evaluation at the new point.
    /// If no descent is possible the parameters are left unchanged.
    fn step<F>(&mut self, theta: &mut Vec<f64>, current: Eval, eval: F) -> Result<Eval>
    where
        F: Fn(&[f64]) -> Result<Eval>,
    {
        let grad_norm = current.2.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm < 1e-14 {
            return Ok(current);
        }
        let mut dir = self.direction(&current.2);
        let mut slope = dot(&dir, &current.2);
        if !(slope < 0.0) {
            // stale curvature produced an ascent direction
            self.history.clear();
            dir = current.2.iter().map(|g| -g).collect();
            slope = -dot(&current.2, &current.2);
        }
        match wolfe_search(theta, &current, &dir, slope, &eval)? {
            Some((alpha, new_eval)) => {
                let s: Vec<f64> = dir.iter().map(|d| alpha * d).collect();
                let y: Vec<f64> = new_eval.2.iter().zip(&current.2).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-12 * norm2(&s) * norm2(&y) {
                    if self.history.len() == self.max_history {
                        self.history.pop_front();
                    }
                    let rho = 1.0 / sy;
                    self.history.push_back((s.clone(), y, rho));
                }
                for (t, si) in theta.iter_mut().zip(&s) {
                    *t += si;
                }
                Ok(new_eval)
            }
            None => {
                // converged to line-search resolution; stay put
                self.history.clear();
                Ok(current)
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Strong-Wolfe line search (bracket + zoom). Returns the accepted step and
/// its evaluation, or None when no acceptable decrease exists along `dir`.
fn wolfe_search<F>(
    theta: &[f64],
    at_zero: &Eval,
    dir: &[f64],
    slope0: f64,
    eval: &F,
) -> Result<Option<(f64, Eval)>>
where
    F: Fn(&[f64]) -> Result<Eval>,
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    const ALPHA_MAX: f64 = 1e3;
    let f0 = at_zero.0;

    let probe = |alpha: f64| -> Result<(Eval, f64)> {
        let point: Vec<f64> = theta.iter().zip(dir).map(|(t, d)| t + alpha * d).collect();
        let e = eval(&point)?;
        let slope = dot(&e.2, dir);
        Ok((e, slope))
    };

    let zoom = |mut lo: (f64, Eval, f64), mut hi: (f64, Eval, f64)| -> Result<Option<(f64, Eval)>> {
        for _ in 0..25 {
            let alpha = 0.5 * (lo.0 + hi.0);
            if (hi.0 - lo.0).abs() < 1e-16 * (1.0 + alpha.abs()) {
                break;
            }
            let (e, slope) = probe(alpha)?;
            if !e.0.is_finite() || e.0 > f0 + C1 * alpha * slope0 || e.0 >= lo.1 .0 {
                hi = (alpha, e, slope);
            } else {
                if slope.abs() <= -C2 * slope0 {
                    return Ok(Some((alpha, e)));
                }
                if slope * (hi.0 - lo.0) >= 0.0 {
                    hi = lo;
                }
                lo = (alpha, e, slope);
            }
        }
        // fall back to the best sufficient-decrease point seen
        if lo.1 .0 < f0 {
            return Ok(Some((lo.0, lo.1)));
        }
        Ok(None)
    };

    let mut prev: Option<(f64, Eval, f64)> = None;
    let mut alpha = 1.0f64;
    for i in 0..20 {
        let (e, slope) = probe(alpha)?;
        let armijo_failed = !e.0.is_finite() || e.0 > f0 + C1 * alpha * slope0;
        let not_lower_than_prev = prev.as_ref().is_some_and(|p| e.0 >= p.1 .0) && i > 0;
        if armijo_failed || not_lower_than_prev {
            let lo = match prev {
                Some(p) => p,
                None => (0.0, at_zero.clone(), slope0),
            };
            return zoom(lo, (alpha, e, slope));
        }
        if slope.abs() <= -C2 * slope0 {
            return Ok(Some((alpha, e)));
        }
        if slope >= 0.0 {
            let lo = (alpha, e, slope);
            let hi = match prev {
                Some(p) => p,
                None => (0.0, at_zero.clone(), slope0),
            };
            return zoom(lo, hi);
        }
        prev = Some((alpha, e, slope));
        alpha = (2.0 * alpha).min(ALPHA_MAX);
        if alpha >= ALPHA_MAX {
            break;
        }
    }
    match prev {
        Some((a, e, _)) if e.0 < f0 => Ok(Some((a, e))),
        _ => Ok(None),
    }
}
