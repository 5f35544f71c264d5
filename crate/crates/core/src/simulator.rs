//! Exact execution of compiled encoding circuits.
//!
//! Two interchangeable state representations implement [`QuantumState`]:
//! [`StateVector`] stores all `2^(3n)` amplitudes and updates them in
//! parallel; [`SparseStateVector`] stores only nonzero amplitudes. Both
//! compute every updated pair with the same arithmetic, so they agree
//! bit for bit.
//!
//! Amplitude index bit `q` is the state of qubit `q`; see
//! [`RegisterLayout`](crate::circuit::RegisterLayout) for where `|k>` lives.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateKind, Qubit, RegisterLayout};
use crate::compiler::CompiledProtocol;
use crate::data::ClassicalMemory;
use crate::error::{Error, Result};
use crate::tolerance;

/// Single-qubit action applied to each `(|..0..>, |..1..>)` amplitude pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairOp {
    X,
    H,
    /// `exp(-i theta Y / 2)` stored as `(cos(theta/2), sin(theta/2))`.
    Ry { cos: f64, sin: f64 },
}

impl PairOp {
    pub fn ry(theta: f64) -> Self {
        let (sin, cos) = (theta / 2.0).sin_cos();
        PairOp::Ry { cos, sin }
    }

    #[inline]
    pub fn apply(&self, a0: &mut Complex64, a1: &mut Complex64) {
        match *self {
            PairOp::X => std::mem::swap(a0, a1),
            PairOp::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let (x, y) = (*a0, *a1);
                *a0 = (x + y) * s;
                *a1 = (x - y) * s;
            }
            PairOp::Ry { cos, sin } => {
                let (x, y) = (*a0, *a1);
                *a0 = x * cos - y * sin;
                *a1 = x * sin + y * cos;
            }
        }
    }
}

fn decompose(gate: &Gate) -> (usize, Qubit, PairOp) {
    let mask = gate.controls().iter().fold(0usize, |m, &q| m | (1 << q));
    let op = match gate.kind() {
        GateKind::H => PairOp::H,
        GateKind::X | GateKind::Cx | GateKind::Ccx => PairOp::X,
        GateKind::Ry(a) | GateKind::Cry(a) => PairOp::ry(a),
    };
    (mask, gate.target(), op)
}

/// A pure state over the protocol's quantum qubits.
pub trait QuantumState: Sized + Send {
    /// All qubits in `|0>`.
    fn zero(layout: RegisterLayout) -> Self;

    fn layout(&self) -> &RegisterLayout;

    /// Apply `op` to `target` on the subspace where every bit of
    /// `control_mask` is set.
    fn apply_controlled(&mut self, control_mask: usize, target: Qubit, op: PairOp);

    fn amplitude(&self, index: usize) -> Complex64;

    /// Visit every stored amplitude. Sparse states skip zeros.
    fn for_each_amplitude(&self, f: impl FnMut(usize, Complex64));

    fn norm_sqr(&self) -> f64 {
        let mut total = 0.0;
        self.for_each_amplitude(|_, a| total += a.norm_sqr());
        total
    }

    /// Probability mass with some bit of `mask` set.
    fn weight_where_any(&self, mask: usize) -> f64 {
        let mut total = 0.0;
        self.for_each_amplitude(|i, a| {
            if i & mask != 0 {
                total += a.norm_sqr();
            }
        });
        total
    }
}

/// Apply one gate, reading its classical condition from `memory`.
pub fn apply_gate<S: QuantumState>(state: &mut S, gate: &Gate, memory: &ClassicalMemory) -> Result<()> {
    if let Some(q) = gate.support().find(|&q| !state.layout().contains(q)) {
        return Err(Error::Internal(format!("gate {gate} touches q{q} outside the layout")));
    }
    if !gate.is_active(memory)? {
        return Ok(());
    }
    let (mask, target, op) = decompose(gate);
    state.apply_controlled(mask, target, op);
    Ok(())
}

/// Dense amplitude vector of length `2^(3n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amplitudes: Vec<Complex64>,
}

// Below this length the per-gate loop runs on the calling thread.
const PARALLEL_MIN_LEN: usize = 1 << 14;
const PARALLEL_MIN_CHUNK: usize = 1 << 12;

impl StateVector {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

fn update_half(lo: &mut [Complex64], hi: &mut [Complex64], base: usize, mask: usize, op: PairOp) {
    for (i, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
        if (base + i) & mask == mask {
            op.apply(a, b);
        }
    }
}

impl QuantumState for StateVector {
    fn zero(layout: RegisterLayout) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << layout.total_qubits()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { layout, amplitudes }
    }

    fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    fn apply_controlled(&mut self, mask: usize, target: Qubit, op: PairOp) {
        let stride = 1usize << target;
        let block = 2 * stride;
        let len = self.amplitudes.len();
        let per_block = |(bi, chunk): (usize, &mut [Complex64])| {
            let (lo, hi) = chunk.split_at_mut(stride);
            update_half(lo, hi, bi * block, mask, op);
        };
        if len < PARALLEL_MIN_LEN {
            self.amplitudes.chunks_mut(block).enumerate().for_each(per_block);
        } else if len / block >= rayon::current_num_threads() * 4 {
            self.amplitudes
                .par_chunks_mut(block)
                .with_min_len((PARALLEL_MIN_CHUNK / block).max(1))
                .enumerate()
                .for_each(per_block);
        } else {
            // Few large blocks: split each half into parallel pieces instead.
            for (bi, chunk) in self.amplitudes.chunks_mut(block).enumerate() {
                let (lo, hi) = chunk.split_at_mut(stride);
                lo.par_chunks_mut(PARALLEL_MIN_CHUNK)
                    .zip(hi.par_chunks_mut(PARALLEL_MIN_CHUNK))
                    .enumerate()
                    .for_each(|(pi, (l, h))| update_half(l, h, bi * block + pi * PARALLEL_MIN_CHUNK, mask, op));
            }
        }
    }

    fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    fn for_each_amplitude(&self, mut f: impl FnMut(usize, Complex64)) {
        for (i, &a) in self.amplitudes.iter().enumerate() {
            f(i, a);
        }
    }
}

/// Nonzero amplitudes only. The protocol keeps every ancilla a function of
/// the CPU bits, so the support never exceeds `2^(n+1)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseStateVector {
    layout: RegisterLayout,
    amplitudes: HashMap<usize, Complex64>,
}

impl SparseStateVector {
    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    /// Expand into a dense vector.
    pub fn to_dense(&self) -> StateVector {
        let mut dense = StateVector::zero(self.layout);
        dense.amplitudes[0] = Complex64::new(0.0, 0.0);
        for (&i, &a) in &self.amplitudes {
            dense.amplitudes[i] = a;
        }
        dense
    }
}

impl QuantumState for SparseStateVector {
    fn zero(layout: RegisterLayout) -> Self {
        Self { layout, amplitudes: HashMap::from([(0, Complex64::new(1.0, 0.0))]) }
    }

    fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    fn apply_controlled(&mut self, mask: usize, target: Qubit, op: PairOp) {
        let bit = 1usize << target;
        let bases: HashSet<usize> =
            self.amplitudes.keys().filter(|&&i| i & mask == mask).map(|&i| i & !bit).collect();
        let zero = Complex64::new(0.0, 0.0);
        for base in bases {
            let mut a0 = self.amplitudes.get(&base).copied().unwrap_or(zero);
            let mut a1 = self.amplitudes.get(&(base | bit)).copied().unwrap_or(zero);
            op.apply(&mut a0, &mut a1);
            for (idx, a) in [(base, a0), (base | bit, a1)] {
                if a == zero {
                    self.amplitudes.remove(&idx);
                } else {
                    self.amplitudes.insert(idx, a);
                }
            }
        }
    }

    fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes.get(&index).copied().unwrap_or_default()
    }

    fn for_each_amplitude(&self, mut f: impl FnMut(usize, Complex64)) {
        let mut keys: Vec<usize> = self.amplitudes.keys().copied().collect();
        keys.sort_unstable();
        for i in keys {
            f(i, self.amplitudes[&i]);
        }
    }
}

/// Which state representation a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Sparse,
    /// Dense up to 5 CPU qubits, sparse above.
    #[default]
    Auto,
}

/// Largest CPU width the `Auto` backend simulates densely (15 qubits).
pub const AUTO_DENSE_MAX_CPU: usize = 5;

impl Backend {
    pub fn resolve(self, layout: &RegisterLayout) -> Backend {
        match self {
            Backend::Auto if layout.cpu_width() <= AUTO_DENSE_MAX_CPU => Backend::Dense,
            Backend::Auto => Backend::Sparse,
            b => b,
        }
    }
}

/// Point in a run at which an observer is called.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Checkpoint {
    Initialized,
    /// After the match/rotate/unmatch block of register `k`.
    Block(usize),
}

/// Run the circuit from `|0...0>`, calling `observe` after the initializer
/// and after every register block.
pub fn run_observed<S: QuantumState>(
    protocol: &CompiledProtocol,
    mut observe: impl FnMut(Checkpoint, &S),
) -> Result<S> {
    let circuit = &protocol.circuit;
    let memory = circuit.memory();
    let gates = circuit.gates();
    let mut state = S::zero(*circuit.layout());
    for g in &gates[protocol.init.clone()] {
        apply_gate(&mut state, g, memory)?;
    }
    observe(Checkpoint::Initialized, &state);
    for (k, block) in protocol.blocks.iter().enumerate() {
        for g in &gates[block.clone()] {
            apply_gate(&mut state, g, memory)?;
        }
        observe(Checkpoint::Block(k), &state);
    }
    Ok(state)
}

pub fn run_on<S: QuantumState>(protocol: &CompiledProtocol) -> Result<S> {
    run_observed(protocol, |_, _: &S| {})
}

/// Dense pre-measurement state.
pub fn run(protocol: &CompiledProtocol) -> Result<StateVector> {
    run_on(protocol)
}

/// Result of measuring the flag and keeping the `|1>` outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelection {
    /// Renormalized CPU amplitudes indexed by `k`.
    pub cpu_state: Vec<Complex64>,
    pub p_success: f64,
    /// Weight outside the ancilla ground state at measurement time.
    pub leakage: f64,
}

pub fn ancilla_leakage<S: QuantumState>(state: &S) -> f64 {
    state.weight_where_any(state.layout().ancilla_mask())
}

/// Probability of reading the flag as `|1>`.
pub fn flag_probability<S: QuantumState>(state: &S) -> f64 {
    state.weight_where_any(1 << state.layout().flag())
}

/// Measure the flag, keep the `|1>` branch and renormalize the CPU register.
pub fn measure_flag_postselect<S: QuantumState>(state: &S) -> Result<PostSelection> {
    let layout = *state.layout();
    let leakage = ancilla_leakage(state);
    if leakage > tolerance::LEAKAGE {
        return Err(Error::AncillaeEntangled { leakage });
    }
    let p_success = flag_probability(state);
    if p_success < tolerance::MIN_SUCCESS_PROBABILITY {
        return Err(Error::ZeroSuccessProbability);
    }
    let flag = 1usize << layout.flag();
    let scale = p_success.sqrt().recip();
    let cpu_state = (0..1usize << layout.cpu_width())
        .map(|k| state.amplitude(layout.cpu_index(k) | flag) * scale)
        .collect();
    Ok(PostSelection { cpu_state, p_success, leakage })
}

/// Simulate on `backend` and post-select.
pub fn prepare(protocol: &CompiledProtocol, backend: Backend) -> Result<PostSelection> {
    match backend.resolve(protocol.layout()) {
        Backend::Sparse => measure_flag_postselect(&run_on::<SparseStateVector>(protocol)?),
        _ => measure_flag_postselect(&run_on::<StateVector>(protocol)?),
    }
}

fn simulated_flag_probability(protocol: &CompiledProtocol, backend: Backend) -> Result<f64> {
    Ok(match backend.resolve(protocol.layout()) {
        Backend::Sparse => flag_probability(&run_on::<SparseStateVector>(protocol)?),
        _ => flag_probability(&run_on::<StateVector>(protocol)?),
    })
}

/// Outcome of repeated runs with restart on failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub successes: u64,
    pub empirical_p: f64,
    /// `1 / empirical_p`; absent when nothing succeeded.
    pub expected_trials: Option<f64>,
    pub seed: u64,
    /// Flag probability the draws were made from.
    pub p_success: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SampleOptions {
    pub backend: Backend,
    /// Re-run the full simulation for every trial.
    pub resimulate: bool,
}

/// Uniform draw for one trial, fixed by `(seed, trial)` alone.
fn trial_draw(seed: u64, trial: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.random::<f64>()
}

pub fn sample_trials(protocol: &CompiledProtocol, trials: u64, seed: u64) -> Result<TrialStats> {
    sample_trials_with(protocol, trials, seed, SampleOptions::default())
}

pub fn sample_trials_with(
    protocol: &CompiledProtocol,
    trials: u64,
    seed: u64,
    options: SampleOptions,
) -> Result<TrialStats> {
    if trials == 0 {
        return Err(Error::InputDomain("at least one trial is required".into()));
    }
    let p_success = simulated_flag_probability(protocol, options.backend)?;
    let successes = if options.resimulate {
        (0..trials)
            .into_par_iter()
            .map(|t| Ok(u64::from(trial_draw(seed, t) < simulated_flag_probability(protocol, options.backend)?)))
            .sum::<Result<u64>>()?
    } else {
        (0..trials).into_par_iter().filter(|&t| trial_draw(seed, t) < p_success).count() as u64
    };
    let empirical_p = successes as f64 / trials as f64;
    Ok(TrialStats {
        trials,
        successes,
        empirical_p,
        expected_trials: (successes > 0).then(|| empirical_p.recip()),
        seed,
        p_success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ClassicalCondition, layout_for};
    use crate::compiler::compile;
    use crate::data::{DataSet, ProtocolParams, build_memory};
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn memory() -> ClassicalMemory {
        build_memory(&DataSet::new(&[1, 0], 1).unwrap())
    }

    fn protocol(values: &[u64], bits: u32, r: f64) -> CompiledProtocol {
        let data = DataSet::new(values, bits).unwrap();
        compile(&data, &ProtocolParams::with_scale(r, 0.01).unwrap()).unwrap()
    }

    #[test]
    fn x_flips() {
        let mut s = StateVector::zero(layout_for(1).unwrap());
        apply_gate(&mut s, &Gate::x(0), &memory()).unwrap();
        assert_eq!(s.amplitude(1), c(1.0));
        assert_eq!(s.amplitude(0), c(0.0));
    }

    #[test]
    fn cry_pi_is_half_rotation() {
        let mut s = StateVector::zero(layout_for(1).unwrap());
        apply_gate(&mut s, &Gate::x(0), &memory()).unwrap();
        apply_gate(&mut s, &Gate::cry(PI, 0, 1), &memory()).unwrap();
        assert!((s.amplitude(0b11) - c(1.0)).norm() < 1e-15);
        assert!(s.amplitude(0b01).norm() < 1e-15);
    }

    #[test]
    fn unsatisfied_condition_is_identity() {
        let mut s = StateVector::zero(layout_for(1).unwrap());
        let before = s.clone();
        // Register 1 holds value 0.
        apply_gate(&mut s, &Gate::x(0).when(ClassicalCondition::value_bit(1, 0, true)), &memory()).unwrap();
        assert_eq!(s, before);
        apply_gate(&mut s, &Gate::x(0).when(ClassicalCondition::value_bit(0, 0, true)), &memory()).unwrap();
        assert_ne!(s, before);
    }

    #[test]
    fn gate_outside_layout_is_internal_error() {
        let mut s = StateVector::zero(layout_for(1).unwrap());
        assert!(matches!(apply_gate(&mut s, &Gate::h(7), &memory()), Err(Error::Internal(_))));
    }

    #[test]
    fn run_single_qubit_branches() {
        let p = protocol(&[1, 1], 1, 4.0);
        let s = run(&p).unwrap();
        let l = *s.layout();
        let f = 1 << l.flag();
        for k in 0..2 {
            let i = l.cpu_index(k);
            assert!((s.amplitude(i) - c(0.25f64.cos() / 2f64.sqrt())).norm() < 1e-14);
            assert!((s.amplitude(i | f) - c(0.25f64.sin() / 2f64.sqrt())).norm() < 1e-14);
        }
        assert!(ancilla_leakage(&s) < 1e-15);
    }

    #[test]
    fn zero_data_leaves_flag_untouched() {
        let p = protocol(&[0, 0, 0, 0], 3, 5.0);
        let s = run(&p).unwrap();
        for k in 0..4 {
            assert!((s.amplitude(s.layout().cpu_index(k)) - c(0.5)).norm() < 1e-15);
        }
        assert_eq!(flag_probability(&s), 0.0);
        assert_eq!(measure_flag_postselect(&s), Err(Error::ZeroSuccessProbability));
    }

    #[test]
    fn postselect_known_instance() {
        let p = protocol(&[3, 1, 2, 0], 2, 16.0);
        let post = measure_flag_postselect(&run(&p).unwrap()).unwrap();
        // Term-by-term evaluation of (1/4) sum sin^2(c_k / 16).
        assert!((post.p_success - 0.013547786143463986).abs() < 1e-12);
        let expected = [0.8007361344646756, 0.2683076619304265, 0.5355675881828518, 0.0];
        for (a, e) in post.cpu_state.iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-12);
        }
    }

    #[test]
    fn uniform_data_success_is_sin_squared() {
        for n_values in [2usize, 4, 8] {
            let p = protocol(&vec![5; n_values], 3, 7.0);
            let post = prepare(&p, Backend::Dense).unwrap();
            assert!((post.p_success - (5.0f64 / 7.0).sin().powi(2)).abs() < 1e-13);
        }
    }

    #[test]
    fn leakage_is_reported() {
        let l = layout_for(2).unwrap();
        let mut s = StateVector::zero(l);
        s.apply_controlled(0, l.parity(0), PairOp::H);
        assert!(matches!(measure_flag_postselect(&s), Err(Error::AncillaeEntangled { .. })));
    }

    #[test]
    fn sparse_matches_dense_exactly() {
        let p = protocol(&[13, 0, 7, 2, 15, 1, 9, 4], 4, 11.0);
        let dense = run(&p).unwrap();
        let sparse: SparseStateVector = run_on(&p).unwrap();
        assert!(sparse.support_len() <= 1 << (p.layout().cpu_width() + 1));
        assert_eq!(sparse.to_dense().amplitudes(), dense.amplitudes());
    }

    #[test]
    fn dense_parallel_path_matches_sequential() {
        // 6 CPU qubits: 18 qubits, above the parallel threshold.
        let values: Vec<u64> = (0..64).map(|k| (k * 37 + 11) % 32).collect();
        let p = protocol(&values, 5, 40.0);
        let dense = run(&p).unwrap();
        let sparse: SparseStateVector = run_on(&p).unwrap();
        assert_eq!(sparse.to_dense().amplitudes(), dense.amplitudes());
    }

    #[test]
    fn sampling_edge_cases() {
        // c / R = pi / 2 exactly: certain success.
        let p = protocol(&[4, 4], 3, 8.0 / PI);
        let stats = sample_trials(&p, 1000, 7).unwrap();
        assert_eq!(stats.successes, 1000);
        assert_eq!(stats.expected_trials, Some(1.0));

        let p = protocol(&[0, 0], 3, 8.0);
        let stats = sample_trials(&p, 1000, 7).unwrap();
        assert_eq!(stats.successes, 0);
        assert_eq!(stats.expected_trials, None);

        assert!(sample_trials(&p, 0, 7).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_resimulation_agrees() {
        let p = protocol(&[3, 1, 2, 0], 2, 4.0);
        let a = sample_trials(&p, 500, 42).unwrap();
        let b = sample_trials(&p, 500, 42).unwrap();
        assert_eq!(a, b);
        let opts = SampleOptions { backend: Backend::Sparse, resimulate: true };
        let r = sample_trials_with(&p, 500, 42, opts).unwrap();
        assert_eq!(r.successes, a.successes);
        let other = sample_trials(&p, 500, 43).unwrap();
        assert_eq!(other.trials, 500);
    }
}
