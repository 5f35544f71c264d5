//! Emits the encoding circuit.
//!
//! The circuit is `init` followed by one block per memory register `k`:
//!
//! 1. match: `CX(cpu_m -> parity_m)` then `X(parity_m)` conditioned on index
//!    bit `m` of register `k` being 0, so `parity_m = 1` iff `cpu_m = k_m`;
//!    a Toffoli tree then folds the parity qubits into a single match qubit;
//! 2. rotate: one `CRY(2^(L-l) / R)` from the match qubit onto the flag for
//!    every set value bit `l`, so the flag turns by `2 c_k / R` in branch `k`;
//! 3. unmatch: the match gates in reverse order.
//!
//! The blocks commute, so enumerating them sequentially gives the same state
//! as a single query touching every register.

use std::ops::Range;
use std::sync::Arc;

use crate::circuit::{Circuit, ClassicalCondition, Gate, GateKind, Qubit, RegisterLayout, layout_for};
use crate::data::{DataSet, ProtocolParams, build_memory};
use crate::error::{Error, Result};

/// Fold `controls` into one qubit that is `|1>` iff all of them are.
///
/// Controls are paired in order and each pair is written into the next free
/// ancilla with a Toffoli; an unpaired control moves up to the next layer
/// unchanged. `K` controls use `K - 1` ancillas in `ceil(log2 K)` layers.
/// Returns the compute gates and the qubit holding the conjunction.
pub fn compression_tree(controls: &[Qubit], ancillas: &[Qubit]) -> Result<(Vec<Gate>, Qubit)> {
    if controls.is_empty() {
        return Err(Error::Configuration("no control qubits".into()));
    }
    if ancillas.len() + 1 < controls.len() {
        return Err(Error::Configuration(format!(
            "{} controls need {} ancillas, only {} available",
            controls.len(),
            controls.len() - 1,
            ancillas.len()
        )));
    }
    let mut gates = Vec::with_capacity(controls.len() - 1);
    let mut free = ancillas.iter().copied();
    let mut layer = controls.to_vec();
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        for pair in layer.chunks(2) {
            match *pair {
                [a, b] => {
                    let out = free.next().expect("ancilla count checked above");
                    gates.push(Gate::ccx(a, b, out));
                    next.push(out);
                }
                [odd] => next.push(odd),
                _ => unreachable!(),
            }
        }
        layer = next;
    }
    Ok((gates, layer[0]))
}

/// Apply `operation` controlled on every qubit in `controls`.
///
/// `operation` must be an uncontrolled `X` or `RY`; it becomes a `CX` or
/// `CRY` driven by the root of a Toffoli tree, which is then uncomputed.
pub fn build_multi_controlled(controls: &[Qubit], ancillas: &[Qubit], operation: &Gate) -> Result<Vec<Gate>> {
    let controlled_kind = match operation.kind() {
        GateKind::X => GateKind::Cx,
        GateKind::Ry(a) => GateKind::Cry(a),
        other => {
            return Err(Error::Configuration(format!("cannot add a control to {}", other.name())));
        }
    };
    let (compute, root) = compression_tree(controls, ancillas)?;
    if compute.iter().any(|g| g.target() == operation.target()) || controls.contains(&operation.target()) {
        return Err(Error::Configuration("operation target overlaps controls or ancillas".into()));
    }
    let mut core = Gate::new(controlled_kind, vec![root], operation.target())?;
    if let Some(c) = operation.condition() {
        core = core.when(c);
    }
    let mut gates = compute.clone();
    gates.push(core);
    gates.extend(compute.into_iter().rev());
    Ok(gates)
}

/// Hadamard on every CPU qubit.
pub fn build_initializer(layout: &RegisterLayout) -> Vec<Gate> {
    layout.cpu_qubits().map(Gate::h).collect()
}

/// Parity mapping and compression for register `k`.
pub fn build_match_compute(k: usize, layout: &RegisterLayout) -> Vec<Gate> {
    let n = layout.cpu_width();
    let mut gates = Vec::with_capacity(3 * n);
    for m in 0..n {
        gates.push(Gate::cx(layout.cpu(m), layout.parity(m)));
        gates.push(Gate::x(layout.parity(m)).when(ClassicalCondition::index_bit(k, m as u32, false)));
    }
    let parity: Vec<Qubit> = layout.parity_qubits().collect();
    let compression: Vec<Qubit> = layout.compression_qubits().collect();
    let (tree, root) = compression_tree(&parity, &compression).expect("layout provides n - 1 ancillas");
    debug_assert_eq!(root, layout.match_qubit());
    gates.extend(tree);
    gates
}

/// Reverse of [`build_match_compute`]. Every gate there is self-inverse.
pub fn build_match_uncompute(k: usize, layout: &RegisterLayout) -> Vec<Gate> {
    let mut gates = build_match_compute(k, layout);
    gates.reverse();
    gates
}

/// Rotation angle applied for value bit `l`: `2^(L-l) / R`.
pub fn bit_angle(width: u32, l: u32, rotation_scale: f64) -> f64 {
    2f64.powi((width - l) as i32) / rotation_scale
}

/// Flag rotations for register `k`; bits equal to zero emit nothing.
pub fn build_controlled_rotations(
    k: usize,
    data: &DataSet,
    params: &ProtocolParams,
    layout: &RegisterLayout,
) -> Vec<Gate> {
    let value = data.values()[k];
    (0..data.width())
        .filter(|&l| value.bit(l))
        .map(|l| {
            Gate::cry(bit_angle(data.width(), l, params.rotation_scale), layout.match_qubit(), layout.flag())
                .when(ClassicalCondition::value_bit(k, l, true))
        })
        .collect()
}

/// Per-register, per-bit rotation angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTable {
    bit_angles: Vec<f64>,
    applied: Vec<Vec<bool>>,
}

impl AngleTable {
    pub fn new(data: &DataSet, rotation_scale: f64) -> Self {
        Self {
            bit_angles: (0..data.width()).map(|l| bit_angle(data.width(), l, rotation_scale)).collect(),
            applied: data.values().iter().map(|v| v.bits()).collect(),
        }
    }

    /// Angle for `(k, l)` if that rotation is applied.
    pub fn angle(&self, k: usize, l: usize) -> Option<f64> {
        self.applied[k][l].then(|| self.bit_angles[l])
    }

    /// Total flag rotation in branch `k`; equals `2 c_k / R`.
    pub fn branch_total(&self, k: usize) -> f64 {
        (0..self.bit_angles.len()).filter_map(|l| self.angle(k, l)).sum()
    }

    pub fn registers(&self) -> usize {
        self.applied.len()
    }
}

#[derive(Debug, Clone)]
pub struct CompiledProtocol {
    pub circuit: Circuit,
    pub params: ProtocolParams,
    pub angle_table: AngleTable,
    pub data: DataSet,
    /// Initializer gates.
    pub init: Range<usize>,
    /// Gate ranges of the match/rotate/unmatch block for each register.
    pub blocks: Vec<Range<usize>>,
}

impl CompiledProtocol {
    pub fn layout(&self) -> &RegisterLayout {
        self.circuit.layout()
    }
}

/// Compile the full encoding circuit for `data`.
pub fn compile(data: &DataSet, params: &ProtocolParams) -> Result<CompiledProtocol> {
    params.validate()?;
    let layout = layout_for(data.qubits() as usize)?;
    let memory = Arc::new(build_memory(data));
    let mut circuit = Circuit::new(layout, memory)?;

    circuit.extend(build_initializer(&layout))?;
    let init = 0..circuit.len();
    let mut blocks = Vec::with_capacity(data.len());
    for k in 0..data.len() {
        let start = circuit.len();
        circuit.extend(build_match_compute(k, &layout))?;
        circuit.extend(build_controlled_rotations(k, data, params, &layout))?;
        circuit.extend(build_match_uncompute(k, &layout))?;
        blocks.push(start..circuit.len());
    }
    circuit.measure(layout.flag())?;

    Ok(CompiledProtocol {
        circuit,
        params: *params,
        angle_table: AngleTable::new(data, params.rotation_scale),
        data: data.clone(),
        init,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::depth_of;

    fn params(r: f64) -> ProtocolParams {
        ProtocolParams::with_scale(r, 0.01).unwrap()
    }

    #[test]
    fn initializer() {
        let l = layout_for(1).unwrap();
        assert_eq!(build_initializer(&l), vec![Gate::h(0)]);
        let l = layout_for(3).unwrap();
        assert_eq!(build_initializer(&l).len(), 3);
        assert_eq!(depth_of(&build_initializer(&layout_for(2).unwrap())), 1);
    }

    #[test]
    fn match_compute_shape() {
        let l = layout_for(1).unwrap();
        let g = build_match_compute(0, &l);
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|g| g.kind() != GateKind::Ccx));

        let l = layout_for(4).unwrap();
        let g = build_match_compute(9, &l);
        let tree: Vec<Gate> = g.iter().filter(|g| g.kind() == GateKind::Ccx).cloned().collect();
        assert_eq!(tree.len(), 3);
        assert_eq!(depth_of(&tree), 2);
        assert_eq!(tree.last().unwrap().target(), l.match_qubit());
    }

    #[test]
    fn uncompute_mirrors_compute() {
        let l = layout_for(3).unwrap();
        let mut c = build_match_compute(5, &l);
        c.reverse();
        assert_eq!(build_match_uncompute(5, &l), c);
    }

    #[test]
    fn rotation_angles() {
        assert_eq!(bit_angle(5, 0, 16.0), 2.0);

        let data = DataSet::new(&[5, 0], 5).unwrap();
        let l = layout_for(1).unwrap();
        assert!(build_controlled_rotations(1, &data, &params(20.0), &l).is_empty());

        let g = build_controlled_rotations(0, &data, &params(20.0), &l);
        let angles: Vec<f64> = g
            .iter()
            .map(|g| match g.kind() {
                GateKind::Cry(a) => a,
                _ => panic!("unexpected gate"),
            })
            .collect();
        assert_eq!(angles, vec![8.0 / 20.0, 2.0 / 20.0]);
        assert!((angles.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        assert_eq!(g[0].condition(), Some(ClassicalCondition::value_bit(0, 2, true)));
        assert_eq!(g[1].condition(), Some(ClassicalCondition::value_bit(0, 4, true)));
    }

    #[test]
    fn compile_counts() {
        let data = DataSet::new(&[1, 1], 1).unwrap();
        let p = compile(&data, &params(4.0)).unwrap();
        // H + 2 x (CX, X | CRY | X, CX)
        assert_eq!(p.circuit.len(), 1 + 2 * 5);
        assert_eq!(p.blocks.len(), 2);
        assert_eq!(p.circuit.measured(), Some(p.layout().flag()));

        let data = DataSet::new(&[3, 1, 2, 0], 2).unwrap();
        let p = compile(&data, &params(16.0)).unwrap();
        let last = &p.circuit.gates()[p.blocks[3].clone()];
        assert!(last.iter().all(|g| !matches!(g.kind(), GateKind::Cry(_))));
        for k in 0..4 {
            let expected = 2.0 * data.value(k) as f64 / 16.0;
            assert!((p.angle_table.branch_total(k) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn compression_tree_depth_is_log2() {
        for k in 1..=16usize {
            let controls: Vec<Qubit> = (0..k).collect();
            let ancillas: Vec<Qubit> = (100..100 + k.saturating_sub(1)).collect();
            let (gates, root) = compression_tree(&controls, &ancillas).unwrap();
            assert_eq!(gates.len(), k - 1);
            let expected = if k == 1 { 0 } else { (k as f64).log2().ceil() as usize };
            assert_eq!(depth_of(&gates), expected, "K = {k}");
            if k == 1 {
                assert_eq!(root, 0);
            }
        }
    }

    #[test]
    fn multi_controlled_examples() {
        let v = Gate::ry(0.3, 7);
        let g = build_multi_controlled(&[0, 1, 2, 3], &[4, 5, 6], &v).unwrap();
        let kinds: Vec<&str> = g.iter().map(|g| g.kind().name()).collect();
        assert_eq!(kinds, ["CCX", "CCX", "CCX", "CRY", "CCX", "CCX", "CCX"]);
        assert_eq!(g[3].controls(), &[6]);
        assert_eq!(g[0], Gate::ccx(0, 1, 4));
        assert_eq!(g[1], Gate::ccx(2, 3, 5));
        assert_eq!(g[2], Gate::ccx(4, 5, 6));

        let g = build_multi_controlled(&[0], &[], &v).unwrap();
        assert_eq!(g, vec![Gate::cry(0.3, 0, 7)]);

        let g = build_multi_controlled(&[0, 1], &[2], &Gate::x(3)).unwrap();
        assert_eq!(g, vec![Gate::ccx(0, 1, 2), Gate::cx(2, 3), Gate::ccx(0, 1, 2)]);

        assert!(matches!(build_multi_controlled(&[0, 1, 2], &[3], &v), Err(Error::Configuration(_))));
        assert!(matches!(build_multi_controlled(&[], &[3], &v), Err(Error::Configuration(_))));
        assert!(matches!(build_multi_controlled(&[0], &[], &Gate::h(3)), Err(Error::Configuration(_))));
    }
}
