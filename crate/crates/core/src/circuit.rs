//! Gate-level circuit representation over a fixed register layout.
//!
//! # Register layout
//!
//! For a CPU register of `n` qubits the quantum qubits are numbered
//!
//! | ids              | role                                   |
//! |------------------|----------------------------------------|
//! | `0 .. n`         | CPU register, qubit `m` holds bit `n-1-m` of `k` |
//! | `n`              | flag                                   |
//! | `n+1 .. 2n+1`    | parity ancillas                        |
//! | `2n+1 .. 3n`     | compression ancillas                   |
//!
//! # Text format
//!
//! One item per line; blank lines and lines starting with `#` are ignored.
//!
//! ```text
//! layout 2
//! h q0
//! cx q0 q3
//! x q3 if m1.i0=0
//! ccx q3 q4 q5
//! cry(0.4) q5 q2 if m2.v0=1
//! measure q2
//! ```
//!
//! `layout <n>` must come first. A gate line is the lowercase kind (rotation
//! angles in radians in parentheses, printed in shortest round-trip form),
//! the control qubits, then the target. The optional `if m<k>.<i|v><bit>=<0|1>`
//! suffix conditions the gate on index bit or value bit `bit` of memory
//! register `k`. `measure q<id>` marks the terminal flag measurement.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{BitRole, ClassicalMemory, DataSet};
use crate::error::{Error, Result};

pub type Qubit = usize;

/// Placement of the CPU, flag, parity and compression qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    n: usize,
}

/// Layout for a CPU register of `n >= 1` qubits.
pub fn layout_for(n: usize) -> Result<RegisterLayout> {
    if n == 0 {
        return Err(Error::InputDomain("CPU register needs at least one qubit".into()));
    }
    // 3n qubits must index a dense vector.
    if 3 * n >= usize::BITS as usize {
        return Err(Error::InputDomain(format!("CPU width {n} is too large")));
    }
    Ok(RegisterLayout { n })
}

impl RegisterLayout {
    pub fn cpu_width(&self) -> usize {
        self.n
    }

    pub fn cpu(&self, m: usize) -> Qubit {
        debug_assert!(m < self.n);
        m
    }

    pub fn cpu_qubits(&self) -> std::ops::Range<Qubit> {
        0..self.n
    }

    pub fn flag(&self) -> Qubit {
        self.n
    }

    pub fn parity(&self, m: usize) -> Qubit {
        debug_assert!(m < self.n);
        self.n + 1 + m
    }

    pub fn parity_qubits(&self) -> std::ops::Range<Qubit> {
        self.n + 1..2 * self.n + 1
    }

    pub fn compression(&self, j: usize) -> Qubit {
        debug_assert!(j + 1 < self.n);
        2 * self.n + 1 + j
    }

    pub fn compression_qubits(&self) -> std::ops::Range<Qubit> {
        2 * self.n + 1..3 * self.n
    }

    pub fn total_qubits(&self) -> usize {
        3 * self.n
    }

    /// Flag, parity and compression qubits.
    pub fn extra_qubits(&self) -> usize {
        self.total_qubits() - self.n
    }

    /// Qubit that is `|1>` iff the CPU register matches the queried index.
    /// For `n = 1` this is the single parity qubit.
    pub fn match_qubit(&self) -> Qubit {
        if self.n == 1 {
            self.parity(0)
        } else {
            self.compression(self.n - 2)
        }
    }

    /// Basis-state index bits occupied by the CPU ket `|k>`.
    pub fn cpu_index(&self, k: usize) -> usize {
        (0..self.n).filter(|&m| (k >> (self.n - 1 - m)) & 1 == 1).map(|m| 1 << m).sum()
    }

    /// Inverse of [`cpu_index`](Self::cpu_index) on the CPU bits of `index`.
    pub fn cpu_value(&self, index: usize) -> usize {
        (0..self.n).filter(|&m| (index >> m) & 1 == 1).map(|m| 1 << (self.n - 1 - m)).sum()
    }

    /// Mask of all parity and compression qubits.
    pub fn ancilla_mask(&self) -> usize {
        let all = (1usize << self.total_qubits()) - 1;
        all & !((1usize << (self.n + 1)) - 1)
    }

    pub fn contains(&self, q: Qubit) -> bool {
        q < self.total_qubits()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Cx,
    Ccx,
    /// Controlled `exp(-i angle Y / 2)`.
    Cry(f64),
    /// `exp(-i angle Y / 2)`.
    Ry(f64),
}

impl GateKind {
    pub fn control_count(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Ry(_) => 0,
            GateKind::Cx | GateKind::Cry(_) => 1,
            GateKind::Ccx => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Cx => "CX",
            GateKind::Ccx => "CCX",
            GateKind::Cry(_) => "CRY",
            GateKind::Ry(_) => "RY",
        }
    }
}

/// A gate that only acts when a memory bit holds `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalCondition {
    pub register: usize,
    pub bit: BitRole,
    pub value: bool,
}

impl ClassicalCondition {
    pub fn index_bit(register: usize, m: u32, value: bool) -> Self {
        Self { register, bit: BitRole::Index(m), value }
    }

    pub fn value_bit(register: usize, l: u32, value: bool) -> Self {
        Self { register, bit: BitRole::Value(l), value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    controls: Vec<Qubit>,
    target: Qubit,
    condition: Option<ClassicalCondition>,
}

impl Gate {
    pub fn new(kind: GateKind, controls: Vec<Qubit>, target: Qubit) -> Result<Self> {
        if controls.len() != kind.control_count() {
            return Err(Error::InputDomain(format!(
                "{} takes {} control(s), got {}",
                kind.name(),
                kind.control_count(),
                controls.len()
            )));
        }
        if controls.contains(&target) {
            return Err(Error::InputDomain(format!("target q{target} is also a control")));
        }
        if controls.len() == 2 && controls[0] == controls[1] {
            return Err(Error::InputDomain("duplicate control qubit".into()));
        }
        if let GateKind::Cry(a) | GateKind::Ry(a) = kind {
            if !a.is_finite() {
                return Err(Error::InputDomain(format!("rotation angle {a} is not finite")));
            }
        }
        Ok(Self { kind, controls, target, condition: None })
    }

    pub fn h(target: Qubit) -> Self {
        Self { kind: GateKind::H, controls: vec![], target, condition: None }
    }

    pub fn x(target: Qubit) -> Self {
        Self { kind: GateKind::X, controls: vec![], target, condition: None }
    }

    pub fn ry(angle: f64, target: Qubit) -> Self {
        Self { kind: GateKind::Ry(angle), controls: vec![], target, condition: None }
    }

    pub fn cx(control: Qubit, target: Qubit) -> Self {
        Self::new(GateKind::Cx, vec![control], target).expect("valid CX")
    }

    pub fn ccx(c0: Qubit, c1: Qubit, target: Qubit) -> Self {
        Self::new(GateKind::Ccx, vec![c0, c1], target).expect("valid CCX")
    }

    pub fn cry(angle: f64, control: Qubit, target: Qubit) -> Self {
        Self::new(GateKind::Cry(angle), vec![control], target).expect("valid CRY")
    }

    /// Attach a classical condition.
    pub fn when(mut self, condition: ClassicalCondition) -> Self {
        self.condition = Some(condition);
        self
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn controls(&self) -> &[Qubit] {
        &self.controls
    }

    pub fn target(&self) -> Qubit {
        self.target
    }

    pub fn condition(&self) -> Option<ClassicalCondition> {
        self.condition
    }

    /// Every quantum qubit the gate touches.
    pub fn support(&self) -> impl Iterator<Item = Qubit> + '_ {
        self.controls.iter().copied().chain(std::iter::once(self.target))
    }

    /// Whether the gate acts given the memory contents.
    pub fn is_active(&self, memory: &ClassicalMemory) -> Result<bool> {
        match self.condition {
            None => Ok(true),
            Some(c) => memory
                .bit(c.register, c.bit)
                .map(|b| b == c.value)
                .ok_or_else(|| Error::Internal(format!("condition {c:?} references missing memory"))),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::Cry(a) => write!(f, "cry({a})")?,
            GateKind::Ry(a) => write!(f, "ry({a})")?,
            k => f.write_str(&k.name().to_ascii_lowercase())?,
        }
        for q in self.support() {
            write!(f, " q{q}")?;
        }
        if let Some(c) = self.condition {
            let (tag, bit) = match c.bit {
                BitRole::Index(m) => ('i', m),
                BitRole::Value(l) => ('v', l),
            };
            write!(f, " if m{}.{tag}{bit}={}", c.register, u8::from(c.value))?;
        }
        Ok(())
    }
}

/// An ordered gate list bound to a layout and the memory its conditions read.
#[derive(Debug, Clone)]
pub struct Circuit {
    layout: RegisterLayout,
    gates: Vec<Gate>,
    measured: Option<Qubit>,
    memory: Arc<ClassicalMemory>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.layout == other.layout
            && self.gates == other.gates
            && self.measured == other.measured
            && (Arc::ptr_eq(&self.memory, &other.memory) || self.memory == other.memory)
    }
}

impl Circuit {
    pub fn new(layout: RegisterLayout, memory: Arc<ClassicalMemory>) -> Result<Self> {
        if memory.index_width() as usize != layout.cpu_width() {
            return Err(Error::InputDomain(format!(
                "memory has {} index bits but the layout has {} CPU qubits",
                memory.index_width(),
                layout.cpu_width()
            )));
        }
        Ok(Self { layout, gates: Vec::new(), measured: None, memory })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn memory(&self) -> &ClassicalMemory {
        &self.memory
    }

    pub fn shared_memory(&self) -> Arc<ClassicalMemory> {
        Arc::clone(&self.memory)
    }

    /// Qubit marked for the terminal measurement, if any.
    pub fn measured(&self) -> Option<Qubit> {
        self.measured
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if self.measured.is_some() {
            return Err(Error::InputDomain("gate after terminal measurement".into()));
        }
        if let Some(q) = gate.support().find(|&q| !self.layout.contains(q)) {
            return Err(Error::InputDomain(format!("qubit q{q} outside the layout")));
        }
        if let Some(c) = gate.condition {
            if self.memory.bit(c.register, c.bit).is_none() {
                return Err(Error::InputDomain(format!("condition {c:?} references missing memory")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    pub fn measure(&mut self, qubit: Qubit) -> Result<()> {
        if !self.layout.contains(qubit) {
            return Err(Error::InputDomain(format!("qubit q{qubit} outside the layout")));
        }
        self.measured = Some(qubit);
        Ok(())
    }

    /// Serialize to the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "layout {}", self.layout.cpu_width()).unwrap();
        for g in &self.gates {
            writeln!(out, "{g}").unwrap();
        }
        if let Some(q) = self.measured {
            writeln!(out, "measure q{q}").unwrap();
        }
        out
    }

    /// Parse the text format against a memory image.
    pub fn parse(text: &str, memory: Arc<ClassicalMemory>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (lineno, header) = lines.next().ok_or_else(|| Error::Parse("empty circuit".into()))?;
        let n = header
            .strip_prefix("layout ")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("line {lineno}: expected `layout <n>`")))?;
        let mut circuit = Circuit::new(layout_for(n)?, memory)?;
        for (lineno, line) in lines {
            let at = |msg: String| Error::Parse(format!("line {lineno}: {msg}"));
            if let Some(rest) = line.strip_prefix("measure ") {
                circuit.measure(parse_qubit(rest.trim()).map_err(at)?).map_err(|e| at(e.to_string()))?;
                continue;
            }
            let gate = parse_gate(line).map_err(at)?;
            circuit.push(gate).map_err(|e| at(e.to_string()))?;
        }
        Ok(circuit)
    }
}

fn parse_qubit(tok: &str) -> std::result::Result<Qubit, String> {
    tok.strip_prefix('q').and_then(|s| s.parse().ok()).ok_or_else(|| format!("bad qubit `{tok}`"))
}

fn parse_condition(tok: &str) -> std::result::Result<ClassicalCondition, String> {
    let bad = || format!("bad condition `{tok}`");
    let (lhs, value) = tok.split_once('=').ok_or_else(bad)?;
    let value = match value {
        "0" => false,
        "1" => true,
        _ => return Err(bad()),
    };
    let (reg, bit) = lhs.strip_prefix('m').and_then(|s| s.split_once('.')).ok_or_else(bad)?;
    let register = reg.parse().map_err(|_| bad())?;
    let idx: u32 = bit.get(1..).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let bit = match bit.as_bytes().first() {
        Some(b'i') => BitRole::Index(idx),
        Some(b'v') => BitRole::Value(idx),
        _ => return Err(bad()),
    };
    Ok(ClassicalCondition { register, bit, value })
}

fn parse_gate(line: &str) -> std::result::Result<Gate, String> {
    let (body, condition) = match line.split_once(" if ") {
        Some((b, c)) => (b, Some(parse_condition(c.trim())?)),
        None => (line, None),
    };
    let mut toks = body.split_whitespace();
    let head = toks.next().ok_or("missing gate kind")?;
    let angle = |name: &str| -> std::result::Result<f64, String> {
        head.strip_prefix(name)
            .and_then(|s| s.strip_prefix('('))
            .and_then(|s| s.strip_suffix(')'))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad rotation `{head}`"))
    };
    let kind = match head {
        "h" => GateKind::H,
        "x" => GateKind::X,
        "cx" => GateKind::Cx,
        "ccx" => GateKind::Ccx,
        h if h.starts_with("cry(") => GateKind::Cry(angle("cry")?),
        h if h.starts_with("ry(") => GateKind::Ry(angle("ry")?),
        other => return Err(format!("unknown gate `{other}`")),
    };
    let mut qubits = toks.map(parse_qubit).collect::<std::result::Result<Vec<_>, _>>()?;
    let target = qubits.pop().ok_or("missing target")?;
    let mut gate = Gate::new(kind, qubits, target).map_err(|e| e.to_string())?;
    gate.condition = condition;
    Ok(gate)
}

/// Layer index (1-based) of every gate under ASAP scheduling, where two
/// gates share a layer iff their quantum supports are disjoint.
pub fn asap_layers(gates: &[Gate]) -> Vec<usize> {
    let mut level: BTreeMap<Qubit, usize> = BTreeMap::new();
    gates
        .iter()
        .map(|g| {
            let layer = g.support().map(|q| level.get(&q).copied().unwrap_or(0)).max().unwrap_or(0) + 1;
            for q in g.support() {
                level.insert(q, layer);
            }
            layer
        })
        .collect()
}

/// Number of ASAP layers. Classical conditions never serialize gates.
pub fn depth_of(gates: &[Gate]) -> usize {
    asap_layers(gates).into_iter().max().unwrap_or(0)
}

pub fn depth(circuit: &Circuit) -> usize {
    depth_of(circuit.gates())
}

/// Static resource accounting for a compiled circuit.
///
/// `simulation_gate_total` counts the gates the simulator executes, with one
/// match/rotate/unmatch block per memory register. `query_model_gate_total`
/// is the single-query count `n + L`: one parity mapping per CPU qubit and
/// one conditional rotation per value bit, with all registers answering the
/// same physical query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub cpu_qubits: usize,
    pub value_bits: u32,
    pub quantum_qubits: usize,
    pub extra_qubits: usize,
    pub parity_ancillas: usize,
    pub compression_ancillas: usize,
    pub classical_memory_bits: usize,
    pub gate_counts: BTreeMap<String, usize>,
    pub simulation_gate_total: usize,
    pub query_model_gate_total: usize,
    pub depth_total: usize,
    pub compression_depth: usize,
}

pub fn resource_report(circuit: &Circuit, data: &DataSet) -> ResourceReport {
    let layout = circuit.layout();
    let n = layout.cpu_width();
    let mut gate_counts = BTreeMap::new();
    for g in circuit.gates() {
        *gate_counts.entry(g.kind().name().to_string()).or_insert(0) += 1;
    }
    let parity: Vec<Qubit> = layout.parity_qubits().collect();
    let compression: Vec<Qubit> = layout.compression_qubits().collect();
    let (stage, _) = crate::compiler::compression_tree(&parity, &compression)
        .expect("layout always provides n - 1 compression ancillas");
    ResourceReport {
        cpu_qubits: n,
        value_bits: data.width(),
        quantum_qubits: layout.total_qubits(),
        extra_qubits: layout.extra_qubits(),
        parity_ancillas: parity.len(),
        compression_ancillas: compression.len(),
        classical_memory_bits: circuit.memory().total_bits(),
        gate_counts,
        simulation_gate_total: circuit.len(),
        query_model_gate_total: n + data.width() as usize,
        depth_total: depth(circuit),
        compression_depth: depth_of(&stage),
    }
}
