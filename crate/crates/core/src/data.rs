//! Classical input data, its fixed-point bit layout, the memory registers
//! holding it, and the protocol parameters.
//!
//! Values are unsigned `L`-bit integers stored most significant bit first:
//! bit `l` of a value carries weight `2^(L-1-l)`. A memory register holds the
//! `n` index bits of its position followed by the `L` value bits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest supported value, so that `2^L` still fits in a `u64`.
pub const MAX_VALUE_BITS: u32 = 63;

/// An unsigned `L`-bit integer with MSB-first bit addressing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPointValue {
    raw: u64,
    bits: u32,
}

impl FixedPointValue {
    pub fn raw(&self) -> u64 {
        self.raw
    }

    pub fn width(&self) -> u32 {
        self.bits
    }

    /// Bit `l`, where `l = 0` is the most significant bit.
    pub fn bit(&self, l: u32) -> bool {
        assert!(l < self.bits, "bit {l} out of range for width {}", self.bits);
        (self.raw >> (self.bits - 1 - l)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.bits).map(|l| self.bit(l)).collect()
    }

    /// Weight of bit `l` in the decoded value.
    pub fn weight(bits: u32, l: u32) -> u64 {
        1u64 << (bits - 1 - l)
    }
}

impl fmt::Display for FixedPointValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_width(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_VALUE_BITS {
        return Err(Error::InputDomain(format!(
            "value width must be in 1..={MAX_VALUE_BITS}, got {bits}"
        )));
    }
    Ok(())
}

/// Encode `value` as an `bits`-wide fixed-point value.
pub fn encode_value(value: u64, bits: u32) -> Result<FixedPointValue> {
    check_width(bits)?;
    if value >> bits != 0 {
        return Err(Error::ValueOutOfRange { index: 0, value, bits });
    }
    Ok(FixedPointValue { raw: value, bits })
}

/// Decode an MSB-first bit string.
pub fn decode_bits(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

/// The classical data set, zero-padded to `2^n` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    values: Vec<FixedPointValue>,
    bits: u32,
    n: u32,
    c_max: u64,
    original_len: usize,
}

/// Number of CPU qubits needed for `len` values: `ceil(log2(max(len, 2)))`.
pub fn qubits_for(len: usize) -> u32 {
    len.max(2).next_power_of_two().trailing_zeros()
}

/// Validate `values` against the width and zero-pad them to the next power of two.
pub fn pad_to_power_of_two(values: &[u64], bits: u32) -> Result<DataSet> {
    check_width(bits)?;
    if values.is_empty() {
        return Err(Error::InputDomain("data set is empty".into()));
    }
    let n = qubits_for(values.len());
    let mut encoded = Vec::with_capacity(1 << n);
    for (index, &value) in values.iter().enumerate() {
        let v = encode_value(value, bits).map_err(|e| match e {
            Error::ValueOutOfRange { value, bits, .. } => Error::ValueOutOfRange { index, value, bits },
            other => other,
        })?;
        encoded.push(v);
    }
    encoded.resize(1 << n, FixedPointValue { raw: 0, bits });
    let c_max = values.iter().copied().max().unwrap_or(0);
    Ok(DataSet { values: encoded, bits, n, c_max, original_len: values.len() })
}

impl DataSet {
    /// Shorthand for [`pad_to_power_of_two`].
    pub fn new(values: &[u64], bits: u32) -> Result<Self> {
        pad_to_power_of_two(values, bits)
    }

    pub fn values(&self) -> &[FixedPointValue] {
        &self.values
    }

    pub fn raw_values(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.raw).collect()
    }

    pub fn value(&self, k: usize) -> u64 {
        self.values[k].raw
    }

    /// Value width `L`.
    pub fn width(&self) -> u32 {
        self.bits
    }

    /// CPU register width `n`.
    pub fn qubits(&self) -> u32 {
        self.n
    }

    /// Padded length `2^n`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of values before zero padding.
    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn c_max(&self) -> u64 {
        self.c_max
    }

    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|v| (v.raw as f64).powi(2)).sum()
    }
}

/// Whether a memory bit is one of the index bits or one of the value bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BitRole {
    Index(u32),
    Value(u32),
}

/// One memory register `|k, c_k>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryRegister {
    pub index_bits: Vec<bool>,
    pub value_bits: Vec<bool>,
}

impl MemoryRegister {
    pub fn index(&self) -> u64 {
        decode_bits(&self.index_bits)
    }

    pub fn value(&self) -> u64 {
        decode_bits(&self.value_bits)
    }
}

/// The full classical memory. Never mutated once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalMemory {
    n: u32,
    bits: u32,
    registers: Vec<MemoryRegister>,
}

impl ClassicalMemory {
    pub fn registers(&self) -> &[MemoryRegister] {
        &self.registers
    }

    pub fn index_width(&self) -> u32 {
        self.n
    }

    pub fn value_width(&self) -> u32 {
        self.bits
    }

    /// Total number of stored bits, `2^n (n + L)`.
    pub fn total_bits(&self) -> usize {
        self.registers.len() * (self.n + self.bits) as usize
    }

    /// Read one bit, or `None` if the register or bit does not exist.
    pub fn bit(&self, register: usize, role: BitRole) -> Option<bool> {
        let reg = self.registers.get(register)?;
        match role {
            BitRole::Index(m) => reg.index_bits.get(m as usize).copied(),
            BitRole::Value(l) => reg.value_bits.get(l as usize).copied(),
        }
    }
}

/// Lay out the padded data set as `2^n` registers of index and value bits.
pub fn build_memory(data: &DataSet) -> ClassicalMemory {
    let n = data.n;
    let registers = data
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| MemoryRegister {
            index_bits: (0..n).map(|m| (k >> (n - 1 - m)) & 1 == 1).collect(),
            value_bits: v.bits(),
        })
        .collect();
    ClassicalMemory { n, bits: data.bits, registers }
}

/// Smallest rotation scale keeping every relative amplitude error within
/// `epsilon`: `c_max / sqrt(6 epsilon)`.
pub fn choose_rotation_scale(c_max: u64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if c_max == 0 {
        return Err(Error::AllZeroData);
    }
    Ok(c_max as f64 / (6.0 * epsilon).sqrt())
}

/// Non-sparsity measure `(1/2^n) sum_k (c_k / c_max)^2`, in `(0, 1]`.
pub fn density(data: &DataSet) -> Result<f64> {
    if data.c_max == 0 {
        return Err(Error::AllZeroData);
    }
    let c_max = data.c_max as f64;
    let sum: f64 = data.values.iter().map(|v| (v.raw as f64 / c_max).powi(2)).sum();
    Ok(sum / data.len() as f64)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InputDomain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// How the flag qubit outcome is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Gate-level simulation of the compiled circuit.
    #[default]
    Faithful,
    /// Closed-form amplitudes only.
    Oracle,
}

/// Where the rotation scale came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleSource {
    /// `c_max / sqrt(6 epsilon)`.
    Auto,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub rotation_scale: f64,
    pub epsilon: f64,
    pub scale_source: ScaleSource,
    pub mode: Mode,
    pub postselect: bool,
    pub seed: u64,
}

impl ProtocolParams {
    /// Pick the rotation scale from the error budget.
    pub fn from_epsilon(data: &DataSet, epsilon: f64) -> Result<Self> {
        let rotation_scale = choose_rotation_scale(data.c_max, epsilon)?;
        Ok(Self {
            rotation_scale,
            epsilon,
            scale_source: ScaleSource::Auto,
            mode: Mode::default(),
            postselect: true,
            seed: 0,
        })
    }

    /// Use a caller-supplied rotation scale. `epsilon` is kept for the bounds
    /// reported alongside the run.
    pub fn with_scale(rotation_scale: f64, epsilon: f64) -> Result<Self> {
        let params = Self {
            rotation_scale,
            epsilon,
            scale_source: ScaleSource::Explicit,
            mode: Mode::default(),
            postselect: true,
            seed: 0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn postselect(mut self, postselect: bool) -> Self {
        self.postselect = postselect;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        if !(self.rotation_scale.is_finite() && self.rotation_scale > 0.0) {
            return Err(Error::InputDomain(format!(
                "rotation scale must be positive and finite, got {}",
                self.rotation_scale
            )));
        }
        Ok(())
    }

    /// True when the explicit scale is below `c_max`, where rotations wrap.
    pub fn wraps(&self, data: &DataSet) -> bool {
        self.rotation_scale < data.c_max as f64
    }
}
