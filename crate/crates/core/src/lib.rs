//! Amplitude encoding of classical data into a quantum register.
//!
//! `2^n` unsigned integers `c_k` sit in classical memory registers. A CPU
//! register of `n` qubits is put in uniform superposition; in branch `|k>` a
//! flag qubit is rotated by an angle proportional to `c_k`, assembled bit by
//! bit from partial-CNOT rotations controlled by a qubit that flags a match
//! between the CPU register and memory index `k`. Measuring the flag as
//! `|1>` leaves the CPU register in `sum_k sin(c_k/R) |k>`, which for large
//! `R` approximates the normalized data vector.
//!
//! * [`data`]: fixed-point values, memory layout, protocol parameters.
//! * [`circuit`]: gate IR, register layout, text format, depth and resources.
//! * [`compiler`]: emits the encoding circuit.
//! * [`simulator`]: dense and sparse exact simulation, post-selection, sampling.
//! * [`analysis`]: closed-form states, probabilities and bounds.
//! * [`cli`]: the `ampenc` command-line front-end.
//!
//! ```
//! use ampenc::prelude::*;
//!
//! let data = DataSet::new(&[3, 1, 2, 0], 2)?;
//! let params = ProtocolParams::from_epsilon(&data, 1e-3)?;
//! let protocol = compile(&data, &params)?;
//! let post = prepare(&protocol, Backend::Dense)?;
//! let oracle = oracle_final_state(&data, params.rotation_scale)?;
//! for (a, b) in post.cpu_state.iter().zip(&oracle) {
//!     assert!((a - b).norm() < 1e-10);
//! }
//! # Ok::<(), ampenc::Error>(())
//! ```

pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod compiler;
pub mod data;
mod error;
pub mod simulator;
pub mod tolerance;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        EncodingReport, estimate_norm_from_success, fidelity, ideal_target_state, oracle_final_state,
        relative_error, success_bound, success_probability, time_model,
    };
    pub use crate::circuit::{Circuit, Gate, GateKind, RegisterLayout, ResourceReport, depth, layout_for, resource_report};
    pub use crate::compiler::{CompiledProtocol, build_multi_controlled, compile};
    pub use crate::data::{
        ClassicalMemory, DataSet, Mode, ProtocolParams, build_memory, choose_rotation_scale, density, encode_value,
    };
    pub use crate::simulator::{
        Backend, PostSelection, SparseStateVector, StateVector, TrialStats, measure_flag_postselect, prepare, run,
        sample_trials,
    };
    pub use crate::{Error, Result};
}
