//! Core of the qaccel toolchain: a double-buffered state-vector simulator
//! whose gates are basis-state mapping functions, a dense Kronecker oracle
//! to check it against, a cQASM subset toolchain, a nearest-neighbour
//! qubit mapper, evaluation metrics, and a Grover-based read aligner.

pub mod cqasm;
pub mod gates;
pub mod genomics;
pub mod mapper;
pub mod metrics;
pub mod statecore;
pub mod tensor_oracle;

pub use cqasm::{emit, parse, Program};
pub use gates::{apply_gate, GateInstance, GateKind};
pub use statecore::{Amplitude, StateVector};
