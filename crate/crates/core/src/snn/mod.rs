//! Deterministic discrete-time simulation of layered SRM/LIF networks with
//! rate decoding, softmax confidence, and spike-energy accounting.

mod kernel;
mod network;
mod sim;

pub use kernel::{FilterKernel, KernelKind};
pub use network::{
    forward_step, InputSequence, LayerParams, NetworkParams, NetworkState, StepOutput,
};
pub use sim::{predictive_probs, run_to_checkpoints, RunTrace, Simulation};

pub(crate) use sim::validate_checkpoints;
