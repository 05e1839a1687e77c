//! Simulation of the certification network: device strategies, exact
//! correlation tables and finite-shot sampling.

mod network;
mod nqubit;
mod sampling;
mod strategy;

pub use network::{certification_layout, discrimination_layout, p1_exact, p2_exact};
pub use nqubit::{FactorizedCorrelation, NQubitNetwork, DEFAULT_MAX_CELLS};
pub use sampling::{sample, sample_with, CountRecord, CountsTable};
pub use strategy::{
    alice_observable, reference_third_axis, ClassicalAssignment, DeviceStrategy, ALICE_INPUTS,
    BOB_AXIS_PAIRS, BOB_SINGLE_INPUTS, CHARLIE_INPUTS,
};
