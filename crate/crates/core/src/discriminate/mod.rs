//! Reading Pauli statistics from the discrimination round and deciding which
//! ensemble member was prepared.

mod decide;
mod delta;
mod p2;

pub use decide::{
    discriminate, discriminate_single, DecisionOptions, DiscriminationDecision, Ensemble,
};
pub use delta::{
    all_index_tuples, choose_measurement, delta, delta_operational, di_index_tuples, distance,
    nqubit_distance, select_index_nqubit, IndexChoice, Mode,
};
pub use p2::{frame_corrected_outcome, P2Table};
