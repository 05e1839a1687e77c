//! Small dense linear algebra, Pauli algebra and quantum states.

mod decompose;
mod operator;
mod pauli;
mod povm;
mod state;

pub use decompose::{
    index_tuple, pauli_decompose, pauli_expectation, pauli_reconstruct, PauliCoefficients,
};
pub use operator::{Operator, DEFAULT_MAX_QUBITS, TAU_NUM};
pub use pauli::{
    bell_frame_unitary, bell_state, bell_vector, observable_projectors, pauli, pauli_string,
    projector, rotated_observable, PauliLabel,
};
pub use povm::{Input, Outcome, Povm};
pub use state::{DensityMatrix, PureStateParams};

use num_complex::Complex64;

/// `|R⟩ = (|0⟩ + i|1⟩)/√2`, the +1 eigenstate of σ3.
pub fn right_circular() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::from_pure(&[Complex64::new(h, 0.0), Complex64::new(0.0, h)]).expect("normalized")
}

/// `|L⟩ = (|0⟩ − i|1⟩)/√2`, the −1 eigenstate of σ3.
pub fn left_circular() -> DensityMatrix {
    right_circular().conjugate()
}

/// Computational basis state `|bit⟩` on one qubit.
pub fn basis_state(bit: u8) -> DensityMatrix {
    let (a, b) = if bit == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
    DensityMatrix::from_pure(&[Complex64::new(a, 0.0), Complex64::new(b, 0.0)]).expect("normalized")
}

/// `|±⟩ = (|0⟩ ± |1⟩)/√2`.
pub fn plus_minus_state(sign: f64) -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::from_pure(&[
        Complex64::new(h, 0.0),
        Complex64::new(sign.signum() * h, 0.0),
    ])
    .expect("normalized")
}
