//! Pauli matrices, their eigenprojectors and the Bell basis.
//!
//! Labels follow the network convention `σ0 = I`, `σ1 = σz`, `σ2 = σx`,
//! `σ3 = σy`, which is *not* the textbook X, Y, Z order.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{Operator, I, ONE, ZERO};
use super::state::DensityMatrix;
use crate::error::{arg, Error, Result};

/// Index into `{I, σz, σx, σy}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PauliLabel(u8);

impl PauliLabel {
    pub const IDENTITY: PauliLabel = PauliLabel(0);
    pub const Z: PauliLabel = PauliLabel(1);
    pub const X: PauliLabel = PauliLabel(2);
    pub const Y: PauliLabel = PauliLabel(3);

    /// The three non-identity labels in order.
    pub const AXES: [PauliLabel; 3] = [Self::Z, Self::X, Self::Y];

    pub fn new(index: u8) -> Result<Self> {
        if index > 3 {
            return arg(format!("Pauli label {index} outside 0..=3"));
        }
        Ok(Self(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl TryFrom<u8> for PauliLabel {
    type Error = Error;
    fn try_from(value: u8) -> Result<Self> {
        Self::new(value)
    }
}

impl From<PauliLabel> for u8 {
    fn from(label: PauliLabel) -> u8 {
        label.0
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{}", self.0)
    }
}

pub fn pauli(label: PauliLabel) -> Operator {
    match label.0 {
        0 => Operator::identity(2),
        1 => Operator::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
        2 => Operator::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        _ => Operator::from_rows([[ZERO, -I], [I, ZERO]]),
    }
}

/// `π_{a|x} = (I + a σ_x) / 2` for `a = ±1` and a non-identity axis `x`.
pub fn projector(outcome: i8, axis: PauliLabel) -> Result<Operator> {
    if outcome != 1 && outcome != -1 {
        return arg(format!("projector outcome must be ±1, got {outcome}"));
    }
    if axis.is_identity() {
        return arg("projector axis must be one of σ1, σ2, σ3");
    }
    let sigma = pauli(axis).scale_real(f64::from(outcome));
    Ok((&Operator::identity(2) + &sigma).scale_real(0.5))
}

/// Unitaries `U0 = I, U1 = σ1, U2 = σ2, U3 = σ1σ2` relating Bell outcomes to Pauli frames.
pub fn bell_frame_unitary(b: u8) -> Result<Operator> {
    match b {
        0 => Ok(Operator::identity(2)),
        1 => Ok(pauli(PauliLabel::Z)),
        2 => Ok(pauli(PauliLabel::X)),
        3 => Ok(&pauli(PauliLabel::Z) * &pauli(PauliLabel::X)),
        _ => arg(format!("Bell index {b} outside 0..=3")),
    }
}

/// Amplitudes of `|Φ^b⟩` in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn bell_vector(b: u8) -> Result<[Complex64; 4]> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(match b {
        0 => [h, ZERO, ZERO, h],
        1 => [h, ZERO, ZERO, -h],
        2 => [ZERO, h, h, ZERO],
        3 => [ZERO, h, -h, ZERO],
        _ => return arg(format!("Bell index {b} outside 0..=3")),
    })
}

pub fn bell_state(b: u8) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&bell_vector(b)?)
}

/// The binary observable `(σ_j + sign σ_k) / √2`.
pub fn rotated_observable(j: PauliLabel, k: PauliLabel, sign: f64) -> Operator {
    (&pauli(j) + &pauli(k).scale_real(sign)).scale_real(std::f64::consts::FRAC_1_SQRT_2)
}

/// Eigenprojectors `(I ± A) / 2` of a binary observable, ordered `[+1, −1]`.
pub fn observable_projectors(observable: &Operator) -> [Operator; 2] {
    let id = Operator::identity(observable.dim());
    [
        (&id + observable).scale_real(0.5),
        (&id - observable).scale_real(0.5),
    ]
}

/// Tensor product of Pauli matrices, first label on qubit 0.
pub fn pauli_string(labels: &[PauliLabel]) -> Result<Operator> {
    Operator::kron_all(labels.iter().map(|&l| pauli(l)).collect::<Vec<_>>().iter())
}
