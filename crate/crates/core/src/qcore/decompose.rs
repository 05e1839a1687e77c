//! Pauli-basis expansion `ρ = 2^{-N} Σ S_{j1..jN} σ_{j1} ⊗ … ⊗ σ_{jN}`.

use num_complex::Complex64;

use super::operator::{Operator, TAU_NUM, ZERO};
use super::pauli::PauliLabel;
use super::state::DensityMatrix;
use crate::error::{Error, Result};

/// Coefficients `S_{j1..jN} = Tr[(σ_{j1} ⊗ … ⊗ σ_{jN}) ρ]` stored in lexicographic
/// order of the index tuple (`j1` most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliCoefficients {
    n_qubits: usize,
    values: Vec<f64>,
}

impl PauliCoefficients {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, indices: &[PauliLabel]) -> Result<f64> {
        if indices.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: indices.len(),
            });
        }
        Ok(self.values[flat_index(indices)])
    }

    /// All `(index tuple, coefficient)` pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<PauliLabel>, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (index_tuple(i, self.n_qubits), v))
    }
}

pub fn index_tuple(mut flat: usize, n: usize) -> Vec<PauliLabel> {
    let mut out = vec![PauliLabel::IDENTITY; n];
    for slot in out.iter_mut().rev() {
        *slot = PauliLabel::new((flat % 4) as u8).expect("base-4 digit");
        flat /= 4;
    }
    out
}

fn flat_index(indices: &[PauliLabel]) -> usize {
    indices
        .iter()
        .fold(0, |acc, l| acc * 4 + l.index() as usize)
}

/// Sparse action of a Pauli string: `P|c⟩ = phase(c) |c ⊕ flip⟩`.
fn pauli_string_action(indices: &[PauliLabel]) -> (usize, impl Fn(usize) -> Complex64 + '_) {
    let n = indices.len();
    let mut flip = 0usize;
    for (q, l) in indices.iter().enumerate() {
        if matches!(l.index(), 2 | 3) {
            flip |= 1 << (n - 1 - q);
        }
    }
    let phase = move |col: usize| {
        let mut ph = Complex64::new(1.0, 0.0);
        for (q, l) in indices.iter().enumerate() {
            let bit = (col >> (n - 1 - q)) & 1;
            match l.index() {
                1 if bit == 1 => ph = -ph,
                // σy|0⟩ = i|1⟩, σy|1⟩ = −i|0⟩
                3 => {
                    ph *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    }
                }
                _ => {}
            }
        }
        ph
    };
    (flip, phase)
}

/// `Tr[(σ_{j1} ⊗ … ⊗ σ_{jN}) op]` in `O(2^N)`.
pub fn pauli_expectation(op: &Operator, indices: &[PauliLabel]) -> Result<f64> {
    if op.n_qubits() != indices.len() {
        return Err(Error::DimensionMismatch {
            expected: op.n_qubits(),
            actual: indices.len(),
        });
    }
    let (flip, phase) = pauli_string_action(indices);
    // Tr[P ρ] = Σ_c P_{c⊕f, c} ρ_{c, c⊕f}
    let mut acc = ZERO;
    for col in 0..op.dim() {
        let row = col ^ flip;
        acc += phase(col) * op.get(col, row);
    }
    Ok(acc.re)
}

pub fn pauli_decompose(rho: &DensityMatrix, n_qubits: usize) -> Result<PauliCoefficients> {
    if rho.n_qubits() != n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_qubits,
            actual: rho.dim(),
        });
    }
    DensityMatrix::validated(rho.op().clone(), TAU_NUM)?;
    let values = (0..4usize.pow(n_qubits as u32))
        .map(|i| pauli_expectation(rho.op(), &index_tuple(i, n_qubits)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PauliCoefficients { n_qubits, values })
}

pub fn pauli_reconstruct(coefficients: &PauliCoefficients) -> Result<DensityMatrix> {
    let n = coefficients.n_qubits;
    let d = 1usize << n;
    let mut op = Operator::zeros(d);
    let norm = 1.0 / d as f64;
    for (i, &s) in coefficients.values.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let indices = index_tuple(i, n);
        let (flip, phase) = pauli_string_action(&indices);
        for col in 0..d {
            let row = col ^ flip;
            let cur = op.get(row, col);
            op.set(row, col, cur + phase(col) * (s * norm));
        }
    }
    DensityMatrix::new(op)
}
