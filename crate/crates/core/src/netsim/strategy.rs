//! Device strategies for the single-qubit certification network.
//!
//! A strategy fixes the two auxiliary states `τ^{AB0}`, `τ^{BC}` and every
//! party's measurement for every input. The referee never sees it; only the
//! correlation tables derived from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    bell_state, observable_projectors, pauli, projector, rotated_observable, DensityMatrix,
    Operator, PauliLabel, Povm,
};

pub const ALICE_INPUTS: u8 = 3;
pub const BOB_SINGLE_INPUTS: u8 = 6;
pub const CHARLIE_INPUTS: u8 = 2;

/// Axis pairs `(j, k)` for Bob's observables `(σ_j ± σ_k)/√2`; input `2i+1` takes
/// the `+` sign and `2i+2` the `−` sign of pair `i`.
pub const BOB_AXIS_PAIRS: [(PauliLabel, PauliLabel); 3] = [
    (PauliLabel::Z, PauliLabel::X),
    (PauliLabel::Z, PauliLabel::Y),
    (PauliLabel::X, PauliLabel::Y),
];

#[derive(Clone, Debug, PartialEq)]
pub struct DeviceStrategy {
    label: String,
    aux_state_ab0: DensityMatrix,
    aux_state_bc: DensityMatrix,
    alice: Vec<Povm>,
    bob_single: Vec<Povm>,
    bob_bell: Povm,
    charlie: Vec<Povm>,
}

fn check_binary(povms: &[Povm], expected: u8, dim: usize, who: &str) -> Result<()> {
    if povms.len() != expected as usize {
        return Err(Error::Validation(format!(
            "{who} needs {expected} measurements, got {}",
            povms.len()
        )));
    }
    for (i, p) in povms.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.dim(),
            });
        }
        let mut o = p.outcomes().to_vec();
        o.sort_unstable();
        if o != [-1, 1] {
            return Err(Error::Validation(format!(
                "{who} input {} is not a ±1 measurement",
                i + 1
            )));
        }
    }
    Ok(())
}

impl DeviceStrategy {
    pub fn new(
        label: impl Into<String>,
        aux_state_ab0: DensityMatrix,
        aux_state_bc: DensityMatrix,
        alice: Vec<Povm>,
        bob_single: Vec<Povm>,
        bob_bell: Povm,
        charlie: Vec<Povm>,
    ) -> Result<Self> {
        for tau in [&aux_state_ab0, &aux_state_bc] {
            if tau.dim() != 4 {
                return Err(Error::DimensionMismatch {
                    expected: 4,
                    actual: tau.dim(),
                });
            }
        }
        check_binary(&alice, ALICE_INPUTS, 2, "Alice")?;
        check_binary(&bob_single, BOB_SINGLE_INPUTS, 2, "Bob")?;
        check_binary(&charlie, CHARLIE_INPUTS, 2, "Charlie")?;
        if bob_bell.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                actual: bob_bell.dim(),
            });
        }
        let mut o = bob_bell.outcomes().to_vec();
        o.sort_unstable();
        if o != [0, 1, 2, 3] {
            return Err(Error::Validation(
                "Bob's joint measurement must have outcomes 0..=3".into(),
            ));
        }
        Ok(Self {
            label: label.into(),
            aux_state_ab0,
            aux_state_bc,
            alice,
            bob_single,
            bob_bell,
            charlie,
        })
    }

    /// Maximally entangled links, Pauli observables for Alice, rotated observables
    /// for Bob and Charlie, and the reference Bell measurement.
    pub fn honest() -> Self {
        let phi0 = bell_state(0).expect("valid Bell index");
        let binary = |op: &Operator| Povm::binary(observable_projectors(op)).expect("projective");
        let alice = PauliLabel::AXES
            .iter()
            .map(|&axis| {
                Povm::binary([
                    projector(1, axis).expect("axis"),
                    projector(-1, axis).expect("axis"),
                ])
                .expect("projective")
            })
            .collect();
        let bob_single = BOB_AXIS_PAIRS
            .iter()
            .flat_map(|&(j, k)| {
                [
                    binary(&rotated_observable(j, k, 1.0)),
                    binary(&rotated_observable(j, k, -1.0)),
                ]
            })
            .collect();
        let charlie = vec![
            binary(&rotated_observable(PauliLabel::Z, PauliLabel::X, 1.0)),
            binary(&rotated_observable(PauliLabel::Z, PauliLabel::X, -1.0)),
        ];
        let bob_bell = Povm::new(
            (0..4u8)
                .map(|b| (b as i8, bell_state(b).expect("index").into_op()))
                .collect(),
        )
        .expect("Bell basis is complete");
        Self::new(
            "honest",
            phi0.clone(),
            phi0,
            alice,
            bob_single,
            bob_bell,
            charlie,
        )
        .expect("honest strategy is valid")
    }

    /// Entrywise complex conjugate of every state and measurement.
    pub fn conjugate(&self) -> Self {
        Self {
            label: format!("{}-conjugated", self.label),
            aux_state_ab0: self.aux_state_ab0.conjugate(),
            aux_state_bc: self.aux_state_bc.conjugate(),
            alice: self.alice.iter().map(Povm::conj).collect(),
            bob_single: self.bob_single.iter().map(Povm::conj).collect(),
            bob_bell: self.bob_bell.conj(),
            charlie: self.charlie.iter().map(Povm::conj).collect(),
        }
    }

    pub fn conjugated() -> Self {
        let mut s = Self::honest().conjugate();
        s.label = "conjugated".into();
        s
    }

    /// Honest measurements with both links replaced by `p Φ0 + (1 − p) I/4`.
    pub fn werner(visibility: f64) -> Result<Self> {
        let honest = Self::honest();
        let noisy = honest.aux_state_ab0.depolarized(visibility)?;
        Ok(Self {
            label: format!("werner({visibility})"),
            aux_state_ab0: noisy.clone(),
            aux_state_bc: noisy,
            ..honest
        })
    }

    /// Devices that ignore their quantum inputs and output a fixed value per input.
    pub fn classical(assignment: &ClassicalAssignment) -> Result<Self> {
        assignment.validate()?;
        let det = |o: i8| Povm::deterministic(2, o, &[1, -1]);
        let product = DensityMatrix::from_pure(&[
            num_complex::Complex64::new(1.0, 0.0),
            Default::default(),
            Default::default(),
            Default::default(),
        ])?;
        Self::new(
            "classical",
            product.clone(),
            product,
            assignment
                .alice
                .iter()
                .map(|&o| det(o))
                .collect::<Result<_>>()?,
            assignment
                .bob
                .iter()
                .map(|&o| det(o))
                .collect::<Result<_>>()?,
            Povm::deterministic(4, assignment.bob_bell as i8, &[0, 1, 2, 3])?,
            assignment
                .charlie
                .iter()
                .map(|&o| det(o))
                .collect::<Result<_>>()?,
        )
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn aux_state_ab0(&self) -> &DensityMatrix {
        &self.aux_state_ab0
    }

    pub fn aux_state_bc(&self) -> &DensityMatrix {
        &self.aux_state_bc
    }

    /// Alice's measurement for input `x ∈ 1..=3`.
    pub fn alice(&self, x: u8) -> Result<&Povm> {
        index(&self.alice, x, "Alice")
    }

    /// Bob's single-qubit measurement on `B0` for input `y ∈ 1..=6`.
    pub fn bob_single(&self, y: u8) -> Result<&Povm> {
        index(&self.bob_single, y, "Bob")
    }

    pub fn bob_bell(&self) -> &Povm {
        &self.bob_bell
    }

    pub fn charlie(&self, z: u8) -> Result<&Povm> {
        index(&self.charlie, z, "Charlie")
    }
}

fn index<'a>(v: &'a [Povm], i: u8, who: &str) -> Result<&'a Povm> {
    (i as usize)
        .checked_sub(1)
        .and_then(|k| v.get(k))
        .ok_or_else(|| Error::Argument(format!("{who} has no input {i}")))
}

/// A fixed output for every input of every party.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalAssignment {
    pub alice: [i8; 3],
    pub bob: [i8; 6],
    pub bob_bell: u8,
    pub charlie: [i8; 2],
}

impl ClassicalAssignment {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: &[i8]| v.iter().all(|&o| o == 1 || o == -1);
        if !ok(&self.alice) || !ok(&self.bob) || !ok(&self.charlie) {
            return Err(Error::Argument("classical outputs must be ±1".into()));
        }
        if self.bob_bell > 3 {
            return Err(Error::Argument(format!(
                "Bell outcome {} outside 0..=3",
                self.bob_bell
            )));
        }
        Ok(())
    }

    /// Every assignment: 2^3 · 2^6 · 4 · 2^2 = 8192 strategies.
    pub fn enumerate() -> impl Iterator<Item = ClassicalAssignment> {
        let bits = |mask: u32, i: usize| if mask >> i & 1 == 0 { 1i8 } else { -1 };
        (0u32..8).flat_map(move |a| {
            (0u32..64).flat_map(move |b| {
                (0u8..4).flat_map(move |d| {
                    (0u32..4).map(move |c| ClassicalAssignment {
                        alice: [bits(a, 0), bits(a, 1), bits(a, 2)],
                        bob: std::array::from_fn(|i| bits(b, i)),
                        bob_bell: d,
                        charlie: [bits(c, 0), bits(c, 1)],
                    })
                })
            })
        })
    }
}

/// Alice's observable `A_x` as a matrix, used by tests and the transcript.
pub fn alice_observable(strategy: &DeviceStrategy, x: u8) -> Result<Operator> {
    let p = strategy.alice(x)?;
    Ok(p.element(1)? - p.element(-1)?)
}

/// The honest third observable `σ3`.
pub fn reference_third_axis() -> Operator {
    pauli(PauliLabel::Y)
}
