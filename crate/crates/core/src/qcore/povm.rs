use serde::{Deserialize, Serialize};

use super::operator::{Operator, TAU_NUM};
use crate::error::{Error, Result};

/// Measurement outcome label. Binary measurements use `±1`, the Bell
/// measurement uses `0..=3`.
pub type Outcome = i8;

/// A measurement setting label. `Diamond` is the main party's joint
/// (Bell-basis) input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Input {
    Setting(u8),
    Diamond,
}

impl std::fmt::Display for Input {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Input::Setting(x) => write!(f, "{x}"),
            Input::Diamond => write!(f, "D"),
        }
    }
}

impl std::str::FromStr for Input {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "◇" => Ok(Input::Diamond),
            _ => s
                .parse::<u8>()
                .map(Input::Setting)
                .map_err(|_| Error::Argument(format!("cannot parse input label {s:?}"))),
        }
    }
}

/// A labelled POVM: elements are PSD and sum to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    outcomes: Vec<Outcome>,
    elements: Vec<Operator>,
}

impl Povm {
    pub fn new(elements: Vec<(Outcome, Operator)>) -> Result<Self> {
        let Some(dim) = elements.first().map(|(_, e)| e.dim()) else {
            return Err(Error::Validation("POVM has no elements".into()));
        };
        let mut sum = Operator::zeros(dim);
        let mut outcomes = Vec::with_capacity(elements.len());
        let mut ops = Vec::with_capacity(elements.len());
        for (outcome, element) in elements {
            if element.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: element.dim(),
                });
            }
            if outcomes.contains(&outcome) {
                return Err(Error::Validation(format!(
                    "duplicate POVM outcome {outcome}"
                )));
            }
            if !element.is_psd(TAU_NUM) {
                return Err(Error::Validation(format!(
                    "POVM element for outcome {outcome} is not PSD"
                )));
            }
            sum = &sum + &element;
            outcomes.push(outcome);
            ops.push(element);
        }
        if !sum.approx_eq(&Operator::identity(dim), TAU_NUM) {
            return Err(Error::Validation(
                "POVM elements do not sum to the identity".into(),
            ));
        }
        Ok(Self {
            outcomes,
            elements: ops,
        })
    }

    /// Binary measurement from `[π_{+1}, π_{−1}]`.
    pub fn binary(projectors: [Operator; 2]) -> Result<Self> {
        let [plus, minus] = projectors;
        Self::new(vec![(1, plus), (-1, minus)])
    }

    /// Measurement that returns `outcome` with certainty.
    pub fn deterministic(dim: usize, outcome: Outcome, alphabet: &[Outcome]) -> Result<Self> {
        if !alphabet.contains(&outcome) {
            return Err(Error::Argument(format!(
                "outcome {outcome} not in alphabet {alphabet:?}"
            )));
        }
        Self::new(
            alphabet
                .iter()
                .map(|&o| {
                    (
                        o,
                        if o == outcome {
                            Operator::identity(dim)
                        } else {
                            Operator::zeros(dim)
                        },
                    )
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn element(&self, outcome: Outcome) -> Result<&Operator> {
        self.outcomes
            .iter()
            .position(|&o| o == outcome)
            .map(|i| &self.elements[i])
            .ok_or_else(|| Error::Argument(format!("outcome {outcome} not in POVM")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome, &Operator)> {
        self.outcomes.iter().copied().zip(self.elements.iter())
    }

    /// Entrywise conjugate of every element.
    pub fn conj(&self) -> Self {
        Self {
            outcomes: self.outcomes.clone(),
            elements: self.elements.iter().map(Operator::conj).collect(),
        }
    }
}
