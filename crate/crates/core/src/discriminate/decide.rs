use serde::{Deserialize, Serialize};

use super::delta::{select_index_nqubit, Mode};
use super::p2::P2Table;
use crate::certify::{CertificationReport, MdiProbeResult};
use crate::error::{Error, Result};
use crate::qcore::{pauli_expectation, DensityMatrix, PauliLabel, TAU_NUM};

/// Candidate states with prior probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::DegenerateEnsemble(format!(
                "need at least two members, got {}",
                members.len()
            )));
        }
        let dim = members[0].1.dim();
        if let Some((_, s)) = members.iter().find(|(_, s)| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.dim(),
            });
        }
        if members.iter().any(|(q, _)| !(0.0..=1.0).contains(q)) {
            return Err(Error::Argument("priors must lie in [0, 1]".into()));
        }
        let total: f64 = members.iter().map(|(q, _)| q).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Argument(format!("priors sum to {total}, not 1")));
        }
        Ok(Self { members })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        let q = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (q, s)).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.members[0].1.n_qubits()
    }

    pub fn priors(&self) -> impl Iterator<Item = f64> + '_ {
        self.members.iter().map(|(q, _)| *q)
    }

    pub fn state(&self, index: usize) -> Option<&DensityMatrix> {
        self.members.get(index).map(|(_, s)| s)
    }

    pub fn states(&self) -> impl Iterator<Item = &DensityMatrix> {
        self.members.iter().map(|(_, s)| s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionOptions {
    /// Below this gap two states count as inseparable by a given index tuple.
    pub threshold: f64,
    /// Refuse finite-shot decisions whose margin is below this many standard errors.
    pub margin_sigmas: f64,
    /// Read third-axis statistics at face value when no probe result is given.
    /// Conjugated devices then mislead the referee; kept to exhibit that failure.
    pub trust_third_axis: bool,
}

impl Default for DecisionOptions {
    fn default() -> Self {
        Self {
            threshold: TAU_NUM,
            margin_sigmas: 4.0,
            trust_third_axis: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationDecision {
    pub chosen_index: usize,
    /// Index tuples whose coefficients decided, one label per system.
    pub used_inputs: Vec<Vec<PauliLabel>>,
    pub mode: Mode,
    /// Distance to the nearest rival minus distance to the chosen member.
    pub margin: f64,
    /// Smallest margin accepted for this data.
    pub required_margin: f64,
    /// Half the largest coefficient deviation from each member's prediction.
    pub distances: Vec<f64>,
    /// Per-system signs applied to third-axis statistics, if any.
    pub third_axis_signs: Option<Vec<i8>>,
}

/// Picks the ensemble member whose predicted Pauli coefficients lie nearest the
/// observed ones, using for each pair the index tuple that best separates it.
///
/// Every certification report must have passed. Tuples containing `σ3` need a
/// probe sign per system (or `trust_third_axis`); otherwise the decision is refused.
pub fn discriminate(
    observed: &P2Table,
    ensemble: &Ensemble,
    certification: &[CertificationReport],
    probes: Option<&[MdiProbeResult]>,
    options: &DecisionOptions,
) -> Result<DiscriminationDecision> {
    let n = observed.n_systems();
    if certification.len() != n {
        return Err(Error::Argument(format!(
            "need {n} certification reports, got {}",
            certification.len()
        )));
    }
    if certification.iter().any(|r| !r.passed) {
        return Err(Error::Uncertified);
    }
    if ensemble.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: ensemble.n_qubits(),
        });
    }

    let states: Vec<&DensityMatrix> = ensemble.states().collect();
    let mut used: Vec<Vec<PauliLabel>> = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let choice = select_index_nqubit(states[i], states[j], options.threshold)?;
            if !used.contains(&choice.indices) {
                used.push(choice.indices);
            }
        }
    }
    used.sort();

    let needs_third = used.iter().any(|m| m.contains(&PauliLabel::Y));
    let signs: Option<Vec<i8>> = match (needs_third, probes) {
        (false, _) => None,
        (true, Some(p)) => {
            if p.len() != n {
                return Err(Error::Argument(format!(
                    "need {n} probe results, got {}",
                    p.len()
                )));
            }
            Some(p.iter().map(|r| r.sign).collect())
        }
        (true, None) if options.trust_third_axis => Some(vec![1; n]),
        (true, None) => return Err(Error::MdiRequired),
    };

    let observed_coefficients: Vec<f64> = used
        .iter()
        .map(|m| {
            let flip: i8 = match &signs {
                Some(s) => m
                    .iter()
                    .zip(s)
                    .filter(|(l, _)| **l == PauliLabel::Y)
                    .map(|(_, &s)| s)
                    .product(),
                None => 1,
            };
            Ok(f64::from(flip) * observed.coefficient(m)?)
        })
        .collect::<Result<_>>()?;

    let distances: Vec<f64> = states
        .iter()
        .map(|rho| {
            used.iter()
                .zip(&observed_coefficients)
                .try_fold(0.0, |acc: f64, (m, s)| {
                    Ok(acc.max((s - pauli_expectation(rho.op(), m)?).abs() / 2.0))
                })
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)));
    let (best, rival) = (order[0], order[1]);
    let margin = distances[rival] - distances[best];

    let required_margin = match used
        .iter()
        .map(|m| {
            let x: Vec<u8> = m
                .iter()
                .map(|l| if l.is_identity() { 1 } else { l.index() })
                .collect();
            observed.shots(&x)
        })
        .collect::<Result<Option<Vec<u64>>>>()?
    {
        None => TAU_NUM,
        Some(shots) => {
            let n_min = shots.into_iter().min().unwrap_or(0).max(1);
            options.margin_sigmas * 0.5 / (n_min as f64).sqrt()
        }
    };
    if margin < required_margin {
        return Err(Error::Inconclusive {
            margin,
            required: required_margin,
        });
    }

    Ok(DiscriminationDecision {
        chosen_index: best,
        mode: if needs_third {
            Mode::MeasurementDeviceIndependent
        } else {
            Mode::DeviceIndependent
        },
        used_inputs: used,
        margin,
        required_margin,
        distances,
        third_axis_signs: signs,
    })
}

/// Single-qubit form of [`discriminate`].
pub fn discriminate_single(
    observed: &P2Table,
    ensemble: &Ensemble,
    certification: &CertificationReport,
    probe: Option<&MdiProbeResult>,
    options: &DecisionOptions,
) -> Result<DiscriminationDecision> {
    if observed.n_systems() != 1 {
        return Err(Error::Argument(
            "single-qubit discrimination needs single-system data".into(),
        ));
    }
    discriminate(
        observed,
        ensemble,
        std::slice::from_ref(certification),
        probe.map(std::slice::from_ref),
        options,
    )
}
