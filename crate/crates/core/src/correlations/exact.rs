use super::table::{CorrelationTable, PartyAlphabet, TableLayout};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Input, Operator, Povm};

/// The measurements available to one party, keyed by input.
#[derive(Clone, Debug)]
pub struct PartyMeasurements {
    pub name: String,
    pub settings: Vec<(Input, Povm)>,
}

impl PartyMeasurements {
    pub fn new(name: impl Into<String>, settings: Vec<(Input, Povm)>) -> Result<Self> {
        let name = name.into();
        let Some(dim) = settings.first().map(|(_, p)| p.dim()) else {
            return Err(Error::Argument(format!("party {name} has no measurements")));
        };
        if let Some((_, p)) = settings.iter().find(|(_, p)| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.dim(),
            });
        }
        Ok(Self { name, settings })
    }

    pub fn dim(&self) -> usize {
        self.settings[0].1.dim()
    }

    fn alphabet(&self) -> PartyAlphabet {
        PartyAlphabet::new(
            self.name.clone(),
            self.settings
                .iter()
                .map(|(i, p)| (*i, p.outcomes().to_vec()))
                .collect(),
        )
    }
}

/// `p(a1..an | x1..xn) = Tr[(M_{a1|x1} ⊗ … ⊗ M_{an|xn}) ρ]` by dense tensor contraction.
///
/// The state's tensor factors must be ordered party by party.
pub fn exact_correlation(
    state: &DensityMatrix,
    parties: &[PartyMeasurements],
) -> Result<CorrelationTable> {
    let total: usize = parties.iter().map(PartyMeasurements::dim).product();
    if total != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            actual: total,
        });
    }
    let layout = TableLayout::new(parties.iter().map(PartyMeasurements::alphabet).collect())?;
    let mut table = CorrelationTable::zeros(layout.clone());
    for (b, inputs) in layout.blocks() {
        let povms: Vec<&Povm> = parties
            .iter()
            .zip(&inputs)
            .map(|(party, input)| {
                party
                    .settings
                    .iter()
                    .find(|(i, _)| i == input)
                    .map(|(_, p)| p)
                    .expect("layout built from these settings")
            })
            .collect();
        let values: Vec<f64> = layout
            .block_outcomes(b)
            .iter()
            .map(|outcomes| {
                let elements: Vec<&Operator> = povms
                    .iter()
                    .zip(outcomes)
                    .map(|(p, &o)| p.element(o))
                    .collect::<Result<_>>()?;
                let joint = Operator::kron_all(elements)?;
                state.expectation(&joint)
            })
            .collect::<Result<_>>()?;
        table.block_values_mut(b).copy_from_slice(&values);
    }
    Ok(table)
}
