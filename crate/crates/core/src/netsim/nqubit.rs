use super::network::{alice_alphabet, bell_alphabet, effective_target_operators, p1_exact};
use super::strategy::DeviceStrategy;
use crate::correlations::{CorrelationTable, TableLayout};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Input, Operator, Outcome};

/// Largest number of cells simulated by default.
pub const DEFAULT_MAX_CELLS: usize = 3;

/// `N` independent copies of the single-qubit network, one per target qubit.
#[derive(Clone, Debug)]
pub struct NQubitNetwork {
    cells: Vec<DeviceStrategy>,
    max_cells: usize,
}

impl NQubitNetwork {
    pub fn new(cells: Vec<DeviceStrategy>) -> Result<Self> {
        Self::with_max_cells(cells, DEFAULT_MAX_CELLS)
    }

    pub fn with_max_cells(cells: Vec<DeviceStrategy>, max_cells: usize) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Argument("network needs at least one cell".into()));
        }
        if cells.len() > max_cells {
            return Err(Error::Resource(format!(
                "{} cells exceed the limit of {max_cells}",
                cells.len()
            )));
        }
        Ok(Self { cells, max_cells })
    }

    pub fn honest(n: usize) -> Result<Self> {
        Self::new(vec![DeviceStrategy::honest(); n])
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn max_cells(&self) -> usize {
        self.max_cells
    }

    pub fn cells(&self) -> &[DeviceStrategy] {
        &self.cells
    }

    /// Table layout with parties ordered `A1, B1, A2, B2, …`.
    pub fn discrimination_layout(&self) -> TableLayout {
        let parties = (1..=self.n_cells())
            .flat_map(|k| {
                [
                    alice_alphabet(&format!("A{k}")),
                    bell_alphabet(&format!("B{k}")),
                ]
            })
            .collect();
        TableLayout::new(parties).expect("fixed layout is valid")
    }

    /// Certification statistics of every cell. The joint table is the product of
    /// these, so it is kept factorized.
    pub fn p1_exact(&self) -> Result<FactorizedCorrelation> {
        Ok(FactorizedCorrelation {
            cells: self.cells.iter().map(p1_exact).collect::<Result<_>>()?,
        })
    }

    /// Exact `p2(a⃗, b⃗ | x⃗, ◇⃗) = Tr[(⊗_k T_k) ρ]` with each cell's effective operator
    /// `T_k = Tr_{B0_k}[M_{b_k} (R_{a_k|x_k} ⊗ I)]`.
    pub fn p2_exact(&self, target: &DensityMatrix) -> Result<CorrelationTable> {
        let n = self.n_cells();
        if target.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: target.dim(),
            });
        }
        let effective: Vec<_> = self
            .cells
            .iter()
            .map(effective_target_operators)
            .collect::<Result<_>>()?;
        let layout = self.discrimination_layout();
        let mut table = CorrelationTable::zeros(layout.clone());
        for (block, inputs) in layout.blocks() {
            let values: Vec<f64> = layout
                .block_outcomes(block)
                .iter()
                .map(|o| {
                    let factors: Vec<&Operator> = (0..n)
                        .map(|k| {
                            let Input::Setting(x) = inputs[2 * k] else {
                                unreachable!("Alice has numbered inputs")
                            };
                            let (_, ts) = effective[k][x as usize - 1]
                                .iter()
                                .find(|(a, _)| *a == o[2 * k])
                                .expect("outcome from the layout");
                            &ts[o[2 * k + 1] as usize]
                        })
                        .collect();
                    Ok(Operator::kron_all(factors)?.trace_product(target.op())?.re)
                })
                .collect::<Result<_>>()?;
            table.block_values_mut(block).copy_from_slice(&values);
        }
        Ok(table)
    }
}

/// A product of independent per-cell correlation tables.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizedCorrelation {
    cells: Vec<CorrelationTable>,
}

impl FactorizedCorrelation {
    pub fn cells(&self) -> &[CorrelationTable] {
        &self.cells
    }

    /// Joint probability for per-cell inputs and outcomes.
    pub fn prob(&self, inputs: &[Vec<Input>], outcomes: &[Vec<Outcome>]) -> Result<f64> {
        if inputs.len() != self.cells.len() || outcomes.len() != self.cells.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cells.len(),
                actual: inputs.len(),
            });
        }
        self.cells
            .iter()
            .zip(inputs)
            .zip(outcomes)
            .try_fold(1.0, |acc, ((t, i), o)| Ok(acc * t.prob(i, o)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{basis_state, right_circular};

    #[test]
    fn cell_limit_is_enforced() {
        assert!(matches!(NQubitNetwork::honest(4), Err(Error::Resource(_))));
        assert!(NQubitNetwork::with_max_cells(vec![DeviceStrategy::honest(); 4], 4).is_ok());
        assert!(NQubitNetwork::honest(0).is_err());
    }

    #[test]
    fn single_cell_matches_single_qubit_network() {
        let net = NQubitNetwork::honest(1).unwrap();
        let rho = right_circular();
        let a = net.p2_exact(&rho).unwrap();
        let b = super::super::network::p2_exact(&DeviceStrategy::honest(), &rho).unwrap();
        assert_eq!(a.values().len(), b.values().len());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn product_target_gives_product_table() {
        let net = NQubitNetwork::honest(2).unwrap();
        let rho = basis_state(0).kron(&right_circular());
        let t = net.p2_exact(&rho).unwrap();
        t.validate(1e-12).unwrap();
        let single = |r: &DensityMatrix| {
            super::super::network::p2_exact(&DeviceStrategy::honest(), r).unwrap()
        };
        let (t0, t1) = (single(&basis_state(0)), single(&right_circular()));
        let inputs = [
            Input::Setting(1),
            Input::Diamond,
            Input::Setting(3),
            Input::Diamond,
        ];
        let outcomes = [1, 2, -1, 3];
        let joint = t.prob(&inputs, &outcomes).unwrap();
        let prod = t0.prob(&inputs[..2], &outcomes[..2]).unwrap()
            * t1.prob(&inputs[2..], &outcomes[2..]).unwrap();
        assert!((joint - prod).abs() < 1e-14);
    }
}
