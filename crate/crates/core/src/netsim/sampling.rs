use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{CorrelationTable, TableLayout};
use crate::error::{Error, Result};
use crate::qcore::{Input, Outcome, TAU_NUM};

/// Outcome counts per input tuple, as seen by the referee.
#[derive(Clone, Debug, PartialEq)]
pub struct CountsTable {
    layout: TableLayout,
    counts: Vec<u64>,
    seed: Option<u64>,
}

/// One row of a counts table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub inputs: Vec<Input>,
    pub outcomes: Vec<Outcome>,
    pub count: u64,
}

impl CountsTable {
    pub fn from_counts(layout: TableLayout, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                actual: counts.len(),
            });
        }
        Ok(Self {
            layout,
            counts,
            seed: None,
        })
    }

    /// Rebuilds a table from rows; rows not mentioned count zero, repeated rows add up.
    pub fn from_records(
        layout: TableLayout,
        records: impl IntoIterator<Item = CountRecord>,
    ) -> Result<Self> {
        let mut counts = vec![0u64; layout.len()];
        for r in records {
            counts[layout.entry_index(&r.inputs, &r.outcomes)?] += r.count;
        }
        Ok(Self {
            layout,
            counts,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn layout(&self) -> &TableLayout {
        &self.layout
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn count(&self, inputs: &[Input], outcomes: &[Outcome]) -> Result<u64> {
        Ok(self.counts[self.layout.entry_index(inputs, outcomes)?])
    }

    pub fn block_counts(&self, block: usize) -> &[u64] {
        &self.counts[self.layout.block_range(block)]
    }

    /// Number of rounds run with the inputs of `block`.
    pub fn shots(&self, block: usize) -> u64 {
        self.block_counts(block).iter().sum()
    }

    pub fn total_shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Smallest number of rounds over all input tuples.
    pub fn min_shots(&self) -> u64 {
        (0..self.layout.n_blocks())
            .map(|b| self.shots(b))
            .min()
            .unwrap_or(0)
    }

    /// Relative frequencies. Every input tuple must have been played at least once.
    pub fn estimate(&self) -> Result<CorrelationTable> {
        let mut values = vec![0.0; self.layout.len()];
        for (block, inputs) in self.layout.blocks() {
            let n = self.shots(block);
            if n == 0 {
                return Err(Error::Validation(format!(
                    "inputs {inputs:?} were never played"
                )));
            }
            for i in self.layout.block_range(block) {
                values[i] = self.counts[i] as f64 / n as f64;
            }
        }
        CorrelationTable::from_values(self.layout.clone(), values)
    }

    pub fn records(&self) -> Vec<CountRecord> {
        self.layout
            .blocks()
            .flat_map(|(block, inputs)| {
                let range = self.layout.block_range(block);
                self.layout
                    .block_outcomes(block)
                    .into_iter()
                    .zip(range)
                    .map(move |(outcomes, i)| CountRecord {
                        inputs: inputs.clone(),
                        outcomes,
                        count: self.counts[i],
                    })
            })
            .collect()
    }
}

/// Samples `shots` rounds for every input tuple.
pub fn sample(table: &CorrelationTable, shots: u64, seed: u64) -> Result<CountsTable> {
    sample_with(table, &vec![shots; table.layout().n_blocks()], seed)
}

/// Samples `shots[block]` rounds per input tuple.
///
/// Each block draws from its own ChaCha stream derived from `seed`, so the result
/// does not depend on thread scheduling.
pub fn sample_with(table: &CorrelationTable, shots: &[u64], seed: u64) -> Result<CountsTable> {
    let layout = table.layout();
    if shots.len() != layout.n_blocks() {
        return Err(Error::DimensionMismatch {
            expected: layout.n_blocks(),
            actual: shots.len(),
        });
    }
    table.validate(1e-6)?;
    let blocks: Vec<Vec<u64>> = (0..layout.n_blocks())
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            multinomial(shots[block], table.block_values(block), &mut rng)
        })
        .collect::<Result<_>>()?;
    let counts = blocks.into_iter().flatten().collect();
    Ok(CountsTable {
        layout: layout.clone(),
        counts,
        seed: Some(seed),
    })
}

/// Multinomial draw as a chain of conditional binomials.
fn multinomial(n: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let clipped: Vec<f64> = probs
        .iter()
        .map(|&p| if p < TAU_NUM { 0.0 } else { p })
        .collect();
    let mut mass: f64 = clipped.iter().sum();
    let mut left = n;
    let mut out = vec![0u64; probs.len()];
    for (i, &p) in clipped.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == clipped.len() {
            out[i] = left;
            break;
        }
        let q = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(left, q)
            .map_err(|e| Error::Argument(e.to_string()))?
            .sample(rng);
        out[i] = k;
        left -= k;
        mass -= p;
    }
    Ok(out)
}
