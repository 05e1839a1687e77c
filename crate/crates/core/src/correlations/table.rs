//! Dense storage for conditional distributions `p(outcomes | inputs)`.
//!
//! Blocks enumerate input tuples in mixed radix (party 0 most significant);
//! inside a block, outcome tuples are enumerated the same way.

use crate::error::{Error, Result};
use crate::qcore::{Input, Outcome, TAU_NUM};

#[derive(Clone, Debug, PartialEq)]
pub struct PartyAlphabet {
    pub name: String,
    pub settings: Vec<(Input, Vec<Outcome>)>,
}

impl PartyAlphabet {
    pub fn new(name: impl Into<String>, settings: Vec<(Input, Vec<Outcome>)>) -> Self {
        Self {
            name: name.into(),
            settings,
        }
    }

    /// Binary `±1` outcomes for each of the given settings.
    pub fn binary(name: impl Into<String>, inputs: impl IntoIterator<Item = Input>) -> Self {
        Self::new(name, inputs.into_iter().map(|i| (i, vec![1, -1])).collect())
    }

    fn position(&self, input: Input) -> Option<usize> {
        self.settings.iter().position(|(i, _)| *i == input)
    }

    pub fn inputs(&self) -> impl Iterator<Item = Input> + '_ {
        self.settings.iter().map(|(i, _)| *i)
    }

    pub fn outcomes(&self, input: Input) -> Option<&[Outcome]> {
        self.position(input).map(|p| self.settings[p].1.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableLayout {
    parties: Vec<PartyAlphabet>,
    offsets: Vec<usize>,
}

impl TableLayout {
    pub fn new(parties: Vec<PartyAlphabet>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::Argument("table needs at least one party".into()));
        }
        for p in &parties {
            if p.settings.is_empty() || p.settings.iter().any(|(_, o)| o.is_empty()) {
                return Err(Error::Argument(format!(
                    "party {} has an empty alphabet",
                    p.name
                )));
            }
        }
        let n_blocks: usize = parties.iter().map(|p| p.settings.len()).product();
        let mut offsets = Vec::with_capacity(n_blocks + 1);
        offsets.push(0);
        let mut layout = Self {
            parties,
            offsets: Vec::new(),
        };
        let mut acc = 0;
        for b in 0..n_blocks {
            acc += layout
                .block_positions(b)
                .iter()
                .enumerate()
                .map(|(p, &s)| layout.parties[p].settings[s].1.len())
                .product::<usize>();
            offsets.push(acc);
        }
        layout.offsets = offsets;
        Ok(layout)
    }

    pub fn parties(&self) -> &[PartyAlphabet] {
        &self.parties
    }

    pub fn n_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().expect("non-empty")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn block_positions(&self, mut block: usize) -> Vec<usize> {
        let mut pos = vec![0; self.parties.len()];
        for (p, party) in self.parties.iter().enumerate().rev() {
            let r = party.settings.len();
            pos[p] = block % r;
            block /= r;
        }
        pos
    }

    pub fn block_inputs(&self, block: usize) -> Vec<Input> {
        self.block_positions(block)
            .iter()
            .enumerate()
            .map(|(p, &s)| self.parties[p].settings[s].0)
            .collect()
    }

    pub fn block_index(&self, inputs: &[Input]) -> Result<usize> {
        if inputs.len() != self.parties.len() {
            return Err(Error::DimensionMismatch {
                expected: self.parties.len(),
                actual: inputs.len(),
            });
        }
        let mut idx = 0;
        for (party, &input) in self.parties.iter().zip(inputs) {
            let pos = party.position(input).ok_or_else(|| {
                Error::Argument(format!("party {} has no input {input}", party.name))
            })?;
            idx = idx * party.settings.len() + pos;
        }
        Ok(idx)
    }

    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    /// Outcome alphabets, one per party, for the given block.
    pub fn block_alphabets(&self, block: usize) -> Vec<&[Outcome]> {
        self.block_positions(block)
            .iter()
            .enumerate()
            .map(|(p, &s)| self.parties[p].settings[s].1.as_slice())
            .collect()
    }

    /// All outcome tuples of a block in storage order.
    pub fn block_outcomes(&self, block: usize) -> Vec<Vec<Outcome>> {
        let alphabets = self.block_alphabets(block);
        let total: usize = alphabets.iter().map(|a| a.len()).product();
        (0..total)
            .map(|mut k| {
                let mut tuple = vec![0; alphabets.len()];
                for (p, alpha) in alphabets.iter().enumerate().rev() {
                    tuple[p] = alpha[k % alpha.len()];
                    k /= alpha.len();
                }
                tuple
            })
            .collect()
    }

    pub fn entry_index(&self, inputs: &[Input], outcomes: &[Outcome]) -> Result<usize> {
        let block = self.block_index(inputs)?;
        if outcomes.len() != self.parties.len() {
            return Err(Error::DimensionMismatch {
                expected: self.parties.len(),
                actual: outcomes.len(),
            });
        }
        let mut idx = 0;
        for (p, (alpha, &o)) in self.block_alphabets(block).iter().zip(outcomes).enumerate() {
            let pos = alpha.iter().position(|&a| a == o).ok_or_else(|| {
                Error::Argument(format!(
                    "outcome {o} not available to party {} at input {}",
                    self.parties[p].name, inputs[p]
                ))
            })?;
            idx = idx * alpha.len() + pos;
        }
        Ok(self.offsets[block] + idx)
    }

    /// Iterates over `(block, input tuple)`.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, Vec<Input>)> + '_ {
        (0..self.n_blocks()).map(move |b| (b, self.block_inputs(b)))
    }
}

/// Exact or estimated probabilities `p(outcomes | inputs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable {
    layout: TableLayout,
    values: Vec<f64>,
}

impl CorrelationTable {
    pub fn zeros(layout: TableLayout) -> Self {
        let n = layout.len();
        Self {
            layout,
            values: vec![0.0; n],
        }
    }

    pub fn from_values(layout: TableLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                actual: values.len(),
            });
        }
        Ok(Self { layout, values })
    }

    pub fn layout(&self) -> &TableLayout {
        &self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn block_values(&self, block: usize) -> &[f64] {
        &self.values[self.layout.block_range(block)]
    }

    pub(crate) fn block_values_mut(&mut self, block: usize) -> &mut [f64] {
        let r = self.layout.block_range(block);
        &mut self.values[r]
    }

    pub fn prob(&self, inputs: &[Input], outcomes: &[Outcome]) -> Result<f64> {
        Ok(self.values[self.layout.entry_index(inputs, outcomes)?])
    }

    pub fn set(&mut self, inputs: &[Input], outcomes: &[Outcome], p: f64) -> Result<()> {
        let i = self.layout.entry_index(inputs, outcomes)?;
        self.values[i] = p;
        Ok(())
    }

    pub fn has_input(&self, party: usize, input: Input) -> bool {
        self.layout
            .parties
            .get(party)
            .and_then(|p| p.position(input))
            .is_some()
    }

    /// Checks that every entry is a probability and each block sums to one.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (b, inputs) in self.layout.blocks() {
            let vals = self.block_values(b);
            if let Some(bad) = vals.iter().find(|&&p| !(-tol..=1.0 + tol).contains(&p)) {
                return Err(Error::Validation(format!(
                    "entry {bad} outside [0, 1] at inputs {inputs:?}"
                )));
            }
            let sum: f64 = vals.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::Validation(format!("block {inputs:?} sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn is_normalized(&self) -> bool {
        self.validate(TAU_NUM).is_ok()
    }

    pub fn max_abs_diff(&self, other: &CorrelationTable) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::Argument("tables have different layouts".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Drops `party`, reading its marginal at a fixed input.
    pub fn marginal_at(&self, party: usize, at: Input) -> Result<CorrelationTable> {
        self.marginal_with(party, &[at])
    }

    /// Drops `party`, averaging the marginals over all of its inputs. For
    /// no-signalling data this equals any single marginal.
    pub fn marginal_averaged(&self, party: usize) -> Result<CorrelationTable> {
        let inputs: Vec<Input> = self
            .layout
            .parties
            .get(party)
            .ok_or_else(|| Error::Argument(format!("no party {party}")))?
            .inputs()
            .collect();
        self.marginal_with(party, &inputs)
    }

    fn marginal_with(&self, party: usize, over: &[Input]) -> Result<CorrelationTable> {
        if party >= self.layout.n_parties() || self.layout.n_parties() < 2 {
            return Err(Error::Argument(format!("cannot marginalize party {party}")));
        }
        let mut parties = self.layout.parties.clone();
        parties.remove(party);
        let mut out = CorrelationTable::zeros(TableLayout::new(parties)?);
        let weight = 1.0 / over.len() as f64;
        for (b, inputs) in self.layout.blocks() {
            if !over.contains(&inputs[party]) {
                continue;
            }
            let mut reduced_inputs = inputs.clone();
            reduced_inputs.remove(party);
            for (outcomes, &p) in self
                .layout
                .block_outcomes(b)
                .iter()
                .zip(self.block_values(b))
            {
                let mut reduced = outcomes.clone();
                reduced.remove(party);
                let i = out.layout.entry_index(&reduced_inputs, &reduced)?;
                out.values[i] += weight * p;
            }
        }
        Ok(out)
    }

    /// `p(rest | rest inputs, party input = input, party outcome = outcome)`.
    ///
    /// Each conditional block is normalized by its own `p(outcome | inputs)`.
    pub fn condition_on(
        &self,
        party: usize,
        input: Input,
        outcome: Outcome,
    ) -> Result<CorrelationTable> {
        if !self.has_input(party, input) {
            return Err(Error::Argument(format!(
                "party {party} has no input {input}"
            )));
        }
        let mut parties = self.layout.parties.clone();
        parties.remove(party);
        let mut out = CorrelationTable::zeros(TableLayout::new(parties)?);
        let mut norms = vec![0.0; out.layout.n_blocks()];
        for (b, inputs) in self.layout.blocks() {
            if inputs[party] != input {
                continue;
            }
            let mut reduced_inputs = inputs.clone();
            reduced_inputs.remove(party);
            let ob = out.layout.block_index(&reduced_inputs)?;
            for (outcomes, &p) in self
                .layout
                .block_outcomes(b)
                .iter()
                .zip(self.block_values(b))
            {
                if outcomes[party] != outcome {
                    continue;
                }
                let mut reduced = outcomes.clone();
                reduced.remove(party);
                let i = out.layout.entry_index(&reduced_inputs, &reduced)?;
                out.values[i] += p;
                norms[ob] += p;
            }
        }
        for (b, &norm) in norms.iter().enumerate() {
            if norm <= 0.0 {
                return Err(Error::Conditioning(format!(
                    "outcome {outcome} of party {party} at input {input} never occurs with inputs {:?}",
                    out.layout.block_inputs(b)
                )));
            }
            out.block_values_mut(b).iter_mut().for_each(|p| *p /= norm);
        }
        Ok(out)
    }

    /// Probability of `outcome` for `party` at each block where it uses `input`.
    pub fn outcome_probability(
        &self,
        party: usize,
        input: Input,
        outcome: Outcome,
    ) -> Result<Vec<(Vec<Input>, f64)>> {
        if !self.has_input(party, input) {
            return Err(Error::Argument(format!(
                "party {party} has no input {input}"
            )));
        }
        Ok(self
            .layout
            .blocks()
            .filter(|(_, inputs)| inputs[party] == input)
            .map(|(b, inputs)| {
                let p = self
                    .layout
                    .block_outcomes(b)
                    .iter()
                    .zip(self.block_values(b))
                    .filter(|(o, _)| o[party] == outcome)
                    .map(|(_, &p)| p)
                    .sum();
                (inputs, p)
            })
            .collect())
    }
}
