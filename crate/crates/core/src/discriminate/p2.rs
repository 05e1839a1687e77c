use crate::correlations::{CorrelationTable, TableLayout};
use crate::error::{Error, Result};
use crate::netsim::CountsTable;
use crate::qcore::{projector, DensityMatrix, Input, Operator, Outcome, PauliLabel, TAU_NUM};

/// Per-system Pauli statistics `P2(a⃗|x⃗)` recovered from a discrimination round.
///
/// Each system contributes `x ∈ {1,2,3}` and `a ∈ {±1}`. Entries are stored with
/// `x⃗` blocks in lexicographic order and, within a block, outcome tuples with
/// `+1` before `−1` per position (first system most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct P2Table {
    n_systems: usize,
    values: Vec<f64>,
    shots: Option<Vec<u64>>,
}

/// The Alice outcome that the frame correction maps onto `a` for Bell outcome `b`:
/// `a` itself when `b ∈ {0, x}`, otherwise `−a`.
pub fn frame_corrected_outcome(a: Outcome, b: u8, x: u8) -> Outcome {
    if b == 0 || b == x {
        a
    } else {
        -a
    }
}

fn outcome_of(bit: usize) -> Outcome {
    if bit == 0 {
        1
    } else {
        -1
    }
}

/// `n`-th outcome tuple in storage order.
fn outcome_tuple(index: usize, n: usize) -> Vec<Outcome> {
    (0..n)
        .map(|k| outcome_of(index >> (n - 1 - k) & 1))
        .collect()
}

fn outcome_index(a: &[Outcome]) -> usize {
    a.iter().fold(0, |acc, &o| acc * 2 + usize::from(o == -1))
}

fn setting_tuple(mut index: usize, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % 3) as u8 + 1;
        index /= 3;
    }
    out
}

fn setting_index(x: &[u8]) -> usize {
    x.iter().fold(0, |acc, &v| acc * 3 + (v as usize - 1))
}

/// Checks the `A1, B1, A2, B2, …` discrimination layout and returns the system count.
fn check_layout(layout: &TableLayout) -> Result<usize> {
    let parties = layout.parties();
    if parties.is_empty() || !parties.len().is_multiple_of(2) {
        return Err(Error::Argument(
            "discrimination data needs (Alice, Bob) party pairs".into(),
        ));
    }
    for pair in parties.chunks(2) {
        let alice: Vec<Input> = pair[0].inputs().collect();
        let bob: Vec<Input> = pair[1].inputs().collect();
        let alice_ok = (1..=3u8).all(|x| {
            alice.contains(&Input::Setting(x))
                && pair[0]
                    .outcomes(Input::Setting(x))
                    .is_some_and(|o| o.len() == 2 && o.contains(&1) && o.contains(&-1))
        });
        let bob_ok = pair[1].outcomes(Input::Diamond).is_some_and(|o| {
            let mut o = o.to_vec();
            o.sort_unstable();
            o == [0, 1, 2, 3]
        });
        if !alice_ok || !bob_ok || !bob.contains(&Input::Diamond) {
            return Err(Error::Argument(format!(
                "parties {} and {} do not cover inputs x ∈ 1..3 and ◇ with all outcome categories",
                pair[0].name, pair[1].name
            )));
        }
    }
    Ok(parties.len() / 2)
}

impl P2Table {
    fn aggregate(
        layout: &TableLayout,
        weight: impl Fn(usize) -> f64,
    ) -> Result<(usize, Vec<f64>, Vec<f64>)> {
        let n = check_layout(layout)?;
        let n_settings = 3usize.pow(n as u32);
        let n_outcomes = 1usize << n;
        let mut values = vec![0.0; n_settings * n_outcomes];
        let mut totals = vec![0.0; n_settings];
        for xi in 0..n_settings {
            let x = setting_tuple(xi, n);
            let inputs: Vec<Input> = x
                .iter()
                .flat_map(|&x| [Input::Setting(x), Input::Diamond])
                .collect();
            let block = layout.block_index(&inputs)?;
            for (outcomes, i) in layout
                .block_outcomes(block)
                .iter()
                .zip(layout.block_range(block))
            {
                let a: Vec<Outcome> = (0..n)
                    .map(|k| {
                        frame_corrected_outcome(outcomes[2 * k], outcomes[2 * k + 1] as u8, x[k])
                    })
                    .collect();
                let w = weight(i);
                values[xi * n_outcomes + outcome_index(&a)] += w;
                totals[xi] += w;
            }
        }
        Ok((n, values, totals))
    }

    /// Aggregates an exact or estimated `p2` table.
    pub fn from_table(table: &CorrelationTable) -> Result<Self> {
        let (n_systems, values, _) = Self::aggregate(table.layout(), |i| table.values()[i])?;
        Ok(Self {
            n_systems,
            values,
            shots: None,
        })
    }

    /// Aggregates raw discrimination-round counts into relative frequencies.
    pub fn from_counts(counts: &CountsTable) -> Result<Self> {
        let (n_systems, mut values, totals) =
            Self::aggregate(counts.layout(), |i| counts.counts()[i] as f64)?;
        let n_outcomes = 1usize << n_systems;
        for (xi, &total) in totals.iter().enumerate() {
            if total == 0.0 {
                return Err(Error::Argument(format!(
                    "settings {:?} were never played",
                    setting_tuple(xi, n_systems)
                )));
            }
            values[xi * n_outcomes..(xi + 1) * n_outcomes]
                .iter_mut()
                .for_each(|v| *v /= total);
        }
        let shots = totals.iter().map(|&t| t as u64).collect();
        Ok(Self {
            n_systems,
            values,
            shots: Some(shots),
        })
    }

    /// The statistics honest devices would report for `rho`: `Tr[(⊗_k π_{a_k|x_k}) ρ]`.
    pub fn predicted(rho: &DensityMatrix) -> Result<Self> {
        let n = rho.n_qubits();
        let n_outcomes = 1usize << n;
        let projectors: Vec<[Operator; 2]> = PauliLabel::AXES
            .iter()
            .map(|&axis| Ok([projector(1, axis)?, projector(-1, axis)?]))
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(3usize.pow(n as u32) * n_outcomes);
        for xi in 0..3usize.pow(n as u32) {
            let x = setting_tuple(xi, n);
            for ai in 0..n_outcomes {
                let factors = (0..n).map(|k| &projectors[x[k] as usize - 1][ai >> (n - 1 - k) & 1]);
                values.push(rho.expectation(&Operator::kron_all(factors)?)?);
            }
        }
        Ok(Self {
            n_systems: n,
            values,
            shots: None,
        })
    }

    pub fn n_systems(&self) -> usize {
        self.n_systems
    }

    pub fn is_exact(&self) -> bool {
        self.shots.is_none()
    }

    /// Rounds played with settings `x⃗`, or `None` for exact data.
    pub fn shots(&self, x: &[u8]) -> Result<Option<u64>> {
        self.check_settings(x)?;
        Ok(self.shots.as_ref().map(|s| s[setting_index(x)]))
    }

    fn check_settings(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.n_systems {
            return Err(Error::DimensionMismatch {
                expected: self.n_systems,
                actual: x.len(),
            });
        }
        if x.iter().any(|&v| !(1..=3).contains(&v)) {
            return Err(Error::Argument(format!("settings {x:?} outside 1..=3")));
        }
        Ok(())
    }

    pub fn prob(&self, x: &[u8], a: &[Outcome]) -> Result<f64> {
        self.check_settings(x)?;
        if a.len() != self.n_systems || a.iter().any(|&o| o != 1 && o != -1) {
            return Err(Error::Argument(format!(
                "outcomes {a:?} are not a ±1 tuple of length {}",
                self.n_systems
            )));
        }
        Ok(self.values[setting_index(x) * (1 << self.n_systems) + outcome_index(a)])
    }

    /// Largest deviation from `Σ_a P2(a|x) = 1` over all settings.
    pub fn normalization_error(&self) -> f64 {
        self.values
            .chunks(1 << self.n_systems)
            .map(|c| (c.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `S_m = Σ_a (Π_{k: m_k ≠ 0} a_k) P2(a⃗|x⃗)`, reading identity positions from setting 1.
    ///
    /// Equals `Tr[(⊗_k σ_{m_k}) ρ]` for honest devices.
    pub fn coefficient(&self, m: &[PauliLabel]) -> Result<f64> {
        if m.len() != self.n_systems {
            return Err(Error::DimensionMismatch {
                expected: self.n_systems,
                actual: m.len(),
            });
        }
        let x: Vec<u8> = m
            .iter()
            .map(|l| if l.is_identity() { 1 } else { l.index() })
            .collect();
        let base = setting_index(&x) * (1 << self.n_systems);
        Ok((0..1usize << self.n_systems)
            .map(|ai| {
                let a = outcome_tuple(ai, self.n_systems);
                let sign: f64 = m
                    .iter()
                    .zip(&a)
                    .filter(|(l, _)| !l.is_identity())
                    .map(|(_, &o)| f64::from(o))
                    .product();
                sign * self.values[base + ai]
            })
            .sum())
    }

    /// Largest absolute difference between two tables of the same size.
    pub fn max_abs_diff(&self, other: &P2Table) -> Result<f64> {
        if self.n_systems != other.n_systems {
            return Err(Error::DimensionMismatch {
                expected: self.n_systems,
                actual: other.n_systems,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Every `(x⃗, a⃗, P2)` triple in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u8>, Vec<Outcome>, f64)> + '_ {
        let n = self.n_systems;
        self.values.iter().enumerate().map(move |(i, &v)| {
            (
                setting_tuple(i >> n, n),
                outcome_tuple(i & ((1 << n) - 1), n),
                v,
            )
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization_error() <= TAU_NUM.max(1e-9)
    }
}
