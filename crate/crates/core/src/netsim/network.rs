use super::strategy::{DeviceStrategy, ALICE_INPUTS, BOB_SINGLE_INPUTS, CHARLIE_INPUTS};
use crate::correlations::{CorrelationTable, PartyAlphabet, TableLayout};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Input, Operator, Povm};

pub(crate) fn alice_alphabet(name: &str) -> PartyAlphabet {
    PartyAlphabet::binary(name, (1..=ALICE_INPUTS).map(Input::Setting))
}

pub(crate) fn bell_alphabet(name: &str) -> PartyAlphabet {
    PartyAlphabet::new(name, vec![(Input::Diamond, vec![0, 1, 2, 3])])
}

/// Layout of the certification-round table: A (x ∈ 1..3), B (y ∈ 1..6 and ◇), C (z ∈ 1..2).
pub fn certification_layout() -> TableLayout {
    let mut bob: Vec<_> = (1..=BOB_SINGLE_INPUTS)
        .map(|y| (Input::Setting(y), vec![1, -1]))
        .collect();
    bob.push((Input::Diamond, vec![0, 1, 2, 3]));
    TableLayout::new(vec![
        alice_alphabet("A"),
        PartyAlphabet::new("B", bob),
        PartyAlphabet::binary("C", (1..=CHARLIE_INPUTS).map(Input::Setting)),
    ])
    .expect("fixed layout is valid")
}

/// Layout of the discrimination-round table: A (x ∈ 1..3) and B (◇ only).
pub fn discrimination_layout() -> TableLayout {
    TableLayout::new(vec![alice_alphabet("A"), bell_alphabet("B")]).expect("fixed layout is valid")
}

/// `Tr_first[(M ⊗ I) τ]` on a two-qubit operator.
fn reduce_first(tau: &Operator, m: &Operator) -> Result<Operator> {
    m.kron(&Operator::identity(2))
        .matmul(tau)?
        .partial_trace(&[1])
}

/// `Tr_second[(I ⊗ M) τ]` on a two-qubit operator.
fn reduce_second(tau: &Operator, m: &Operator) -> Result<Operator> {
    Operator::identity(2)
        .kron(m)
        .matmul(tau)?
        .partial_trace(&[0])
}

/// Alice's conditional operators `R_{a|x} = Tr_A[(M_{a|x} ⊗ I) τ^{AB0}]`, indexed `[x-1][a]`.
pub(crate) fn alice_steered(strategy: &DeviceStrategy) -> Result<Vec<Vec<(i8, Operator)>>> {
    (1..=ALICE_INPUTS)
        .map(|x| {
            strategy
                .alice(x)?
                .iter()
                .map(|(a, m)| Ok((a, reduce_first(strategy.aux_state_ab0().op(), m)?)))
                .collect()
        })
        .collect()
}

fn real_trace(op: &Operator) -> f64 {
    op.trace().re
}

/// Exact certification-round probabilities `p1(a,b,c|x,y,z)`.
///
/// Inputs `y ∈ 1..6` act on `B0` only, so those blocks factorize into an A–B0 part
/// times Charlie's marginal on `τ^{BC}`. The ◇ blocks contract Bob's joint element
/// against `R_{a|x} ⊗ S_{c|z}`.
pub fn p1_exact(strategy: &DeviceStrategy) -> Result<CorrelationTable> {
    let layout = certification_layout();
    let mut table = CorrelationTable::zeros(layout.clone());
    let tau_ab = strategy.aux_state_ab0().op();
    let tau_bc = strategy.aux_state_bc().op();
    let rho_c = tau_bc.partial_trace(&[1])?;
    let steered_a = alice_steered(strategy)?;
    let steered_c: Vec<Vec<(i8, Operator)>> = (1..=CHARLIE_INPUTS)
        .map(|z| {
            strategy
                .charlie(z)?
                .iter()
                .map(|(c, m)| Ok((c, reduce_second(tau_bc, m)?)))
                .collect()
        })
        .collect::<Result<_>>()?;

    for (block, inputs) in layout.blocks() {
        let (Input::Setting(x), Input::Setting(z)) = (inputs[0], inputs[2]) else {
            unreachable!("A and C only have numbered inputs")
        };
        let alice = strategy.alice(x)?;
        let charlie = strategy.charlie(z)?;
        let outcomes = layout.block_outcomes(block);
        let values: Vec<f64> = match inputs[1] {
            Input::Setting(y) => {
                let bob = strategy.bob_single(y)?;
                outcomes
                    .iter()
                    .map(|o| {
                        let ab = real_trace(
                            &alice
                                .element(o[0])?
                                .kron(bob.element(o[1])?)
                                .matmul(tau_ab)?,
                        );
                        let c = real_trace(&charlie.element(o[2])?.matmul(&rho_c)?);
                        Ok(ab * c)
                    })
                    .collect::<Result<_>>()?
            }
            Input::Diamond => {
                let bell = strategy.bob_bell();
                outcomes
                    .iter()
                    .map(|o| {
                        let r = lookup(&steered_a[x as usize - 1], o[0]);
                        let s = lookup(&steered_c[z as usize - 1], o[2]);
                        Ok(real_trace(&bell.element(o[1])?.matmul(&r.kron(s))?))
                    })
                    .collect::<Result<_>>()?
            }
        };
        table.block_values_mut(block).copy_from_slice(&values);
    }
    Ok(table)
}

fn lookup(ops: &[(i8, Operator)], outcome: i8) -> &Operator {
    &ops.iter()
        .find(|(o, _)| *o == outcome)
        .expect("outcome from the same POVM")
        .1
}

/// Exact discrimination-round probabilities `p2(a,b|x,◇) = Tr[M_b (R_{a|x} ⊗ ρ)]`.
pub fn p2_exact(strategy: &DeviceStrategy, target: &DensityMatrix) -> Result<CorrelationTable> {
    if target.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: target.dim(),
        });
    }
    let layout = discrimination_layout();
    let mut table = CorrelationTable::zeros(layout.clone());
    let steered = alice_steered(strategy)?;
    let bell = strategy.bob_bell();
    for (block, inputs) in layout.blocks() {
        let Input::Setting(x) = inputs[0] else {
            unreachable!("Alice has numbered inputs")
        };
        let values: Vec<f64> = layout
            .block_outcomes(block)
            .iter()
            .map(|o| {
                let r = lookup(&steered[x as usize - 1], o[0]);
                Ok(real_trace(
                    &bell.element(o[1])?.matmul(&r.kron(target.op()))?,
                ))
            })
            .collect::<Result<_>>()?;
        table.block_values_mut(block).copy_from_slice(&values);
    }
    Ok(table)
}

/// Bob's effective operator on the target for Alice outcome `a`, input `x` and Bell outcome `b`:
/// `T = Tr_{B0}[M_b (R_{a|x} ⊗ I)]`, so that `p2(a,b|x,◇) = Tr[T ρ]`.
/// Per input `x`, per outcome `a`: the four operators indexed by Bell outcome.
pub(crate) type TargetOperators = Vec<Vec<(i8, Vec<Operator>)>>;

pub(crate) fn effective_target_operators(strategy: &DeviceStrategy) -> Result<TargetOperators> {
    let steered = alice_steered(strategy)?;
    let bell: &Povm = strategy.bob_bell();
    steered
        .iter()
        .map(|per_x| {
            per_x
                .iter()
                .map(|(a, r)| {
                    let ts = (0..4)
                        .map(|b| {
                            bell.element(b)?
                                .matmul(&r.kron(&Operator::identity(2)))?
                                .partial_trace(&[1])
                        })
                        .collect::<Result<_>>()?;
                    Ok((*a, ts))
                })
                .collect()
        })
        .collect()
}
