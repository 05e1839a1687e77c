//! CHSH-family Bell expressions evaluated on correlation tables.

use super::table::CorrelationTable;
use crate::error::{Error, Result};
use crate::qcore::Input;

/// Index of the main party in a tripartite certification table (A, B, C).
pub const MAIN_PARTY: usize = 1;

/// `⟨A_x B_y⟩ = Σ_{a,b} a b p(a,b|x,y)` on a bipartite table with `±1` outcomes.
pub fn correlator(table: &CorrelationTable, x: Input, y: Input) -> Result<f64> {
    let layout = table.layout();
    if layout.n_parties() != 2 {
        return Err(Error::Argument(format!(
            "correlator needs a bipartite table, got {} parties",
            layout.n_parties()
        )));
    }
    let block = layout.block_index(&[x, y])?;
    let alphabets = layout.block_alphabets(block);
    if alphabets.iter().any(|a| !is_binary(a)) {
        return Err(Error::Argument(format!(
            "inputs ({x}, {y}) do not have ±1 outcomes"
        )));
    }
    Ok(layout
        .block_outcomes(block)
        .iter()
        .zip(table.block_values(block))
        .map(|(o, &p)| f64::from(o[0]) * f64::from(o[1]) * p)
        .sum())
}

fn is_binary(alphabet: &[i8]) -> bool {
    alphabet.len() == 2 && alphabet.contains(&1) && alphabet.contains(&-1)
}

/// `I(m,n;p,q) = ⟨A_m B_p⟩ + ⟨A_m B_q⟩ + ⟨A_n B_p⟩ − ⟨A_n B_q⟩`.
pub fn chsh(table: &CorrelationTable, m: u8, n: u8, p: u8, q: u8) -> Result<f64> {
    let e = |x: u8, y: u8| correlator(table, Input::Setting(x), Input::Setting(y));
    Ok(e(m, p)? + e(m, q)? + e(n, p)? - e(n, q)?)
}

/// `β = I(1,2;1,2) + I(1,3;4,3) + I(2,3;6,5)` with classical bound 6 and quantum maximum 6√2.
pub fn three_chsh(table: &CorrelationTable) -> Result<f64> {
    Ok(chsh(table, 1, 2, 1, 2)? + chsh(table, 1, 3, 4, 3)? + chsh(table, 2, 3, 6, 5)?)
}

/// The conditional A–C table given the main party's Bell outcome `b`.
///
/// Correlators are read as `Σ_{a,c} a c p(a,c|x,z,b)`: statistics conditioned on
/// `b`, normalized by `p(b|x,◇,z)`.
pub fn conditional_table(table: &CorrelationTable, b: u8) -> Result<CorrelationTable> {
    if b > 3 {
        return Err(Error::Argument(format!("Bell outcome {b} outside 0..=3")));
    }
    if table.layout().n_parties() != 3 {
        return Err(Error::Argument(
            "γ evaluation needs the tripartite table".into(),
        ));
    }
    table.condition_on(MAIN_PARTY, Input::Diamond, b as i8)
}

/// The `b`-th γ form on the `b`-conditioned A–C statistics:
/// `γ0 = E0`, `γ1 = E1`, `γ2 = −E1`, `γ3 = −E0`, where `E0 = I(1,2;1,2)` and
/// `E1 = ⟨A1C1⟩ + ⟨A1C2⟩ − ⟨A2C1⟩ + ⟨A2C2⟩ = I(1,2;2,1)`.
/// Every form reaches `2√2` on the reference Bell measurement.
pub fn gamma_chsh(table: &CorrelationTable, b: u8) -> Result<f64> {
    let cond = conditional_table(table, b)?;
    gamma_form(&cond, b)
}

/// Evaluates the `b`-th γ form on an already-conditioned A–C table.
pub fn gamma_form(conditional: &CorrelationTable, b: u8) -> Result<f64> {
    match b {
        0 => chsh(conditional, 1, 2, 1, 2),
        1 => chsh(conditional, 1, 2, 2, 1),
        2 => Ok(-chsh(conditional, 1, 2, 2, 1)?),
        3 => Ok(-chsh(conditional, 1, 2, 1, 2)?),
        _ => Err(Error::Argument(format!("Bell outcome {b} outside 0..=3"))),
    }
}

/// All four γ forms; fails if any Bell outcome has zero probability.
pub fn gamma_chsh_all(table: &CorrelationTable) -> Result<[f64; 4]> {
    Ok([
        gamma_chsh(table, 0)?,
        gamma_chsh(table, 1)?,
        gamma_chsh(table, 2)?,
        gamma_chsh(table, 3)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{exact_correlation, PartyAlphabet, PartyMeasurements, TableLayout};
    use crate::qcore::{
        bell_state, observable_projectors, pauli, rotated_observable, DensityMatrix, PauliLabel,
        Povm,
    };
    use std::f64::consts::SQRT_2;

    fn binary(op: &crate::qcore::Operator) -> Povm {
        Povm::binary(observable_projectors(op)).unwrap()
    }

    fn chsh_parties() -> [PartyMeasurements; 2] {
        let a = PartyMeasurements::new(
            "A",
            vec![
                (Input::Setting(1), binary(&pauli(PauliLabel::Z))),
                (Input::Setting(2), binary(&pauli(PauliLabel::X))),
            ],
        )
        .unwrap();
        let b = PartyMeasurements::new(
            "B",
            vec![
                (
                    Input::Setting(1),
                    binary(&rotated_observable(PauliLabel::Z, PauliLabel::X, 1.0)),
                ),
                (
                    Input::Setting(2),
                    binary(&rotated_observable(PauliLabel::Z, PauliLabel::X, -1.0)),
                ),
            ],
        )
        .unwrap();
        [a, b]
    }

    #[test]
    fn ideal_chsh_reaches_tsirelson() {
        let t = exact_correlation(&bell_state(0).unwrap(), &chsh_parties()).unwrap();
        assert!((chsh(&t, 1, 2, 1, 2).unwrap() - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_gives_zero() {
        let t = exact_correlation(&DensityMatrix::maximally_mixed(2), &chsh_parties()).unwrap();
        assert!(chsh(&t, 1, 2, 1, 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn all_plus_outputs_give_two() {
        let layout = TableLayout::new(vec![
            PartyAlphabet::binary("A", [Input::Setting(1), Input::Setting(2)]),
            PartyAlphabet::binary("B", [Input::Setting(1), Input::Setting(2)]),
        ])
        .unwrap();
        let mut t = CorrelationTable::zeros(layout.clone());
        for (_, inputs) in layout.blocks() {
            t.set(&inputs, &[1, 1], 1.0).unwrap();
        }
        assert_eq!(chsh(&t, 1, 2, 1, 2).unwrap(), 2.0);
    }

    #[test]
    fn correlator_examples_on_phi0() {
        let a = PartyMeasurements::new(
            "A",
            vec![(Input::Setting(1), binary(&pauli(PauliLabel::Z)))],
        )
        .unwrap();
        let b = PartyMeasurements::new(
            "B",
            vec![
                (Input::Setting(1), binary(&pauli(PauliLabel::Z))),
                (Input::Setting(2), binary(&pauli(PauliLabel::X))),
            ],
        )
        .unwrap();
        let t = exact_correlation(&bell_state(0).unwrap(), &[a, b]).unwrap();
        assert!(
            (correlator(&t, Input::Setting(1), Input::Setting(1)).unwrap() - 1.0).abs() < 1e-15
        );
        assert!(
            correlator(&t, Input::Setting(1), Input::Setting(2))
                .unwrap()
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn correlator_rejects_non_binary_or_missing_inputs() {
        let layout = TableLayout::new(vec![
            PartyAlphabet::binary("A", [Input::Setting(1)]),
            PartyAlphabet::new("B", vec![(Input::Diamond, vec![0, 1, 2, 3])]),
        ])
        .unwrap();
        let t = CorrelationTable::zeros(layout);
        assert!(correlator(&t, Input::Setting(1), Input::Diamond).is_err());
        assert!(correlator(&t, Input::Setting(2), Input::Diamond).is_err());
        assert!(chsh(&t, 1, 2, 1, 2).is_err());
    }
}
