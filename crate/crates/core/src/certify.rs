//! The certification gate and the trusted third-axis probe.
//!
//! Certification looks only at the referee's correlation data: the 3-CHSH value
//! on the `y ∈ 1..6` rounds and one CHSH form per Bell outcome on the `◇` rounds.
//! Both honest and complex-conjugated devices pass it, so the sign of the third
//! Pauli axis is settled separately by feeding a trusted `|R⟩` into the network.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::correlations::{
    conditional_table, correlator, gamma_form, three_chsh, CorrelationTable, MAIN_PARTY,
};
use crate::discriminate::{delta, P2Table};
use crate::error::{Error, Result};
use crate::netsim::{
    certification_layout, p2_exact, sample, CountsTable, DeviceStrategy, NQubitNetwork,
};
use crate::qcore::{right_circular, Input, TAU_NUM};

pub const BETA_MAX: f64 = 6.0 * SQRT_2;
pub const GAMMA_MAX: f64 = 2.0 * SQRT_2;
/// Standard errors of slack granted to finite-shot data by default.
pub const DEFAULT_SIGMAS: f64 = 4.0;

/// Correlator pairs `(x, y, sign)` entering the 3-CHSH sum.
const BETA_TERMS: [(u8, u8, f64); 12] = [
    (1, 1, 1.0),
    (1, 2, 1.0),
    (2, 1, 1.0),
    (2, 2, -1.0),
    (1, 4, 1.0),
    (1, 3, 1.0),
    (3, 4, 1.0),
    (3, 3, -1.0),
    (2, 6, 1.0),
    (2, 5, 1.0),
    (3, 6, 1.0),
    (3, 5, -1.0),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub beta: f64,
    /// One value per Bell outcome; `None` when that outcome never occurred.
    pub gamma: [Option<f64>; 4],
    pub tolerance: f64,
    pub passed: bool,
    /// Smallest number of rounds per input tuple, or `None` for exact data.
    pub shots_used: Option<u64>,
}

impl CertificationReport {
    fn evaluate(
        beta: f64,
        gamma: [Option<f64>; 4],
        tolerance: f64,
        shots_used: Option<u64>,
    ) -> Self {
        let passed = beta >= BETA_MAX - tolerance
            && gamma
                .iter()
                .all(|g| g.is_some_and(|g| g >= GAMMA_MAX - tolerance));
        Self {
            beta,
            gamma,
            tolerance,
            passed,
            shots_used,
        }
    }
}

fn check_layout(table: &CorrelationTable) -> Result<()> {
    if *table.layout() != certification_layout() {
        return Err(Error::Argument(
            "certification data must cover x ∈ 1..3, y ∈ 1..6 and ◇, z ∈ 1..2 with their full outcome sets".into(),
        ));
    }
    Ok(())
}

fn gamma_values(table: &CorrelationTable) -> Result<[Option<f64>; 4]> {
    let mut out = [None; 4];
    for (b, slot) in out.iter_mut().enumerate() {
        *slot = match conditional_table(table, b as u8) {
            Ok(cond) => Some(gamma_form(&cond, b as u8)?),
            Err(Error::Conditioning(_)) => None,
            Err(e) => return Err(e),
        };
    }
    Ok(out)
}

/// Evaluates the gate on an exact or estimated table.
pub fn certify(table: &CorrelationTable, tolerance: f64) -> Result<CertificationReport> {
    check_layout(table)?;
    let beta = three_chsh(&table.marginal_averaged(2)?)?;
    Ok(CertificationReport::evaluate(
        beta,
        gamma_values(table)?,
        tolerance,
        None,
    ))
}

/// Standard errors of β and of each γ form estimated from raw counts.
///
/// Each correlator contributes `(1 − E²)/n` with `n` the rounds behind it: all
/// of Charlie's inputs for the `y ∈ 1..6` correlators, and the rounds with the
/// conditioning Bell outcome for the γ forms.
pub fn standard_errors(counts: &CountsTable) -> Result<(f64, [Option<f64>; 4])> {
    check_layout(&counts.estimate()?)?;
    let layout = counts.layout();
    let estimate = counts.estimate()?;
    let averaged = estimate.marginal_averaged(2)?;
    let shots = |inputs: &[Input]| -> Result<u64> { Ok(counts.shots(layout.block_index(inputs)?)) };

    let mut var_beta = 0.0;
    for &(x, y, _) in &BETA_TERMS {
        let e = correlator(&averaged, Input::Setting(x), Input::Setting(y))?;
        let n: u64 = (1..=2u8)
            .map(|z| shots(&[Input::Setting(x), Input::Setting(y), Input::Setting(z)]))
            .sum::<Result<u64>>()?;
        var_beta += (1.0 - e * e) / n as f64;
    }

    let mut se_gamma = [None; 4];
    for (b, slot) in se_gamma.iter_mut().enumerate() {
        let Ok(cond) = conditional_table(&estimate, b as u8) else {
            continue;
        };
        let mut var = 0.0;
        for x in 1..=2u8 {
            for z in 1..=2u8 {
                let e = correlator(&cond, Input::Setting(x), Input::Setting(z))?;
                let block =
                    layout.block_index(&[Input::Setting(x), Input::Diamond, Input::Setting(z)])?;
                let n_b: u64 = layout
                    .block_outcomes(block)
                    .iter()
                    .zip(counts.block_counts(block))
                    .filter(|(o, _)| o[MAIN_PARTY] == b as i8)
                    .map(|(_, c)| c)
                    .sum();
                var += (1.0 - e * e) / n_b as f64;
            }
        }
        *slot = Some(var.sqrt());
    }
    Ok((var_beta.sqrt(), se_gamma))
}

/// Evaluates the gate on sampled counts.
///
/// Without an explicit tolerance the gate allows [`DEFAULT_SIGMAS`] times the
/// largest standard error among β and the γ forms.
pub fn certify_counts(counts: &CountsTable, tolerance: Option<f64>) -> Result<CertificationReport> {
    let estimate = counts.estimate()?;
    check_layout(&estimate)?;
    let tolerance = match tolerance {
        Some(t) => t,
        None => {
            let (se_beta, se_gamma) = standard_errors(counts)?;
            DEFAULT_SIGMAS
                * se_gamma
                    .iter()
                    .flatten()
                    .fold(se_beta, |acc, &s| acc.max(s))
        }
    };
    let beta = three_chsh(&estimate.marginal_averaged(2)?)?;
    Ok(CertificationReport::evaluate(
        beta,
        gamma_values(&estimate)?,
        tolerance,
        Some(counts.min_shots()),
    ))
}

/// True when two distinct single-qubit pure states agree on the first two axes
/// within `threshold`, so only the third-axis statistics can separate them.
pub fn requires_mdi(
    rho1: &crate::qcore::DensityMatrix,
    rho2: &crate::qcore::DensityMatrix,
    threshold: f64,
) -> Result<bool> {
    let [d1, d2, d3] = delta(rho1, rho2)?;
    if d1.max(d2).max(d3) <= threshold {
        return Err(Error::DegenerateEnsemble(
            "the two states are identical".into(),
        ));
    }
    Ok(d1.max(d2) <= threshold)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdiProbeResult {
    /// Sign the devices attach to the third axis.
    pub sign: i8,
    /// `(P2(+1|3), P2(−1|3))` measured on the trusted state.
    pub probe_outcome_distribution: [f64; 2],
    pub shots: Option<u64>,
}

/// Runs the discrimination round on the trusted state `|R⟩` and reads input 3.
///
/// `shots = None` uses exact statistics. The result is refused when `P2(+1|3)` is
/// within `τ_num` (exact) or four standard errors (sampled) of ½.
pub fn mdi_probe(
    strategy: &DeviceStrategy,
    shots: Option<u64>,
    seed: u64,
) -> Result<MdiProbeResult> {
    let exact = p2_exact(strategy, &right_circular())?;
    let table = match shots {
        None => P2Table::from_table(&exact)?,
        Some(0) => return Err(Error::Argument("probe needs at least one shot".into())),
        Some(n) => P2Table::from_counts(&sample(&exact, n, seed)?)?,
    };
    let (plus, minus) = (table.prob(&[3], &[1])?, table.prob(&[3], &[-1])?);
    let margin = match shots {
        None => TAU_NUM,
        Some(n) => DEFAULT_SIGMAS * 0.5 / (n as f64).sqrt(),
    };
    if (plus - 0.5).abs() <= margin {
        return Err(Error::InconclusiveProbe {
            p_plus: plus,
            margin,
        });
    }
    Ok(MdiProbeResult {
        sign: if plus > 0.5 { 1 } else { -1 },
        probe_outcome_distribution: [plus, minus],
        shots,
    })
}

/// One probe per cell of a multi-qubit network; cell `k` samples with seed `seed + k`.
pub fn mdi_probe_cells(
    network: &NQubitNetwork,
    shots: Option<u64>,
    seed: u64,
) -> Result<Vec<MdiProbeResult>> {
    network
        .cells()
        .iter()
        .enumerate()
        .map(|(k, s)| mdi_probe(s, shots, seed.wrapping_add(k as u64)))
        .collect()
}
