use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::p2::P2Table;
use crate::error::{Error, Result};
use crate::qcore::{
    index_tuple, pauli_decompose, DensityMatrix, PauliLabel, PureStateParams, TAU_NUM,
};

/// Whether a decision can rest on correlations alone or needs the trusted probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "DI")]
    DeviceIndependent,
    #[serde(rename = "MDI")]
    MeasurementDeviceIndependent,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::DeviceIndependent => "DI",
            Mode::MeasurementDeviceIndependent => "MDI",
        })
    }
}

/// Per-axis biases `(Δ1, Δ2, Δ3)` between two pure single-qubit states:
/// `Δ1 = 2|cos²ω1 − cos²ω2|`, and `Δ2`, `Δ3` are the real and imaginary parts of
/// `e^{−iθ1} sin 2ω1 − e^{−iθ2} sin 2ω2` in absolute value.
pub fn delta(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<[f64; 3]> {
    let p1 = PureStateParams::from_density(rho1)?;
    let p2 = PureStateParams::from_density(rho2)?;
    let z = |p: &PureStateParams| Complex64::from_polar((2.0 * p.omega).sin(), -p.theta);
    let d = z(&p1) - z(&p2);
    Ok([
        2.0 * (p1.omega.cos().powi(2) - p2.omega.cos().powi(2)).abs(),
        d.re.abs(),
        d.im.abs(),
    ])
}

/// `Δ_x = Σ_a |P2^{(1)}(a|x) − P2^{(2)}(a|x)|` from two single-system tables.
pub fn delta_operational(t1: &P2Table, t2: &P2Table) -> Result<[f64; 3]> {
    if t1.n_systems() != 1 || t2.n_systems() != 1 {
        return Err(Error::Argument(
            "per-axis biases need single-system tables".into(),
        ));
    }
    let mut out = [0.0; 3];
    for (x, slot) in (1..=3u8).zip(out.iter_mut()) {
        *slot = (t1.prob(&[x], &[1])? - t2.prob(&[x], &[1])?).abs()
            + (t1.prob(&[x], &[-1])? - t2.prob(&[x], &[-1])?).abs();
    }
    Ok(out)
}

/// `max_x Δ_x / 2`.
pub fn distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    Ok(delta(rho1, rho2)?.into_iter().fold(0.0, f64::max) / 2.0)
}

fn check_distinct(gap: f64, threshold: f64) -> Result<()> {
    if gap <= threshold {
        return Err(Error::DegenerateEnsemble(
            "the two states have identical Pauli statistics".into(),
        ));
    }
    Ok(())
}

/// The input that best separates two single-qubit states.
///
/// Returns `k ∈ {1, 2}` in DI mode when `max(Δ1, Δ2) > threshold`, preferring 1 when
/// the two agree within `τ_num`; otherwise `k = 3` in MDI mode.
pub fn choose_measurement(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    threshold: f64,
) -> Result<(u8, Mode)> {
    let [d1, d2, d3] = delta(rho1, rho2)?;
    check_distinct(d1.max(d2).max(d3), threshold)?;
    if d1.max(d2) > threshold {
        Ok((
            if d1 >= d2 - TAU_NUM { 1 } else { 2 },
            Mode::DeviceIndependent,
        ))
    } else {
        Ok((3, Mode::MeasurementDeviceIndependent))
    }
}

/// Index tuples usable without the probe: entries in `{σ0, σ1, σ2}`, not all `σ0`.
pub fn di_index_tuples(n: usize) -> impl Iterator<Item = Vec<PauliLabel>> {
    all_index_tuples(n).filter(|m| m.iter().all(|l| l.index() != 3))
}

/// Every non-identity index tuple in lexicographic order.
pub fn all_index_tuples(n: usize) -> impl Iterator<Item = Vec<PauliLabel>> {
    (1..4usize.pow(n as u32)).map(move |i| index_tuple(i, n))
}

/// An index tuple chosen to separate two states and the gap it achieves.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexChoice {
    pub indices: Vec<PauliLabel>,
    pub mode: Mode,
    /// `|S^{(1)}_m − S^{(2)}_m|`.
    pub gap: f64,
}

fn best_tuple(
    c1: &[f64],
    c2: &[f64],
    tuples: impl Iterator<Item = Vec<PauliLabel>>,
) -> Option<(Vec<PauliLabel>, f64)> {
    let flat = |m: &[PauliLabel]| m.iter().fold(0usize, |acc, l| acc * 4 + l.index() as usize);
    let scored: Vec<_> = tuples
        .map(|m| {
            let i = flat(&m);
            let gap = (c1[i] - c2[i]).abs();
            (m, gap)
        })
        .collect();
    let max = scored.iter().map(|(_, g)| *g).fold(0.0, f64::max);
    scored.into_iter().find(|(_, g)| *g >= max - TAU_NUM)
}

/// Chooses the Pauli index tuple that best separates two `N`-qubit states.
///
/// Tuples without `σ3` are tried first (DI mode); only when none of them separates
/// the states by more than `threshold` are tuples containing `σ3` used (MDI mode).
/// Ties within `τ_num` go to the lexicographically smallest tuple.
pub fn select_index_nqubit(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    threshold: f64,
) -> Result<IndexChoice> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            actual: rho2.dim(),
        });
    }
    let n = rho1.n_qubits();
    let c1 = pauli_decompose(rho1, n)?;
    let c2 = pauli_decompose(rho2, n)?;
    let (c1, c2) = (c1.values(), c2.values());
    let (indices, gap) = best_tuple(c1, c2, all_index_tuples(n)).expect("at least one tuple");
    check_distinct(gap, threshold)?;
    match best_tuple(c1, c2, di_index_tuples(n)) {
        Some((m, g)) if g > threshold => Ok(IndexChoice {
            indices: m,
            mode: Mode::DeviceIndependent,
            gap: g,
        }),
        _ => Ok(IndexChoice {
            indices,
            mode: Mode::MeasurementDeviceIndependent,
            gap,
        }),
    }
}

/// `½ max_m |S^{(1)}_m − S^{(2)}_m|` over all non-identity Pauli tuples.
pub fn nqubit_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            actual: rho2.dim(),
        });
    }
    let n = rho1.n_qubits();
    let c1 = pauli_decompose(rho1, n)?;
    let c2 = pauli_decompose(rho2, n)?;
    Ok(c1
        .values()
        .iter()
        .zip(c2.values())
        .skip(1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / 2.0)
}
