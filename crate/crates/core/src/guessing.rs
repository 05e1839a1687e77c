//! Minimum-error guessing of one of two states: the optimal (Helstrom) success
//! probability, the success probability when only Pauli measurements on the first
//! two axes are allowed, and grid sweeps of their gap over real qubit states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{projector, DensityMatrix, Operator, PauliLabel};

/// Two pure states with priors `q1` and `q2 = 1 − q1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStateEnsemble {
    q1: f64,
    psi1: DensityMatrix,
    psi2: DensityMatrix,
}

impl TwoStateEnsemble {
    pub fn new(q1: f64, psi1: DensityMatrix, psi2: DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&q1) {
            return Err(Error::Argument(format!("prior {q1} outside [0, 1]")));
        }
        if psi1.dim() != psi2.dim() {
            return Err(Error::DimensionMismatch {
                expected: psi1.dim(),
                actual: psi2.dim(),
            });
        }
        if !psi1.is_pure(1e-8) || !psi2.is_pure(1e-8) {
            return Err(Error::Validation("ensemble members must be pure".into()));
        }
        Ok(Self { q1, psi1, psi2 })
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn q2(&self) -> f64 {
        1.0 - self.q1
    }

    /// `X = q1 ψ1 − q2 ψ2`.
    pub fn bias_operator(&self) -> Operator {
        &self.psi1.op().scale_real(self.q1) - &self.psi2.op().scale_real(self.q2())
    }
}

/// `½ + ½‖X‖₁`, the best success probability over all measurements.
pub fn helstrom(ensemble: &TwoStateEnsemble) -> Result<f64> {
    Ok(0.5 + 0.5 * ensemble.bias_operator().trace_norm()?)
}

/// `½ + ½ max_x (|Tr π_{+1|x} X| + |Tr π_{−1|x} X|)` over the given single-qubit axes.
///
/// Guessing by the prior alone is always available and enters as `|Tr X|`.
pub fn restricted_guess_axes(ensemble: &TwoStateEnsemble, axes: &[PauliLabel]) -> Result<f64> {
    let x = ensemble.bias_operator();
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: x.dim(),
        });
    }
    let mut best = x.trace().re.abs();
    for &axis in axes {
        let plus = projector(1, axis)?.trace_product(&x)?.re;
        let minus = projector(-1, axis)?.trace_product(&x)?.re;
        best = best.max(plus.abs() + minus.abs());
    }
    Ok(0.5 + 0.5 * best)
}

/// Success probability restricted to `σ1` and `σ2` measurements.
pub fn restricted_guess(ensemble: &TwoStateEnsemble) -> Result<f64> {
    restricted_guess_axes(ensemble, &[PauliLabel::Z, PauliLabel::X])
}

/// `helstrom − restricted_guess`.
pub fn p_delta(ensemble: &TwoStateEnsemble) -> Result<f64> {
    Ok(helstrom(ensemble)? - restricted_guess(ensemble)?)
}

/// The real qubit state `c|0⟩ + d|1⟩` with `d = ±√(1 − c²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealState {
    pub c: f64,
    pub d_sign: i8,
}

impl RealState {
    pub fn new(c: f64, d_sign: i8) -> Result<Self> {
        if !(-1.0..=1.0).contains(&c) {
            return Err(Error::Argument(format!("amplitude {c} outside [−1, 1]")));
        }
        if d_sign != 1 && d_sign != -1 {
            return Err(Error::Argument(format!("sign {d_sign} is not ±1")));
        }
        Ok(Self { c, d_sign })
    }

    pub fn d(&self) -> f64 {
        f64::from(self.d_sign) * (1.0 - self.c * self.c).max(0.0).sqrt()
    }

    /// Bloch components along `σ1` and `σ2`.
    pub fn bloch(&self) -> (f64, f64) {
        let d = self.d();
        (self.c * self.c - d * d, 2.0 * self.c * d)
    }

    pub fn density(&self) -> DensityMatrix {
        use num_complex::Complex64;
        DensityMatrix::from_pure(&[Complex64::new(self.c, 0.0), Complex64::new(self.d(), 0.0)])
            .expect("normalized by construction")
    }
}

/// `(p_G1, p_G2, p_Δ)` for two real states from their Bloch vectors.
///
/// With `X = ½(t I + s⃗·σ⃗)`: `‖X‖₁ = max(|t|, |s⃗|)` and the restricted norm is
/// `max(|t|, |s_1|, |s_2|)`.
pub fn real_pair_guessing(q1: f64, psi1: &RealState, psi2: &RealState) -> (f64, f64, f64) {
    let q2 = 1.0 - q1;
    let (z1, x1) = psi1.bloch();
    let (z2, x2) = psi2.bloch();
    let t = (q1 - q2).abs();
    let (sz, sx) = (q1 * z1 - q2 * z2, q1 * x1 - q2 * x2);
    let full = t.max(sz.hypot(sx));
    let restricted = t.max(sz.abs()).max(sx.abs());
    let (g1, g2) = (0.5 + 0.5 * full, 0.5 + 0.5 * restricted);
    (g1, g2, 0.5 * (full - restricted))
}

/// Evenly spaced prior and amplitude grids.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub q_step: f64,
    pub c_step: f64,
    pub both_signs: bool,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            q_step: 0.01,
            c_step: 0.01,
            both_signs: true,
        }
    }
}

fn linspace(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Argument(format!(
            "grid step {step} must be positive"
        )));
    }
    let n = ((hi - lo) / step).round() as usize;
    Ok((0..=n)
        .map(|i| (lo + i as f64 * step).clamp(lo, hi))
        .collect())
}

impl SweepGrid {
    pub fn q_values(&self) -> Result<Vec<f64>> {
        linspace(0.0, 1.0, self.q_step)
    }

    pub fn states(&self) -> Result<Vec<RealState>> {
        let signs: &[i8] = if self.both_signs { &[1, -1] } else { &[1] };
        Ok(linspace(-1.0, 1.0, self.c_step)?
            .into_iter()
            .flat_map(|c| signs.iter().map(move |&s| RealState { c, d_sign: s }))
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSummary {
    pub q: f64,
    /// Mean of `p_Δ` over all ordered state pairs.
    pub avg: f64,
    pub max: f64,
    /// First pair (in grid order) attaining `max`.
    pub argmax: (RealState, RealState),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCell {
    pub psi1: RealState,
    pub psi2: RealState,
    pub p_g1: f64,
    pub p_g2: f64,
    pub p_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub per_q: Vec<PriorSummary>,
    /// All state pairs at equal priors.
    pub heatmap: Vec<HeatmapCell>,
    pub global_max: f64,
    pub global_max_q: f64,
    pub max_of_avg: f64,
    pub max_of_avg_q: f64,
}

fn summarize(q: f64, states: &[RealState]) -> PriorSummary {
    let mut sum = 0.0;
    let mut max = f64::NEG_INFINITY;
    let mut argmax = (states[0], states[0]);
    for a in states {
        for b in states {
            let (_, _, d) = real_pair_guessing(q, a, b);
            sum += d;
            if d > max {
                max = d;
                argmax = (*a, *b);
            }
        }
    }
    PriorSummary {
        q,
        avg: sum / (states.len() * states.len()) as f64,
        max,
        argmax,
    }
}

/// `p_Δ` over every prior in `q_values` and every ordered pair of `states`.
///
/// Priors are processed in parallel; each one is reduced sequentially in grid
/// order, so the result does not depend on scheduling.
pub fn sweep(q_values: &[f64], states: &[RealState]) -> Result<SweepResult> {
    if q_values.is_empty() || states.is_empty() {
        return Err(Error::Argument("sweep grids must be non-empty".into()));
    }
    if let Some(q) = q_values.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::Argument(format!("prior {q} outside [0, 1]")));
    }
    let per_q: Vec<PriorSummary> = q_values.par_iter().map(|&q| summarize(q, states)).collect();
    let heatmap = states
        .iter()
        .flat_map(|a| {
            states.iter().map(move |b| {
                let (p_g1, p_g2, p_delta) = real_pair_guessing(0.5, a, b);
                HeatmapCell {
                    psi1: *a,
                    psi2: *b,
                    p_g1,
                    p_g2,
                    p_delta,
                }
            })
        })
        .collect();
    let first_max = |f: fn(&PriorSummary) -> f64| {
        per_q.iter().fold((f64::NEG_INFINITY, 0.0), |(m, mq), s| {
            if f(s) > m {
                (f(s), s.q)
            } else {
                (m, mq)
            }
        })
    };
    let (global_max, global_max_q) = first_max(|s| s.max);
    let (max_of_avg, max_of_avg_q) = first_max(|s| s.avg);
    Ok(SweepResult {
        per_q,
        heatmap,
        global_max,
        global_max_q,
        max_of_avg,
        max_of_avg_q,
    })
}

/// [`sweep`] over the grids described by `grid`.
pub fn sweep_grid(grid: &SweepGrid) -> Result<SweepResult> {
    sweep(&grid.q_values()?, &grid.states()?)
}
