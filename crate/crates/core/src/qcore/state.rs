use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::operator::{Operator, TAU_NUM};
use crate::error::{arg, Error, Result};

/// A validated density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        Self::validated(op, TAU_NUM)
    }

    pub fn validated(op: Operator, tol: f64) -> Result<Self> {
        let tr = op.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Validation(format!("trace is {tr}, expected 1")));
        }
        if !op.is_hermitian(tol) {
            return Err(Error::Validation("density matrix is not Hermitian".into()));
        }
        if !op.is_psd(tol) {
            return Err(Error::Validation(
                "density matrix is not positive semidefinite".into(),
            ));
        }
        Ok(Self(op))
    }

    /// `|v⟩⟨v|` for a normalized vector.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TAU_NUM {
            return Err(Error::Validation(format!(
                "state vector has squared norm {norm}"
            )));
        }
        Self::new(Operator::outer(amplitudes)?)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self(Operator::identity(d).scale_real(1.0 / d as f64))
    }

    /// Haar-random pure state on `n_qubits`.
    pub fn random_pure<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let d = 1usize << n_qubits;
        let mut v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        Self(Operator::outer(&v).expect("power-of-two dimension"))
    }

    /// Random full-rank mixed state `G G† / Tr(G G†)` with Gaussian `G`.
    pub fn random_mixed<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let d = 1usize << n_qubits;
        let g = Operator::from_entries(
            d,
            (0..d * d)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        )
        .expect("power-of-two dimension");
        let gg = &g * &g.dagger();
        let tr = gg.trace().re;
        Self(gg.scale_real(1.0 / tr))
    }

    pub fn op(&self) -> &Operator {
        &self.0
    }

    pub fn into_op(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).expect("square").re
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// Entrywise complex conjugate in the computational basis. Preserves validity.
    pub fn conjugate(&self) -> Self {
        Self(self.0.conj())
    }

    pub fn kron(&self, other: &DensityMatrix) -> Self {
        Self(self.0.kron(&other.0))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(Self(self.0.partial_trace(keep)?))
    }

    /// `Tr[observable · ρ]`, real part.
    pub fn expectation(&self, observable: &Operator) -> Result<f64> {
        Ok(observable.trace_product(&self.0)?.re)
    }

    /// Werner-type mixture `p ρ + (1 − p) I/d`.
    pub fn depolarized(&self, visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) {
            return arg(format!("visibility {visibility} outside [0, 1]"));
        }
        let d = self.dim() as f64;
        let noise = Operator::identity(self.dim()).scale_real((1.0 - visibility) / d);
        Ok(Self(&self.0.scale_real(visibility) + &noise))
    }
}

/// Parameters of `|α⟩ = cos ω |0⟩ + e^{iθ} sin ω |1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureStateParams {
    pub omega: f64,
    pub theta: f64,
}

impl PureStateParams {
    pub fn new(omega: f64, theta: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2 + TAU_NUM).contains(&omega) {
            return arg(format!("omega {omega} outside [0, π/2]"));
        }
        if !theta.is_finite() {
            return arg("theta must be finite");
        }
        Ok(Self {
            omega,
            theta: theta.rem_euclid(std::f64::consts::TAU),
        })
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.omega.cos(), 0.0),
            Complex64::from_polar(self.omega.sin(), self.theta),
        ]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes()).expect("normalized by construction")
    }

    /// Recovers `(ω, θ)` from a single-qubit pure density matrix.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: rho.dim(),
            });
        }
        if !rho.is_pure(1e-8) {
            return Err(Error::Validation("state is not pure".into()));
        }
        let p0 = rho.op().get(0, 0).re.clamp(0.0, 1.0);
        let omega = p0.sqrt().acos();
        // ρ10 = e^{iθ} sin ω cos ω
        let off = rho.op().get(1, 0);
        let theta = if off.norm() < 1e-12 { 0.0 } else { off.arg() };
        Self::new(omega, theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_invalid_density_matrices() {
        let mut op = Operator::identity(2);
        assert!(DensityMatrix::new(op.clone()).is_err());
        op = op.scale_real(0.5);
        assert!(DensityMatrix::new(op.clone()).is_ok());
        op.set(0, 1, Complex64::new(0.0, 0.1));
        assert!(DensityMatrix::new(op).is_err());
        let neg = Operator::from_rows([
            [Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-0.5, 0.0)],
        ]);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=3 {
            let p = DensityMatrix::random_pure(n, &mut rng);
            assert!(DensityMatrix::new(p.op().clone()).is_ok());
            assert!(p.is_pure(1e-12));
            let m = DensityMatrix::random_mixed(n, &mut rng);
            assert!(DensityMatrix::new(m.op().clone()).is_ok());
        }
    }

    #[test]
    fn conjugation_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = DensityMatrix::random_mixed(2, &mut rng);
        let once = rho.conjugate();
        assert!(DensityMatrix::new(once.op().clone()).is_ok());
        assert_eq!(once.conjugate(), rho);
    }

    #[test]
    fn conjugate_of_right_circular_is_left_circular() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r =
            DensityMatrix::from_pure(&[Complex64::new(h, 0.0), Complex64::new(0.0, h)]).unwrap();
        let l =
            DensityMatrix::from_pure(&[Complex64::new(h, 0.0), Complex64::new(0.0, -h)]).unwrap();
        assert!(r.conjugate().op().approx_eq(l.op(), 1e-15));
    }

    #[test]
    fn params_round_trip() {
        for (omega, theta) in [(0.3, 1.1), (1.2, 5.9), (std::f64::consts::FRAC_PI_4, 0.0)] {
            let p = PureStateParams::new(omega, theta).unwrap();
            let back = PureStateParams::from_density(&p.density()).unwrap();
            assert!((back.omega - omega).abs() < 1e-9);
            assert!((back.theta - theta).abs() < 1e-9);
        }
        assert!(PureStateParams::new(2.0, 0.0).is_err());
        assert!(PureStateParams::from_density(&DensityMatrix::maximally_mixed(1)).is_err());
    }
}
