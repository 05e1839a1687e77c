//! Dense complex operators on multi-qubit Hilbert spaces.
//!
//! Storage is row-major. Qubit 0 is the most significant tensor factor, so
//! `kron(a, b)` places `a` on qubit 0.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used for validity and equality checks on exact-arithmetic paths.
pub const TAU_NUM: f64 = 1e-9;

/// Largest operator (in qubits) the dense routines accept.
pub const DEFAULT_MAX_QUBITS: usize = 12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        op
    }

    /// Builds an operator from row-major entries. The dimension must be a power of two.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Argument(format!(
                "dimension {dim} is not a power of two"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        assert!(N.is_power_of_two(), "dimension must be a power of two");
        Self {
            dim: N,
            entries: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    /// Outer product `|v><v|`.
    pub fn outer(v: &[Complex64]) -> Result<Self> {
        let dim = v.len();
        let entries = v
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b.conj()))
            .collect();
        Self::from_entries(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j];
            }
        }
        out
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// `Tr[self * other]` without forming the product.
    pub fn trace_product(&self, other: &Operator) -> Result<Complex64> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self.entries[i * d + j] * other.entries[j * d + i];
            }
        }
        Ok(acc)
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut out = Self::zeros(d);
        for i in 0..da {
            for j in 0..da {
                let a = self.entries[i * da + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    let row = (i * db + k) * d + j * db;
                    for l in 0..db {
                        out.entries[row + l] = a * other.entries[k * db + l];
                    }
                }
            }
        }
        out
    }

    /// Tensor product of a non-empty list of operators, left factor first.
    pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a Operator>) -> Result<Operator> {
        let mut iter = ops.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::Argument("empty tensor product".into()))?;
        Ok(iter.fold(first.clone(), |acc, op| acc.kron(op)))
    }

    /// Partial trace keeping the listed qubits (in ascending order of appearance).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Operator> {
        let n = self.n_qubits();
        if keep.is_empty() {
            return Err(Error::Argument(
                "partial trace must keep at least one qubit".into(),
            ));
        }
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() != keep.len() || kept.iter().any(|&q| q >= n) {
            return Err(Error::Argument(format!(
                "invalid keep set {keep:?} for {n} qubits"
            )));
        }
        let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
        let dk = 1usize << kept.len();
        let dt = 1usize << traced.len();
        let bit = |q: usize| 1usize << (n - 1 - q);
        let embed = |kidx: usize, tidx: usize| -> usize {
            let mut full = 0;
            for (pos, &q) in kept.iter().enumerate() {
                if kidx & (1 << (kept.len() - 1 - pos)) != 0 {
                    full |= bit(q);
                }
            }
            for (pos, &q) in traced.iter().enumerate() {
                if tidx & (1 << (traced.len() - 1 - pos)) != 0 {
                    full |= bit(q);
                }
            }
            full
        };
        let mut out = Self::zeros(dk);
        for r in 0..dk {
            for c in 0..dk {
                let mut acc = ZERO;
                for t in 0..dt {
                    acc += self.get(embed(r, t), embed(c, t));
                }
                out.entries[r * dk + c] = acc;
            }
        }
        Ok(out)
    }

    /// Reorders tensor factors: qubit `q` of the result is qubit `order[q]` of `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Operator> {
        let n = self.n_qubits();
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::Argument(format!(
                "{order:?} is not a permutation of {n} qubits"
            )));
        }
        let map = |idx: usize| -> usize {
            let mut src = 0;
            for (q, &from) in order.iter().enumerate() {
                if idx & (1 << (n - 1 - q)) != 0 {
                    src |= 1 << (n - 1 - from);
                }
            }
            src
        };
        let d = self.dim;
        let src: Vec<usize> = (0..d).map(map).collect();
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.entries[r * d + c] = self.get(src[r], src[c]);
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|i| (i..d).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.dagger()
            .matmul(self)
            .map(|p| p.approx_eq(&Operator::identity(self.dim), tol))
            .unwrap_or(false)
    }

    /// Eigenvalues of a Hermitian operator in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(TAU_NUM) {
            return Err(Error::Validation("operator is not Hermitian".into()));
        }
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |i, j| self.get(i, j));
        let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.hermitian_eigenvalues()
            .map(|v| v.first().is_none_or(|&min| min >= -tol))
            .unwrap_or(false)
    }

    /// Sum of absolute eigenvalues of a Hermitian operator.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.hermitian_eigenvalues()?.iter().map(|l| l.abs()).sum())
    }

    fn check_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn zip_entries(
    a: &Operator,
    b: &Operator,
    f: impl Fn(Complex64, Complex64) -> Complex64,
) -> Operator {
    assert_eq!(a.dim, b.dim, "operator dimension mismatch");
    Operator {
        dim: a.dim,
        entries: a
            .entries
            .iter()
            .zip(&b.entries)
            .map(|(x, y)| f(*x, *y))
            .collect(),
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        zip_entries(self, rhs, |a, b| a + b)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        zip_entries(self, rhs, |a, b| a - b)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs).expect("operator dimension mismatch")
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_places_left_factor_on_qubit_zero() {
        let z = Operator::from_rows([[ONE, ZERO], [ZERO, -ONE]]);
        let id = Operator::identity(2);
        let zi = z.kron(&id);
        let diag: Vec<f64> = (0..4).map(|i| zi.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = Operator::from_rows([[c(0.7, 0.0), c(0.1, -0.2)], [c(0.1, 0.2), c(0.3, 0.0)]]);
        let b = Operator::from_rows([[c(0.4, 0.0), c(0.0, 0.3)], [c(0.0, -0.3), c(0.6, 0.0)]]);
        let ab = a.kron(&b);
        assert!(ab.partial_trace(&[0]).unwrap().approx_eq(&a, 1e-12));
        assert!(ab.partial_trace(&[1]).unwrap().approx_eq(&b, 1e-12));
        assert!(ab.partial_trace(&[0, 1]).unwrap().approx_eq(&ab, 1e-12));
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let op = Operator::identity(4);
        assert!(op.partial_trace(&[]).is_err());
        assert!(op.partial_trace(&[2]).is_err());
        assert!(op.partial_trace(&[1, 1]).is_err());
    }

    #[test]
    fn permute_swaps_factors() {
        let a = Operator::from_rows([[c(0.7, 0.0), c(0.1, -0.2)], [c(0.1, 0.2), c(0.3, 0.0)]]);
        let b = Operator::from_rows([[c(0.4, 0.0), c(0.0, 0.3)], [c(0.0, -0.3), c(0.6, 0.0)]]);
        let swapped = a.kron(&b).permute_qubits(&[1, 0]).unwrap();
        assert!(swapped.approx_eq(&b.kron(&a), 1e-12));
    }

    #[test]
    fn from_entries_checks_shape() {
        assert!(Operator::from_entries(3, vec![ZERO; 9]).is_err());
        assert!(Operator::from_entries(2, vec![ZERO; 3]).is_err());
    }

    #[test]
    fn trace_norm_of_pauli_z_is_two() {
        let z = Operator::from_rows([[ONE, ZERO], [ZERO, -ONE]]);
        assert!((z.trace_norm().unwrap() - 2.0).abs() < 1e-12);
        assert!(z.is_unitary(1e-12));
        assert!(!z.is_psd(1e-12));
    }

    #[test]
    fn trace_product_matches_matmul() {
        let a = Operator::from_rows([[c(1.0, 2.0), c(0.5, 0.0)], [c(-1.0, 0.3), c(0.2, -0.1)]]);
        let b = Operator::from_rows([[c(0.3, 0.0), c(0.0, 1.0)], [c(2.0, 0.0), c(-0.4, 0.4)]]);
        let direct = a.matmul(&b).unwrap().trace();
        assert!((a.trace_product(&b).unwrap() - direct).norm() < 1e-12);
    }
}
