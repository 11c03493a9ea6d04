//! Pure states and density operators over a [`PartyLayout`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::PartyLayout;
use crate::MAX_DIM;

/// Tolerance on the norm of a [`PureState`].
pub const NORM_TOL: f64 = 1e-12;
/// Entrywise tolerance for Hermiticity and unit trace.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized amplitude vector over the product basis of a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: PartyLayout,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(layout: PartyLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::LayoutMismatch(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        let norm = norm(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { layout, amps })
    }

    /// Normalizes `amps` first; fails on a zero vector.
    pub fn normalized(layout: PartyLayout, mut amps: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Self::new(layout, amps)
    }

    pub fn basis(layout: PartyLayout, index: usize) -> Result<Self> {
        let dim = layout.total_dim();
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch("inner product of different layouts".into()));
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityOperator {
        let d = self.amps.len();
        let matrix = DMatrix::from_fn(d, d, |r, c| self.amps[r] * self.amps[c].conj());
        DensityOperator { layout: self.layout.clone(), matrix, psd: PsdStatus::Yes }
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`, conjugating the left argument.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Whether an operator is known to be positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdStatus {
    Yes,
    No,
    Unchecked,
}

/// Hermitian operator over a layout.
///
/// Physical states have unit trace and are PSD; partial transposes keep the
/// unit trace but carry `PsdStatus::Unchecked`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: PartyLayout,
    matrix: DMatrix<Complex64>,
    psd: PsdStatus,
}

impl DensityOperator {
    /// Hermitian, unit-trace operator. PSD-ness is not checked.
    pub fn new(layout: PartyLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
        let op = Self::hermitian(layout, matrix)?;
        let tr = op.trace();
        if (tr - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!("trace {tr} != 1")));
        }
        Ok(op)
    }

    /// Hermitian operator of arbitrary trace (projectors, Bell operators,
    /// intermediate sums).
    pub fn hermitian(layout: PartyLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = layout.total_dim();
        if dim > MAX_DIM {
            return Err(Error::DimensionCap { dim, cap: MAX_DIM });
        }
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::LayoutMismatch(format!(
                "{}x{} matrix for dimension {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { layout, matrix, psd: PsdStatus::Unchecked })
    }

    pub(crate) fn from_parts(layout: PartyLayout, matrix: DMatrix<Complex64>, psd: PsdStatus) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self { layout, matrix, psd }
    }

    pub fn maximally_mixed(layout: PartyLayout) -> Self {
        let d = layout.total_dim();
        let matrix = DMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0));
        Self { layout, matrix, psd: PsdStatus::Yes }
    }

    /// Convex combination `sum w_i rho_i`; weights must be non-negative and
    /// sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let layout = first.layout.clone();
        let d = layout.total_dim();
        let mut matrix = DMatrix::from_element(d, d, ZERO);
        let mut all_psd = true;
        for (w, rho) in parts {
            if rho.layout != layout {
                return Err(Error::LayoutMismatch("mixture of different layouts".into()));
            }
            if *w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {w}")));
            }
            all_psd &= rho.psd == PsdStatus::Yes;
            matrix += &rho.matrix * Complex64::new(*w, 0.0);
        }
        let mut out = Self::new(layout, matrix)?;
        if all_psd {
            out.psd = PsdStatus::Yes;
        }
        Ok(out)
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn psd_status(&self) -> PsdStatus {
        self.psd
    }

    pub fn with_psd_status(mut self, psd: PsdStatus) -> Self {
        self.psd = psd;
        self
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> Vec<(usize, usize, Complex64)> {
        let d = self.dim();
        let mut out = Vec::new();
        for r in 0..d {
            for c in 0..d {
                let z = self.matrix[(r, c)];
                if z.re != 0.0 || z.im != 0.0 {
                    out.push((r, c, z));
                }
            }
        }
        out
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &DensityOperator) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch("trace of product of different layouts".into()));
        }
        Ok(trace_product(&self.matrix, &other.matrix))
    }

    /// `<psi| self |psi>`.
    pub fn expectation(&self, psi: &PureState) -> Result<Complex64> {
        if self.layout != *psi.layout() {
            return Err(Error::LayoutMismatch("expectation over different layouts".into()));
        }
        let a = psi.amplitudes();
        let mut acc = ZERO;
        for r in 0..a.len() {
            let ar = a[r].conj();
            if ar == ZERO {
                continue;
            }
            for (c, ac) in a.iter().enumerate() {
                acc += ar * self.matrix[(r, c)] * ac;
            }
        }
        Ok(acc)
    }
}

pub(crate) fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for r in 0..d {
        for c in 0..d {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let mut dev: f64 = 0.0;
    for r in 0..d {
        for c in r..d {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_requires_normalization() {
        let layout = PartyLayout::qubits(1).unwrap();
        assert!(PureState::new(layout.clone(), vec![ONE, ONE]).is_err());
        let s = PureState::normalized(layout.clone(), vec![ONE, ONE]).unwrap();
        assert!((norm(s.amplitudes()) - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(layout, vec![ZERO, ZERO]).is_err());
    }

    #[test]
    fn density_rejects_non_hermitian() {
        let layout = PartyLayout::qubits(1).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.5, 0.0), ONE, ZERO, Complex64::new(0.5, 0.0)]);
        assert!(matches!(DensityOperator::new(layout, m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn purity_of_pure_and_mixed() {
        let layout = PartyLayout::qubits(2).unwrap();
        let psi = PureState::basis(layout.clone(), 3).unwrap();
        assert!((psi.to_density().purity() - 1.0).abs() < 1e-15);
        assert!((DensityOperator::maximally_mixed(layout).purity() - 0.25).abs() < 1e-15);
    }
}
