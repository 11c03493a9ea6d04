//! Tensor products, partial transposition, partial traces and local
//! operators.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::PartyLayout;
use crate::state::{DensityOperator, PsdStatus, PureState, ZERO};

/// Product of pure states; the layout is the concatenation of the factor
/// layouts.
pub fn tensor_product(factors: &[PureState]) -> Result<PureState> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("tensor product of zero factors".into()))?;
    let mut layout = first.layout().clone();
    let mut amps = first.amplitudes().to_vec();
    for f in rest {
        let b = f.amplitudes();
        amps = amps
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| x * y))
            .collect();
        layout = layout.concat(f.layout());
    }
    PureState::normalized(layout, amps)
}

/// Kronecker product of density operators, party order preserved.
pub fn tensor_product_density(factors: &[&DensityOperator]) -> Result<DensityOperator> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("tensor product of zero factors".into()))?;
    let mut layout = first.layout().clone();
    let mut matrix = first.matrix().clone();
    let mut psd = first.psd_status() == PsdStatus::Yes;
    for f in rest {
        matrix = matrix.kronecker(f.matrix());
        layout = layout.concat(f.layout());
        psd &= f.psd_status() == PsdStatus::Yes;
    }
    let out = DensityOperator::hermitian(layout, matrix)?;
    Ok(if psd { out.with_psd_status(PsdStatus::Yes) } else { out })
}

/// Splits every global index into the contribution of the parties in
/// `subset` and of the rest: `index = on[index] + off[index]`.
fn split_indices(layout: &PartyLayout, subset: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let strides = layout.strides();
    let dims = layout.dims();
    let d = layout.total_dim();
    let mut on = vec![0; d];
    let mut off = vec![0; d];
    for i in 0..d {
        let mut s = 0;
        for &p in subset {
            s += (i / strides[p - 1]) % dims[p - 1] * strides[p - 1];
        }
        on[i] = s;
        off[i] = i - s;
    }
    (on, off)
}

/// Maps each global index to the index of the `kept` parties' digits in the
/// sub-layout of `kept` (ascending party order).
fn kept_indices(layout: &PartyLayout, kept: &[usize]) -> Vec<usize> {
    let strides = layout.strides();
    let dims = layout.dims();
    (0..layout.total_dim())
        .map(|i| {
            kept.iter()
                .fold(0, |acc, &p| acc * dims[p - 1] + (i / strides[p - 1]) % dims[p - 1])
        })
        .collect()
}

/// Transposes the row and column digits of the parties in `subset`.
///
/// The result keeps trace and Hermiticity but is generally not PSD. Applying
/// it twice returns the input bit for bit.
pub fn partial_transpose(rho: &DensityOperator, subset: &[usize]) -> Result<DensityOperator> {
    let layout = rho.layout();
    let subset = layout.normalize_subset(subset)?;
    let (on, off) = split_indices(layout, &subset);
    let d = rho.dim();
    let m = rho.matrix();
    let mut out = DMatrix::from_element(d, d, ZERO);
    for c in 0..d {
        for r in 0..d {
            out[(off[r] + on[c], off[c] + on[r])] = m[(r, c)];
        }
    }
    let psd = if subset.is_empty() { rho.psd_status() } else { PsdStatus::Unchecked };
    Ok(DensityOperator::from_parts(layout.clone(), out, psd))
}

/// Traces out the parties in `traced_out`; the remaining parties keep their
/// relative order.
pub fn partial_trace(rho: &DensityOperator, traced_out: &[usize]) -> Result<DensityOperator> {
    let layout = rho.layout();
    let traced = layout.normalize_subset(traced_out)?;
    if traced.len() == layout.parties() {
        return Err(Error::InvalidSubset("cannot trace out every party".into()));
    }
    let kept = layout.complement(&traced);
    let out_layout = layout.sub_layout(&kept)?;
    let (_, traced_part) = split_indices(layout, &kept);
    let kept_idx = kept_indices(layout, &kept);
    let d = rho.dim();
    let k = out_layout.total_dim();
    let m = rho.matrix();
    let mut out = DMatrix::from_element(k, k, ZERO);
    for c in 0..d {
        for r in 0..d {
            if traced_part[r] == traced_part[c] {
                out[(kept_idx[r], kept_idx[c])] += m[(r, c)];
            }
        }
    }
    let psd = match rho.psd_status() {
        PsdStatus::Yes => PsdStatus::Yes,
        _ => PsdStatus::Unchecked,
    };
    Ok(DensityOperator::from_parts(out_layout, out, psd))
}

/// Reduced operator of a pure state on the `kept` parties (ascending order).
pub fn reduced_density(psi: &PureState, kept: &[usize]) -> Result<DensityOperator> {
    let layout = psi.layout();
    let kept = layout.normalize_subset(kept)?;
    if kept.is_empty() {
        return Err(Error::InvalidSubset("reduced state needs at least one party".into()));
    }
    let out_layout = layout.sub_layout(&kept)?;
    let mat = bipartite_matrix(psi.amplitudes(), layout, &kept);
    let reduced = &mat * mat.adjoint();
    Ok(DensityOperator::from_parts(out_layout, reduced, PsdStatus::Yes))
}

/// Reshapes an amplitude vector into a matrix with rows indexed by the
/// `left` parties and columns by the remaining parties (both in ascending
/// party order).
pub(crate) fn bipartite_matrix(amps: &[Complex64], layout: &PartyLayout, left: &[usize]) -> DMatrix<Complex64> {
    let right = layout.complement(left);
    let rows: usize = left.iter().map(|&p| layout.dims()[p - 1]).product();
    let cols: usize = right.iter().map(|&p| layout.dims()[p - 1]).product();
    let li = kept_indices(layout, left);
    let ri = kept_indices(layout, &right);
    let mut m = DMatrix::from_element(rows, cols, ZERO);
    for (i, &a) in amps.iter().enumerate() {
        m[(li[i], ri[i])] = a;
    }
    m
}

/// Inverse of [`bipartite_matrix`].
pub(crate) fn from_bipartite_matrix(m: &DMatrix<Complex64>, layout: &PartyLayout, left: &[usize]) -> Vec<Complex64> {
    let right = layout.complement(left);
    let li = kept_indices(layout, left);
    let ri = kept_indices(layout, &right);
    (0..layout.total_dim()).map(|i| m[(li[i], ri[i])]).collect()
}

/// Outcome of a local operator applied to a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBranch {
    /// Unnormalized post-operation vector.
    pub vector: Vec<Complex64>,
    /// Squared norm of `vector`; the branch probability for a measurement
    /// element.
    pub weight: f64,
    pub layout: PartyLayout,
}

impl LocalBranch {
    pub fn is_annihilated(&self) -> bool {
        self.weight == 0.0
    }

    /// The normalized post-state, or `None` for an annihilated branch.
    pub fn into_state(self) -> Option<PureState> {
        if self.is_annihilated() {
            return None;
        }
        PureState::normalized(self.layout, self.vector).ok()
    }
}

/// Applies `op` (a `d x d` matrix on the party's local space) to `psi`.
pub fn apply_local(psi: &PureState, party: usize, op: &DMatrix<Complex64>) -> Result<LocalBranch> {
    let vector = apply_local_raw(psi.amplitudes(), psi.layout(), party, op)?;
    let weight = vector.iter().map(|z| z.norm_sqr()).sum();
    Ok(LocalBranch { vector, weight, layout: psi.layout().clone() })
}

pub(crate) fn apply_local_raw(
    amps: &[Complex64],
    layout: &PartyLayout,
    party: usize,
    op: &DMatrix<Complex64>,
) -> Result<Vec<Complex64>> {
    let d = layout.dim_of(party)?;
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::LayoutMismatch(format!(
            "{}x{} operator on party {party} of dimension {d}",
            op.nrows(),
            op.ncols()
        )));
    }
    let stride = layout.strides()[party - 1];
    let mut out = vec![ZERO; amps.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        let digit = (i / stride) % d;
        let base = i - digit * stride;
        let mut acc = ZERO;
        for j in 0..d {
            acc += op[(digit, j)] * amps[base + j * stride];
        }
        *slot = acc;
    }
    Ok(out)
}
