//! Schmidt decomposition of pure states across a party bipartition.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::fix_phase;
use crate::error::{Error, Result};
use crate::state::{inner, norm, PureState, ZERO};
use crate::svd::left_singular;
use crate::tensor::bipartite_matrix;

/// Coefficients at or below this value are not counted in the rank.
pub const DEFAULT_CUTOFF: f64 = 1e-10;

/// Coefficients closer than this are treated as one degenerate cluster.
const DEGENERACY_TOL: f64 = 1e-9;

/// `psi = sum_k coefficients[k] |left[k]>|right[k]>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Descending, each above the cutoff.
    pub coefficients: Vec<f64>,
    /// Orthonormal states of the `bipartition` parties (ascending order).
    pub left: Vec<PureState>,
    /// Orthonormal states of the complementary parties (ascending order).
    pub right: Vec<PureState>,
    pub bipartition: Vec<usize>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Rebuilds the (global) amplitude vector of the decomposed state.
    pub fn reconstruct(&self, psi_layout: &crate::PartyLayout) -> Vec<Complex64> {
        let rows = self.left.first().map_or(0, |s| s.amplitudes().len());
        let cols = self.right.first().map_or(0, |s| s.amplitudes().len());
        let mut m = DMatrix::from_element(rows, cols, ZERO);
        for ((&c, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for (i, &a) in l.amplitudes().iter().enumerate() {
                for (j, &b) in r.amplitudes().iter().enumerate() {
                    m[(i, j)] += a * b * c;
                }
            }
        }
        crate::tensor::from_bipartite_matrix(&m, psi_layout, &self.bipartition)
    }
}

pub fn schmidt(psi: &PureState, bipartition: &[usize]) -> Result<SchmidtDecomposition> {
    schmidt_with_cutoff(psi, bipartition, DEFAULT_CUTOFF)
}

/// Schmidt decomposition keeping coefficients strictly above `cutoff`.
///
/// Vectors are phase-fixed (first nonzero component real positive). Within a
/// cluster of equal coefficients the left basis is rebuilt from the cluster
/// projector applied to computational basis vectors, so the result depends
/// only on the state.
pub fn schmidt_with_cutoff(psi: &PureState, bipartition: &[usize], cutoff: f64) -> Result<SchmidtDecomposition> {
    let layout = psi.layout();
    let left_parties = layout.normalize_subset(bipartition)?;
    if left_parties.is_empty() || left_parties.len() == layout.parties() {
        return Err(Error::InvalidSubset("bipartition must be a nonempty proper subset".into()));
    }
    let right_parties = layout.complement(&left_parties);
    let left_layout = layout.sub_layout(&left_parties)?;
    let right_layout = layout.sub_layout(&right_parties)?;

    let m = bipartite_matrix(psi.amplitudes(), layout, &left_parties);
    let (values, vectors) = left_singular(&m);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let kept: Vec<usize> = order.into_iter().filter(|&k| values[k] > cutoff).collect();

    let mut lefts: Vec<Vec<Complex64>> = Vec::with_capacity(kept.len());
    let mut start = 0;
    while start < kept.len() {
        let mut end = start + 1;
        while end < kept.len()
            && values[kept[start]] - values[kept[end]] <= DEGENERACY_TOL
        {
            end += 1;
        }
        let cluster: Vec<Vec<Complex64>> = kept[start..end]
            .iter()
            .map(|&k| vectors[k].clone())
            .collect();
        if cluster.len() == 1 {
            lefts.extend(cluster);
        } else {
            lefts.extend(canonical_basis(&cluster));
        }
        start = end;
    }

    let mut coefficients = Vec::with_capacity(lefts.len());
    let mut left = Vec::with_capacity(lefts.len());
    let mut right = Vec::with_capacity(lefts.len());
    for mut l in lefts {
        fix_phase(&mut l);
        // right vector: (<l| (x) 1) psi
        let r: Vec<Complex64> = (0..m.ncols())
            .map(|j| (0..m.nrows()).map(|i| l[i].conj() * m[(i, j)]).sum())
            .collect();
        let c = norm(&r);
        coefficients.push(c);
        left.push(PureState::normalized(left_layout.clone(), l)?);
        right.push(PureState::normalized(right_layout.clone(), r)?);
    }
    Ok(SchmidtDecomposition { coefficients, left, right, bipartition: left_parties })
}

/// Orthonormal basis of span(`vectors`) built greedily from the projections
/// of computational basis vectors (largest residual first, lowest index on
/// ties).
fn canonical_basis(vectors: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let d = vectors[0].len();
    let project = |j: usize| -> Vec<Complex64> {
        // P e_j = sum_k v_k conj(v_k[j])
        let mut out = vec![ZERO; d];
        for v in vectors {
            let w = v[j].conj();
            for (o, x) in out.iter_mut().zip(v) {
                *o += x * w;
            }
        }
        out
    };
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    while basis.len() < vectors.len() {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for j in 0..d {
            let mut r = project(j);
            for b in &basis {
                let overlap = inner(b, &r);
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= overlap * y;
                }
            }
            let n = norm(&r);
            if best.as_ref().is_none_or(|(bn, _)| n > bn + 1e-9) {
                best = Some((n, r));
            }
        }
        let (n, mut r) = best.expect("nonempty candidate set");
        r.iter_mut().for_each(|x| *x /= n);
        basis.push(r);
    }
    basis
}
