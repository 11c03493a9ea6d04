//! Hermitian eigenvalue problems.
//!
//! Matrices are first split into the connected components of their nonzero
//! pattern and each block is diagonalized densely. The sparse operators used
//! throughout (the state family and its partial transposes) break into blocks
//! of size one or two, which keeps 12-qubit spectra cheap.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{hermitian_deviation, DensityOperator, ZERO};

/// Eigenvalues of `op`, ascending.
pub fn hermitian_eigenvalues(op: &DensityOperator) -> Result<Vec<f64>> {
    eigenvalues_of(op.matrix())
}

/// Smallest eigenvalue of `op`.
pub fn min_eigenvalue(op: &DensityOperator) -> Result<f64> {
    Ok(hermitian_eigenvalues(op)?.first().copied().unwrap_or(0.0))
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn eigenvalues_of(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let d = m.nrows();
    let mut entries = Vec::new();
    for c in 0..d {
        for r in 0..d {
            let z = m[(r, c)];
            if z != ZERO {
                entries.push((r, c, z));
            }
        }
    }
    Ok(sparse_eigenvalues(d, &entries))
}

/// Eigenvalues (ascending) of the `d x d` Hermitian matrix whose nonzero
/// entries are `entries` (row, col, value). Duplicate positions add up.
/// Hermiticity is the caller's responsibility.
pub fn sparse_eigenvalues(d: usize, entries: &[(usize, usize, Complex64)]) -> Vec<f64> {
    let pattern: Vec<(usize, usize)> = entries.iter().map(|&(r, c, _)| (r, c)).collect();
    let groups = components(d, &pattern);
    let mut slot = vec![(0usize, 0usize); d];
    for (g, members) in groups.iter().enumerate() {
        for (i, &m) in members.iter().enumerate() {
            slot[m] = (g, i);
        }
    }
    let mut mats: Vec<DMatrix<Complex64>> = groups
        .iter()
        .map(|g| DMatrix::from_element(g.len(), g.len(), ZERO))
        .collect();
    for &(r, c, z) in entries {
        let (g, i) = slot[r];
        let (_, j) = slot[c];
        mats[g][(i, j)] += z;
    }
    let mut values = Vec::with_capacity(d);
    for m in mats {
        if m.nrows() == 1 {
            values.push(m[(0, 0)].re);
        } else {
            let n = m.nrows();
            // symmetrize so the dense solver sees an exactly Hermitian block
            let h = DMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
            values.extend(SymmetricEigen::new(h).eigenvalues.iter().copied());
        }
    }
    values.sort_by(f64::total_cmp);
    values
}

/// Eigen-decomposition with unit eigenvectors as columns, in ascending order
/// of eigenvalue. Each vector's first nonzero component is real positive.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    check_hermitian(m)?;
    let d = m.nrows();
    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(d);
    for block in blocks(m) {
        if block.len() == 1 {
            let mut v = vec![ZERO; d];
            v[block[0]] = Complex64::new(1.0, 0.0);
            pairs.push((m[(block[0], block[0])].re, v));
            continue;
        }
        let eig = SymmetricEigen::new(submatrix(m, &block));
        for (k, &val) in eig.eigenvalues.iter().enumerate() {
            let mut v = vec![ZERO; d];
            for (i, &g) in block.iter().enumerate() {
                v[g] = eig.eigenvectors[(i, k)];
            }
            pairs.push((val, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vectors = DMatrix::from_element(d, d, ZERO);
    let mut values = Vec::with_capacity(d);
    for (k, (val, mut v)) in pairs.into_iter().enumerate() {
        fix_phase(&mut v);
        for (i, z) in v.into_iter().enumerate() {
            vectors[(i, k)] = z;
        }
        values.push(val);
    }
    Ok((values, vectors))
}

/// Rotates `v` so its first component with modulus above `1e-14` is real
/// positive.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-14).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = hermitian_deviation(m);
    if dev > 1e-12 * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

fn submatrix(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    let n = idx.len();
    // symmetrize so the dense solver sees an exactly Hermitian block
    DMatrix::from_fn(n, n, |r, c| {
        let a = m[(idx[r], idx[c])];
        let b = m[(idx[c], idx[r])].conj();
        (a + b) * 0.5
    })
}

/// Connected components of the nonzero pattern, each sorted, ordered by
/// smallest member.
fn blocks(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let d = m.nrows();
    let mut pattern = Vec::new();
    for c in 0..d {
        for r in 0..d {
            if r != c && m[(r, c)] != ZERO {
                pattern.push((r, c));
            }
        }
    }
    components(d, &pattern)
}

fn components(d: usize, pattern: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(r, c) in pattern {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for i in 0..d {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Number of connected blocks in the nonzero pattern of `m`, not counting
/// indices whose row and column are entirely zero.
pub fn block_count(m: &DMatrix<Complex64>) -> usize {
    blocks(m)
        .iter()
        .filter(|b| b.len() > 1 || m[(b[0], b[0])] != ZERO)
        .count()
}
