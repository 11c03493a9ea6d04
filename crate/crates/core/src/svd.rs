//! One-sided Jacobi SVD for small complex matrices.
//!
//! nalgebra's complex SVD returns wrong factors for some tall inputs with
//! zero columns (a reduced state of a qutrit pair hits this), so the
//! Schmidt decomposition and filter norms use this instead.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::state::ZERO;

const MAX_SWEEPS: usize = 80;

/// Orthogonalizes the columns of `w` in place, applying the same rotations
/// to the columns of `v`.
fn orthogonalize(w: &mut DMatrix<Complex64>, v: &mut DMatrix<Complex64>) {
    let n = w.ncols();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma: Complex64 = w.column(p).iter().zip(w.column(q).iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut *w, &mut *v] {
                    for r in 0..m.nrows() {
                        let x = m[(r, p)];
                        let y = m[(r, q)] * phase.conj();
                        m[(r, p)] = x * c - y * s;
                        m[(r, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Singular values of `m` and the matching left singular vectors, in no
/// particular order. Vectors of zero singular values may be zero.
pub(crate) fn left_singular(m: &DMatrix<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let (rows, cols) = m.shape();
    if cols <= rows {
        // M V = U S
        let mut w = m.clone();
        let mut v = DMatrix::<Complex64>::identity(cols, cols);
        orthogonalize(&mut w, &mut v);
        let mut values = Vec::with_capacity(cols);
        let mut vectors = Vec::with_capacity(cols);
        for j in 0..cols {
            let s = w.column(j).norm();
            values.push(s);
            vectors.push(if s > 0.0 {
                w.column(j).iter().map(|z| z / s).collect()
            } else {
                vec![ZERO; rows]
            });
        }
        (values, vectors)
    } else {
        // M^dagger U = V S
        let mut w = m.adjoint();
        let mut u = DMatrix::<Complex64>::identity(rows, rows);
        orthogonalize(&mut w, &mut u);
        let values = (0..rows).map(|j| w.column(j).norm()).collect();
        let vectors = (0..rows).map(|j| u.column(j).iter().copied().collect()).collect();
        (values, vectors)
    }
}

pub(crate) fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    left_singular(m).0
}
