//! Partial-transpose positivity across bipartitions, and the bound
//! entanglement verdict for `rho_N`.
//!
//! PPT across every cut is only a necessary condition for full separability,
//! so a scan can certify entanglement (some cut NPT) but never separability.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::sparse_eigenvalues;
use crate::error::{Error, Result};
use crate::layout::PartyLayout;
use crate::state::DensityOperator;
use crate::states::{rho_n, RhoFamilySpec, MAX_QUBITS};
use crate::MAX_DIM;

/// Default PSD tolerance, relative to `max(1, trace)`.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PSD")]
    Psd,
    #[serde(rename = "NOT_PSD")]
    NotPsd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub subset: Vec<usize>,
    #[serde(rename = "min_eig")]
    pub min_eigenvalue: f64,
    pub verdict: Verdict,
    #[serde(skip)]
    pub tolerance_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartitionScan {
    pub reports: Vec<PptReport>,
    pub all_ppt: bool,
}

impl BipartitionScan {
    pub fn reports_of_size(&self, size: usize) -> impl Iterator<Item = &PptReport> {
        self.reports.iter().filter(move |r| r.subset.len() == size)
    }
}

/// Nonzero entries of an operator, computed once and shared by every
/// partial transpose of a scan.
struct SparseView<'a> {
    layout: &'a PartyLayout,
    entries: Vec<(usize, usize, Complex64)>,
    threshold: f64,
}

impl<'a> SparseView<'a> {
    fn new(rho: &'a DensityOperator, tol: f64) -> Self {
        let entries = rho.nonzeros();
        let threshold = -tol * rho.trace().max(1.0);
        Self { layout: rho.layout(), entries, threshold }
    }

    fn check(&self, subset: &[usize], tol: f64) -> PptReport {
        let strides = self.layout.strides();
        let dims = self.layout.dims();
        let on = |i: usize| -> usize {
            subset
                .iter()
                .map(|&p| (i / strides[p - 1]) % dims[p - 1] * strides[p - 1])
                .sum()
        };
        let transposed: Vec<(usize, usize, Complex64)> = self
            .entries
            .iter()
            .map(|&(r, c, z)| {
                let (ro, co) = (on(r), on(c));
                (r - ro + co, c - co + ro, z)
            })
            .collect();
        let ev = sparse_eigenvalues(self.layout.total_dim(), &transposed);
        let min = ev.first().copied().unwrap_or(0.0);
        let verdict = if min >= self.threshold { Verdict::Psd } else { Verdict::NotPsd };
        PptReport { subset: subset.to_vec(), min_eigenvalue: min, verdict, tolerance_used: tol }
    }
}

fn check_cap(rho: &DensityOperator) -> Result<()> {
    let dim = rho.dim();
    if dim > MAX_DIM {
        return Err(Error::DimensionCap { dim, cap: MAX_DIM });
    }
    Ok(())
}

/// Smallest eigenvalue of `rho^{T_subset}` and the PSD verdict
/// `min >= -tol * max(1, tr rho)`.
pub fn ppt_check(rho: &DensityOperator, subset: &[usize], tol: f64) -> Result<PptReport> {
    check_cap(rho)?;
    let subset = rho.layout().normalize_subset(subset)?;
    if subset.is_empty() || subset.len() == rho.layout().parties() {
        return Err(Error::InvalidSubset("subset must be a nonempty proper subset".into()));
    }
    Ok(SparseView::new(rho, tol).check(&subset, tol))
}

/// Every subset of `1..=n` with `1 <= size <= max_size`, ordered by size
/// then lexicographically.
pub fn subsets_up_to(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=max_size.min(n) {
        let mut cur: Vec<usize> = (1..=size).collect();
        loop {
            out.push(cur.clone());
            // next combination in lexicographic order
            let mut i = size;
            while i > 0 && cur[i - 1] == n - size + i {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            cur[i - 1] += 1;
            for j in i..size {
                cur[j] = cur[j - 1] + 1;
            }
        }
    }
    out
}

/// Checks every subset of size `1..=floor(N/2)`; complements have the same
/// spectrum and are skipped.
pub fn scan(rho: &DensityOperator, tol: f64) -> Result<BipartitionScan> {
    check_cap(rho)?;
    let n = rho.layout().parties();
    let view = SparseView::new(rho, tol);
    let reports: Vec<PptReport> = subsets_up_to(n, n / 2)
        .iter()
        .map(|s| view.check(s, tol))
        .collect();
    let all_ppt = reports.iter().all(|r| r.verdict == Verdict::Psd);
    Ok(BipartitionScan { reports, all_ppt })
}

/// How non-distillability of `rho_N` is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distillability {
    /// PPT across every single-party cut; non-distillability then follows
    /// from pair extraction plus PPT monotonicity under LOCC. Not checked
    /// numerically.
    DerivedByTheorem,
    /// Some single-party cut is NPT; nothing is implied.
    NotImplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoClassification {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    /// Every single-party partial transpose is PSD.
    pub ppt_single: bool,
    /// Every two-party partial transpose is NPT. `None` at `N = 2`, where a
    /// pair is the whole system.
    pub npt_pairs: Option<bool>,
    pub bound_entangled_claim: bool,
    pub non_distillability: Distillability,
}

/// PPT facts behind the bound entanglement of `rho_N`.
pub fn classify_rho_n(n: usize, alpha: f64, tol: f64) -> Result<RhoClassification> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidArgument(format!("N = {n} outside 2..={MAX_QUBITS}")));
    }
    let rho = rho_n(&RhoFamilySpec::new(n, alpha)?)?;
    let view = SparseView::new(&rho, tol);
    let ppt_single = (1..=n).all(|k| view.check(&[k], tol).verdict == Verdict::Psd);
    let npt_pairs = (n >= 3).then(|| {
        subsets_up_to(n, 2)
            .iter()
            .filter(|s| s.len() == 2)
            .all(|s| view.check(s, tol).verdict == Verdict::NotPsd)
    });
    let bound_entangled_claim = ppt_single && npt_pairs == Some(true);
    let non_distillability = if ppt_single { Distillability::DerivedByTheorem } else { Distillability::NotImplied };
    Ok(RhoClassification { n, alpha, ppt_single, npt_pairs, bound_entangled_claim, non_distillability })
}
