//! Local filtering procedure that extracts a maximally entangled pair from
//! any entangled multipartite pure state.
//!
//! One round works on a pivot party (the lowest-indexed party with
//! single-party Schmidt rank at least two):
//!
//! 1. *Equalize*: a diagonal filter in the pivot's Schmidt basis keeps the
//!    top two coefficients and balances them to `1/sqrt 2`.
//! 2. *Classify*: split the state into the two branches `|phi_0>`, `|phi_1>`
//!    attached to the pivot's Schmidt vectors.
//! 3. Case A (both branches product): the branches are locally orthogonal
//!    somewhere. Biorthogonal filters at every party whose two local factors
//!    differ turn the state into a GHZ state on the pivot plus those parties;
//!    `|+>` projections on all but two of them leave a Bell pair.
//! 4. Case B (some branch entangled): project the pivot onto that branch and
//!    start a new round on the strictly smaller entangled set.
//!
//! The full vector is carried throughout; parties drop out once their
//! single-party Schmidt rank falls to one.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::layout::PartyLayout;
use crate::schmidt::schmidt;
use crate::state::{inner, PureState, ONE, ZERO};
use crate::tensor::{apply_local, bipartite_matrix, reduced_density};

/// Purity above `1 - PRODUCT_TOL` counts as a product (unentangled) site.
pub const PRODUCT_TOL: f64 = 1e-8;
/// Local overlap at least `1 - SAME_TOL` means equal up to phase.
pub const SAME_TOL: f64 = 1e-8;
/// Local overlap at most `ORTHOGONAL_TOL` means locally orthogonal.
pub const ORTHOGONAL_TOL: f64 = 1e-8;
/// Required distance of the final Schmidt coefficients from `1/sqrt 2`.
pub const MAXIMALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    Equalize,
    Biorthogonal,
    Project,
    MeasurePm,
}

/// A local measurement element (largest singular value at most one).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOperator {
    pub party: usize,
    pub matrix: DMatrix<Complex64>,
    pub kind: FilterKind,
}

impl FilterOperator {
    pub fn largest_singular_value(&self) -> f64 {
        crate::svd::singular_values(&self.matrix).into_iter().fold(0.0, f64::max)
    }
}

/// One executed filter and the probability it contributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub filter: FilterOperator,
    /// Success probability of this step given the previous ones. For
    /// `MeasurePm` both outcomes succeed, so this is 1.
    pub weight: f64,
    /// For `MeasurePm`: probability of the recorded `|+>` outcome. The `|->`
    /// outcome leaves the same pair up to a local phase.
    pub outcome_probability: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchCase {
    /// Both branches are product states.
    A,
    /// At least one branch is entangled.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalRelation {
    /// Equal up to phase; the party is one of the `l` locations left out of
    /// the GHZ state.
    Same,
    Orthogonal,
    /// Neither equal nor orthogonal; a biorthogonal filter still separates
    /// them.
    Distinct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchParty {
    pub party: usize,
    /// `|<chi|chi~>|` of the two local factors.
    pub overlap: f64,
    pub relation: LocalRelation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchClass {
    pub case: BranchCase,
    pub branch_entangled: [bool; 2],
    /// Per-party relation of the two branches' local factors (case A only),
    /// ascending party order, pivot excluded.
    pub parties: Vec<BranchParty>,
    /// Local factors `(chi, chi~)` per entry of `parties` (case A only).
    factors: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

impl BranchClass {
    pub fn same_count(&self) -> usize {
        self.parties.iter().filter(|p| p.relation == LocalRelation::Same).count()
    }
}

/// Summary of one pivot round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub pivot: usize,
    pub case: BranchCase,
    /// Parties with single-party Schmidt rank at least two when the round
    /// started.
    pub entangled_parties: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    pub pair: (usize, usize),
    pub probability: f64,
    pub steps: Vec<Step>,
    /// Two-party state of `pair`, in the parties' local dimensions.
    pub final_state: PureState,
    pub schmidt_coeffs: [f64; 2],
    pub survivors: Vec<usize>,
    pub rounds: Vec<Round>,
}

/// Single-party Schmidt rank of every party.
pub fn schmidt_profile(psi: &PureState) -> Result<Vec<(usize, usize)>> {
    let n = psi.layout().parties();
    if n == 1 {
        return Ok(vec![(1, 1)]);
    }
    (1..=n)
        .map(|p| Ok((p, schmidt(psi, &[p])?.rank())))
        .collect()
}

fn entangled_parties(psi: &PureState) -> Result<Vec<usize>> {
    Ok(schmidt_profile(psi)?
        .into_iter()
        .filter(|&(_, r)| r >= 2)
        .map(|(p, _)| p)
        .collect())
}

/// Pivot-side Schmidt vectors of the top two coefficients.
struct PivotBasis {
    vectors: [Vec<Complex64>; 2],
    coefficients: [f64; 2],
}

fn pivot_basis(psi: &PureState, party: usize) -> Result<PivotBasis> {
    let dec = schmidt(psi, &[party])?;
    if dec.rank() < 2 {
        return Err(Error::InvalidArgument(format!("Schmidt rank {} < 2 at party {party}", dec.rank())));
    }
    Ok(PivotBasis {
        vectors: [dec.left[0].amplitudes().to_vec(), dec.left[1].amplitudes().to_vec()],
        coefficients: [dec.coefficients[0], dec.coefficients[1]],
    })
}

fn outer(a: &[Complex64], b: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
}

fn equalizer(party: usize, basis: &PivotBasis) -> FilterOperator {
    let [l0, l1] = basis.coefficients;
    let matrix = outer(&basis.vectors[0], &basis.vectors[0]) * Complex64::new(l1 / l0, 0.0)
        + outer(&basis.vectors[1], &basis.vectors[1]);
    FilterOperator { party, matrix, kind: FilterKind::Equalize }
}

/// Applies `filter`, returning the normalized post-state and the branch
/// weight. An annihilated branch is a numeric degeneracy here.
fn apply(psi: &PureState, filter: &FilterOperator) -> Result<(PureState, f64)> {
    let out = apply_local(psi, filter.party, &filter.matrix)?;
    let weight = out.weight;
    let state = out.into_state().ok_or_else(|| {
        Error::NumericDegeneracy(format!("{:?} filter at party {} annihilated the state", filter.kind, filter.party))
    })?;
    Ok((state, weight))
}

/// Filter `(l1/l0)|u0><u0| + |u1><u1|` in the party's Schmidt basis, which
/// keeps the top two coefficients and makes them equal. Returns the filter,
/// the balanced state and the success probability `2 l1^2`.
pub fn equalize_filter(psi: &PureState, party: usize) -> Result<(FilterOperator, PureState, f64)> {
    psi.layout().check_party(party)?;
    let basis = pivot_basis(psi, party)?;
    let filter = equalizer(party, &basis);
    let (state, weight) = apply(psi, &filter)?;
    Ok((filter, state, weight))
}

/// `(<v|_party (x) 1) psi`, with the layout of the remaining parties.
fn contract_party(psi: &PureState, party: usize, v: &[Complex64]) -> Result<(Vec<Complex64>, PartyLayout)> {
    let layout = psi.layout();
    let m = bipartite_matrix(psi.amplitudes(), layout, &[party]);
    let rest = layout.complement(&[party]);
    let out: Vec<Complex64> = (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| v[i].conj() * m[(i, j)]).sum())
        .collect();
    Ok((out, layout.sub_layout(&rest)?))
}

/// Case analysis for a state balanced at `party`, using the party's Schmidt
/// basis.
pub fn classify_branch(psi_balanced: &PureState, party: usize) -> Result<BranchClass> {
    psi_balanced.layout().check_party(party)?;
    let basis = pivot_basis(psi_balanced, party)?;
    let [l0, l1] = basis.coefficients;
    if (l0 - l1).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "state is not balanced at party {party}: coefficients {l0}, {l1}"
        )));
    }
    classify_in_basis(psi_balanced, party, &basis.vectors)
}

fn classify_in_basis(psi: &PureState, party: usize, basis: &[Vec<Complex64>; 2]) -> Result<BranchClass> {
    let others = psi.layout().complement(&[party]);
    let mut branches = Vec::with_capacity(2);
    for v in basis {
        let (amps, layout) = contract_party(psi, party, v)?;
        branches.push(PureState::normalized(layout, amps)?);
    }
    let mut branch_entangled = [false; 2];
    let mut factors_per_branch: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(2);
    for (k, branch) in branches.iter().enumerate() {
        let mut factors = Vec::with_capacity(others.len());
        for local in 1..=others.len() {
            let red = reduced_density(branch, &[local])?;
            if red.purity() < 1.0 - PRODUCT_TOL {
                branch_entangled[k] = true;
                break;
            }
            let (_, vecs) = hermitian_eigen(red.matrix())?;
            factors.push(vecs.column(vecs.ncols() - 1).iter().copied().collect());
        }
        factors_per_branch.push(factors);
    }
    if branch_entangled.iter().any(|&e| e) {
        return Ok(BranchClass { case: BranchCase::B, branch_entangled, parties: vec![], factors: vec![] });
    }

    let mut parties = Vec::with_capacity(others.len());
    let mut factors = Vec::with_capacity(others.len());
    let fb = factors_per_branch.pop().expect("two branches");
    let fa = factors_per_branch.pop().expect("two branches");
    for ((&p, chi), chi_t) in others.iter().zip(fa).zip(fb) {
        let overlap = inner(&chi, &chi_t).norm();
        let relation = if overlap >= 1.0 - SAME_TOL {
            LocalRelation::Same
        } else if overlap <= ORTHOGONAL_TOL {
            LocalRelation::Orthogonal
        } else {
            LocalRelation::Distinct
        };
        parties.push(BranchParty { party: p, overlap, relation });
        factors.push((chi, chi_t));
    }
    if !parties.iter().any(|p| p.relation == LocalRelation::Orthogonal) {
        let min = parties.iter().map(|p| p.overlap).fold(f64::INFINITY, f64::min);
        return Err(Error::NumericDegeneracy(format!(
            "product branches with no locally orthogonal site (smallest overlap {min:e})"
        )));
    }
    Ok(BranchClass { case: BranchCase::A, branch_entangled, parties, factors })
}

/// Filter `|0><chi'| + |1><chi~'|` built from the biorthonormal partners of
/// `chi`, `chi~`, scaled to unit operator norm.
fn biorthogonal_filter(party: usize, chi: &[Complex64], chi_t: &[Complex64]) -> Result<FilterOperator> {
    let d = chi.len();
    let c = inner(chi, chi_t);
    let denom = 1.0 - c.norm_sqr();
    if denom <= 1e-14 {
        return Err(Error::NumericDegeneracy(format!("local factors at party {party} are parallel")));
    }
    let dual: Vec<Complex64> = chi.iter().zip(chi_t).map(|(&x, &y)| (x - c.conj() * y) / denom).collect();
    let dual_t: Vec<Complex64> = chi.iter().zip(chi_t).map(|(&x, &y)| (y - c * x) / denom).collect();
    let mut matrix = DMatrix::from_element(d, d, ZERO);
    for j in 0..d {
        matrix[(0, j)] = dual[j].conj();
        matrix[(1, j)] = dual_t[j].conj();
    }
    // largest eigenvalue of the 2x2 Gram matrix of the rows
    let g00 = inner(&dual, &dual).re;
    let g11 = inner(&dual_t, &dual_t).re;
    let g01 = inner(&dual, &dual_t).norm();
    let top = 0.5 * (g00 + g11) + (0.25 * (g00 - g11).powi(2) + g01 * g01).sqrt();
    let matrix = matrix * Complex64::new(1.0 / top.sqrt(), 0.0);
    Ok(FilterOperator { party, matrix, kind: FilterKind::Biorthogonal })
}

/// `(i, j)`: the two lowest surviving parties, or `requested` if both are
/// among the survivors.
pub fn target_pair_choice(survivors: &[usize], requested: Option<(usize, usize)>) -> Result<(usize, usize)> {
    let mut sorted = survivors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 2 {
        return Err(Error::InvalidArgument(format!("need two survivors, have {sorted:?}")));
    }
    match requested {
        Some((i, j)) => {
            if i == j || !sorted.contains(&i) || !sorted.contains(&j) {
                return Err(Error::PairUnavailable(i, j));
            }
            Ok((i.min(j), i.max(j)))
        }
        None => Ok((sorted[0], sorted[1])),
    }
}

/// Runs the extraction, targeting the two lowest survivors.
pub fn extract(psi: &PureState) -> Result<ExtractionResult> {
    extract_pair(psi, None)
}

/// Runs the extraction; `requested` must name two parties that survive into
/// the final GHZ stage, otherwise `PairUnavailable`.
pub fn extract_pair(psi: &PureState, requested: Option<(usize, usize)>) -> Result<ExtractionResult> {
    if let Some((i, j)) = requested {
        let n = psi.layout().parties();
        if i == 0 || j == 0 || i > n || j > n || i == j {
            return Err(Error::PairUnavailable(i, j));
        }
    }
    let mut state = psi.clone();
    let mut steps: Vec<Step> = Vec::new();
    let mut rounds: Vec<Round> = Vec::new();

    loop {
        let entangled = entangled_parties(&state)?;
        let Some(&pivot) = entangled.first() else {
            return if rounds.is_empty() {
                Err(Error::NotEntangled)
            } else {
                Err(Error::NumericDegeneracy("entanglement vanished during projection".into()))
            };
        };
        let basis = pivot_basis(&state, pivot)?;
        push(&mut steps, &mut state, equalizer(pivot, &basis))?;
        let class = classify_in_basis(&state, pivot, &basis.vectors)?;
        rounds.push(Round { pivot, case: class.case, entangled_parties: entangled });

        if class.case == BranchCase::B {
            let k = if class.branch_entangled[0] { 0 } else { 1 };
            let v = &basis.vectors[k];
            let filter = FilterOperator { party: pivot, matrix: outer(v, v), kind: FilterKind::Project };
            push(&mut steps, &mut state, filter)?;
            continue;
        }

        // case A: GHZ on the pivot plus every party whose local factors differ
        let mut survivors = vec![pivot];
        let mut local_basis: Vec<(usize, [Vec<Complex64>; 2])> = vec![(pivot, basis.vectors.clone())];
        for (info, (chi, chi_t)) in class.parties.iter().zip(&class.factors) {
            if info.relation == LocalRelation::Same {
                continue;
            }
            push(&mut steps, &mut state, biorthogonal_filter(info.party, chi, chi_t)?)?;
            let d = state.layout().dim_of(info.party)?;
            let mut e0 = vec![ZERO; d];
            let mut e1 = vec![ZERO; d];
            e0[0] = ONE;
            e1[1] = ONE;
            survivors.push(info.party);
            local_basis.push((info.party, [e0, e1]));
        }
        survivors.sort_unstable();
        let pair = target_pair_choice(&survivors, requested)?;

        for (party, [b0, b1]) in &local_basis {
            if *party == pair.0 || *party == pair.1 {
                continue;
            }
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let plus: Vec<Complex64> = b0.iter().zip(b1).map(|(x, y)| (x + y) * s).collect();
            let filter = FilterOperator { party: *party, matrix: outer(&plus, &plus), kind: FilterKind::MeasurePm };
            let (next, p_plus) = apply(&state, &filter)?;
            state = next;
            steps.push(Step { filter, weight: 1.0, outcome_probability: Some(p_plus) });
        }

        let final_state = pair_state(&state, pair)?;
        let dec = schmidt(&final_state, &[1])?;
        if dec.rank() != 2 {
            return Err(Error::NumericDegeneracy(format!("final pair has Schmidt rank {}", dec.rank())));
        }
        let schmidt_coeffs = [dec.coefficients[0], dec.coefficients[1]];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        if schmidt_coeffs.iter().any(|c| (c - s).abs() > MAXIMALITY_TOL) {
            return Err(Error::NumericDegeneracy(format!(
                "final pair is not maximally entangled: {schmidt_coeffs:?}"
            )));
        }
        let probability = steps.iter().map(|s| s.weight).product();
        return Ok(ExtractionResult { pair, probability, steps, final_state, schmidt_coeffs, survivors, rounds });
    }
}

fn push(steps: &mut Vec<Step>, state: &mut PureState, filter: FilterOperator) -> Result<()> {
    let (next, weight) = apply(state, &filter)?;
    *state = next;
    steps.push(Step { filter, weight, outcome_probability: None });
    Ok(())
}

/// Two-party state of `pair` when every other party is in a product state.
fn pair_state(state: &PureState, pair: (usize, usize)) -> Result<PureState> {
    let parties = [pair.0, pair.1];
    if state.layout().parties() == 2 {
        return Ok(state.clone());
    }
    let dec = schmidt(state, &parties)?;
    if dec.rank() != 1 {
        return Err(Error::NumericDegeneracy(format!(
            "pair ({}, {}) is still entangled with the rest (rank {})",
            pair.0,
            pair.1,
            dec.rank()
        )));
    }
    Ok(dec.left[0].clone())
}

/// Re-applies the recorded steps to `psi` and normalizes.
pub fn replay(psi: &PureState, steps: &[Step]) -> Result<PureState> {
    let mut state = psi.clone();
    for step in steps {
        state = apply(&state, &step.filter)?.0;
    }
    Ok(state)
}

/// `<final| rho_pair |final>` where `rho_pair` is the pair's reduced state
/// after replaying the steps on `psi`.
pub fn replay_fidelity(psi: &PureState, result: &ExtractionResult) -> Result<f64> {
    let replayed = replay(psi, &result.steps)?;
    let rho = reduced_density(&replayed, &[result.pair.0, result.pair.1])?;
    Ok(rho.expectation(&result.final_state)?.re)
}

/// Whether the state is entangled across some single-party cut.
pub fn is_entangled(psi: &PureState) -> Result<bool> {
    Ok(!entangled_parties(psi)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, random_pure};
    use crate::tensor::tensor_product;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn qubit(a: f64, b: f64) -> PureState {
        PureState::normalized(
            PartyLayout::qubits(1).unwrap(),
            vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
        )
        .unwrap()
    }

    /// `sqrt(0.9)|00> + sqrt(0.1)|11>`.
    fn unbalanced() -> PureState {
        let a = Complex64::new(0.9f64.sqrt(), 0.0);
        let b = Complex64::new(0.1f64.sqrt(), 0.0);
        PureState::new(PartyLayout::qubits(2).unwrap(), vec![a, ZERO, ZERO, b]).unwrap()
    }

    #[test]
    fn profiles() {
        let p = schmidt_profile(&ghz(4, 0.0).unwrap()).unwrap();
        assert_eq!(p, vec![(1, 2), (2, 2), (3, 2), (4, 2)]);
        let prod = tensor_product(&[qubit(1.0, 2.0), qubit(0.3, 1.0), qubit(1.0, 0.0)]).unwrap();
        assert!(schmidt_profile(&prod).unwrap().iter().all(|&(_, r)| r == 1));
        let layout = PartyLayout::new(vec![2, 3, 2]).unwrap();
        let psi = random_pure(&layout, 1).unwrap();
        let r = schmidt_profile(&psi).unwrap();
        // oracle: rank of each single-party reduced operator
        let want: Vec<(usize, usize)> = (1..=3)
            .map(|k| {
                let red = crate::tensor::reduced_density(&psi, &[k]).unwrap();
                let ev = crate::eigen::hermitian_eigenvalues(&red).unwrap();
                (k, ev.iter().filter(|&&x| x > 1e-20).count())
            })
            .collect();
        assert_eq!(r, want);
        assert_eq!(r, vec![(1, 2), (2, 3), (3, 2)]);
    }

    #[test]
    fn equalize_balanced_is_identity() {
        let (f, post, w) = equalize_filter(&ghz(3, 0.4).unwrap(), 1).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        assert!((f.matrix.clone() - DMatrix::<Complex64>::identity(2, 2)).camax() < 1e-12);
        assert!(post.fidelity(&ghz(3, 0.4).unwrap()).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn equalize_unbalanced() {
        let (f, post, w) = equalize_filter(&unbalanced(), 1).unwrap();
        assert!((w - 0.2).abs() < 1e-12);
        assert!(f.largest_singular_value() <= 1.0 + 1e-12);
        let dec = schmidt(&post, &[1]).unwrap();
        assert!(dec.coefficients.iter().all(|c| (c - FRAC_1_SQRT_2).abs() < 1e-10));
        let prod = tensor_product(&[qubit(1.0, 0.0), qubit(0.0, 1.0)]).unwrap();
        assert!(equalize_filter(&prod, 1).is_err());
    }

    #[test]
    fn equalize_truncates_qutrit() {
        let layout = PartyLayout::new(vec![3, 3]).unwrap();
        let psi = random_pure(&layout, 8).unwrap();
        let before = schmidt(&psi, &[1]).unwrap();
        let (_, post, w) = equalize_filter(&psi, 1).unwrap();
        assert!((w - 2.0 * before.coefficients[1].powi(2)).abs() < 1e-12);
        let after = schmidt(&post, &[1]).unwrap();
        assert_eq!(after.rank(), 2);
        assert!(after.coefficients.iter().all(|c| (c - FRAC_1_SQRT_2).abs() < 1e-10));
    }

    #[test]
    fn ghz3_is_case_a() {
        let c = classify_branch(&ghz(3, 0.0).unwrap(), 1).unwrap();
        assert_eq!(c.case, BranchCase::A);
        assert_eq!(c.parties.len(), 2);
        assert!(c.parties.iter().all(|p| p.relation == LocalRelation::Orthogonal));
    }

    #[test]
    fn entangled_branch_is_case_b() {
        // (|0>|Phi+> + |1>|01>)/sqrt 2
        let s = FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 8];
        amps[0] = Complex64::new(0.5, 0.0);
        amps[3] = Complex64::new(0.5, 0.0);
        amps[5] = Complex64::new(s, 0.0);
        let psi = PureState::new(PartyLayout::qubits(3).unwrap(), amps).unwrap();
        let (_, bal, _) = equalize_filter(&psi, 1).unwrap();
        assert_eq!(classify_branch(&bal, 1).unwrap().case, BranchCase::B);
    }

    #[test]
    fn shared_local_factor_counts_as_same() {
        // (|0>|s>|0> + |1>|s>|1>)/sqrt 2 with a random shared |s> at party 2
        let shared = random_pure(&PartyLayout::qubits(1).unwrap(), 21).unwrap();
        let s = FRAC_1_SQRT_2;
        let layout = PartyLayout::qubits(3).unwrap();
        let mut amps = vec![ZERO; 8];
        for (j, &z) in shared.amplitudes().iter().enumerate() {
            amps[j << 1] += z * s;
            amps[4 | (j << 1) | 1] += z * s;
        }
        let psi = PureState::normalized(layout, amps).unwrap();
        let c = classify_branch(&psi, 1).unwrap();
        assert_eq!(c.case, BranchCase::A);
        assert_eq!(c.same_count(), 1);
        assert_eq!(c.parties[0].party, 2);
        assert_eq!(c.parties[0].relation, LocalRelation::Same);
        assert_eq!(c.parties[1].relation, LocalRelation::Orthogonal);

        let r = extract(&psi).unwrap();
        assert_eq!(r.pair, (1, 3));
        assert!((r.probability - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ghz_extraction_is_deterministic() {
        for n in 2..=6 {
            let psi = ghz(n, 0.7).unwrap();
            let r = extract(&psi).unwrap();
            assert_eq!(r.pair, (1, 2));
            assert!((r.probability - 1.0).abs() < 1e-10);
            assert!(r.schmidt_coeffs.iter().all(|c| (c - FRAC_1_SQRT_2).abs() < 1e-8));
            assert!(replay_fidelity(&psi, &r).unwrap() > 1.0 - 1e-8);
            assert_eq!(r.rounds.len(), 1);
        }
    }

    #[test]
    fn product_state_is_rejected() {
        let prod = tensor_product(&[qubit(1.0, 2.0), qubit(0.3, 1.0), qubit(1.0, 0.0)]).unwrap();
        assert_eq!(extract(&prod).unwrap_err(), Error::NotEntangled);
    }

    #[test]
    fn unbalanced_pair() {
        let r = extract(&unbalanced()).unwrap();
        assert!((r.probability - 0.2).abs() < 1e-12);
        assert_eq!(r.steps.len(), 2);
    }

    #[test]
    fn requested_pair() {
        let psi = ghz(4, 0.0).unwrap();
        let r = extract_pair(&psi, Some((2, 4))).unwrap();
        assert_eq!(r.pair, (2, 4));
        assert!((r.probability - 1.0).abs() < 1e-10);
        assert!(replay_fidelity(&psi, &r).unwrap() > 1.0 - 1e-8);
        assert_eq!(extract_pair(&psi, Some((1, 5))).unwrap_err(), Error::PairUnavailable(1, 5));
    }

    #[test]
    fn pair_choice_rule() {
        assert_eq!(target_pair_choice(&[2, 3, 5], None).unwrap(), (2, 3));
        assert_eq!(target_pair_choice(&[1, 4], Some((1, 4))).unwrap(), (1, 4));
        assert_eq!(target_pair_choice(&[1, 2, 3], Some((1, 5))).unwrap_err(), Error::PairUnavailable(1, 5));
        assert!(target_pair_choice(&[1], None).is_err());
    }

    #[test]
    fn random_states_reach_a_bell_pair() {
        for (dims, seed) in [(vec![2, 2, 2], 7), (vec![2, 3, 2], 1), (vec![3, 3, 2, 2], 5)] {
            let psi = random_pure(&PartyLayout::new(dims).unwrap(), seed).unwrap();
            let r = extract(&psi).unwrap();
            assert!(r.probability > 0.0);
            assert!(replay_fidelity(&psi, &r).unwrap() > 1.0 - 1e-8);
            for s in &r.steps {
                assert!(s.filter.largest_singular_value() <= 1.0 + 1e-12);
            }
            for w in r.rounds.windows(2) {
                assert!(w[1].entangled_parties.len() < w[0].entangled_parties.len());
            }
        }
    }
}
