//! Mermin-Klyshko Bell operators.
//!
//! `B_1 = sigma_{a_1}` and
//! `B_k = 1/2 B_{k-1} (x) (sigma_{a_k} + sigma_{a'_k}) + 1/2 B'_{k-1} (x) (sigma_{a_k} - sigma_{a'_k})`,
//! with `B'_k` obtained by swapping every `a_j` and `a'_j`. The local hidden
//! variable bound is `|<B_N>| <= 1`; quantum states reach `2^{(N-1)/2}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::PartyLayout;
use crate::state::{DensityOperator, ZERO};
use crate::states::MAX_QUBITS;

pub type Direction = [f64; 3];

const UNIT_TOL: f64 = 1e-12;

/// The local hidden variable bound on `|tr(B rho)|`.
pub const LHV_BOUND: f64 = 1.0;

/// Two measurement directions per party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSettings")]
pub struct BellSettings {
    pub a: Vec<Direction>,
    pub a_prime: Vec<Direction>,
}

#[derive(Deserialize)]
struct RawSettings {
    a: Vec<Direction>,
    a_prime: Vec<Direction>,
}

impl TryFrom<RawSettings> for BellSettings {
    type Error = Error;

    fn try_from(raw: RawSettings) -> Result<Self> {
        Self::new(raw.a, raw.a_prime)
    }
}

impl BellSettings {
    pub fn new(a: Vec<Direction>, a_prime: Vec<Direction>) -> Result<Self> {
        if a.is_empty() || a.len() != a_prime.len() {
            return Err(Error::InvalidArgument(format!(
                "need equally many a and a' directions, got {} and {}",
                a.len(),
                a_prime.len()
            )));
        }
        for v in a.iter().chain(&a_prime) {
            check_unit(v)?;
        }
        Ok(Self { a, a_prime })
    }

    /// `sigma_x` and `sigma_y` at every party.
    pub fn xy(n: usize) -> Self {
        Self { a: vec![[1.0, 0.0, 0.0]; n], a_prime: vec![[0.0, 1.0, 0.0]; n] }
    }

    pub fn parties(&self) -> usize {
        self.a.len()
    }
}

fn check_unit(v: &Direction) -> Result<()> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector(*v));
    }
    Ok(())
}

fn pauli_unchecked(a: &Direction) -> [[Complex64; 2]; 2] {
    [
        [Complex64::new(a[2], 0.0), Complex64::new(a[0], -a[1])],
        [Complex64::new(a[0], a[1]), Complex64::new(-a[2], 0.0)],
    ]
}

/// `a_x sigma_x + a_y sigma_y + a_z sigma_z` for a unit vector `a`.
pub fn pauli_along(a: Direction) -> Result<DMatrix<Complex64>> {
    check_unit(&a)?;
    let p = pauli_unchecked(&a);
    Ok(DMatrix::from_fn(2, 2, |r, c| p[r][c]))
}

/// Dense Bell operator on `N` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct BellOperator {
    layout: PartyLayout,
    matrix: DMatrix<Complex64>,
}

impl BellOperator {
    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `tr(B rho)`.
    pub fn expectation(&self, rho: &DensityOperator) -> Result<Complex64> {
        if *rho.layout() != self.layout {
            return Err(Error::LayoutMismatch("Bell operator and state differ in layout".into()));
        }
        Ok(crate::state::trace_product(&self.matrix, rho.matrix()))
    }

    pub fn into_operator(self) -> Result<DensityOperator> {
        DensityOperator::hermitian(self.layout, self.matrix)
    }
}

/// `B_N` from the recursion, with party 1 as the most significant factor.
pub fn build_bell(settings: &BellSettings) -> Result<BellOperator> {
    let n = settings.parties();
    if n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("{n} parties exceeds {MAX_QUBITS}")));
    }
    let half = Complex64::new(0.5, 0.0);
    let mut b = pauli_along(settings.a[0])?;
    let mut b_prime = pauli_along(settings.a_prime[0])?;
    for k in 1..n {
        let s = pauli_along(settings.a[k])?;
        let t = pauli_along(settings.a_prime[k])?;
        let sum = &s + &t;
        let diff = &s - &t;
        let next = (b.kronecker(&sum) + b_prime.kronecker(&diff)) * half;
        let next_prime = (b_prime.kronecker(&sum) - b.kronecker(&diff)) * half;
        b = next;
        b_prime = next_prime;
    }
    Ok(BellOperator { layout: PartyLayout::qubits(n)?, matrix: b })
}

/// `B_N` for x/y settings in closed form:
/// `2^{(N-1)/2} (e^{i beta} |1..1><0..0| + h.c.)`, `beta = pi (N - 1) / 4`.
pub fn closed_form_xy(n: usize) -> Result<BellOperator> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidArgument(format!("closed form needs 2 <= N <= {MAX_QUBITS}, got {n}")));
    }
    let layout = PartyLayout::qubits(n)?;
    let d = layout.total_dim();
    let beta = PI * (n as f64 - 1.0) / 4.0;
    let z = Complex64::from_polar(2f64.powf((n as f64 - 1.0) / 2.0), beta);
    let mut m = DMatrix::from_element(d, d, ZERO);
    m[(d - 1, 0)] = z;
    m[(0, d - 1)] = z.conj();
    Ok(BellOperator { layout, matrix: m })
}

/// Maximal quantum value `2^{(N-1)/2}` of the normalized operator.
pub fn quantum_bound(n: usize) -> f64 {
    2f64.powf((n as f64 - 1.0) / 2.0)
}

/// `tr(B rho)` reduced by the recursion without forming `B`; accepts
/// non-unit directions (the value is affine in each one).
fn contract(
    entries: &[(usize, usize, Complex64)],
    n: usize,
    a: &[Direction],
    a_prime: &[Direction],
) -> Complex64 {
    // Each entry carries its coefficient in A_k (paired with B_k) and in
    // A'_k (paired with B'_k); tr(B_k A) + tr(B'_k A') is invariant.
    let mut cur: Vec<(usize, usize, Complex64, Complex64)> =
        entries.iter().map(|&(r, c, z)| (r, c, z, ZERO)).collect();
    for k in (1..n).rev() {
        let s = pauli_unchecked(&a[k]);
        let t = pauli_unchecked(&a_prime[k]);
        let mut next: Vec<(usize, usize, Complex64, Complex64)> = cur
            .iter()
            .map(|&(r, c, x, y)| {
                let (i, j) = (r & 1, c & 1);
                let sum = s[j][i] + t[j][i];
                let diff = s[j][i] - t[j][i];
                (r >> 1, c >> 1, (sum * x - diff * y) * 0.5, (diff * x + sum * y) * 0.5)
            })
            .collect();
        next.sort_unstable_by_key(|e| (e.0, e.1));
        cur = Vec::with_capacity(next.len());
        for e in next {
            match cur.last_mut() {
                Some(last) if last.0 == e.0 && last.1 == e.1 => {
                    last.2 += e.2;
                    last.3 += e.3;
                }
                _ => cur.push(e),
            }
        }
    }
    let s = pauli_unchecked(&a[0]);
    let t = pauli_unchecked(&a_prime[0]);
    cur.iter()
        .map(|&(r, c, x, y)| s[c][r] * x + t[c][r] * y)
        .sum()
}

fn check_bell_layout(rho: &DensityOperator, settings: &BellSettings) -> Result<()> {
    let layout = rho.layout();
    if !layout.is_qubits() {
        return Err(Error::LayoutMismatch("Bell evaluation needs an all-qubit layout".into()));
    }
    if layout.parties() != settings.parties() {
        return Err(Error::LayoutMismatch(format!(
            "{} settings for a {}-party state",
            settings.parties(),
            layout.parties()
        )));
    }
    Ok(())
}

/// `tr(B_N rho)` as a complex number; the imaginary part is rounding noise.
pub fn bell_expectation(rho: &DensityOperator, settings: &BellSettings) -> Result<Complex64> {
    check_bell_layout(rho, settings)?;
    Ok(contract(&rho.nonzeros(), settings.parties(), &settings.a, &settings.a_prime))
}

/// `tr(B_N rho)`. A violation of the local bound is `|value| > 1`.
pub fn bell_value(rho: &DensityOperator, settings: &BellSettings) -> Result<f64> {
    Ok(bell_expectation(rho, settings)?.re)
}

/// Coordinate-ascent parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Stop once a full sweep improves the value by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Restart `r` draws its initial directions from `seed + r`.
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 16, tol: 1e-10, max_sweeps: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimized {
    pub settings: BellSettings,
    pub value: f64,
    pub restart: usize,
    pub sweeps: usize,
}

fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    loop {
        let v: Direction = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Maximizes `tr(B_N rho)` over all directions.
///
/// The value is affine in each direction, so each coordinate step evaluates
/// the three basis directions to get the gradient `v` and jumps to `v/|v|`,
/// the exact maximizer on the sphere. The best restart wins; ties keep the
/// lowest restart index.
pub fn optimize_settings(rho: &DensityOperator, config: &OptimizerConfig) -> Result<Optimized> {
    let layout = rho.layout();
    let n = layout.parties();
    if !layout.is_qubits() {
        return Err(Error::LayoutMismatch("Bell optimization needs an all-qubit layout".into()));
    }
    if n > 10 {
        return Err(Error::InvalidArgument(format!("optimizer supports N <= 10, got {n}")));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart required".into()));
    }
    let entries = rho.nonzeros();
    let eval = |a: &[Direction], ap: &[Direction]| contract(&entries, n, a, ap).re;
    const BASIS: [Direction; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    let mut best: Option<Optimized> = None;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(restart as u64));
        let mut a: Vec<Direction> = (0..n).map(|_| random_direction(&mut rng)).collect();
        let mut ap: Vec<Direction> = (0..n).map(|_| random_direction(&mut rng)).collect();
        let mut value = eval(&a, &ap);
        let mut sweeps = 0;
        while sweeps < config.max_sweeps {
            sweeps += 1;
            for slot in 0..2 * n {
                let (party, primed) = (slot / 2, slot % 2 == 1);
                // affine in this slot: value = c + g . v
                let at = |v: Direction| {
                    let (mut ta, mut tap) = (a.clone(), ap.clone());
                    if primed {
                        tap[party] = v;
                    } else {
                        ta[party] = v;
                    }
                    eval(&ta, &tap)
                };
                let c = at([0.0; 3]);
                let mut grad = [0.0; 3];
                for (g, e) in grad.iter_mut().zip(BASIS) {
                    *g = at(e) - c;
                }
                let norm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-14 {
                    continue;
                }
                let dir = [grad[0] / norm, grad[1] / norm, grad[2] / norm];
                if primed {
                    ap[party] = dir;
                } else {
                    a[party] = dir;
                }
            }
            let new_value = eval(&a, &ap);
            let gain = new_value - value;
            value = value.max(new_value);
            if gain < config.tol {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(Optimized { settings: BellSettings { a, a_prime: ap }, value, restart, sweeps });
        }
    }
    Ok(best.expect("restarts >= 1"))
}
