//! Constructors for the GHZ state, the flip projectors, the bound entangled
//! family `rho_N`, and seeded random pure states.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::PartyLayout;
use crate::state::{DensityOperator, PsdStatus, PureState, ZERO};
use crate::MAX_DIM;

/// Largest qubit count supported by the dense constructors.
pub const MAX_QUBITS: usize = 12;

/// The GHZ phase for which the Mermin-Klyshko value of `rho_N` is maximal
/// with x/y settings: `pi (N - 1) / 4`.
pub fn default_alpha(n: usize) -> f64 {
    PI * (n as f64 - 1.0) / 4.0
}

/// Parameters of `rho_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoFamilySpec {
    pub n: usize,
    pub alpha: f64,
}

impl RhoFamilySpec {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::InvalidArgument(format!("party count {n} outside 2..={MAX_QUBITS}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        Ok(Self { n, alpha })
    }

    /// `alpha = pi (N - 1) / 4`.
    pub fn with_default_alpha(n: usize) -> Result<Self> {
        Self::new(n, default_alpha(n))
    }
}

fn check_qubits(n: usize) -> Result<PartyLayout> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("GHZ needs at least 2 parties, got {n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::DimensionCap { dim: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX), cap: MAX_DIM });
    }
    PartyLayout::qubits(n)
}

/// `(|0...0> + e^{i alpha} |1...1>) / sqrt 2`.
pub fn ghz(n: usize, alpha: f64) -> Result<PureState> {
    let layout = check_qubits(n)?;
    let d = layout.total_dim();
    let mut amps = vec![ZERO; d];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[d - 1] = Complex64::from_polar(FRAC_1_SQRT_2, alpha);
    PureState::new(layout, amps)
}

/// Projector onto [`ghz`], with entries written in closed form (`1/2` on
/// the diagonal, `e^{+-i alpha}/2` off it).
pub fn ghz_projector(n: usize, alpha: f64) -> Result<DensityOperator> {
    let layout = check_qubits(n)?;
    let d = layout.total_dim();
    let mut m = DMatrix::from_element(d, d, ZERO);
    m[(0, 0)] = Complex64::new(0.5, 0.0);
    m[(d - 1, d - 1)] = Complex64::new(0.5, 0.0);
    let off = Complex64::from_polar(0.5, alpha);
    m[(d - 1, 0)] = off;
    m[(0, d - 1)] = off.conj();
    Ok(DensityOperator::from_parts(layout, m, PsdStatus::Yes))
}

/// Basis indices of `|phi_k>` (a `1` at party `k`, zeros elsewhere) and of
/// its bit complement.
pub fn flip_indices(n: usize, k: usize) -> Result<(usize, usize)> {
    check_qubits(n)?;
    if k == 0 || k > n {
        return Err(Error::InvalidParty { party: k, parties: n });
    }
    let one = 1usize << (n - k);
    Ok((one, (1usize << n) - 1 - one))
}

/// Rank-one projectors `(P_k, Pbar_k)`.
pub fn flip_projectors(n: usize, k: usize) -> Result<(DensityOperator, DensityOperator)> {
    let (i, j) = flip_indices(n, k)?;
    let layout = PartyLayout::qubits(n)?;
    let p = PureState::basis(layout.clone(), i)?.to_density();
    let pbar = PureState::basis(layout, j)?.to_density();
    Ok((p, pbar))
}

/// `rho_N = (|Psi><Psi| + 1/2 sum_k (P_k + Pbar_k)) / (N + 1)`, written
/// entrywise from its `2N + 1` rank-one pieces.
pub fn rho_n(spec: &RhoFamilySpec) -> Result<DensityOperator> {
    let spec = RhoFamilySpec::new(spec.n, spec.alpha)?;
    let n = spec.n;
    let mut m = ghz_projector(n, spec.alpha)?.into_matrix();
    for k in 1..=n {
        let (i, j) = flip_indices(n, k)?;
        m[(i, i)] += Complex64::new(0.5, 0.0);
        m[(j, j)] += Complex64::new(0.5, 0.0);
    }
    let w = 1.0 / (n as f64 + 1.0);
    scale_nonzeros(&mut m, w);
    Ok(DensityOperator::from_parts(PartyLayout::qubits(n)?, m, PsdStatus::Yes))
}

/// Multiplies each nonzero entry by the real factor `w` componentwise.
pub(crate) fn scale_nonzeros(m: &mut DMatrix<Complex64>, w: f64) {
    for z in m.iter_mut() {
        if *z != ZERO {
            *z = Complex64::new(z.re * w, z.im * w);
        }
    }
}

/// Haar-random pure state: i.i.d. complex normal amplitudes, normalized.
/// Deterministic for a given seed.
pub fn random_pure(layout: &PartyLayout, seed: u64) -> Result<PureState> {
    let d = layout.total_dim();
    if d > MAX_DIM {
        return Err(Error::DimensionCap { dim: d, cap: MAX_DIM });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    PureState::normalized(layout.clone(), amps)
}

/// Seeded random product state over `layout` (each factor drawn with
/// [`random_pure`] from consecutive seeds).
pub fn random_product(layout: &PartyLayout, seed: u64) -> Result<PureState> {
    let factors = layout
        .dims()
        .iter()
        .enumerate()
        .map(|(i, &d)| random_pure(&PartyLayout::new(vec![d])?, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    crate::tensor::tensor_product(&factors)
}

/// Equal-weight mixture of `count` seeded random product states.
pub fn separable_mixture(layout: &PartyLayout, count: usize, seed: u64) -> Result<DensityOperator> {
    let states = (0..count as u64)
        .map(|i| random_product(layout, seed.wrapping_mul(1000).wrapping_add(i * 17)).map(|s| s.to_density()))
        .collect::<Result<Vec<_>>>()?;
    let w = 1.0 / count as f64;
    let parts: Vec<(f64, &DensityOperator)> = states.iter().map(|s| (w, s)).collect();
    DensityOperator::mixture(&parts)
}

/// Two-qubit `(|00> + |11>)/sqrt 2`.
pub fn phi_plus() -> PureState {
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    PureState::new(PartyLayout::qubits(2).expect("valid"), vec![c, ZERO, ZERO, c]).expect("normalized")
}
