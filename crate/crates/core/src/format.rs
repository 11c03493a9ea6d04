//! JSON file formats.
//!
//! Operators: `{"dims": [..], "entries": [[row, col, re, im], ...]}` with
//! only nonzero entries and global basis indices. Pure states:
//! `{"dims": [..], "amps": [[idx, re, im], ...]}`. Floats are written in
//! shortest round-trip form, so every finite value reloads bit for bit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::PartyLayout;
use crate::locc::{BranchCase, ExtractionResult, FilterKind, Round};
use crate::state::{DensityOperator, PureState, ZERO};
use crate::MAX_DIM;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub dims: Vec<usize>,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amps: Vec<(usize, f64, f64)>,
}

fn sparse_entries(m: &DMatrix<Complex64>) -> Vec<(usize, usize, f64, f64)> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            if z != ZERO {
                out.push((r, c, z.re, z.im));
            }
        }
    }
    out
}

impl OperatorFile {
    pub fn from_operator(op: &DensityOperator) -> Self {
        Self { dims: op.layout().dims().to_vec(), entries: sparse_entries(op.matrix()) }
    }

    /// Rebuilds the operator; it must be Hermitian (any trace).
    pub fn to_operator(&self) -> Result<DensityOperator> {
        let layout = PartyLayout::new(self.dims.clone())?;
        let d = layout.total_dim();
        if d > MAX_DIM {
            return Err(Error::DimensionCap { dim: d, cap: MAX_DIM });
        }
        let mut m = DMatrix::from_element(d, d, ZERO);
        for &(r, c, re, im) in &self.entries {
            if r >= d || c >= d {
                return Err(Error::Format(format!("entry ({r}, {c}) outside dimension {d}")));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Format(format!("non-finite entry at ({r}, {c})")));
            }
            m[(r, c)] = Complex64::new(re, im);
        }
        DensityOperator::hermitian(layout, m)
    }
}

impl StateFile {
    pub fn from_state(psi: &PureState) -> Self {
        let amps = psi
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(i, z)| (i, z.re, z.im))
            .collect();
        Self { dims: psi.layout().dims().to_vec(), amps }
    }

    pub fn to_state(&self) -> Result<PureState> {
        let layout = PartyLayout::new(self.dims.clone())?;
        let d = layout.total_dim();
        if d > MAX_DIM {
            return Err(Error::DimensionCap { dim: d, cap: MAX_DIM });
        }
        let mut amps = vec![ZERO; d];
        for &(i, re, im) in &self.amps {
            if i >= d {
                return Err(Error::Format(format!("amplitude index {i} outside dimension {d}")));
            }
            amps[i] = Complex64::new(re, im);
        }
        PureState::new(layout, amps)
    }
}

pub fn operator_to_json(op: &DensityOperator) -> String {
    serde_json::to_string(&OperatorFile::from_operator(op)).expect("serializable")
}

pub fn operator_from_json(text: &str) -> Result<DensityOperator> {
    let file: OperatorFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.to_operator()
}

pub fn state_to_json(psi: &PureState) -> String {
    serde_json::to_string(&StateFile::from_state(psi)).expect("serializable")
}

pub fn state_from_json(text: &str) -> Result<PureState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.to_state()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub party: usize,
    pub kind: FilterKind,
    pub dim: usize,
    /// Nonzero entries `[row, col, re, im]` of the local matrix.
    pub matrix: Vec<(usize, usize, f64, f64)>,
    pub weight: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub outcome_probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRound {
    pub pivot: usize,
    pub case: BranchCase,
    pub entangled_parties: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub pair: (usize, usize),
    pub probability: f64,
    pub schmidt_coeffs: [f64; 2],
    pub survivors: Vec<usize>,
    pub final_state: StateFile,
}

/// Extraction trace: ordered steps plus a summary block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionTrace {
    pub steps: Vec<TraceStep>,
    pub rounds: Vec<TraceRound>,
    pub summary: TraceSummary,
}

impl ExtractionTrace {
    pub fn from_result(result: &ExtractionResult) -> Self {
        let steps = result
            .steps
            .iter()
            .map(|s| TraceStep {
                party: s.filter.party,
                kind: s.filter.kind,
                dim: s.filter.matrix.nrows(),
                matrix: sparse_entries(&s.filter.matrix),
                weight: s.weight,
                outcome_probability: s.outcome_probability,
            })
            .collect();
        let rounds = result
            .rounds
            .iter()
            .map(|Round { pivot, case, entangled_parties }| TraceRound {
                pivot: *pivot,
                case: *case,
                entangled_parties: entangled_parties.clone(),
            })
            .collect();
        Self {
            steps,
            rounds,
            summary: TraceSummary {
                pair: result.pair,
                probability: result.probability,
                schmidt_coeffs: result.schmidt_coeffs,
                survivors: result.survivors.clone(),
                final_state: StateFile::from_state(&result.final_state),
            },
        }
    }

    /// Local matrices of the recorded steps, for replay.
    pub fn step_matrices(&self) -> Vec<(usize, DMatrix<Complex64>)> {
        self.steps
            .iter()
            .map(|s| {
                let mut m = DMatrix::from_element(s.dim, s.dim, ZERO);
                for &(r, c, re, im) in &s.matrix {
                    m[(r, c)] = Complex64::new(re, im);
                }
                (s.party, m)
            })
            .collect()
    }
}
