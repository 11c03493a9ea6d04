//! Party layouts and the mixed-radix basis encoding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered local dimensions of an `N`-party system.
///
/// Global basis index `i` decodes to digits `(i_1, ..., i_N)` with party 1 the
/// most significant digit, so for qubits the product state that is `|1>` at
/// party `k` and `|0>` elsewhere has index `2^(N-k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PartyLayout {
    dims: Vec<usize>,
}

impl PartyLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidLayout("at least one party required".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidLayout(format!("local dimension {d} < 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .ok_or_else(|| Error::InvalidLayout("global dimension overflows".into()))?;
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// Local dimension of a party (1-based).
    pub fn dim_of(&self, party: usize) -> Result<usize> {
        self.check_party(party)?;
        Ok(self.dims[party - 1])
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    pub fn check_party(&self, party: usize) -> Result<()> {
        if party == 0 || party > self.dims.len() {
            return Err(Error::InvalidParty { party, parties: self.dims.len() });
        }
        Ok(())
    }

    /// Validates a party subset and returns it sorted and deduplicated.
    pub fn normalize_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        let mut out = subset.to_vec();
        for &p in &out {
            self.check_party(p)?;
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Parties in `1..=N` that are not in `subset` (ascending).
    pub fn complement(&self, subset: &[usize]) -> Vec<usize> {
        (1..=self.parties()).filter(|p| !subset.contains(p)).collect()
    }

    /// Positional weight of each party's digit in the global index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            digits[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        digits
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&digit, &d)| acc * d + digit)
    }

    /// Layout of the given parties, in the given order.
    pub fn sub_layout(&self, parties: &[usize]) -> Result<Self> {
        let mut dims = Vec::with_capacity(parties.len());
        for &p in parties {
            dims.push(self.dim_of(p)?);
        }
        Self::new(dims)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims }
    }
}

impl TryFrom<Vec<usize>> for PartyLayout {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<PartyLayout> for Vec<usize> {
    fn from(layout: PartyLayout) -> Self {
        layout.dims
    }
}
