//! Numerical toolkit for a family of multipartite bound entangled qubit
//! states.
//!
//! The crate builds the states (`states`), certifies their partial-transpose
//! structure (`ppt`), evaluates and optimizes the Mermin-Klyshko Bell operator
//! (`bell`), and simulates the local-filtering procedure that turns any
//! entangled multipartite pure state into a maximally entangled pair
//! (`locc`). Shared linear algebra lives in `tensor`, `eigen` and `schmidt`.
//!
//! Parties are labelled `1..=N` everywhere in the public API. Global basis
//! indices use a mixed-radix encoding with party 1 as the most significant
//! digit.

pub mod bell;
pub mod eigen;
pub mod error;
pub mod format;
pub mod layout;
pub mod locc;
pub mod ppt;
pub mod schmidt;
pub mod state;
pub mod states;
mod svd;
pub mod tensor;

pub use error::{Error, Result};
pub use layout::PartyLayout;
pub use num_complex::Complex64;
pub use state::{DensityOperator, PsdStatus, PureState};

/// Maximum global dimension handled by the dense routines (12 qubits).
pub const MAX_DIM: usize = 4096;
