//! Core shape selection for size-constrained Tucker decompositions.
//!
//! The pipeline is: compute the squared singular values of every mode
//! unfolding ([`spectra`]), pose the packing problem over them ([`packing`]),
//! pick a core shape with one of the solvers, and check it by building the
//! decomposition ([`decomp`]). [`treenet`] extends shape selection to tree
//! tensor networks.

pub mod decomp;
pub mod error;
pub mod linalg;
pub mod npy;
pub mod packing;
pub mod spectra;
pub mod synth;
pub mod tensor;
pub mod treenet;

pub use decomp::{CoreShape, TuckerDecomposition};
pub use error::{Error, Result};
pub use packing::{PackingInstance, Solution, SolverId};
pub use spectra::ModeSpectra;
pub use tensor::{DenseTensor, Matrix, Unfolded};
