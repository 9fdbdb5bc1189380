//! Rigorous two-sided bounds on the Hausdorff dimension of limit sets of
//! complex continued-fraction iterated function systems.
//!
//! The transfer operator of the system is collocated on a square mesh of the
//! (half) unit disk. Error-corrected lower and upper matrices have spectral
//! radii that bracket that of the true operator, and a root search in `s`
//! turns the two radius bounds into an interval containing the dimension.

pub mod assembly;
pub mod bounds;
pub mod error;
pub mod higher_order;
pub mod maps;
pub mod mesh;
pub mod solver;
pub mod spectral;
pub mod tail;

pub use assembly::{assemble, Correction, OperatorSpec, SparseRowMatrix, WeightFamily};
pub use error::{Error, Result};
pub use maps::{Alphabet, AlphabetKind, Symmetry};
pub use mesh::{MeshDomain, Region};
pub use solver::{bracket_dimension, radius_bounds, DimensionBracket, SolveConfig};
pub use spectral::{dominant_eigen_general, power_method, SpectralResult};
