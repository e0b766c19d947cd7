//! Spectral analysis of graph shift operators that need not be
//! diagonalizable: Jordan decompositions, the oblique-projector graph
//! Fourier transform, graph equivalence testing, and total-variation
//! frequency ordering.

pub mod dense;
pub mod equiv;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod gft;
pub mod jordan;
pub mod linalg;
pub mod scalar;
pub mod textio;
pub mod tolerance;
pub mod tv;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use exact::ExactMatrix;
pub use scalar::ExactScalar;
pub use tolerance::ToleranceConfig;
