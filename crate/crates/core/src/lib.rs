//! Exact computer algebra for the chainsaw quiver: the Lie algebra behind it,
//! classical and quantum Hamiltonian reduction, the Molien–Weyl character,
//! quiver stability, and the Borel Yangian images.
//!
//! Every computation runs over exact rationals unless noted otherwise.

pub mod character;
pub mod lie;
pub mod linalg;
pub mod par;
pub mod poisson;
pub mod poly;
pub mod quiver;
pub mod report;
pub mod ring;
pub mod scalar;
pub mod series;
pub mod uea;
pub mod yangian;

pub use lie::{BasisIndex, BasisMode, ChainsawLie, LieElem, TorusWeight};
pub use poly::MultiPoly;
pub use report::{Report, Status};
pub use ring::Ring;
pub use scalar::{Field, Fp, Q};
pub use series::TruncSeries;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("coefficient u^{exponent} lies beyond the reliable truncation (lowest reliable exponent {low})")]
    Truncation { exponent: i64, low: i64 },
    #[error("leading coefficient is not invertible")]
    NotInvertible,
    #[error("negative dimension at node {0}")]
    NegativeDimension(usize),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("elements belong to different algebras")]
    MismatchedAlgebras,
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("spectral clash: {0}")]
    SpectralClash(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
