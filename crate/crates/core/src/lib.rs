//! A∞ categories over exact coefficient rings: relation checkers, bar and cobar constructions,
//! contraction certificates and strictification of units.

pub mod ainfty;
pub mod barcobar;
pub mod contraction;
pub mod graded;
pub mod io;
pub mod samples;
pub mod strictify;
pub mod system;

use ainfty_coeff::{CoeffError, Ring};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("not an A∞ structure: {0}")]
    NotAInfty(String),
    #[error("not a dg structure: operation of arity {0} is nonzero")]
    NotDg(usize),
    #[error("arity {requested} requested but only {available} is determined")]
    ArityUnderflow { requested: usize, available: usize },
    #[error("split units required: {0}")]
    SplitUnitsRequired(String),
    #[error("not unital: {0}")]
    NotUnital(String),
    #[error("not natural: {0}")]
    NotNatural(String),
    #[error("not a homotopy: {0}")]
    NotAHomotopy(String),
    #[error("splitting missing: {0}")]
    SplittingMissing(String),
    #[error("bad homotopy on graded piece {level}: {reason}")]
    BadGrHomotopy { level: usize, reason: String },
    #[error("bidegree ({0},{1}) is outside the domain of the contraction")]
    OutOfScopeBidegree(usize, usize),
    #[error("composition obstructed at arity {0}")]
    CompositionObstructed(usize),
    #[error("unsupported ring {0}")]
    UnsupportedRing(Ring),
    #[error("certificate rejected: {0}")]
    CertificateRejected(#[from] ainfty_cert::CertError),
}

impl CoreError {
    /// Stable short code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            CoreError::Coeff(CoeffError::RingMismatch(..)) => "RingMismatch",
            CoreError::Coeff(CoeffError::UnsupportedRing(_)) | CoreError::UnsupportedRing(_) => "UnsupportedRing",
            CoreError::Coeff(CoeffError::NotInvertible(_)) => "NotInvertible",
            CoreError::Coeff(CoeffError::Parse(_)) | CoreError::Schema(_) => "SchemaError",
            CoreError::Coeff(_) => "CoeffError",
            CoreError::DegreeMismatch(_) => "DegreeMismatch",
            CoreError::NotAInfty(_) => "NotAInfty",
            CoreError::NotDg(_) => "NotDg",
            CoreError::ArityUnderflow { .. } => "ArityUnderflow",
            CoreError::SplitUnitsRequired(_) => "SplitUnitsRequired",
            CoreError::NotUnital(_) => "NotUnital",
            CoreError::NotNatural(_) => "NotNatural",
            CoreError::NotAHomotopy(_) => "NotAHomotopy",
            CoreError::SplittingMissing(_) => "SplittingMissing",
            CoreError::BadGrHomotopy { .. } => "BadGrHomotopy",
            CoreError::OutOfScopeBidegree(..) => "OutOfScopeBidegree",
            CoreError::CompositionObstructed(_) => "CompositionObstructed",
            CoreError::CertificateRejected(_) => "CertificateRejected",
        }
    }

    /// Whether the error is a mathematical verdict rather than malformed input.
    pub fn is_math_failure(&self) -> bool {
        !matches!(
            self,
            CoreError::Schema(_)
                | CoreError::DegreeMismatch(_)
                | CoreError::Coeff(CoeffError::Parse(_))
                | CoreError::Coeff(CoeffError::RingMismatch(..))
                | CoreError::Coeff(CoeffError::Shape(_))
        )
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
