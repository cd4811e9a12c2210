//! Exact arithmetic over the prime fields, the rationals and the integers,
//! together with the sparse linear algebra the rest of the toolkit needs.

mod lin;
mod matrix;
mod ring;
mod smith;

pub use lin::Lin;
pub use matrix::{rank_kernel, solve_linear, RankKernel, SparseMatrix};
pub use ring::{Ring, Scalar};
pub use smith::{inverse, smith_normal_form, solve_integer, Smith};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("operation not supported over {0}")]
    UnsupportedRing(Ring),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse coefficient {0:?}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, CoeffError>;
