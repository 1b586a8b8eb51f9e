//! Exact arithmetic over the rationals: sparse multivariate polynomials,
//! sparse linear algebra and a few univariate algorithms.

mod matrix;
mod monomial;
mod polynomial;
mod recursive;
mod univariate;

pub type BigRational = num_rational::BigRational;

pub use matrix::{kernel_basis, rank, SparseMatrixQ};
pub use monomial::Monomial;
pub use polynomial::{poly_arith, poly_eval, rational_to_f64, ArithOp, SparsePolynomial};
pub use recursive::PolyOverQx;
pub(crate) use univariate::dense_squarefree;
pub use univariate::{gcd_univariate, resultant, resultant_y, squarefree_part, DensePoly};
