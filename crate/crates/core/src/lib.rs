//! Obstruction designs, highest-weight-vector polynomials `f_H`, and
//! exact border-rank lower-bound certificates for order-3 tensors.

pub mod algebra;
pub mod bounds;
pub mod error;
pub mod designs;
pub mod hwv;
pub mod latin;
pub mod matmul;
pub mod tensors;

pub use error::{Error, Result};
