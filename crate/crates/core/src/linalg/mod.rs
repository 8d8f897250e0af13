//! Exact integer and modular linear algebra.

mod abelian;
mod dense;
pub mod modp;
mod snf;
mod sparse;

pub use abelian::AbelianGroup;
pub use dense::IntMatrix;
pub use modp::{has_right_inverse_mod_m, inverse_mod_m, kernel_mod_m, rank_mod_p_rows, rank_mod_prime};
pub(crate) use snf::{dense_smith, dense_smith_tracking};
pub use snf::{invariant_factors, smith_normal_form, smith_normal_form_budgeted, SmithDecomposition};
pub use sparse::SparseIntMatrix;
