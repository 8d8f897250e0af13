pub mod budget;
pub mod checks;
pub mod error;
pub mod homology;
pub mod linalg;
pub mod nerve;
pub mod poset;
pub mod random;
pub mod ring;
pub mod suites;
pub mod symplectic;
pub mod verdict;

pub use budget::Budget;
pub use error::{Error, Result};
pub use verdict::{Outcome, Verdict};
