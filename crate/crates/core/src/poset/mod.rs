//! Finite posets, order-preserving maps, sequence posets and coefficient
//! functors.

mod finite;
mod functor;
mod map;
mod sequence;

pub use finite::{FinitePoset, LinkSign};
pub use functor::{CoefficientFunctor, LocalSystem};
pub use map::{HeightFunction, PosetMap};
pub use sequence::{is_subsequence, Entry, SequencePoset};
