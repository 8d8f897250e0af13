//! Chain complexes of posets and their homology.

mod basis;
mod builders;
mod chain;
mod criteria;
mod local;
mod pi1;
mod report;
mod spectral;

pub use basis::{induced_map, induced_maps_into, jointly_surjective, HomologyBasis, InducedMap, PosetHomology};
pub use builders::{enumerate_chains, face_complex, functor_complex, order_complex, sequence_cells, ChainTable};
pub use chain::{ChainComplex, DegreeGroup, HomologyOutcome, PrimeScreen};
pub use criteria::*;
pub use local::{h0_coinvariants, local_system_constancy, monodromy, CoinvariantReport, Constancy, Monodromy};
pub use pi1::{
    enumerate_cosets, pi1_presentation, pi1_presentation_sequences, triviality, CosetResult, GroupPresentation,
    Pi1Report, Triviality,
};
pub use report::{
    functor_homology, integer_homology, sequence_homology, GroupEntry, HomologyReport, HomologyRequest, METHOD_SCREEN,
    METHOD_SNF,
};
pub use spectral::{double_complex_pages, total_complex, DoubleComplexReport, SpectralPage};
