//! Covers of sequence posets, the incidence poset `Z`, nerve and
//! surjectivity checks, and connectivity bound tables.

mod bw;
mod classical;
mod cover;
mod covers;
mod incidence;
mod lemmas;
mod poset_nerve;
mod samples;

pub use bw::{rows_to_tsv, verify_bound, BoundRequest, BoundRow, BoundTheorem, TSV_HEADER};
pub use classical::{as_poset_cover, classical_nerve, nerve_complex, ClassicalNerveReport, SimplicialComplex, CLASSICAL_CHECK};
pub use cover::PosetCover;
pub use covers::{bw1_cover, bw2_cover, first_uncovered, random_restrictions};
pub use incidence::IncidencePoset;
pub use lemmas::{verify_link_spheres, verify_maazen5, verify_surjectivity, MAAZEN1_CHECK, MAAZEN5_CHECK, SURJ_CHECK};
pub use poset_nerve::{verify_poset_nerve, NerveReport, NERVE_CHECK};
pub use samples::{circle_arc_cover, hexagon_by_arcs, octahedron_by_faces};
