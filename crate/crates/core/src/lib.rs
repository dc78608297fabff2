pub mod analysis;
pub mod certificate;
pub mod cover;
pub mod endo;
pub mod error;
pub mod group;
pub mod hash;
pub mod linalg;
pub mod marking;
pub mod mcg;
pub mod prym;
pub mod ribbon;
pub mod stabilizer;
pub mod surface;
pub mod word;

pub use cover::{CoverData, PeripheralCycle};
pub use endo::{apply_endomorphism, compose, verify_peripheral_structure, EndomorphismTable, PeripheralReport};
pub use error::{Error, Result};
pub use group::{finite_group_aut, FiniteGroupTable};
pub use linalg::{IntMatrix, QuotientLattice};
pub use marking::{epi_closure_marking, level_marking, QuotientMarking};
pub use mcg::{
    multitwist_check, point_push, standard_generators, validate_mcg_relations, GeneratorKind, GeneratorLibrary, McgWord,
    NamedMcgGenerator,
};
pub use surface::{build_surface_group, PeripheralKind, SurfaceGroupPresentation, SurfaceType};
pub use word::{free_reduce, Word};
pub use prym::{
    boundary_subspace, cover_summary, intersection_form, is_symplectic, prym_matrix, raw_matrix, BoundarySubspace,
    CoverSummary, IntersectionForm, PrymBundle, PrymMatrix, PrymRepresentation,
};
pub use analysis::{
    candidate_vectors, coinvariants_dimension, fixed_subspace, orbit_search, CandidateStrategy, OrbitResult, OrbitStatus,
};
pub use stabilizer::{marking_stabilizer, vector_stabilizer, StabilizerData};
pub use certificate::{
    certify_point_pushing, point_pushing_pipeline, verify_certificate, PipelineConfig, PipelineOutcome,
    PointPushingCertificate, VerifyReport,
};
