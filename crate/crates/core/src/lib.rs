//! Construction and verification of antipodal distance-regular covers of
//! complete graphs, their automorphism groups and the equiangular line
//! systems they induce.

pub mod analysis;
pub mod autom;
pub mod canonical;
pub mod casecheck;
pub mod constructions;
pub mod frames;
pub mod gf;
pub mod graph;
pub mod linalg;
pub mod numtheory;
pub mod params;
pub mod perm;
pub mod scalar;
pub mod surd;

pub use params::{derive_params, family_a, family_b, feasible_a, feasible_b, CoverParams, Surd};
pub use surd::QuadSurd;

/// Line systems and character matrices in double precision.
pub type LineSystem64 = frames::LineSystem<f64>;
pub type CharacterMatrix64 = frames::CharacterMatrix<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
