//! Exact-arithmetic machinery for configurations of sub-squares of the unit
//! square, the colored braids that connect them, Yang-Baxter braid
//! representations, factorized local systems over those configurations, and
//! towers of depth truncations with their inverse-limit assembly.
//!
//! All numerics are exact: rational coordinates, rational or prime-field
//! matrix entries, zero tolerances. Verification work fans out over rayon by
//! default; disable the `parallel` feature (or set `FACTOPERAD_THREADS=1`)
//! for a sequential build.

pub mod braids;
pub mod cat;
pub mod cubes;
pub mod factsys;
pub mod io;
pub mod limits;
pub mod matrix;
pub mod par;
pub mod perm;
pub mod scalar;
pub mod verify;

pub use braids::{straighten, ColoredBraid, DegenerateMotion, Orientation};
pub use cat::{check_yang_baxter, eval_braid, tensor_phi, BraidedObject};
pub use cubes::{LinearEmbedding, Square};
pub use factsys::{extend_vertical_braided, lift_morphism, FactorizedSystem, SystemMorphism};
pub use limits::{assemble, morphism_of_towers, verify_tower, ProjectiveSystem};
pub use matrix::Matrix;
pub use perm::Permutation;
pub use scalar::{FieldTag, Scalar};
pub use verify::{verify_factorization, verify_morphism, VerifyOptions, VerifyReport};
