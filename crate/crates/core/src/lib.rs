//! Exact classical simulation of the pretty good measurement (PGM) for the
//! hidden subgroup problem over semidirect products `A x| Z_p`, with
//! `A = Z_N` (metacyclic) or `A = Z_p^r`.

pub mod arith;
pub mod error;
pub mod group;
pub mod linalg;
pub mod metacyclic;
pub mod msum;
pub mod pgm;
pub mod phase;
pub mod pipeline;
pub mod states;

pub use error::{Error, Result};
pub use group::{AbelianGroupSpec, Elem, GroupElement, LinearMap, ModMatrix, SemidirectGroup};
pub use phase::{character_eval, PhaseValue};
