//! Arithmetic in `A`, its automorphism, and the semidirect product `A x| Z_p`.

mod abelian;
mod linear;
mod semidirect;
mod spec;

pub use abelian::{AbelianGroupSpec, Elem};
pub use linear::{row_reduce, LinearMap, ModMatrix};
pub use semidirect::{
    binomial_matrix_sum, heisenberg_matrix_sum, metacyclic_parameters, GroupElement, SemidirectGroup,
};
pub use spec::parse_group_spec;

#[cfg(test)]
mod tests;
