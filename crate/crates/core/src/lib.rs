//! Exact arithmetic in iterated quadratic towers `Q(x_n)` with
//! `x_{n+1} = sqrt(nu + x_n)`, and the field-theoretic questions built on top
//! of them: Galois groups of the degree-four steps, membership in the
//! increasing/decreasing classes, subfield lattices, special elements and
//! house estimates.

pub mod exact;
pub mod galois;
pub mod jr;
pub mod lattice;
pub mod omega;
pub mod special;
pub mod tower;

mod serde_big;
