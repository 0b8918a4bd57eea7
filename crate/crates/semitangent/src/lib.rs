//! Polynomial derivations over commutative semirings and the tangent
//! structure they induce on algebras of the symmetric-algebra monad.

pub mod em;
pub mod lawcheck;
pub mod module;
pub mod poly;
pub mod render;
pub mod semiring;
pub mod sym;
pub mod tangent;
