//! Exact computer algebra for finite twisted group algebras of CCR type.

pub mod algebra;
pub mod cli;
pub mod constructions;
pub mod cyclotomic;
pub mod error;
pub mod group;
pub mod limits;
pub mod matrix;
pub mod representation;
pub mod triple;

pub use cyclotomic::{CyclotomicScalar, Phase};
pub use error::{Error, Result};
pub use group::{Generator, GroupElement, GroupSpec, Subgroup};
pub use triple::{check_morphism, CcrMorphism, CcrTriple, MorphismCheck, ValidationReport};
