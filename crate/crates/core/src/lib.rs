//! Commensurability classes of arithmetic sublattices.
//!
//! Given a quaternion algebra `A` over a number field `K` and a subfield
//! `K₀ ⊂ K`, the lattices of `A` contain arithmetic sublattices coming from
//! algebras `B` over `K₀` with `B ⊗ K ≅ A`. This crate decides whether such
//! `B` exist and counts them up to the automorphisms of `K₀`, using only
//! ramification data and exact arithmetic.
//!
//! ```
//! use std::sync::Arc;
//! use quatlat::classify::{enumerate_classes, Count, SubfieldInput};
//! use quatlat::exact::parse_poly;
//! use quatlat::numfield::NumberField;
//! use quatlat::quat::QuaternionAlgebra;
//! use quatlat::relext::SubfieldEmbedding;
//!
//! let k = Arc::new(NumberField::new("c3", parse_poly("t^3-3t-1").unwrap()).unwrap());
//! let a = QuaternionAlgebra::ramified_above(k.clone(), &[17, 19]).unwrap();
//! let input = SubfieldInput::new("Q", SubfieldEmbedding::from_rationals(k))
//!     .with_top_autos(vec![parse_poly("2-t^2").unwrap()]);
//! let result = enumerate_classes(&a, &input, 100).unwrap();
//! assert_eq!(result.count(), Count::Exact(1));
//! ```
//!
//! Modules, bottom up: [`exact`] (rationals, polynomials over ℚ and `F_p`,
//! resultants, Sturm sequences, factorization), [`numfield`] (signature,
//! discriminant, prime decomposition), [`relext`] (embeddings, place
//! matching, automorphisms), [`quat`] (algebras and base change),
//! [`classify`] (descent criterion and class counts), [`problem`] (input
//! documents and corpus) and [`reproduce`] (scripted known results).

pub mod classify;
pub mod exact;
pub mod numfield;
pub mod problem;
pub mod quat;
pub mod relext;
pub mod reproduce;

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/embeddings.md")]
    mod embeddings {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/descent.md")]
    mod descent {}
    #[doc = include_str!("../../../book/src/classes.md")]
    mod classes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/reference/problem.md")]
    mod problem {}
    #[doc = include_str!("../../../book/src/reference/report.md")]
    mod report {}
}
