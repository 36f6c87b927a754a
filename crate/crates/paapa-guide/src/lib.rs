//! Doctest harness for the book under `book/` at the repository root.
//!
//! Each chapter is included as a doc attribute so `cargo test --doc` 
//! compiles and runs every code sample in the book; the guide can never
//! drift from the library it documents. Rendering the book itself is
//! optional (`mdbook build book/`) and not required for the tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/growth-model.md")]
pub mod growth_model {}

#[doc = include_str!("../../../book/src/sampling.md")]
pub mod sampling {}

#[doc = include_str!("../../../book/src/exact-theory.md")]
pub mod exact_theory {}

#[doc = include_str!("../../../book/src/validation.md")]
pub mod validation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/reproducibility.md")]
pub mod reproducibility {}
