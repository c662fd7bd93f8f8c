//! The guide under `book/` as doctests, so `cargo test` keeps its snippets
//! compiling and correct. One module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/lp-spaces.md")]
pub mod lp_spaces {}
#[doc = include_str!("../../../book/src/operator-bounds.md")]
pub mod operator_bounds {}
#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}
#[doc = include_str!("../../../book/src/neumann.md")]
pub mod neumann {}
#[doc = include_str!("../../../book/src/spectral.md")]
pub mod spectral {}
#[doc = include_str!("../../../book/src/continuation.md")]
pub mod continuation {}
#[doc = include_str!("../../../book/src/gallery.md")]
pub mod gallery {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
