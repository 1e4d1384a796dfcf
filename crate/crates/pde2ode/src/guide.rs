//! The user guide, one module per chapter.
//!
//! Each module's documentation is included verbatim from the mdbook sources
//! under `book/src/`, so every code snippet in the rendered book is also a
//! documentation test of this crate and cannot drift out of sync with the
//! library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/elimination.md")]
pub mod elimination {}

#[doc = include_str!("../../../book/src/initial-data.md")]
pub mod initial_data {}

#[doc = include_str!("../../../book/src/ode-systems.md")]
pub mod ode_systems {}

#[doc = include_str!("../../../book/src/integration.md")]
pub mod integration {}

#[doc = include_str!("../../../book/src/polynomial-systems.md")]
pub mod polynomial_systems {}

#[doc = include_str!("../../../book/src/lie-structure.md")]
pub mod lie_structure {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
