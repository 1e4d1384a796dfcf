//! Reduce polynomially nonlinear PDE systems with rational coefficients to
//! canonical form, read off their initial data, rewrite finite-dimensional
//! systems as constrained first-order ODE systems, and put the result to
//! work: numerical integration on the constraint variety, root-finding for
//! zero-dimensional polynomial systems via commuting multiplication
//! matrices, and exact Lie-algebra structure constants for symmetry
//! algebras.
//!
//! All symbolic computation is exact over arbitrary-precision rationals;
//! floating point is confined to the numerical integrator ([`dae`]) and the
//! eigenvalue solver ([`eigen`], used by [`zero_dim`]).
//!
//! The pipeline in one breath:
//!
//! ```
//! use pde2ode::elimination::{rif, DEFAULT_PROLONGATION_CAP};
//! use pde2ode::initial_data::parametric_derivatives;
//! use pde2ode::ode_reduce::reduce_to_parametric_ode;
//! use pde2ode::parse::parse_system;
//! use pde2ode::ranking::Ranking;
//!
//! let src = parse_system(
//!     "vars x, y; funcs u(x, y);
//!      eq diff(u,x,x) = diff(u,x,y);
//!      eq diff(u,y)^2 + diff(u,y) - u = 0;",
//! )?;
//! let form = rif(&src, &Ranking::grlex(2, 1), DEFAULT_PROLONGATION_CAP)?;
//! let id = parametric_derivatives(&form)?;
//! assert_eq!(id.dimension(), 3); // solutions are determined by u, u_x, u_y
//! let sys = reduce_to_parametric_ode(&form)?;
//! assert_eq!(sys.state_names(), ["u", "u_x", "u_y"]);
//! # Ok::<(), pde2ode::error::Error>(())
//! ```
//!
//! The [`guide`] module mirrors the mdbook under `book/` chapter by chapter;
//! its snippets run as documentation tests.

pub mod dae;
pub mod diffpoly;
pub mod eigen;
pub mod elimination;
pub mod error;
pub mod guide;
pub mod initial_data;
pub mod lie;
pub mod ode_reduce;
pub mod parse;
pub mod ranking;
pub mod render;
pub mod zero_dim;
