//! Exact jet computations for planar 3- and 4-webs.
//!
//! Webs are given by truncated power series with rational coefficients.
//! The crate computes Blaschke curvature, cross-ratios, the normal form
//! `1 + xy(1 + h)` of curved 3-webs, abelian relations and formal rank of
//! the 4-webs `(dx, dy, dy − p dx, dy − C p dx)`, and builds rank-1 webs
//! whose 3-subwebs are all curved.
//!
//! ```
//! use webrank_core::abelian::rank;
//! use webrank_core::nakai::harmonic_example;
//! use webrank_core::Scalar;
//!
//! let bundle = harmonic_example(&Scalar::one(), 6).unwrap();
//! assert!(bundle.all_pass());
//! assert_eq!(rank(&bundle.p, &Scalar::int(-1), 6).unwrap().rank, 1);
//! ```
//!
//! A guide with more examples lives in the `book/` directory.

pub mod abelian;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod nakai;
pub mod normal_form;
pub mod scalar;
pub mod series;
pub mod web;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalar::Scalar;
pub use series::{BiSeries, Series, UniSeries, Var};

// The book's snippets run as doctests.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/series.md")]
mod book_series {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/webs.md")]
mod book_webs {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/normal-form.md")]
mod book_normal_form {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/rank.md")]
mod book_rank {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/building.md")]
mod book_building {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
