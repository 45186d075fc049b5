//! r-values of subsets of GF(2^n).
//!
//! The r-value of `A` counts ordered pairs `(a, b) ∈ A × A` with `a + b ∈ A`.
//! This crate computes r-values and their three-set generalisation, checks the
//! closed-form identities they satisfy, enumerates the full spectrum of
//! r-values per subset size for small fields, and lifts witnessed spectra from
//! `GF(2^(n-1))` to `GF(2^n)` where exhaustive search is out of reach.

pub mod compare;
pub mod construct;
pub mod enumerate;
pub mod error;
pub mod field;
pub mod identity;
pub mod reference;
pub mod rvalue;
pub mod spectrum;
pub mod subset;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use rvalue::{delta_add, delta_remove, r, r_abc, r_set, steiner_blocks, RTriple, SteinerBlock};
pub use spectrum::{SpectrumEntry, SpectrumTable, ZeroClass};
pub use subset::SubsetMask;
