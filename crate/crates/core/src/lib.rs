//! Cyclically presented groups `G_n(v)`, their two-generator extensions
//! `H_n(w)`, and the finite-quotient and residual-finiteness machinery built
//! on top of them.
//!
//! The crate is organised bottom-up:
//!
//! * [`words`]: reduced words and endomorphisms of finitely generated free groups.
//! * [`present`]: finite presentations, the cyclic family `G_n(v)`, the
//!   two-generator groups `H_n(w)` and the free-by-cyclic criterion.
//! * [`intpoly`]: associated polynomials, cyclotomic classification, resultants.
//! * [`abelian`]: exact integer matrices, Smith normal form, abelianizations.
//! * [`permgrp`]: permutation groups with stabilizer chains.
//! * [`homsearch`]: homomorphisms from presentations into permutation groups.
//! * [`covers`]: cyclic covers of `F_r ⋊ Z` and explicit surjections of `G_n(v)`.
//! * [`rescert`]: coset tables, pullbacks under endomorphisms, Magnus
//!   expansions and residual-finiteness certificates.

pub mod abelian;
pub mod covers;
mod error;
pub mod homsearch;
pub mod intpoly;
pub mod permgrp;
pub mod present;
pub mod rescert;
pub mod words;

pub use error::{Error, Result};
pub use num_bigint;

pub use abelian::{AbelianGroupStructure, IntMatrix, SmithForm};
pub use covers::{CoverSurjection, QuotientSchedule, SemidirectOverZ};
pub use homsearch::{Homomorphism, QuotientReport};
pub use intpoly::{CyclotomicClassification, IntPolynomial};
pub use permgrp::{PermGroup, Permutation};
pub use present::{CyclicWordFamily, FreeByCyclicData, Presentation};
pub use rescert::{FiniteIndexSubgroup, RFCertificate, TruncatedSeries};
pub use words::{Endomorphism, Generator, Naming, Word};

/// Default budget for homomorphism searches, in relator evaluations.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
