//! Local iterated function systems at finite resolution.
//!
//! A local IFS is a finite family of contractions, each defined only on its own
//! closed domain. This crate computes outer approximations of local attractors,
//! extracts code spaces, tests shadowing and combinatorial stability, and ships
//! the worked examples (superfractals, the sequence-space shift example,
//! beta-transformation systems, a graph-directed embedding) as builtin scenarios.
//!
//! Two set backends implement the [`space::Space`] contract:
//! dyadic grid bitmasks over `[0,1]^d` ([`geometry`]) and unions of cylinders in a
//! sequence space ([`symbolic::cylinder`]).

pub mod beta;
pub mod config;
pub mod geometry;
pub mod ifs;
pub mod scenarios;
pub mod shadowing;
pub mod space;
pub mod stability;
pub mod symbolic;

pub use geometry::{AffineContraction, GeometryError, GridSet, Region};
pub use ifs::{AttractorReport, IfsError, LocalIfs};
pub use space::{GridSpace, SeqSpace, Space};
pub use symbolic::{LanguageSample, TransitionMatrix, Word};

