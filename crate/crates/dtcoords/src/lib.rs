//! Exact arithmetic for curves and measured foliations on surfaces.
//!
//! The crate is organized bottom-up:
//!
//! - [`rat`]: exact rational scalars and their string forms.
//! - [`surface`]: surface types, pants decompositions, and the sites where
//!   elementary moves apply.
//! - [`coords`]: Dehn-Thurston coordinate vectors, per-pants arc weights,
//!   integrality and parity checks, random sampling.
//! - [`moves`]: half-twists around pants curves and the two elementary
//!   transformations, composed into mapping words.
//! - [`multicurve`]: strand-level model of an integral multicurve and its
//!   connected component count.
//! - [`pa`]: twist recipes, iterated actions, and exact dilatation
//!   estimation, plus a small-word spectrum scan.
//! - [`relations`]: runnable checks for the relations the action must
//!   satisfy (involutivity, braid, finite order, count invariance).
//! - [`dsl`]: a tiny text format for mapping words.
//!
//! All coordinate arithmetic is exact (arbitrary precision rationals);
//! floating point appears only in reported dilatation values.

pub mod coords;
pub mod dsl;
pub mod moves;
pub mod multicurve;
pub mod pa;
pub mod rat;
pub mod relations;
pub mod surface;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// The surface admits no pants decomposition (needs 2g - 2 + r + s > 0).
    #[error("no pants decomposition: need 2g-2+r+s > 0, got g={genus}, r={boundary}, s={punctures}")]
    Hypothesis {
        genus: u32,
        boundary: u32,
        punctures: u32,
    },

    /// A gluing description is malformed or inconsistent.
    #[error("invalid gluing: {0}")]
    Gluing(String),

    /// A coordinate vector is malformed for its decomposition or scope.
    #[error("invalid coordinates: {0}")]
    Coords(String),

    /// Coordinates reference a curve outside the requested scope.
    #[error("scope mismatch: {0}")]
    Scope(String),

    /// Coordinates were produced against an older state of the decomposition.
    #[error("stale coordinates for curve {curve}: stamped generation {stamped}, current {current}")]
    Stale {
        curve: usize,
        stamped: u32,
        current: u32,
    },

    /// A move or twist cannot be applied where requested.
    #[error("invalid move: {0}")]
    Move(String),

    /// A mapping word is malformed (bad site, wrong order of application).
    #[error("invalid word: {0}")]
    Word(String),

    /// Word text failed to parse; `column` is 1-based.
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    /// A dilatation run was requested with unusable inputs.
    #[error("dilatation: {0}")]
    Dilatation(String),

    /// An internal invariant failed; this is a bug, not a user error.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
