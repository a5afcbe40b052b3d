//! Crate-wide error type.
//!
//! All verification in this crate is exact, so error variants carry the exact
//! witnesses that falsified a hypothesis (a determinant, an exponent vector,
//! a lattice rank) rather than a diagnostic string alone.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A matrix that had to be square was not.
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// Rows of different lengths were supplied for a single matrix.
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },

    /// A matrix that had to be invertible over the integers was not.
    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: BigInt },

    /// The zero vector has no primitive generator.
    #[error("the zero vector spans no rank-one sublattice")]
    ZeroVector,

    /// A vector that had to be primitive had a non-unit content.
    #[error("vector is not primitive (content {content})")]
    NotPrimitive { content: BigInt },

    /// An action needs at least one generator.
    #[error("an action needs at least one generator")]
    EmptyGenerators,

    /// A generator matrix has the wrong shape.
    #[error("generator {index} is {rows}x{cols}, expected square of size {expected}")]
    GeneratorShape {
        index: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },

    /// A generator is not invertible over the integers.
    #[error("generator {index} is not unimodular (determinant {det})")]
    GeneratorNotUnimodular { index: usize, det: BigInt },

    /// Two generators fail to commute, so they generate no abelian group.
    #[error("generators {i} and {j} do not commute")]
    NonCommuting { i: usize, j: usize },

    /// A 1-based generator index was outside 1..=p.
    #[error("generator index {index} out of range 1..={p}")]
    IndexOutOfRange { index: usize, p: usize },

    /// An operation needs more generators than the action has.
    #[error("operation needs at least {needed} generators, the action has {p}")]
    NotEnoughGenerators { needed: usize, p: usize },

    /// An operation is specific to rank-three lattices.
    #[error("operation requires an action on Z^3, got Z^{q}")]
    RankNotThree { q: usize },

    /// Spectral unitarity failed: `A(witness)` has no eigenvalue 1.
    #[error("spectral unitarity fails at exponent {witness:?}: det(A(l) - I) != 0")]
    SpectralObstruction { witness: Vec<i64> },

    /// The joint fixed lattice is not trivial.
    #[error("fixed lattice is not trivial (rank {rank})")]
    FixedLatticeNotTrivial { rank: usize },

    /// No generator can be dropped while keeping the fixed lattice trivial.
    #[error("no generator index keeps the fixed lattice trivial when dropped")]
    NoTrivialRestriction,

    /// A reference matrix handed to the Klein-membership test does not have
    /// the expected normal-form shape.
    #[error("{which} is not a normal-form generator")]
    NotNormalForm { which: &'static str },

    /// A Klein-membership candidate fails to commute with a reference
    /// generator.
    #[error("candidate does not commute with {with}")]
    CandidateNotCommuting { with: &'static str },

    /// A candidate commutes and looks unitary on the test box but is not one
    /// of the four Klein elements, so it cannot belong to the group.
    #[error("matrix commutes with the normal-form pair and passes the spectral box test but is none of I, N, M, NM")]
    NotInKleinGroup,

    /// A matrix expected to be an involution was not.
    #[error("{which} is not an involution: its square is not the identity")]
    NotInvolution { which: String },

    /// A fixed lattice expected to be a line had a different rank.
    #[error("fixed lattice of {which} has rank {rank}, expected 1")]
    FixedRankNotOne { which: String, rank: usize },

    /// The Klein relation a*d + 2*(b + c) = 0 fails.
    #[error("normal-form relation a*d + 2*(b + c) = 0 fails: got {lhs}")]
    RelationViolated { lhs: BigInt },

    /// An exact internal cross-check failed; this indicates a bug, not bad
    /// input, and is surfaced rather than silently trusted.
    #[error("internal verification failed: {context}")]
    InternalVerification { context: String },

    /// A torus map outside the closed affine-plus-harmonic class.
    #[error("map is outside the supported class: {reason}")]
    UnsupportedMapShape { reason: String },

    /// Wrong number of amplitude values for the family.
    #[error("expected {expected} amplitude values, got {got}")]
    AlphaCount { expected: usize, got: usize },

    /// Wrong number of exponents for the family.
    #[error("expected an exponent vector of length {expected}, got {got}")]
    ExponentLength { expected: usize, got: usize },

    /// A subgroup given by generators of zero determinant has infinite index.
    #[error("subgroup has infinite index (generator determinant 0)")]
    NotFiniteIndex,

    /// An exponent vector is not in the subgroup under consideration.
    #[error("exponent {exponent:?} is outside the subgroup")]
    NotInSubgroup { exponent: Vec<i64> },

    /// Freeness cannot be certified from evidence that contains a fixed point.
    #[error("fixed-point evidence at entry {index}: the subgroup action is not free")]
    FixedPointEvidence { index: usize },

    /// Input JSON failed to parse or validate.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Shorthand for [`Error::InternalVerification`].
    pub(crate) fn internal(context: impl Into<String>) -> Self {
        Error::InternalVerification {
            context: context.into(),
        }
    }
}
