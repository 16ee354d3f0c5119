//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PermError {
    #[error("image {image} out of range for degree {degree}")]
    ImageOutOfRange { image: usize, degree: usize },
    #[error("duplicate image {image}")]
    DuplicateImage { image: usize },
    #[error("point {point} appears in two cycles")]
    OverlappingCycles { point: usize },
    #[error("cannot parse cycle notation: {0:?}")]
    BadCycleSyntax(String),
    #[error("cycle parts must be positive")]
    ZeroCyclePart,
    #[error("no generators given")]
    NoGenerators,
    #[error("generators act on different degrees")]
    MixedDegrees,
    #[error("group closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },
}

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("multiplication table is not square: row {row} has {len} entries, expected {order}")]
    RaggedTable { row: usize, len: usize, order: usize },
    #[error("table entry {value} at ({row}, {col}) is not an element id below {order}")]
    EntryOutOfRange { row: usize, col: usize, value: usize, order: usize },
    #[error("row {row} of the multiplication table is not a permutation")]
    RowNotPermutation { row: usize },
    #[error("column {col} of the multiplication table is not a permutation")]
    ColNotPermutation { col: usize },
    #[error("element 0 is not a two-sided identity")]
    NoIdentity,
    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("group is not nilpotent: {reason}")]
    NotNilpotent { reason: String },
    #[error("group has even order {order}; only odd orders are accepted here")]
    EvenOrder { order: u64 },
    #[error("cannot parse group spec {spec:?}: {reason}")]
    BadSpec { spec: String, reason: String },
    #[error("group order must be positive")]
    EmptyGroup,
}

#[derive(Debug, Error)]
pub enum DiscError {
    #[error("cannot parse ramification profile {text:?}: {reason}")]
    BadProfile { text: String, reason: String },
    #[error("tame datum at p={p} has a part of length {part} divisible by p")]
    TameAtDividingPrime { p: u64, part: u32 },
    #[error("duplicate entry for p={p}")]
    DuplicatePrime { p: u64 },
    #[error("profile entry at p={p} has degree {got}, expected {expected}")]
    DegreeMismatch { p: u64, got: u64, expected: u64 },
    #[error("wild valuation at p={p} must be positive")]
    ZeroWildValuation { p: u64 },
    #[error("common prime p={p} is wildly ramified and no exponent table row resolves it")]
    UnresolvedWildPrime { p: u64 },
    #[error("exponent table row (p={p}, {left}, {right}) gives {exponent}, outside the provable range [{min}, {max}]")]
    TableRowOutOfRange { p: u64, left: String, right: String, exponent: u64, min: u64, max: u64 },
    #[error("cannot read exponent table: {0}")]
    BadTable(String),
}

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("unsupported cyclic degree {ell}: expected one of 3, 5, 7")]
    UnsupportedEll { ell: u64 },
    #[error("discriminant bound {bound} exceeds the configured cap {cap}")]
    BoundExceedsCap { bound: u128, cap: u128 },
    #[error("corpus covers |disc| <= {have} but the query needs {need}")]
    InsufficientCorpus { have: u64, need: u64 },
    #[error("q = {q} must be a positive squarefree integer")]
    NotSquarefree { q: u64 },
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("cannot read field table: {0}")]
    Io(String),
    #[error("field table is empty")]
    Empty,
}
