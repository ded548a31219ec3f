//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("map side {0} is not a power of two >= 2")]
    NonPowerOfTwoSide(usize),

    #[error("map is not square: {rows} rows, row {bad_row} has {cols} columns")]
    NonSquare {
        rows: usize,
        bad_row: usize,
        cols: usize,
    },

    #[error("occupancy value {value} at cell {index} lies outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },

    #[error("malformed map file: {0}")]
    MalformedFile(String),

    #[error("invalid node id {0}")]
    InvalidNode(usize),

    #[error("node {0} is not an interior node")]
    NotInterior(usize),

    #[error("beta must be positive, got {0}")]
    NonPositiveBeta(f64),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("point ({0}, {1}) lies outside the map")]
    OutOfBounds(f64, f64),

    #[error("path kind mismatch: {0}")]
    KindMismatch(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("invalid abstraction: {0}")]
    InvalidAbstraction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
