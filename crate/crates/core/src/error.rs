use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptySpace,
    NonPositiveMass { index: usize, value: f64 },
    LabelCount { expected: usize, found: usize },
    EmptyAtom { atom: usize },
    PointOutOfRange { atom: usize, point: usize, n: usize },
    OverlappingAtoms { point: usize },
    UncoveredPoint { point: usize },
    ShapeMismatch { expected: usize, found: usize },
    NotSquare { rows: usize, cols: usize },
    NotPsd { min_eigenvalue: f64 },
    InvalidExponent(f64),
    InvalidTolerance(f64),
    InvalidGrid(usize),
    InvalidPowerCount(usize),
    EmptyExponentGrid,
    NoConvergence,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySpace => write!(f, "measure space must contain at least one point"),
            Error::NonPositiveMass { index, value } => {
                write!(
                    f,
                    "mass must be positive and finite (point {index} has {value})"
                )
            }
            Error::LabelCount { expected, found } => {
                write!(f, "expected {expected} labels, found {found}")
            }
            Error::EmptyAtom { atom } => write!(f, "atom {atom} is empty"),
            Error::PointOutOfRange { atom, point, n } => {
                write!(
                    f,
                    "atom {atom} references point {point} but the space has {n} points"
                )
            }
            Error::OverlappingAtoms { point } => {
                write!(
                    f,
                    "atoms overlap: point {point} belongs to more than one atom"
                )
            }
            Error::UncoveredPoint { point } => {
                write!(
                    f,
                    "atoms do not cover the space: point {point} is in no atom"
                )
            }
            Error::ShapeMismatch { expected, found } => {
                write!(
                    f,
                    "shape mismatch: expected length {expected}, found {found}"
                )
            }
            Error::NotSquare { rows, cols } => {
                write!(f, "matrix is {rows}x{cols}, expected square")
            }
            Error::NotPsd { min_eigenvalue } => {
                write!(
                    f,
                    "matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
                )
            }
            Error::InvalidExponent(p) => write!(f, "exponent must be positive and finite, got {p}"),
            Error::InvalidTolerance(t) => {
                write!(f, "tolerance must be positive and finite, got {t}")
            }
            Error::InvalidGrid(g) => write!(f, "grid size {g} is too small"),
            Error::InvalidPowerCount(n) => write!(f, "power count {n} is out of range"),
            Error::EmptyExponentGrid => write!(f, "exponent grid must be nonempty"),
            Error::NoConvergence => write!(f, "eigenvalue iteration did not converge"),
        }
    }
}

impl core::error::Error for Error {}
