//! Flag enumerations shared by every triangular kernel and algorithm.
//!
//! These follow the usual dense-kernel conventions: `Uplo` selects the
//! stored triangle, `Diag` declares an implicit unit diagonal, `Trans`
//! transposes an operand and `Side` picks which side a triangular
//! operand multiplies from.

/// Which triangle of a square matrix is stored and operated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Uplo {
    Lower,
    Upper,
}

impl Uplo {
    /// The triangle of the transposed matrix.
    pub fn flip(self) -> Self {
        match self {
            Uplo::Lower => Uplo::Upper,
            Uplo::Upper => Uplo::Lower,
        }
    }
}

/// Whether the diagonal of a triangular operand is implicitly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Diag {
    NonUnit,
    Unit,
}

/// Whether an operand enters a product transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trans {
    NoTrans,
    Trans,
}

/// Which side a triangular operand multiplies from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}
