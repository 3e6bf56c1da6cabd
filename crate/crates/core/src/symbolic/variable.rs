use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational scalar used throughout the engine.
pub type Q = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `num / den` as a rational. Panics on a zero denominator.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Formal series variables. They are inert under every shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeriesVar {
    U,
    V,
    U1,
    U2,
}

impl SeriesVar {
    pub fn name(self) -> &'static str {
        match self {
            SeriesVar::U => "u",
            SeriesVar::V => "v",
            SeriesVar::U1 => "u1",
            SeriesVar::U2 => "u2",
        }
    }
}

/// An indeterminate of the coefficient field.
///
/// The derived ordering is the fixed total variable order used for
/// canonical scaling of linear forms: series variables, then the torus
/// coordinates `x`, then the framing coordinates `w`, then `hbar`.
///
/// `X` is only ever created for vertices in the positive half of the
/// involution split; negative-half coordinates are rewritten as `-x` by
/// the quiver before they reach this type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Series(SeriesVar),
    X { vertex: u32, slot: u32 },
    W { vertex: u32, slot: u32 },
    Hbar,
}

impl Variable {
    pub const U: Variable = Variable::Series(SeriesVar::U);
    pub const V: Variable = Variable::Series(SeriesVar::V);
    pub const U1: Variable = Variable::Series(SeriesVar::U1);
    pub const U2: Variable = Variable::Series(SeriesVar::U2);

    pub fn is_series(self) -> bool {
        matches!(self, Variable::Series(_))
    }

    /// Stable 64-bit key, used to derive per-variable sample points.
    pub(crate) fn stable_key(self) -> u64 {
        match self {
            Variable::Series(s) => 1 + s as u64,
            Variable::X { vertex, slot } => (2 << 56) | ((vertex as u64) << 24) | slot as u64,
            Variable::W { vertex, slot } => (3 << 56) | ((vertex as u64) << 24) | slot as u64,
            Variable::Hbar => 4 << 56,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Series(s) => f.write_str(s.name()),
            Variable::X { vertex, slot } => write!(f, "x[{vertex},{slot}]"),
            Variable::W { vertex, slot } => write!(f, "w[{vertex},{slot}]"),
            Variable::Hbar => f.write_str("hbar"),
        }
    }
}
