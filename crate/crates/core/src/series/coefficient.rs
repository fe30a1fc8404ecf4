//! Coefficient rings for truncated series.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational numbers, the default coefficient ring.
pub type Rational = BigRational;

/// A commutative ring that can serve as the coefficient domain of a
/// [`Series`](super::Series).
///
/// Some rings need runtime parameters (the mark ring carries a degree cap),
/// so every constructor and ring operation receives a context value.
pub trait Coefficient: Clone + PartialEq + Debug {
    type Ring: Clone + PartialEq + Debug;

    fn zero_in(ring: &Self::Ring) -> Self;
    fn one_in(ring: &Self::Ring) -> Self;
    fn from_rational(value: Rational, ring: &Self::Ring) -> Self;
    fn vanishes(&self) -> bool;

    fn plus(&self, other: &Self, ring: &Self::Ring) -> Self;
    fn minus(&self, other: &Self, ring: &Self::Ring) -> Self;
    fn times(&self, other: &Self, ring: &Self::Ring) -> Self;
    fn negated(&self, ring: &Self::Ring) -> Self;
    fn scale(&self, factor: &Rational, ring: &Self::Ring) -> Self;

    /// Multiplicative inverse, or `None` for non-units.
    fn inverse_in(&self, ring: &Self::Ring) -> Option<Self>;

    fn is_unity(&self, ring: &Self::Ring) -> bool {
        *self == Self::one_in(ring)
    }

    fn from_integer(value: i64, ring: &Self::Ring) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(value)), ring)
    }
}

impl Coefficient for Rational {
    type Ring = ();

    fn zero_in(_: &()) -> Self {
        Zero::zero()
    }

    fn one_in(_: &()) -> Self {
        One::one()
    }

    fn from_rational(value: Rational, _: &()) -> Self {
        value
    }

    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }

    fn plus(&self, other: &Self, _: &()) -> Self {
        self + other
    }

    fn minus(&self, other: &Self, _: &()) -> Self {
        self - other
    }

    fn times(&self, other: &Self, _: &()) -> Self {
        self * other
    }

    fn negated(&self, _: &()) -> Self {
        -self
    }

    fn scale(&self, factor: &Rational, _: &()) -> Self {
        self * factor
    }

    fn inverse_in(&self, _: &()) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}
