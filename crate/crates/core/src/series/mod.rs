//! Truncated Laurent series in `z` over an exact coefficient ring.
//!
//! A [`Series`] stores a valuation `v`, a precision `p` and the dense
//! coefficients of `z^v .. z^(p-1)`; everything from `z^p` on is unknown.
//! Arithmetic propagates precision the usual way: sums keep the smaller
//! precision, products keep the smaller *relative* order.
//!
//! Two coefficient rings are provided: exact rationals ([`TruncatedSeries`])
//! and polynomials in the marks `t, w` ([`MarkedSeries`]).

mod coefficient;
mod mark;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coefficient::{Coefficient, Rational};
pub use mark::{MarkCap, MarkPoly};

/// Series over exact rationals.
pub type TruncatedSeries = Series<Rational>;
/// Series whose coefficients are polynomials in the marks `t` and `w`.
pub type MarkedSeries = Series<MarkPoly>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("cannot invert a series that is zero to precision z^{precision}")]
    ZeroSeries { precision: i64 },
    #[error("leading coefficient at z^{valuation} is not a unit")]
    NonUnitLeading { valuation: i64 },
    #[error("square root needs valuation 0 and constant term 1 (got valuation {valuation})")]
    SqrtRadicand { valuation: i64 },
    #[error("coefficient of z^{n} is beyond the known precision z^{precision}")]
    OutOfRange { n: i64, precision: i64 },
    #[error("malformed series JSON: {0}")]
    InvalidJson(String),
    #[error("coefficient of z^{n} is {value}, not an integer")]
    NotInteger { n: i64, value: String },
}

#[derive(Clone, PartialEq)]
pub struct Series<C: Coefficient> {
    ring: C::Ring,
    valuation: i64,
    /// `coeffs[i]` multiplies `z^(valuation + i)`; the length is always
    /// `precision - valuation`.
    coeffs: Vec<C>,
}

impl<C: Coefficient> Series<C> {
    /// Builds `sum coeffs[i] z^(valuation+i) + O(z^precision)`. Coefficients at
    /// or beyond `precision` are discarded; missing ones are zero.
    pub fn new(ring: C::Ring, valuation: i64, mut coeffs: Vec<C>, precision: i64) -> Self {
        let len = (precision - valuation).max(0) as usize;
        coeffs.truncate(len);
        coeffs.resize(len, C::zero_in(&ring));
        let mut s = Series {
            ring,
            valuation: valuation.min(precision),
            coeffs,
        };
        s.normalize();
        s
    }

    pub fn zero(ring: C::Ring, precision: i64) -> Self {
        Series {
            ring,
            valuation: precision,
            coeffs: Vec::new(),
        }
    }

    pub fn one(ring: C::Ring, precision: i64) -> Self {
        Self::monomial(C::one_in(&ring), 0, ring, precision)
    }

    /// `c * z^exp + O(z^precision)`.
    pub fn monomial(c: C, exp: i64, ring: C::Ring, precision: i64) -> Self {
        Self::new(ring, exp, vec![c], precision)
    }

    /// Polynomial with small integer coefficients listed from `z^0` upwards.
    pub fn poly(ring: C::Ring, coeffs: &[i64], precision: i64) -> Self {
        let cs = coeffs.iter().map(|&c| C::from_integer(c, &ring)).collect();
        Self::new(ring, 0, cs, precision)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.vanishes()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.valuation += lead as i64;
        }
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    /// Exponent of the first nonzero coefficient; equals the precision for
    /// a series that is zero to its known order.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Coefficients of `z^n` are known exactly for `n < precision`.
    pub fn precision(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64
    }

    /// Number of known coefficients past the valuation.
    pub fn relative_order(&self) -> i64 {
        self.coeffs.len() as i64
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.first()
    }

    /// Exact coefficient of `z^n`; coefficients past the precision are an
    /// error, never silently zero.
    pub fn coeff(&self, n: i64) -> Result<C, SeriesError> {
        if n >= self.precision() {
            return Err(SeriesError::OutOfRange {
                n,
                precision: self.precision(),
            });
        }
        Ok(self.coeff_unchecked(n))
    }

    fn coeff_unchecked(&self, n: i64) -> C {
        if n < self.valuation {
            C::zero_in(&self.ring)
        } else {
            self.coeffs[(n - self.valuation) as usize].clone()
        }
    }

    /// Coefficients of `z^from ..= z^to`.
    pub fn coeffs_range(&self, from: i64, to: i64) -> Result<Vec<C>, SeriesError> {
        (from..=to).map(|n| self.coeff(n)).collect()
    }

    /// Drops everything from `z^precision` on. Never raises the precision.
    pub fn truncate(&self, precision: i64) -> Self {
        let p = precision.min(self.precision());
        let keep = (p - self.valuation).max(0) as usize;
        Self::new(
            self.ring.clone(),
            self.valuation.min(p),
            self.coeffs[..keep.min(self.coeffs.len())].to_vec(),
            p,
        )
    }

    /// True when both series agree on every coefficient below `precision`.
    pub fn agrees_with(&self, other: &Self, precision: i64) -> bool {
        if precision > self.precision() || precision > other.precision() {
            return false;
        }
        let from = self.valuation.min(other.valuation);
        (from..precision).all(|n| self.coeff_unchecked(n) == other.coeff_unchecked(n))
    }

    fn check_ring(&self, other: &Self) {
        assert_eq!(self.ring, other.ring, "series over different rings");
    }

    fn add_like(&self, other: &Self, negate: bool) -> Self {
        self.check_ring(other);
        let precision = self.precision().min(other.precision());
        let valuation = self.valuation.min(other.valuation).min(precision);
        let coeffs = (valuation..precision)
            .map(|n| {
                let a = self.coeff_unchecked(n);
                let b = other.coeff_unchecked(n);
                if negate {
                    a.minus(&b, &self.ring)
                } else {
                    a.plus(&b, &self.ring)
                }
            })
            .collect();
        Self::new(self.ring.clone(), valuation, coeffs, precision)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_like(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_like(other, true)
    }

    pub fn neg(&self) -> Self {
        Series {
            ring: self.ring.clone(),
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| c.negated(&self.ring)).collect(),
        }
    }

    /// Cauchy product; relative order is the smaller of the two.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_ring(other);
        let valuation = self.valuation + other.valuation;
        let rel = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![C::zero_in(&self.ring); rel];
        for (i, a) in self.coeffs.iter().take(rel).enumerate() {
            if a.vanishes() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(rel - i).enumerate() {
                if b.vanishes() {
                    continue;
                }
                let prod = a.times(b, &self.ring);
                coeffs[i + j] = coeffs[i + j].plus(&prod, &self.ring);
            }
        }
        Self::new(self.ring.clone(), valuation, coeffs, valuation + rel as i64)
    }

    /// Multiplies every coefficient by a ring element.
    pub fn mul_coeff(&self, c: &C) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.times(c, &self.ring)).collect();
        Self::new(self.ring.clone(), self.valuation, coeffs, self.precision())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.scale(factor, &self.ring))
            .collect();
        Self::new(self.ring.clone(), self.valuation, coeffs, self.precision())
    }

    /// Exact multiplication by `z^k` (shifts valuation and precision).
    pub fn shift(&self, k: i64) -> Self {
        Series {
            ring: self.ring.clone(),
            valuation: self.valuation + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `1 / self` to the available relative order.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let lead = self.coeffs.first().ok_or(SeriesError::ZeroSeries {
            precision: self.precision(),
        })?;
        let lead_inv = lead
            .inverse_in(&self.ring)
            .ok_or(SeriesError::NonUnitLeading {
                valuation: self.valuation,
            })?;
        let neg_lead_inv = lead_inv.negated(&self.ring);
        let rel = self.coeffs.len();
        let mut out: Vec<C> = Vec::with_capacity(rel);
        out.push(lead_inv);
        for k in 1..rel {
            let mut acc = C::zero_in(&self.ring);
            for i in 1..=k {
                let a = &self.coeffs[i];
                if !a.vanishes() {
                    acc = acc.plus(&a.times(&out[k - i], &self.ring), &self.ring);
                }
            }
            out.push(acc.times(&neg_lead_inv, &self.ring));
        }
        Ok(Self::new(
            self.ring.clone(),
            -self.valuation,
            out,
            -self.valuation + rel as i64,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.invert()?))
    }

    /// Square root with constant term 1 of a series with valuation 0 and
    /// constant term 1, by the coefficient recursion
    /// `2 b_k = a_k - sum_{0<i<k} b_i b_{k-i}`.
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        let unit =
            self.valuation == 0 && self.coeffs.first().is_some_and(|c| c.is_unity(&self.ring));
        if !unit {
            return Err(SeriesError::SqrtRadicand {
                valuation: self.valuation,
            });
        }
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let rel = self.coeffs.len();
        let mut out: Vec<C> = Vec::with_capacity(rel);
        out.push(C::one_in(&self.ring));
        for k in 1..rel {
            let mut acc = self.coeffs[k].clone();
            for i in 1..k {
                if out[i].vanishes() || out[k - i].vanishes() {
                    continue;
                }
                acc = acc.minus(&out[i].times(&out[k - i], &self.ring), &self.ring);
            }
            out.push(acc.scale(&half, &self.ring));
        }
        Ok(Self::new(self.ring.clone(), 0, out, rel as i64))
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring.clone(), self.relative_order().max(0));
        // `one` at the base's relative order keeps the product's order right.
        while exp > 0 {
            if exp & 1 == 1 {
                acc = Series::mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = Series::mul(&base, &base);
            }
        }
        acc
    }

    /// Applies `f` to every coefficient, producing a series over another ring.
    pub fn map<D: Coefficient>(&self, ring: D::Ring, f: impl Fn(&C) -> D) -> Series<D> {
        let coeffs = self.coeffs.iter().map(f).collect();
        Series::new(ring, self.valuation, coeffs, self.precision())
    }
}

impl<C: Coefficient> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Series")
            .field("valuation", &self.valuation)
            .field("precision", &self.precision())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a, C: Coefficient> $tr<&'a Series<C>> for &'a Series<C> {
            type Output = Series<C>;
            fn $method(self, rhs: &'a Series<C>) -> Series<C> {
                Series::$method(self, rhs)
            }
        }
        impl<C: Coefficient> $tr<Series<C>> for Series<C> {
            type Output = Series<C>;
            fn $method(self, rhs: Series<C>) -> Series<C> {
                Series::$method(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<C: Coefficient> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series::neg(self)
    }
}

impl<C: Coefficient> Neg for Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series::neg(&self)
    }
}

impl TruncatedSeries {
    pub fn rational_poly(coeffs: &[i64], precision: i64) -> Self {
        Self::poly((), coeffs, precision)
    }

    /// The variable `z` itself.
    pub fn z(precision: i64) -> Self {
        Self::monomial(<Rational as One>::one(), 1, (), precision)
    }

    /// Coefficients of `z^0 ..= z^order` as exact integers. A fractional
    /// coefficient means a formula went wrong and is reported as an error.
    pub fn integer_coeffs(&self, order: i64) -> Result<Vec<BigInt>, SeriesError> {
        (0..=order)
            .map(|n| {
                let c = self.coeff(n)?;
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(SeriesError::NotInteger {
                        n,
                        value: c.to_string(),
                    })
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            valuation: self.valuation,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self, SeriesError> {
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|_| SeriesError::InvalidJson(s.to_string()))
        };
        let coeffs = json
            .coeffs
            .iter()
            .map(|[p, q]| {
                let (p, q) = (parse(p)?, parse(q)?);
                if Zero::is_zero(&q) {
                    return Err(SeriesError::InvalidJson("zero denominator".into()));
                }
                Ok(Rational::new(p, q))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let precision = json.valuation + coeffs.len() as i64;
        Ok(Self::new((), json.valuation, coeffs, precision))
    }
}

impl MarkedSeries {
    /// Forgets the marks by substituting numeric values for `t` and `w`.
    pub fn substitute(&self, t: &Rational, w: &Rational) -> TruncatedSeries {
        self.map((), |p| p.evaluate(t, w))
    }

    pub fn mark_cap(&self) -> MarkCap {
        self.ring
    }
}

/// JSON shape of a rational series: arbitrary-precision integers as
/// decimal strings, one `[numerator, denominator]` pair per coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub valuation: i64,
    pub coeffs: Vec<[String; 2]>,
}

impl fmt::Display for TruncatedSeries {
    /// Sparse `c*z^k` terms joined by ` + `, followed by the `O(z^p)` tail.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let k = self.valuation + i as i64;
            if c.is_negative() {
                write!(f, "-{}*z^{k}", c.abs())?;
            } else {
                write!(f, "{c}*z^{k}")?;
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(z^{})", self.precision())
    }
}
