//! Polynomials in the step marks `t` (flat steps) and `w` (left steps),
//! truncated by the ideal `(t^(cap+1), w^(cap+1))`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::coefficient::{Coefficient, Rational};

/// Degree cap applied independently to `t` and `w` after every ring operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkCap(pub u32);

/// Sparse polynomial `sum c[a,b] t^a w^b` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MarkPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl MarkPoly {
    pub fn constant(value: Rational) -> Self {
        let mut p = MarkPoly::default();
        p.push((0, 0), value);
        p
    }

    /// `coefficient * t^flats * w^lefts`, dropped if it exceeds the cap.
    pub fn monomial(coefficient: Rational, flats: u32, lefts: u32, cap: MarkCap) -> Self {
        let mut p = MarkPoly::default();
        if flats <= cap.0 && lefts <= cap.0 {
            p.push((flats, lefts), coefficient);
        }
        p
    }

    pub fn t(cap: MarkCap) -> Self {
        Self::monomial(<Rational as One>::one(), 1, 0, cap)
    }

    pub fn w(cap: MarkCap) -> Self {
        Self::monomial(<Rational as One>::one(), 0, 1, cap)
    }

    fn push(&mut self, key: (u32, u32), value: Rational) {
        if Zero::is_zero(&value) {
            return;
        }
        let slot = self
            .terms
            .entry(key)
            .or_insert_with(<Rational as Zero>::zero);
        *slot += value;
        if Zero::is_zero(slot) {
            self.terms.remove(&key);
        }
    }

    /// Coefficient of `t^flats w^lefts`.
    pub fn get(&self, flats: u32, lefts: u32) -> Rational {
        self.terms
            .get(&(flats, lefts))
            .cloned()
            .unwrap_or_else(<Rational as Zero>::zero)
    }

    /// Nonzero terms as `((flats, lefts), coefficient)`, sorted by exponents.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `t` and `w` exponents present.
    pub fn degrees(&self) -> (u32, u32) {
        self.terms
            .keys()
            .fold((0, 0), |(ta, wb), &(a, b)| (ta.max(a), wb.max(b)))
    }

    pub fn evaluate(&self, t: &Rational, w: &Rational) -> Rational {
        self.terms
            .iter()
            .fold(<Rational as Zero>::zero(), |acc, (&(a, b), c)| {
                acc + c * pow(t, a) * pow(w, b)
            })
    }

    /// Builds a polynomial from `(flats, lefts, integer coefficient)` triples.
    pub fn from_integer_terms(terms: &[(u32, u32, i64)], cap: MarkCap) -> Self {
        let mut p = MarkPoly::default();
        for &(a, b, c) in terms {
            if a <= cap.0 && b <= cap.0 {
                p.push((a, b), Rational::from_integer(BigInt::from(c)));
            }
        }
        p
    }
}

fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

impl Coefficient for MarkPoly {
    type Ring = MarkCap;

    fn zero_in(_: &MarkCap) -> Self {
        MarkPoly::default()
    }

    fn one_in(_: &MarkCap) -> Self {
        MarkPoly::constant(<Rational as One>::one())
    }

    fn from_rational(value: Rational, _: &MarkCap) -> Self {
        MarkPoly::constant(value)
    }

    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }

    fn plus(&self, other: &Self, _: &MarkCap) -> Self {
        let mut out = self.clone();
        for (&k, v) in &other.terms {
            out.push(k, v.clone());
        }
        out
    }

    fn minus(&self, other: &Self, _: &MarkCap) -> Self {
        let mut out = self.clone();
        for (&k, v) in &other.terms {
            out.push(k, -v);
        }
        out
    }

    fn times(&self, other: &Self, cap: &MarkCap) -> Self {
        let mut out = MarkPoly::default();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                let (a, b) = (a1 + a2, b1 + b2);
                if a <= cap.0 && b <= cap.0 {
                    out.push((a, b), c1 * c2);
                }
            }
        }
        out
    }

    fn negated(&self, _: &MarkCap) -> Self {
        MarkPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, -v)).collect(),
        }
    }

    fn scale(&self, factor: &Rational, _: &MarkCap) -> Self {
        if Zero::is_zero(factor) {
            return MarkPoly::default();
        }
        MarkPoly {
            terms: self.terms.iter().map(|(&k, v)| (k, v * factor)).collect(),
        }
    }

    /// Units of the quotient ring are exactly the polynomials with a nonzero
    /// constant term; the inverse is a finite geometric sum because the
    /// non-constant part is nilpotent.
    fn inverse_in(&self, cap: &MarkCap) -> Option<Self> {
        let c = self.terms.get(&(0, 0))?.clone();
        let c_inv = c.recip();
        let mut rest = self.clone();
        rest.terms.remove(&(0, 0));
        let ratio = rest.scale(&(-&c_inv), cap);
        let mut term = MarkPoly::constant(c_inv);
        let mut acc = term.clone();
        while !term.is_empty() {
            term = term.times(&ratio, cap);
            acc = acc.plus(&term, cap);
        }
        Some(acc)
    }
}

impl fmt::Display for MarkPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            if a > 0 {
                factors.push(if a == 1 {
                    "t".to_string()
                } else {
                    format!("t^{a}")
                });
            }
            if b > 0 {
                factors.push(if b == 1 {
                    "w".to_string()
                } else {
                    format!("w^{b}")
                });
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn product_respects_cap() {
        let cap = MarkCap(2);
        let t = MarkPoly::t(cap);
        let t2 = t.times(&t, &cap);
        assert_eq!(t2.get(2, 0), q(1));
        assert!(t2.times(&t, &cap).is_empty());
    }

    #[test]
    fn inverse_of_one_plus_wt_is_alternating() {
        let cap = MarkCap(3);
        let p = MarkPoly::from_integer_terms(&[(0, 0, 1), (1, 1, 1)], cap);
        let inv = p.inverse_in(&cap).unwrap();
        for k in 0..=3u32 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(inv.get(k, k), q(sign));
        }
        assert_eq!(inv.len(), 4);
        assert_eq!(p.times(&inv, &cap), MarkPoly::one_in(&cap));
    }

    #[test]
    fn non_unit_has_no_inverse() {
        let cap = MarkCap(3);
        assert!(MarkPoly::t(cap).inverse_in(&cap).is_none());
    }

    #[test]
    fn display_orders_by_exponents() {
        let cap = MarkCap(8);
        let p = MarkPoly::from_integer_terms(
            &[(0, 0, 2), (2, 0, 6), (0, 1, 1), (2, 1, 3), (4, 0, 1)],
            cap,
        );
        assert_eq!(p.to_string(), "2 + w + 6*t^2 + 3*t^2*w + t^4");
    }
}
