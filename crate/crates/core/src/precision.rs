//! Arbitrary-precision binary floats with a decimal precision setting.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;

const RM: RoundingMode = RoundingMode::ToEven;
/// Extra binary digits carried beyond the requested decimal precision.
const GUARD_BITS: usize = 64;

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;

/// Mantissa bits needed for `digits` significant decimal digits plus a guard.
pub fn bits_for(digits: u32) -> usize {
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS;
    // astro-float mantissas are whole 64-bit words.
    bits.div_ceil(64) * 64
}

/// A float tagged with its working precision. Binary operations run at the
/// larger of the two operand precisions.
#[derive(Clone, Debug)]
pub struct HighPrecision {
    value: BigFloat,
    bits: usize,
}

fn consts() -> Consts {
    Consts::new().expect("astro-float constant cache")
}

impl HighPrecision {
    fn wrap(value: BigFloat, bits: usize) -> Self {
        HighPrecision { value, bits }
    }

    pub fn from_f64(x: f64, digits: u32) -> Self {
        let bits = bits_for(digits);
        Self::wrap(BigFloat::from_f64(x, bits), bits)
    }

    pub fn from_i64(x: i64, digits: u32) -> Self {
        Self::parse(&x.to_string(), digits).expect("integer literal")
    }

    /// Rounds an exact integer to the working precision.
    pub fn from_bigint(x: &BigInt, digits: u32) -> Self {
        Self::parse(&x.to_string(), digits).expect("integer literal")
    }

    /// Parses a decimal literal such as `0.2955` or `-1.5e-3`.
    pub fn parse(s: &str, digits: u32) -> Option<Self> {
        let bits = bits_for(digits);
        let v = BigFloat::parse(s, Radix::Dec, bits, RM, &mut consts());
        (!v.is_nan()).then(|| Self::wrap(v, bits))
    }

    pub fn pi(digits: u32) -> Self {
        let bits = bits_for(digits);
        Self::wrap(consts().pi(bits, RM), bits)
    }

    /// Working precision in bits.
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Decimal digits guaranteed by the working precision.
    pub fn digits(&self) -> u32 {
        ((self.bits - GUARD_BITS) as f64 / std::f64::consts::LOG2_10).floor() as u32
    }

    /// Same value at another working precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        let bits = bits_for(digits);
        let mut v = self.value.clone();
        v.set_precision(bits, RM).expect("precision change");
        Self::wrap(v, bits)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.value.sqrt(self.bits, RM), self.bits)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(self.value.ln(self.bits, RM, &mut consts()), self.bits)
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = Self::wrap(
            self.value.powi(n.unsigned_abs() as usize, self.bits, RM),
            self.bits,
        );
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.value.reciprocal(self.bits, RM), self.bits)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.bits)
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative() && !self.value.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// False for NaN and infinities.
    pub fn is_finite(&self) -> bool {
        !(self.value.is_nan() || self.value.is_inf())
    }

    pub fn to_f64(&self) -> f64 {
        self.scientific()
            .and_then(|s| s.parse().ok())
            .unwrap_or(f64::NAN)
    }

    fn scientific(&self) -> Option<String> {
        if !self.is_finite() {
            return None;
        }
        self.value.format(Radix::Dec, RM, &mut consts()).ok()
    }

    /// Decimal rendering rounded to `digits` significant digits, in plain
    /// positional notation when the exponent is moderate.
    pub fn to_decimal(&self, digits: u32) -> String {
        match self.scientific() {
            Some(s) => render_decimal(&s, digits.max(1) as usize),
            None => "NaN".to_string(),
        }
    }
}

/// Rounds the mantissa of an astro-float scientific string
/// (`[-]d.ddd[e[+-]x]`) half-up to `digits` significant digits.
fn render_decimal(sci: &str, digits: usize) -> String {
    let (neg, body) = match sci.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, sci),
    };
    let (mantissa, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut ds: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes())
        .map(|b| b - b'0')
        .collect();
    // Exponent of the first digit in `ds`.
    let mut lead_exp = exp + int_part.len() as i64 - 1;
    let first = ds.iter().position(|&d| d != 0);
    let Some(first) = first else {
        return "0".to_string();
    };
    ds.drain(..first);
    lead_exp -= first as i64;
    if ds.len() > digits {
        let round_up = ds[digits] >= 5;
        ds.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    lead_exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    while ds.len() > 1 && ds.last() == Some(&0) {
        ds.pop();
    }
    let text: String = ds.iter().map(|d| char::from(b'0' + d)).collect();
    let sign = if neg { "-" } else { "" };
    if (-30..=30).contains(&lead_exp) {
        if lead_exp < 0 {
            let zeros = "0".repeat((-lead_exp - 1) as usize);
            format!("{sign}0.{zeros}{text}")
        } else {
            let int_len = lead_exp as usize + 1;
            if text.len() <= int_len {
                format!("{sign}{text}{}", "0".repeat(int_len - text.len()))
            } else {
                format!("{sign}{}.{}", &text[..int_len], &text[int_len..])
            }
        }
    } else {
        let (head, tail) = text.split_at(1);
        let dot = if tail.is_empty() { "" } else { "." };
        format!("{sign}{head}{dot}{tail}e{lead_exp}")
    }
}

impl fmt::Display for HighPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(self.digits()))
    }
}

impl PartialEq for HighPrecision {
    fn eq(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }
}

impl PartialOrd for HighPrecision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&HighPrecision> for &HighPrecision {
            type Output = HighPrecision;
            fn $method(self, rhs: &HighPrecision) -> HighPrecision {
                let bits = self.bits.max(rhs.bits);
                HighPrecision::wrap(self.value.$method(&rhs.value, bits, RM), bits)
            }
        }
        impl $tr<HighPrecision> for HighPrecision {
            type Output = HighPrecision;
            fn $method(self, rhs: HighPrecision) -> HighPrecision {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&HighPrecision> for HighPrecision {
            type Output = HighPrecision;
            fn $method(self, rhs: &HighPrecision) -> HighPrecision {
                (&self).$method(rhs)
            }
        }
        impl $tr<HighPrecision> for &HighPrecision {
            type Output = HighPrecision;
            fn $method(self, rhs: HighPrecision) -> HighPrecision {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &HighPrecision {
    type Output = HighPrecision;
    fn neg(self) -> HighPrecision {
        HighPrecision::wrap(-self.value.clone(), self.bits)
    }
}

impl Neg for HighPrecision {
    type Output = HighPrecision;
    fn neg(self) -> HighPrecision {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_pi_to_forty_digits() {
        let r = HighPrecision::pi(50).sqrt();
        assert_eq!(
            r.to_decimal(40),
            "1.772453850905516027298167483341145182798"
        );
    }

    #[test]
    fn decimal_rounding_carries() {
        assert_eq!(render_decimal("9.9996e+0", 4), "10");
        assert_eq!(render_decimal("-1.2345e-4", 3), "-0.000123");
        assert_eq!(render_decimal("1.5e+40", 5), "1.5e40");
        assert_eq!(render_decimal("0.0", 5), "0");
        assert_eq!(render_decimal("2.5e+2", 2), "250");
    }

    #[test]
    fn arithmetic_and_ordering() {
        let a = HighPrecision::from_i64(1, 30);
        let three = HighPrecision::from_i64(3, 30);
        let third = &a / &three;
        assert_eq!(third.to_decimal(10), "0.3333333333");
        assert!(third < a);
        assert!((-&third).is_negative());
        assert!((&third * &three - &a).abs().to_f64() < 1e-40);
        assert_eq!(three.powi(-2).to_decimal(5), "0.11111");
    }

    #[test]
    fn big_integers_round_trip() {
        let n: BigInt = "123456789012345678901234567890".parse().unwrap();
        let x = HighPrecision::from_bigint(&n, 40);
        assert_eq!(x.to_decimal(30), "123456789012345678901234567890");
    }

    #[test]
    fn log_of_e_squared() {
        let e2 = HighPrecision::parse("7.389056098930650227230427460575", 40).unwrap();
        assert!((e2.ln().to_f64() - 2.0).abs() < 1e-15);
    }
}
