//! Numeric singularity analysis of the return series and the average height.
//!
//! Everything is recomputed from the dominant singularity `rho` (the root of
//! `1 - 3z - z^2 - z^3`) and exact polynomial data. The height constants are
//! obtained twice: from a ladder `z = rho (1 - 10^-k)` with polynomial
//! extrapolation in `sqrt(rho - z)`, and from the exact limit after the
//! removable `sqrt(rho - z)` factor has been divided out algebraically.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::dpcount::{height_distribution, CountOptions, CountTable};
use crate::precision::HighPrecision as Hp;

/// Smallest accepted precision for `find_rho`.
pub const MIN_RHO_DIGITS: u32 = 10;
/// Smallest accepted precision for `height_constants`.
pub const MIN_HEIGHT_DIGITS: u32 = 15;
/// Ladder exponents `k` in `z = rho (1 - 10^-k)`.
pub const LADDER: std::ops::RangeInclusive<u32> = 6..=12;
/// Significant digits on which successive ladder extrapolations must agree.
pub const LADDER_AGREEMENT: f64 = 9.0;
/// Lengths checked by default in the report.
pub const DEFAULT_CHECK_N: [usize; 4] = [50, 100, 200, 400];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticError {
    #[error("{digits} digits requested; at least {min} are required")]
    Precision { digits: u32, min: u32 },
    #[error("ladder estimates of {name} agree to {agreed:.1} significant digits, need {required}")]
    Unstable {
        name: &'static str,
        agreed: f64,
        required: f64,
    },
    #[error("length must be at least 1")]
    ZeroLength,
}

fn int(n: i64, digits: u32) -> Hp {
    Hp::from_i64(n, digits)
}

/// `1 - 3z - z^2 - z^3`.
pub fn rho_polynomial(z: &Hp) -> Hp {
    let d = z.digits();
    let z2 = z * z;
    let z3 = &z2 * z;
    int(1, d) - int(3, d) * z - z2 - z3
}

fn rho_derivative(z: &Hp) -> Hp {
    let d = z.digits();
    -(int(3, d) + int(2, d) * z + int(3, d) * z * z)
}

/// The unique root of `1 - 3z - z^2 - z^3` in `(0, 1/3]`: bisection down
/// to double precision, then Newton steps until the residual is below
/// `10^(2 - digits)`.
pub fn find_rho(digits: u32) -> Result<Hp, AsymptoticError> {
    if digits < MIN_RHO_DIGITS {
        return Err(AsymptoticError::Precision {
            digits,
            min: MIN_RHO_DIGITS,
        });
    }
    let mut lo = int(0, digits);
    let mut hi = int(1, digits) / int(3, digits);
    let half = Hp::parse("0.5", digits).expect("literal");
    for _ in 0..60 {
        let mid = (&lo + &hi) * &half;
        if rho_polynomial(&mid).is_negative() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tol = Hp::parse(&format!("1e{}", 2 - digits as i64), digits).expect("literal");
    let mut z = (&lo + &hi) * &half;
    // Quadratic convergence from ~18 correct digits; the cap is only a guard.
    for _ in 0..32 {
        let r = rho_polynomial(&z);
        if r.abs() < tol {
            break;
        }
        z = &z - &r / rho_derivative(&z);
    }
    Ok(z)
}

/// Constants of the square-root singularity of the return series.
#[derive(Clone, Debug)]
pub struct CountConstants {
    pub rho: Hp,
    /// Value of the return series at `rho`: `(1 - rho)^2 / (2 rho^2)`.
    pub a0: Hp,
    /// `(1 - rho)(3 + 2 rho + 3 rho^2)`.
    pub c: Hp,
    /// `sqrt(c rho) / (2 rho^2)`, the coefficient of `sqrt(1 - z/rho)`.
    pub amp: Hp,
}

pub fn count_constants(digits: u32) -> Result<CountConstants, AsymptoticError> {
    let rho = find_rho(digits)?;
    let one = int(1, digits);
    let two = int(2, digits);
    let rho2 = &rho * &rho;
    let a0 = (&one - &rho) * (&one - &rho) / (&two * &rho2);
    let c = (&one - &rho) * (int(3, digits) + &two * &rho + int(3, digits) * &rho2);
    let amp = (&c * &rho).sqrt() / (&two * &rho2);
    Ok(CountConstants { rho, a0, c, amp })
}

/// A leading-order estimate next to the exact value it approximates.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub n: usize,
    pub exact: BigRational,
    pub estimate: Hp,
    /// `|estimate - exact| / exact`; `None` when `exact` is zero.
    pub rel_error: Option<Hp>,
}

impl Estimate {
    fn new(n: usize, exact: BigRational, estimate: Hp) -> Self {
        let d = estimate.digits();
        let exact_hp = Hp::from_bigint(exact.numer(), d) / Hp::from_bigint(exact.denom(), d);
        let rel_error = (!exact_hp.is_zero()).then(|| ((&estimate - &exact_hp) / &exact_hp).abs());
        Estimate {
            n,
            exact,
            estimate,
            rel_error,
        }
    }

    pub fn rel_error_f64(&self) -> Option<f64> {
        self.rel_error.as_ref().map(Hp::to_f64)
    }
}

/// `amp / (2 sqrt(pi)) * rho^-n * n^(-3/2)` against an exact count.
pub fn count_estimate(
    n: usize,
    exact: &BigInt,
    constants: &CountConstants,
) -> Result<Estimate, AsymptoticError> {
    if n == 0 {
        return Err(AsymptoticError::ZeroLength);
    }
    let d = constants.rho.digits();
    let nn = int(n as i64, d);
    let two_sqrt_pi = int(2, d) * Hp::pi(d).sqrt();
    let estimate =
        &constants.amp / two_sqrt_pi * constants.rho.powi(-(n as i64)) / (&nn * nn.sqrt());
    Ok(Estimate::new(
        n,
        BigRational::from_integer(exact.clone()),
        estimate,
    ))
}

/// Count estimates at each length, with exact counts from the DP table.
pub fn count_estimates(
    ns: &[usize],
    constants: &CountConstants,
) -> Result<Vec<Estimate>, AsymptoticError> {
    let max = ns.iter().copied().max().unwrap_or(0);
    let table = CountTable::build(max, CountOptions::default());
    ns.iter()
        .map(|&n| {
            let exact = table.count(n, 0).expect("table covers every length");
            count_estimate(n, &BigInt::from(exact), constants)
        })
        .collect()
}

/// Values of the two height extractors at one ladder point.
#[derive(Clone, Debug)]
pub struct LadderPoint {
    pub k: u32,
    pub z: Hp,
    /// `2 omega (QR - PS) / (R + S omega)^2 / sqrt(rho - z)`.
    pub k_diff: Hp,
    /// `(1 - (a - omega)/(a + omega)) / sqrt(rho - z)`.
    pub k_exp: Hp,
}

#[derive(Clone, Debug)]
pub struct HeightConstants {
    /// Extrapolated ladder values.
    pub k_diff: Hp,
    pub k_exp: Hp,
    /// `k_diff / (2 k_exp)`, the coefficient of `-log(rho - z)`.
    pub k_log: Hp,
    /// `2 k_log / amp`, so that the mean height is `k_height sqrt(pi n)`.
    pub k_height: Hp,
    /// Exact limits at `z = rho`, an independent route to `k_diff`, `k_exp`.
    pub k_diff_limit: Hp,
    pub k_exp_limit: Hp,
    pub ladder: Vec<LadderPoint>,
    /// Significant digits shared by the last two extrapolations.
    pub agreement: f64,
}

/// Polynomial pieces of the bounded-height closed form at a numeric `z`:
/// `Ao = P + Q w`, `Bo = P - Q w`, `Au = R + S w`, `Bu = R - S w`.
struct Pieces {
    p: Hp,
    q: Hp,
    r: Hp,
    s: Hp,
    a: Hp,
}

fn pieces(z: &Hp) -> Pieces {
    let d = z.digits();
    let one = int(1, d);
    let z2 = z * z;
    let z3 = &z2 * z;
    // z^3 + z^2 + 3z - 1
    let cubic = &z3 + &z2 + int(3, d) * z - &one;
    Pieces {
        p: &cubic * (z + &one),
        q: z - &one,
        r: (&one - &z2) * &cubic,
        s: (&z3 - &z2 + int(3, d) * z - &one) / (&one - z),
        a: &one - z + &z2 + &z3,
    }
}

/// `(1 + z) sqrt(1 - 4z + 2z^2 + z^4)`, evaluated as written.
fn omega(z: &Hp) -> Hp {
    let d = z.digits();
    let z2 = z * z;
    let radicand = int(1, d) - int(4, d) * z + int(2, d) * &z2 + &z2 * &z2;
    (z + int(1, d)) * radicand.sqrt()
}

fn ladder_point(rho: &Hp, k: u32) -> LadderPoint {
    let d = rho.digits();
    let delta = Hp::parse(&format!("1e-{k}"), d).expect("literal");
    let gap = rho * &delta;
    let z = rho - &gap;
    let root_gap = gap.sqrt();
    let w = omega(&z);
    let Pieces { p, q, r, s, a } = pieces(&z);
    let numer = int(2, d) * &w * (&q * &r - &p * &s);
    let au = &r + &s * &w;
    let k_diff = numer / (&au * &au) / &root_gap;
    let ratio = (&a - &w) / (&a + &w);
    let k_exp = (int(1, d) - ratio) / &root_gap;
    LadderPoint {
        k,
        z,
        k_diff,
        k_exp,
    }
}

/// Neville extrapolation to `x = 0` of the points `(xs[i], ys[i])`; returns
/// the estimate from all points and from all but the last.
fn extrapolate_to_zero(xs: &[Hp], ys: &[Hp]) -> (Hp, Hp) {
    let n = xs.len();
    assert!(n >= 2 && ys.len() == n);
    let mut table: Vec<Hp> = ys.to_vec();
    let mut previous = table[n - 2].clone();
    // After round m, table[i] interpolates points i..=i+m.
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (&xs[i], &xs[i + m]);
            table[i] = (xi * &table[i + 1] - xj * &table[i]) / (xi - xj);
        }
        if m == n - 2 {
            previous = table[0].clone();
        }
    }
    (table[0].clone(), previous)
}

fn agreement(a: &Hp, b: &Hp) -> f64 {
    if a == b {
        return f64::INFINITY;
    }
    let rel = ((a - b) / b).abs().to_f64();
    -rel.log10()
}

/// Exact limits at `rho`. With `m = 3 + z + rho + z^2 + z rho + rho^2`,
/// `1 - 3z - z^2 - z^3 = (rho - z) m`, so `omega = sqrt(rho - z) W1` with
/// `W1 = (1 + z) sqrt((1 - z) m)` and `R = -(1 - z^2)(rho - z) m`.
fn exact_limits(rho: &Hp) -> (Hp, Hp) {
    let d = rho.digits();
    let one = int(1, d);
    let m = int(3, d) + int(2, d) * rho + int(3, d) * rho * rho;
    let w1 = (rho + &one) * ((&one - rho) * &m).sqrt();
    let Pieces { s, a, .. } = pieces(rho);
    // (QR - PS) / (rho - z) at z = rho.
    let x = (&one - rho) * (&one - rho * rho) + (rho + &one) * &s;
    let k_diff = int(2, d) * &m * x / (&s * &s * &w1);
    let k_exp = int(2, d) * w1 / a;
    (k_diff, k_exp)
}

pub fn height_constants(
    digits: u32,
    counts: &CountConstants,
) -> Result<HeightConstants, AsymptoticError> {
    if digits < MIN_HEIGHT_DIGITS {
        return Err(AsymptoticError::Precision {
            digits,
            min: MIN_HEIGHT_DIGITS,
        });
    }
    let rho = counts.rho.with_digits(digits);
    let ladder: Vec<LadderPoint> = LADDER.map(|k| ladder_point(&rho, k)).collect();
    let xs: Vec<Hp> = ladder.iter().map(|pt| (&rho - &pt.z).sqrt()).collect();
    let diffs: Vec<Hp> = ladder.iter().map(|pt| pt.k_diff.clone()).collect();
    let exps: Vec<Hp> = ladder.iter().map(|pt| pt.k_exp.clone()).collect();
    let (k_diff, k_diff_prev) = extrapolate_to_zero(&xs, &diffs);
    let (k_exp, k_exp_prev) = extrapolate_to_zero(&xs, &exps);
    let agree_diff = agreement(&k_diff, &k_diff_prev);
    let agree_exp = agreement(&k_exp, &k_exp_prev);
    for (name, agreed) in [("K_diff", agree_diff), ("K_exp", agree_exp)] {
        if agreed.is_nan() || agreed < LADDER_AGREEMENT {
            return Err(AsymptoticError::Unstable {
                name,
                agreed,
                required: LADDER_AGREEMENT,
            });
        }
    }
    let k_log = &k_diff / (int(2, digits) * &k_exp);
    let k_height = int(2, digits) * &k_log / counts.amp.with_digits(digits);
    let (k_diff_limit, k_exp_limit) = exact_limits(&rho);
    Ok(HeightConstants {
        k_diff,
        k_exp,
        k_log,
        k_height,
        k_diff_limit,
        k_exp_limit,
        ladder,
        agreement: agree_diff.min(agree_exp),
    })
}

/// `k_height sqrt(pi n)` against the exact mean height of return paths of
/// length `n`.
pub fn expected_height_estimate(n: usize, k_height: &Hp) -> Estimate {
    let d = k_height.digits();
    let exact = height_distribution(n).expected_height;
    let estimate = k_height * (Hp::pi(d) * int(n as i64, d)).sqrt();
    Estimate::new(n, exact, estimate)
}

/// Reference decimal values the report compares against, with tolerances.
pub const REFERENCES: [(&str, &str, f64); 8] = [
    ("rho", "0.295597742522084770980996", 1e-20),
    ("a0", "2.8392867552141611323", 1e-12),
    ("C", "2.714294041", 1e-9),
    ("amp", "5.1256244361431546460", 1e-12),
    ("K_diff", "18.854986275200314363", 1e-9),
    ("K_exp", "5.2213516788791457598", 1e-9),
    ("K_log", "1.8055656307800996608", 1e-9),
    ("K_height", "0.70452513767814089508", 1e-9),
];

#[derive(Clone, Debug, Serialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: String,
    pub reference: String,
    pub delta: String,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateRow {
    pub n: usize,
    pub exact: String,
    pub estimate: String,
    pub rel_error: Option<String>,
}

impl EstimateRow {
    fn from_estimate(e: &Estimate, digits: u32) -> Self {
        EstimateRow {
            n: e.n,
            exact: if e.exact.is_integer() {
                e.exact.numer().to_string()
            } else {
                e.exact.to_string()
            },
            estimate: e.estimate.to_decimal(digits),
            rel_error: e.rel_error.as_ref().map(|r| r.to_decimal(12)),
        }
    }
}

/// Every constant, its reference value and the achieved difference, plus
/// the count and mean-height tables at the requested lengths.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub digits: u32,
    pub constants: Vec<ConstantRow>,
    pub ladder_agreement_digits: f64,
    pub limit_checks: Vec<ConstantRow>,
    pub counts: Vec<EstimateRow>,
    pub heights: Vec<EstimateRow>,
}

impl AsymptoticReport {
    /// Lengths of 0 are skipped in the count table; the mean height of the
    /// empty path is reported without a relative error.
    pub fn build(digits: u32, check_n: &[usize]) -> Result<Self, AsymptoticError> {
        let counts = count_constants(digits)?;
        let heights = height_constants(digits, &counts)?;
        let shown = digits.min(40);
        let values: [(&str, &Hp); 8] = [
            ("rho", &counts.rho),
            ("a0", &counts.a0),
            ("C", &counts.c),
            ("amp", &counts.amp),
            ("K_diff", &heights.k_diff),
            ("K_exp", &heights.k_exp),
            ("K_log", &heights.k_log),
            ("K_height", &heights.k_height),
        ];
        let constants = values
            .iter()
            .zip(REFERENCES.iter())
            .map(|(&(name, v), &(_, reference, tol))| compare(name, v, reference, tol, shown))
            .collect();
        let limit_checks = vec![
            compare_values(
                "K_diff limit",
                &heights.k_diff_limit,
                &heights.k_diff,
                1e-9,
                shown,
            ),
            compare_values(
                "K_exp limit",
                &heights.k_exp_limit,
                &heights.k_exp,
                1e-9,
                shown,
            ),
        ];
        let lengths: Vec<usize> = check_n.iter().copied().filter(|&n| n > 0).collect();
        let count_rows = count_estimates(&lengths, &counts)?
            .iter()
            .map(|e| EstimateRow::from_estimate(e, shown))
            .collect();
        let height_rows = check_n
            .iter()
            .map(|&n| {
                EstimateRow::from_estimate(&expected_height_estimate(n, &heights.k_height), shown)
            })
            .collect();
        Ok(AsymptoticReport {
            digits,
            constants,
            ladder_agreement_digits: heights.agreement,
            limit_checks,
            counts: count_rows,
            heights: height_rows,
        })
    }

    /// Count table as `n,exact,estimate,rel_error`.
    pub fn counts_csv(&self) -> String {
        let mut out = String::from("n,exact,estimate,rel_error\n");
        for r in &self.counts {
            let rel = r.rel_error.as_deref().unwrap_or("");
            out.push_str(&format!("{},{},{},{}\n", r.n, r.exact, r.estimate, rel));
        }
        out
    }
}

fn compare(name: &str, value: &Hp, reference: &str, tol: f64, shown: u32) -> ConstantRow {
    let target = Hp::parse(reference, value.digits()).expect("reference literal");
    let mut row = compare_values(name, value, &target, tol, shown);
    row.reference = reference.to_string();
    row
}

fn compare_values(name: &str, value: &Hp, target: &Hp, tol: f64, shown: u32) -> ConstantRow {
    let delta = (value - target).abs();
    ConstantRow {
        name: name.to_string(),
        value: value.to_decimal(shown),
        reference: target.to_decimal(shown),
        delta: delta.to_decimal(3),
        tolerance: tol,
        within_tolerance: delta.to_f64() <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(v: &Hp, reference: &str, tol: f64) -> bool {
        let t = Hp::parse(reference, v.digits()).unwrap();
        (v - &t).abs().to_f64() <= tol
    }

    #[test]
    fn rho_to_reference_digits() {
        let rho = find_rho(24).unwrap();
        // The reference digits are truncated, not rounded.
        assert!(close(&rho, "0.295597742522084770980996", 1e-24));
        assert!(rho_polynomial(&rho).abs().to_f64() < 1e-22);
    }

    #[test]
    fn bracket_changes_sign() {
        let lo = rho_polynomial(&Hp::parse("0.29", 20).unwrap());
        let hi = rho_polynomial(&Hp::parse("0.30", 20).unwrap());
        assert!(!lo.is_negative() && hi.is_negative());
    }

    #[test]
    fn low_precision_is_rejected() {
        assert!(matches!(
            find_rho(5),
            Err(AsymptoticError::Precision { .. })
        ));
        let c = count_constants(20).unwrap();
        assert!(height_constants(10, &c).is_err());
    }

    #[test]
    fn count_constants_match() {
        let c = count_constants(50).unwrap();
        assert!(close(&c.a0, "2.8392867552141611323", 1e-12));
        assert!(close(&c.amp, "5.1256244361431546460", 1e-12));
        assert!(close(&c.c, "2.714294041", 1e-9));
    }

    #[test]
    fn ladder_point_is_finite_near_rho() {
        let rho = find_rho(50).unwrap();
        let pt = ladder_point(&rho, 8);
        assert!(pt.k_diff.is_finite() && pt.k_exp.is_finite());
        // Raw ladder values carry an O(sqrt(rho - z)) bias.
        assert!((pt.k_diff.to_f64() - 18.855).abs() < 0.05);
        assert!((pt.k_exp.to_f64() - 5.2214).abs() < 0.05);
    }

    #[test]
    fn ladder_and_limit_agree() {
        let c = count_constants(50).unwrap();
        let h = height_constants(50, &c).unwrap();
        assert!((&h.k_diff - &h.k_diff_limit).abs().to_f64() < 1e-12);
        assert!((&h.k_exp - &h.k_exp_limit).abs().to_f64() < 1e-12);
        assert!(close(&h.k_height, "0.70452513767814089508", 1e-9));
    }

    #[test]
    fn neville_recovers_a_polynomial() {
        let d = 30;
        let xs: Vec<Hp> = (1..=4).map(|i| int(i, d)).collect();
        // y = 7 - 2x + x^2
        let ys: Vec<Hp> = (1..=4).map(|i| int(7 - 2 * i + i * i, d)).collect();
        let (all, _) = extrapolate_to_zero(&xs, &ys);
        assert!((all - int(7, d)).abs().to_f64() < 1e-25);
    }

    #[test]
    fn estimate_at_small_n() {
        let c = count_constants(30).unwrap();
        let e = count_estimate(10, &BigInt::from(6905), &c).unwrap();
        let rel = e.rel_error_f64().unwrap();
        assert!(rel > 0.0 && rel < 0.4, "{rel}");
        assert_eq!(
            count_estimate(0, &BigInt::from(1), &c).unwrap_err(),
            AsymptoticError::ZeroLength
        );
    }

    #[test]
    fn empty_path_height_has_no_relative_error() {
        let e = expected_height_estimate(0, &int(1, 20));
        assert!(e.rel_error.is_none());
    }
}
