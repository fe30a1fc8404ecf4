//! Cross-check battery: brute-force oracle, DP tables, closed forms,
//! bounded-height forms and marked series must all agree.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::closedforms::{
    gf_bounded, gf_layer_level, gf_level, gf_marked, gf_sm, gf_total, uncancelled_layer_f,
    BoundedMethod, Generator,
};
use crate::dpcount::{height_distribution, CountOptions, CountTable, MarkCounts, MarkedCountTable};
use crate::path::{EnumFilter, Enumerator, Layer, PathError, Step};
use crate::series::{MarkCap, MarkPoly, Rational, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    /// Longest length checked against the brute-force oracle.
    pub max_length: usize,
    /// Height caps `0..=max_height` for the bounded-height checks.
    pub max_height: usize,
    /// z-order of the bounded-height comparison (at least `max_length`).
    pub bounded_order: usize,
    /// Levels `0..=kernel_levels` of the kernel cancellation check.
    pub kernel_levels: usize,
    /// z-order of the kernel cancellation check.
    pub kernel_order: usize,
    pub oracle_limit: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_length: 12,
            max_height: 8,
            bounded_order: 30,
            kernel_levels: 6,
            kernel_order: 24,
            oracle_limit: crate::path::DEFAULT_ORACLE_LIMIT,
        }
    }
}

impl VerifyOptions {
    pub fn with_max_length(max_length: usize) -> Self {
        VerifyOptions {
            max_length,
            bounded_order: max_length.max(30),
            ..Default::default()
        }
    }
}

/// First disagreement found by a check; enough to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub generator: String,
    pub n: usize,
    pub j: Option<usize>,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "generator={} n={}", self.generator, self.n)?;
        if let Some(j) = self.j {
            write!(f, " j={j}")?;
        }
        write!(f, " expected={} got={}", self.expected, self.got)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            cases: 0,
            mismatches: 0,
            first_mismatch: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }

    fn expect<T: PartialEq + fmt::Display>(
        &mut self,
        generator: impl FnOnce() -> String,
        n: usize,
        j: Option<usize>,
        expected: &T,
        got: &T,
    ) {
        self.cases += 1;
        if expected != got {
            self.mismatches += 1;
            if self.first_mismatch.is_none() {
                self.first_mismatch = Some(Mismatch {
                    generator: generator(),
                    n,
                    j,
                    expected: expected.to_string(),
                    got: got.to_string(),
                });
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn first_failure(&self) -> Option<(&str, &Mismatch)> {
        self.checks
            .iter()
            .find_map(|c| c.first_mismatch.as_ref().map(|m| (c.name.as_str(), m)))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {} ({} cases)", c.name, c.cases));
            if let Some(m) = &c.first_mismatch {
                out.push_str(&format!(": {} mismatches, first {m}", c.mismatches));
            }
            out.push('\n');
        }
        out
    }
}

/// Oracle statistics keyed by `(final level, layer, height, flats, lefts)`.
#[derive(Clone, Debug, Default)]
pub struct OracleTally {
    by_length: Vec<HashMap<WordKey, u64>>,
}

impl OracleTally {
    /// Enumerates every valid word of length `0..=max_length` once.
    pub fn collect(max_length: usize, limit: usize) -> Result<Self, PathError> {
        let oracle = Enumerator::with_limit(limit);
        let mut by_length = Vec::with_capacity(max_length + 1);
        for n in 0..=max_length {
            let mut tally = HashMap::new();
            oracle.for_each(n, EnumFilter::default(), |word| {
                *tally.entry(word_key(word)).or_insert(0u64) += 1;
            })?;
            by_length.push(tally);
        }
        Ok(OracleTally { by_length })
    }

    pub fn max_length(&self) -> usize {
        self.by_length.len() - 1
    }

    /// Sum of counts at length `n` over keys accepted by `keep`.
    pub fn count(&self, n: usize, keep: impl Fn(usize, Layer, usize, usize, usize) -> bool) -> u64 {
        self.by_length[n]
            .iter()
            .filter(|(&(j, l, h, a, b), _)| keep(j, l, h, a, b))
            .map(|(_, c)| c)
            .sum()
    }

    /// `(flats, lefts)` distribution of the return paths of length `n`.
    pub fn marks(&self, n: usize, max_height: Option<usize>) -> MarkCounts {
        let mut out = MarkCounts::new();
        for (&(j, _, h, a, b), &c) in &self.by_length[n] {
            if j == 0 && max_height.is_none_or(|cap| h <= cap) {
                *out.entry((a, b)).or_default() += BigUint::from(c);
            }
        }
        out
    }
}

type WordKey = (usize, Layer, usize, usize, usize);

fn word_key(word: &[Step]) -> WordKey {
    let (mut level, mut height, mut flats, mut lefts) = (0i64, 0i64, 0, 0);
    for &s in word {
        level += s.rise();
        height = height.max(level);
        match s {
            Step::Flat => flats += 1,
            Step::Left => lefts += 1,
            _ => {}
        }
    }
    let layer = word.last().map_or(Layer::F, |s| s.layer());
    (level as usize, layer, height as usize, flats, lefts)
}

fn coeff(s: &TruncatedSeries, n: usize) -> BigInt {
    let c = s
        .coeff(n as i64)
        .expect("series computed to the checked order");
    if c.is_integer() {
        c.to_integer()
    } else {
        // Surfaces as a mismatch against any integer count.
        BigInt::from(-1)
    }
}

fn marks_poly(counts: &MarkCounts, cap: MarkCap) -> MarkPoly {
    let mut p = MarkPoly::default();
    for (&(a, b), c) in counts {
        let term = MarkPoly::monomial(
            Rational::from_integer(BigInt::from(c.clone())),
            a as u32,
            b as u32,
            cap,
        );
        p = crate::series::Coefficient::plus(&p, &term, &cap);
    }
    p
}

/// Runs every check and collects the outcomes.
pub fn run_battery(options: &VerifyOptions) -> Result<VerifyReport, PathError> {
    let n_max = options.max_length;
    let tally = OracleTally::collect(n_max, options.oracle_limit)?;
    let table = CountTable::build(n_max, CountOptions::default());
    let mut checks = Vec::new();

    let mut oracle_dp = CheckResult::new("oracle-vs-dp");
    for n in 0..=n_max {
        for j in 0..=n {
            for layer in Layer::ALL {
                let expected =
                    BigUint::from(tally.count(n, |jj, ll, _, _, _| jj == j && ll == layer));
                let got = table.entry(n, j, layer).expect("in table");
                oracle_dp.expect(|| format!("dp:{layer}:{j}"), n, Some(j), &expected, &got);
            }
        }
    }
    checks.push(oracle_dp);

    let mut closed = CheckResult::new("dp-vs-closed-forms");
    let sm = gf_sm(n_max);
    let total = gf_total(n_max);
    for n in 0..=n_max {
        let dp0 = BigInt::from(table.count(n, 0).expect("in table"));
        closed.expect(|| Generator::Sm.name(), n, Some(0), &dp0, &coeff(&sm, n));
        let all = BigInt::from(table.count_all_levels(n).expect("in table"));
        closed.expect(|| Generator::Total.name(), n, None, &all, &coeff(&total, n));
    }
    for j in 0..=n_max {
        let level = gf_level(j, n_max);
        let layers: Vec<TruncatedSeries> = Layer::ALL
            .iter()
            .map(|&l| gf_layer_level(l, j, n_max))
            .collect();
        for n in 0..=n_max {
            let dp = BigInt::from(table.count(n, j).expect("in table"));
            closed.expect(
                || Generator::Level(j).name(),
                n,
                Some(j),
                &dp,
                &coeff(&level, n),
            );
            for (l, s) in Layer::ALL.iter().zip(&layers) {
                let dpl = BigInt::from(table.entry(n, j, *l).expect("in table"));
                closed.expect(
                    || Generator::LayerLevel(*l, j).name(),
                    n,
                    Some(j),
                    &dpl,
                    &coeff(s, n),
                );
            }
        }
    }
    checks.push(closed);

    let mut bounded = CheckResult::new("bounded-height");
    let order = options.bounded_order.max(n_max);
    for h in 0..=options.max_height {
        let closed_form = gf_bounded(h, order, BoundedMethod::Closed);
        let recurrence = gf_bounded(h, order, BoundedMethod::Recurrence);
        let capped = CountTable::build(order, CountOptions::capped(h));
        let name = || Generator::Bounded(h).name();
        for n in 0..=order {
            let dp = BigInt::from(capped.count(n, 0).expect("in table"));
            bounded.expect(name, n, Some(0), &dp, &coeff(&closed_form, n));
            bounded.expect(
                || format!("{}:recurrence", name()),
                n,
                Some(0),
                &dp,
                &coeff(&recurrence, n),
            );
            if n <= n_max {
                let oracle = BigInt::from(tally.count(n, |j, _, hh, _, _| j == 0 && hh <= h));
                bounded.expect(|| format!("{}:oracle", name()), n, Some(0), &oracle, &dp);
            }
        }
    }
    checks.push(bounded);

    let mut heights = CheckResult::new("height-profile");
    for n in 0..=n_max {
        let profile = height_distribution(n);
        for h in 0..=n {
            let oracle = BigUint::from(tally.count(n, |j, _, hh, _, _| j == 0 && hh <= h));
            heights.expect(
                || format!("height<={h}"),
                n,
                Some(0),
                &oracle,
                &profile.at_most[h],
            );
        }
    }
    checks.push(heights);

    let mut marks = CheckResult::new("marks");
    let cap = MarkCap(n_max as u32);
    let marked = gf_marked(n_max, Some(cap));
    let marked_table = MarkedCountTable::build(n_max, CountOptions::default());
    for n in 0..=n_max {
        let oracle = marks_poly(&tally.marks(n, None), cap);
        let dp = marks_poly(&marked_table.distribution(n, 0).expect("in table"), cap);
        let gf = marked
            .coeff(n as i64)
            .expect("series computed to the checked order");
        marks.expect(|| "marked:dp".into(), n, Some(0), &oracle, &dp);
        marks.expect(|| "marked".into(), n, Some(0), &oracle, &gf);
    }
    for h in 0..=options.max_height.min(n_max) {
        let capped = MarkedCountTable::build(n_max, CountOptions::capped(h));
        for n in 0..=n_max {
            let oracle = marks_poly(&tally.marks(n, Some(h)), cap);
            let dp = marks_poly(&capped.distribution(n, 0).expect("in table"), cap);
            marks.expect(|| format!("marked:bounded:{h}"), n, Some(0), &oracle, &dp);
        }
    }
    checks.push(marks);

    let mut kernel = CheckResult::new("kernel-cancellation");
    let k_order = options.kernel_order;
    for j in 0..=options.kernel_levels {
        let raw = uncancelled_layer_f(j, k_order);
        let cancelled = gf_layer_level(Layer::F, j, k_order);
        for n in 0..=k_order {
            kernel.expect(
                || format!("uncancelled:F:{j}"),
                n,
                Some(j),
                &coeff(&cancelled, n),
                &coeff(&raw, n),
            );
        }
    }
    checks.push(kernel);

    Ok(VerifyReport {
        options: *options,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_battery_passes() {
        let opts = VerifyOptions {
            max_length: 7,
            max_height: 3,
            bounded_order: 12,
            kernel_levels: 2,
            kernel_order: 10,
            oracle_limit: 16,
        };
        let report = run_battery(&opts).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.checks.len(), 6);
    }

    #[test]
    fn mismatch_records_first_failure() {
        let mut c = CheckResult::new("demo");
        c.expect(|| "sm".into(), 3, Some(0), &5, &5);
        c.expect(|| "sm".into(), 4, Some(0), &13, &12);
        c.expect(|| "sm".into(), 5, Some(0), &35, &30);
        assert_eq!(c.mismatches, 2);
        assert_eq!(
            c.first_mismatch.unwrap().to_string(),
            "generator=sm n=4 j=0 expected=13 got=12"
        );
    }

    #[test]
    fn oracle_limit_is_enforced() {
        let opts = VerifyOptions {
            max_length: 5,
            oracle_limit: 4,
            ..Default::default()
        };
        assert!(matches!(
            run_battery(&opts),
            Err(PathError::OracleLimit { n: 5, limit: 4 })
        ));
    }
}
