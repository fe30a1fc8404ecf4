//! Exact counts over the four-layer automaton by dynamic programming.
//!
//! Counts are indexed by `(length n, level j, layer)`. One step of the
//! sweep applies
//!
//! ```text
//! F(n+1, j+1) += F + G + H      at (n, j)
//! G(n+1, j)   += F + G + H + K  at (n, j+1)
//! H(n+1, j)   += F + G + H + K  at (n, j)
//! K(n+1, j)   += G + H + K      at (n, j+1)
//! ```
//!
//! starting from the empty path `F(0, 0) = 1`. A height cap drops every
//! contribution to a level above the cap.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::path::Layer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("length {n} is beyond the table (max length {max_len})")]
    BeyondTable { n: usize, max_len: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOptions {
    pub height_cap: Option<usize>,
}

impl CountOptions {
    pub fn capped(h: usize) -> Self {
        CountOptions {
            height_cap: Some(h),
        }
    }
}

/// Per-layer counts at one `(n, j)` cell, in `F, G, H, K` order.
pub type LayerCounts = [BigUint; 4];

fn zero_cell() -> LayerCounts {
    std::array::from_fn(|_| BigUint::zero())
}

/// Applies one step of the transition rule. `max_level` bounds the levels
/// kept in the next row (it folds the height cap and any return pruning).
fn advance(row: &[LayerCounts], max_level: usize) -> Vec<LayerCounts> {
    let mut next: Vec<LayerCounts> = (0..=max_level).map(|_| zero_cell()).collect();
    for (j, [f, g, h, k]) in row.iter().enumerate() {
        let no_left = f + g + h;
        if no_left.is_zero() && k.is_zero() {
            continue;
        }
        let all = &no_left + k;
        if j < max_level {
            next[j + 1][0] += &no_left;
        }
        if j <= max_level {
            next[j][2] += &all;
        }
        if j >= 1 && j - 1 <= max_level {
            next[j - 1][3] += g + h + k;
            next[j - 1][1] += all;
        }
    }
    next
}

fn initial_row() -> Vec<LayerCounts> {
    let mut cell = zero_cell();
    cell[Layer::F.index()] = BigUint::from(1u32);
    vec![cell]
}

/// Dense table of exact counts for every length up to `max_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    max_len: usize,
    options: CountOptions,
    /// `rows[n][j]` for `j <= min(n, cap)`.
    rows: Vec<Vec<LayerCounts>>,
}

impl CountTable {
    pub fn build(max_len: usize, options: CountOptions) -> Self {
        let mut rows = Vec::with_capacity(max_len + 1);
        rows.push(initial_row());
        for n in 0..max_len {
            let max_level = options.height_cap.map_or(n + 1, |h| h.min(n + 1));
            let next = advance(&rows[n], max_level);
            rows.push(next);
        }
        CountTable {
            max_len,
            options,
            rows,
        }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn options(&self) -> CountOptions {
        self.options
    }

    fn check(&self, n: usize) -> Result<(), CountError> {
        if n > self.max_len {
            Err(CountError::BeyondTable {
                n,
                max_len: self.max_len,
            })
        } else {
            Ok(())
        }
    }

    /// Per-layer counts for paths of length `n` ending at level `j`.
    pub fn layers(&self, n: usize, j: usize) -> Result<LayerCounts, CountError> {
        self.check(n)?;
        Ok(self.rows[n].get(j).cloned().unwrap_or_else(zero_cell))
    }

    pub fn entry(&self, n: usize, j: usize, layer: Layer) -> Result<BigUint, CountError> {
        self.check(n)?;
        Ok(self.rows[n]
            .get(j)
            .map_or_else(BigUint::zero, |c| c[layer.index()].clone()))
    }

    /// Paths of length `n` ending at level `j`, summed over layers.
    pub fn count(&self, n: usize, j: usize) -> Result<BigUint, CountError> {
        self.check(n)?;
        Ok(self.rows[n]
            .get(j)
            .map_or_else(BigUint::zero, |c| c.iter().sum()))
    }

    pub fn count_all_levels(&self, n: usize) -> Result<BigUint, CountError> {
        self.check(n)?;
        Ok(self.rows[n].iter().flat_map(|c| c.iter()).sum())
    }

    /// Highest level with a row entry at length `n`.
    pub fn top_level(&self, n: usize) -> Result<usize, CountError> {
        self.check(n)?;
        Ok(self.rows[n].len() - 1)
    }

    /// CSV rows `n,j,f,g,h,k,total` for every stored cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,j,f,g,h,k,total\n");
        for (n, row) in self.rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let total: BigUint = c.iter().sum();
                let _ = writeln!(out, "{n},{j},{},{},{},{},{total}", c[0], c[1], c[2], c[3]);
            }
        }
        out
    }
}

/// Counts of return paths (final level 0) of length `n` and height at most
/// `cap`. Only levels from which the axis is still reachable are kept.
pub fn returns_capped(n: usize, cap: usize) -> BigUint {
    let mut row = initial_row();
    for i in 0..n {
        let remaining = n - i - 1;
        row = advance(&row, cap.min(remaining).min(i + 1));
    }
    row[0].iter().sum()
}

/// Exact expected height and cumulative height counts of return paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProfile {
    pub n: usize,
    /// `at_most[h]` return paths of length `n` have height `<= h`, for
    /// `h = 0..=n`.
    pub at_most: Vec<BigUint>,
    pub expected_height: BigRational,
}

impl HeightProfile {
    pub fn total(&self) -> &BigUint {
        &self.at_most[self.n]
    }

    /// Number of return paths of height exactly `h`.
    pub fn exactly(&self, h: usize) -> BigUint {
        if h == 0 {
            self.at_most[0].clone()
        } else {
            &self.at_most[h] - &self.at_most[h - 1]
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,H,at_most\n");
        for (h, c) in self.at_most.iter().enumerate() {
            let _ = writeln!(out, "{},{h},{c}", self.n);
        }
        let _ = writeln!(out, "{},expected_height,{}", self.n, self.expected_height);
        out
    }
}

/// Height profile of the return paths of length `n`, by one capped sweep
/// per height (sweeps run in parallel).
pub fn height_distribution(n: usize) -> HeightProfile {
    // A return path climbs at most n/2 levels.
    let saturate = n / 2;
    let mut at_most: Vec<BigUint> = (0..=saturate)
        .into_par_iter()
        .map(|h| returns_capped(n, h))
        .collect();
    let total = at_most[saturate].clone();
    at_most.resize(n + 1, total.clone());

    let excess: BigUint = at_most.iter().map(|c| &total - c).sum();
    let expected_height = BigRational::new(BigInt::from(excess), BigInt::from(total));
    HeightProfile {
        n,
        at_most,
        expected_height,
    }
}

/// Counts additionally split by number of flat steps `a` and left steps `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedCountTable {
    max_len: usize,
    options: CountOptions,
    /// `rows[n][j][layer]` maps `(flats, lefts)` to a count.
    rows: Vec<Vec<[MarkCounts; 4]>>,
}

/// Counts keyed by `(flats, lefts)`.
pub type MarkCounts = BTreeMap<(usize, usize), BigUint>;

fn merge(into: &mut MarkCounts, from: &MarkCounts, shift: (usize, usize)) {
    for (&(a, b), c) in from {
        *into
            .entry((a + shift.0, b + shift.1))
            .or_insert_with(BigUint::zero) += c;
    }
}

impl MarkedCountTable {
    pub fn build(max_len: usize, options: CountOptions) -> Self {
        let empty = || -> [MarkCounts; 4] { Default::default() };
        let mut first = empty();
        first[Layer::F.index()].insert((0, 0), BigUint::from(1u32));
        let mut rows = vec![vec![first]];
        for n in 0..max_len {
            let max_level = options.height_cap.map_or(n + 1, |h| h.min(n + 1));
            let mut next: Vec<[MarkCounts; 4]> = (0..=max_level).map(|_| empty()).collect();
            for (j, [f, g, h, k]) in rows[n].iter().enumerate() {
                if j < max_level {
                    for src in [f, g, h] {
                        merge(&mut next[j + 1][0], src, (0, 0));
                    }
                }
                if j <= max_level {
                    for src in [f, g, h, k] {
                        merge(&mut next[j][2], src, (1, 0));
                    }
                }
                if j >= 1 {
                    for src in [f, g, h, k] {
                        merge(&mut next[j - 1][1], src, (0, 0));
                    }
                    for src in [g, h, k] {
                        merge(&mut next[j - 1][3], src, (0, 1));
                    }
                }
            }
            rows.push(next);
        }
        MarkedCountTable {
            max_len,
            options,
            rows,
        }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    fn check(&self, n: usize) -> Result<(), CountError> {
        if n > self.max_len {
            Err(CountError::BeyondTable {
                n,
                max_len: self.max_len,
            })
        } else {
            Ok(())
        }
    }

    pub fn entry(&self, n: usize, j: usize, layer: Layer) -> Result<MarkCounts, CountError> {
        self.check(n)?;
        Ok(self.rows[n]
            .get(j)
            .map(|c| c[layer.index()].clone())
            .unwrap_or_default())
    }

    /// `(flats, lefts)` distribution of paths of length `n` ending at `j`.
    pub fn distribution(&self, n: usize, j: usize) -> Result<MarkCounts, CountError> {
        self.check(n)?;
        let mut out = MarkCounts::new();
        if let Some(cell) = self.rows[n].get(j) {
            for m in cell {
                merge(&mut out, m, (0, 0));
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Drops the marks, giving the plain table.
    pub fn forget_marks(&self) -> CountTable {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| std::array::from_fn(|l| cell[l].values().sum()))
                    .collect()
            })
            .collect();
        CountTable {
            max_len: self.max_len,
            options: self.options,
            rows,
        }
    }
}

/// `(flats, lefts)` distribution of the return paths of length `n`.
pub fn marked_distribution(n: usize) -> MarkCounts {
    MarkedCountTable::build(n, CountOptions::default())
        .distribution(n, 0)
        .expect("table covers n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn length_one() {
        let t = CountTable::build(1, CountOptions::default());
        assert_eq!(t.entry(1, 1, Layer::F).unwrap(), big(1));
        assert_eq!(t.entry(1, 0, Layer::H).unwrap(), big(1));
        for (j, l) in [(0, Layer::F), (0, Layer::G), (0, Layer::K), (1, Layer::H)] {
            assert!(t.entry(1, j, l).unwrap().is_zero());
        }
        assert_eq!(t.entry(0, 0, Layer::F).unwrap(), big(1));
    }

    #[test]
    fn known_counts() {
        let t = CountTable::build(11, CountOptions::default());
        assert_eq!(t.count(5, 0).unwrap(), big(35));
        assert_eq!(t.count(5, 1).unwrap(), big(36));
        assert_eq!(t.count(4, 4).unwrap(), big(1));
        assert_eq!(t.count(11, 0).unwrap(), big(20705));
        assert_eq!(t.count_all_levels(5).unwrap(), big(117));
        assert_eq!(t.count_all_levels(7).unwrap(), big(1049));
        assert_eq!(t.count_all_levels(0).unwrap(), big(1));
        assert!(t.count(3, 7).unwrap().is_zero());
    }

    #[test]
    fn beyond_table_is_rejected() {
        let t = CountTable::build(3, CountOptions::default());
        assert_eq!(
            t.count(4, 0),
            Err(CountError::BeyondTable { n: 4, max_len: 3 })
        );
    }

    #[test]
    fn cap_zero_keeps_only_flats() {
        let t = CountTable::build(6, CountOptions::capped(0));
        for n in 0..=6 {
            assert_eq!(t.count(n, 0).unwrap(), big(1));
            assert_eq!(t.count_all_levels(n).unwrap(), big(1));
        }
    }

    #[test]
    fn capped_returns_match_table() {
        for cap in 0..4 {
            let t = CountTable::build(12, CountOptions::capped(cap));
            for n in 0..=12 {
                assert_eq!(returns_capped(n, cap), t.count(n, 0).unwrap());
            }
        }
    }

    #[test]
    fn small_height_profiles() {
        let p = height_distribution(2);
        assert_eq!(p.at_most, vec![big(1), big(2), big(2)]);
        assert_eq!(p.expected_height, BigRational::new(1.into(), 2.into()));
        let p = height_distribution(3);
        assert_eq!(p.expected_height, BigRational::new(4.into(), 5.into()));
        let p = height_distribution(0);
        assert!(p.expected_height.is_zero());
        assert_eq!(p.at_most, vec![big(1)]);
    }

    #[test]
    fn marked_small_lengths() {
        let d = marked_distribution(4);
        let expect: MarkCounts = [
            ((0, 0), 2),
            ((2, 0), 6),
            ((0, 1), 1),
            ((2, 1), 3),
            ((4, 0), 1),
        ]
        .into_iter()
        .map(|(k, v)| (k, big(v)))
        .collect();
        assert_eq!(d, expect);
        assert_eq!(
            marked_distribution(1),
            [((1, 0), big(1))].into_iter().collect()
        );
        assert_eq!(
            marked_distribution(3),
            [((1, 1), big(1)), ((1, 0), big(3)), ((3, 0), big(1))]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn forgetting_marks_gives_plain_table() {
        for opts in [CountOptions::default(), CountOptions::capped(2)] {
            let m = MarkedCountTable::build(9, opts);
            assert_eq!(m.forget_marks(), CountTable::build(9, opts));
        }
    }

    #[test]
    fn csv_header_and_first_rows() {
        let csv = CountTable::build(1, CountOptions::default()).to_csv();
        assert_eq!(
            csv,
            "n,j,f,g,h,k,total\n0,0,1,0,0,0,1\n1,0,0,0,1,0,1\n1,1,1,0,0,0,1\n"
        );
    }
}
