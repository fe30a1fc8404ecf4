//! Skew Motzkin paths as words over `{U, D, F, L}`.
//!
//! The counted class is defined by the four-layer automaton: in the red
//! coding `L` moves like `D` (one unit right, one down), the running level
//! must stay nonnegative, and the factors `UL` and `LU` are forbidden.
//! The geometric reading, where `L` is the step `(-1,-1)`, is only used by
//! [`geometric_self_overlap`] as a diagnostic.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Brute-force enumeration refuses lengths above this unless told otherwise.
pub const DEFAULT_ORACLE_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    Up,
    Down,
    Flat,
    Left,
}

impl Step {
    /// Lexicographic enumeration order `U < D < F < L`.
    pub const ALL: [Step; 4] = [Step::Up, Step::Down, Step::Flat, Step::Left];

    pub fn as_char(self) -> char {
        match self {
            Step::Up => 'U',
            Step::Down => 'D',
            Step::Flat => 'F',
            Step::Left => 'L',
        }
    }

    pub fn from_char(c: char) -> Option<Step> {
        match c {
            'U' => Some(Step::Up),
            'D' => Some(Step::Down),
            'F' => Some(Step::Flat),
            'L' => Some(Step::Left),
            _ => None,
        }
    }

    /// Level change in the red coding.
    pub fn rise(self) -> i64 {
        match self {
            Step::Up => 1,
            Step::Flat => 0,
            Step::Down | Step::Left => -1,
        }
    }

    /// The layer reached by a path whose last step is `self`.
    pub fn layer(self) -> Layer {
        match self {
            Step::Up => Layer::F,
            Step::Down => Layer::G,
            Step::Flat => Layer::H,
            Step::Left => Layer::K,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coding {
    /// `L` is the step `(-1, -1)`.
    Geometric,
    /// `L` is a red step `(1, -1)`, distinct from `D` only by colour.
    Red,
}

pub fn step_displacement(step: Step, coding: Coding) -> (i64, i64) {
    match (step, coding) {
        (Step::Up, _) => (1, 1),
        (Step::Down, _) => (1, -1),
        (Step::Flat, _) => (1, 0),
        (Step::Left, Coding::Geometric) => (-1, -1),
        (Step::Left, Coding::Red) => (1, -1),
    }
}

/// Automaton layer, named after the generating functions `f, g, h, k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    F,
    G,
    H,
    K,
}

impl Layer {
    pub const ALL: [Layer; 4] = [Layer::F, Layer::G, Layer::H, Layer::K];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            Layer::F => 'F',
            Layer::G => 'G',
            Layer::H => 'H',
            Layer::K => 'K',
        }
    }

    pub fn from_char(c: char) -> Option<Layer> {
        match c {
            'F' => Some(Layer::F),
            'G' => Some(Layer::G),
            'H' => Some(Layer::H),
            'K' => Some(Layer::K),
            _ => None,
        }
    }

    /// Whether `step` may follow a path sitting in this layer (ignoring the
    /// level constraint).
    pub fn allows(self, step: Step) -> bool {
        !matches!((self, step), (Layer::F, Step::Left) | (Layer::K, Step::Up))
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    BelowAxis,
    UpThenLeft,
    LeftThenUp,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::BelowAxis => "below-axis",
            ViolationKind::UpThenLeft => "up-then-left",
            ViolationKind::LeftThenUp => "left-then-up",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violation: Option<Violation>,
}

/// Reports the first offending position of `word`, if any. Adjacency
/// offences are attributed to the second step of the pair.
pub fn validate(word: &[Step]) -> ValidityReport {
    let mut level = 0i64;
    let mut prev: Option<Step> = None;
    for (index, &step) in word.iter().enumerate() {
        let kind = match (prev, step) {
            (Some(Step::Up), Step::Left) => Some(ViolationKind::UpThenLeft),
            (Some(Step::Left), Step::Up) => Some(ViolationKind::LeftThenUp),
            _ => None,
        };
        level += step.rise();
        let kind = kind.or((level < 0).then_some(ViolationKind::BelowAxis));
        if let Some(kind) = kind {
            return ValidityReport {
                valid: false,
                violation: Some(Violation { index, kind }),
            };
        }
        prev = Some(step);
    }
    ValidityReport {
        valid: true,
        violation: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("invalid step character {0:?} (expected one of U, D, F, L)")]
    BadChar(char),
    #[error("invalid path: {} at index {}", .0.kind.as_str(), .0.index)]
    Invalid(Violation),
    #[error("length {n} exceeds the oracle limit {limit}")]
    OracleLimit { n: usize, limit: usize },
}

pub fn parse_word(s: &str) -> Result<Vec<Step>, PathError> {
    s.chars()
        .map(|c| Step::from_char(c).ok_or(PathError::BadChar(c)))
        .collect()
}

pub fn word_string(steps: &[Step]) -> String {
    steps.iter().map(|s| s.as_char()).collect()
}

/// A validated skew Motzkin path with its statistics cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    steps: Vec<Step>,
    final_level: usize,
    height: usize,
    flats: usize,
    lefts: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathStats {
    pub final_level: usize,
    pub height: usize,
    pub flats: usize,
    pub lefts: usize,
    pub layer: Layer,
}

impl Path {
    pub fn new(steps: Vec<Step>) -> Result<Path, PathError> {
        if let Some(v) = validate(&steps).violation {
            return Err(PathError::Invalid(v));
        }
        Ok(Self::from_valid(steps))
    }

    /// Caller guarantees `steps` is valid.
    fn from_valid(steps: Vec<Step>) -> Path {
        let mut level = 0i64;
        let mut height = 0i64;
        let mut flats = 0;
        let mut lefts = 0;
        for &s in &steps {
            level += s.rise();
            height = height.max(level);
            match s {
                Step::Flat => flats += 1,
                Step::Left => lefts += 1,
                _ => {}
            }
        }
        Path {
            steps,
            final_level: level as usize,
            height: height as usize,
            flats,
            lefts,
        }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_level(&self) -> usize {
        self.final_level
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn flats(&self) -> usize {
        self.flats
    }

    pub fn lefts(&self) -> usize {
        self.lefts
    }

    /// Layer of the last step; the empty path sits in layer `F`.
    pub fn layer(&self) -> Layer {
        self.steps.last().map_or(Layer::F, |s| s.layer())
    }

    pub fn stats(&self) -> PathStats {
        PathStats {
            final_level: self.final_level,
            height: self.height,
            flats: self.flats,
            lefts: self.lefts,
            layer: self.layer(),
        }
    }

    pub fn word(&self) -> String {
        word_string(&self.steps)
    }

    pub fn to_json(&self) -> PathJson {
        PathJson {
            word: self.word(),
            level: self.final_level,
            height: self.height,
            flats: self.flats,
            lefts: self.lefts,
            layer: self.layer().to_string(),
        }
    }
}

impl FromStr for Path {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Path::new(parse_word(s)?)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

/// Statistics of an arbitrary word, rejecting invalid ones.
pub fn path_stats(word: &[Step]) -> Result<PathStats, PathError> {
    Ok(Path::new(word.to_vec())?.stats())
}

/// Serialized form of a path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathJson {
    pub word: String,
    pub level: usize,
    pub height: usize,
    pub flats: usize,
    pub lefts: usize,
    pub layer: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumFilter {
    pub final_level: Option<usize>,
    pub max_height: Option<usize>,
}

impl EnumFilter {
    pub fn returning() -> Self {
        EnumFilter {
            final_level: Some(0),
            max_height: None,
        }
    }

    pub fn at_level(level: usize) -> Self {
        EnumFilter {
            final_level: Some(level),
            max_height: None,
        }
    }
}

/// Exhaustive generator with a length limit.
#[derive(Clone, Copy, Debug)]
pub struct Enumerator {
    limit: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator {
            limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

impl Enumerator {
    pub fn with_limit(limit: usize) -> Self {
        Enumerator { limit }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Calls `visit` on every valid word of length `n` accepted by `filter`,
    /// in lexicographic order.
    pub fn for_each(
        &self,
        n: usize,
        filter: EnumFilter,
        mut visit: impl FnMut(&[Step]),
    ) -> Result<(), PathError> {
        if n > self.limit {
            return Err(PathError::OracleLimit {
                n,
                limit: self.limit,
            });
        }
        let mut word = Vec::with_capacity(n);
        search(&mut word, 0, Layer::F, n, &filter, &mut visit);
        Ok(())
    }

    pub fn enumerate(&self, n: usize, filter: EnumFilter) -> Result<Vec<Path>, PathError> {
        let mut out = Vec::new();
        self.for_each(n, filter, |w| out.push(Path::from_valid(w.to_vec())))?;
        Ok(out)
    }

    pub fn count(&self, n: usize, filter: EnumFilter) -> Result<u64, PathError> {
        let mut c = 0u64;
        self.for_each(n, filter, |_| c += 1)?;
        Ok(c)
    }
}

/// Every valid path of length `n` matching `filter`, with the default limit.
pub fn enumerate(n: usize, filter: EnumFilter) -> Result<Vec<Path>, PathError> {
    Enumerator::default().enumerate(n, filter)
}

fn search(
    word: &mut Vec<Step>,
    level: usize,
    layer: Layer,
    n: usize,
    filter: &EnumFilter,
    visit: &mut impl FnMut(&[Step]),
) {
    let remaining = n - word.len();
    if remaining == 0 {
        if filter.final_level.is_none_or(|j| j == level) {
            visit(word);
        }
        return;
    }
    for step in Step::ALL {
        if !layer.allows(step) {
            continue;
        }
        let next = level as i64 + step.rise();
        if next < 0 {
            continue;
        }
        let next = next as usize;
        if filter.max_height.is_some_and(|h| next > h) {
            continue;
        }
        // Each remaining step moves the level by at most one.
        if let Some(target) = filter.final_level {
            if next.abs_diff(target) > remaining - 1 {
                continue;
            }
        }
        word.push(step);
        search(word, next, step.layer(), n, filter, visit);
        word.pop();
    }
}

/// True if the geometric polyline traverses some unit segment twice.
/// Crossings at segment midpoints are not detected.
pub fn geometric_self_overlap(word: &[Step]) -> bool {
    let mut seen = HashSet::with_capacity(word.len());
    let mut pos = (0i64, 0i64);
    for &s in word {
        let (dx, dy) = step_displacement(s, Coding::Geometric);
        let next = (pos.0 + dx, pos.1 + dy);
        let seg = if pos <= next {
            (pos, next)
        } else {
            (next, pos)
        };
        if !seen.insert(seg) {
            return true;
        }
        pos = next;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use Step::*;

    fn w(s: &str) -> Vec<Step> {
        parse_word(s).unwrap()
    }

    #[test]
    fn displacement_tables() {
        assert_eq!(step_displacement(Up, Coding::Geometric), (1, 1));
        assert_eq!(step_displacement(Left, Coding::Geometric), (-1, -1));
        assert_eq!(step_displacement(Left, Coding::Red), (1, -1));
        for s in [Up, Down, Flat] {
            assert_eq!(
                step_displacement(s, Coding::Geometric),
                step_displacement(s, Coding::Red)
            );
        }
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&[Up, Down]).valid);
        assert_eq!(
            validate(&[Up, Left]).violation,
            Some(Violation {
                index: 1,
                kind: ViolationKind::UpThenLeft
            })
        );
        assert_eq!(
            validate(&[Down]).violation,
            Some(Violation {
                index: 0,
                kind: ViolationKind::BelowAxis
            })
        );
        assert!(validate(&[Up, Flat, Left]).valid);
        assert_eq!(
            validate(&w("UDFULU")).violation,
            Some(Violation {
                index: 4,
                kind: ViolationKind::UpThenLeft
            })
        );
        assert_eq!(
            validate(&w("UFLU")).violation,
            Some(Violation {
                index: 3,
                kind: ViolationKind::LeftThenUp
            })
        );
    }

    #[test]
    fn length_three_returns() {
        let words: Vec<String> = enumerate(3, EnumFilter::returning())
            .unwrap()
            .iter()
            .map(Path::word)
            .collect();
        assert_eq!(words, ["UDF", "UFD", "UFL", "FUD", "FFF"]);
        assert_eq!(enumerate(0, EnumFilter::returning()).unwrap().len(), 1);
        assert_eq!(enumerate(5, EnumFilter::returning()).unwrap().len(), 35);
    }

    #[test]
    fn oracle_limit_is_enforced() {
        assert_eq!(
            Enumerator::with_limit(4).count(5, EnumFilter::default()),
            Err(PathError::OracleLimit { n: 5, limit: 4 })
        );
    }

    #[test]
    fn stats_examples() {
        let s = path_stats(&w("UFL")).unwrap();
        assert_eq!(
            s,
            PathStats {
                final_level: 0,
                height: 1,
                flats: 1,
                lefts: 1,
                layer: Layer::K
            }
        );
        let e = path_stats(&[]).unwrap();
        assert_eq!((e.final_level, e.height, e.layer), (0, 0, Layer::F));
        let s = path_stats(&w("UUDD")).unwrap();
        assert_eq!((s.height, s.layer, s.flats, s.lefts), (2, Layer::G, 0, 0));
        assert!(path_stats(&w("UL")).is_err());
    }

    #[test]
    fn overlap_examples() {
        assert!(geometric_self_overlap(&[Up, Left]));
        assert!(!geometric_self_overlap(&[Up, Down]));
        assert!(!geometric_self_overlap(&[Up, Flat, Left]));
    }

    #[test]
    fn parse_rejects_unknown_letters() {
        assert_eq!(parse_word("UX"), Err(PathError::BadChar('X')));
        assert_eq!("UFL".parse::<Path>().unwrap().word(), "UFL");
    }

    #[test]
    fn json_shape() {
        let p: Path = "UFL".parse().unwrap();
        assert_eq!(
            serde_json::to_string(&p.to_json()).unwrap(),
            r#"{"word":"UFL","level":0,"height":1,"flats":1,"lefts":1,"layer":"K"}"#
        );
    }
}
