//! Exact uniform sampling by unranking.
//!
//! A backward table counts, for every `(remaining steps, level, layer)`, the
//! completions that end at the target level. One integer drawn uniformly
//! from `[0, total)` is then decoded step by step: each candidate step owns a
//! block of ranks whose size is its number of completions. This is the same
//! as choosing every step with probability proportional to its completions.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::path::{Layer, Path, PathJson, Step};

/// Identifier of the generator recorded in sample metadata.
pub const RNG_ID: &str = "chacha20";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub n: usize,
    /// `None` samples partial paths ending at any level.
    pub final_level: Option<usize>,
    pub seed: u64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("no paths of length {n} end at level {level}")]
    EmptyClass { n: usize, level: usize },
    #[error("at least one thread is required")]
    NoThreads,
}

/// Completion counts for one target class.
#[derive(Clone, Debug)]
pub struct Sampler {
    n: usize,
    final_level: Option<usize>,
    /// `completions[r][j][layer]`: ways to finish with `r` steps left from
    /// level `j` in `layer`. Levels above `n` are never reachable.
    completions: Vec<Vec<[BigUint; 4]>>,
}

impl Sampler {
    pub fn new(n: usize, final_level: Option<usize>) -> Result<Self, SampleError> {
        let levels = n + 1;
        let done: Vec<[BigUint; 4]> = (0..levels)
            .map(|j| {
                let hit = final_level.is_none_or(|t| t == j);
                std::array::from_fn(|_| BigUint::from(hit as u32))
            })
            .collect();
        let mut completions = vec![done];
        for r in 1..=n {
            let prev = &completions[r - 1];
            let row = (0..levels)
                .map(|j| {
                    std::array::from_fn(|l| {
                        let layer = Layer::ALL[l];
                        let mut total = BigUint::zero();
                        for step in Step::ALL {
                            if let Some((to, next)) = transition(j, layer, step, levels) {
                                total += &prev[to][next.index()];
                            }
                        }
                        total
                    })
                })
                .collect();
            completions.push(row);
        }
        let sampler = Sampler {
            n,
            final_level,
            completions,
        };
        if sampler.total().is_zero() {
            return Err(SampleError::EmptyClass {
                n,
                level: final_level.unwrap_or(0),
            });
        }
        Ok(sampler)
    }

    /// Size of the target class.
    pub fn total(&self) -> &BigUint {
        &self.completions[self.n][0][Layer::F.index()]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn final_level(&self) -> Option<usize> {
        self.final_level
    }

    /// The path of the given rank in `U < D < F < L` lexicographic order.
    pub fn unrank(&self, rank: &BigUint) -> Option<Path> {
        if rank >= self.total() {
            return None;
        }
        let mut rank = rank.clone();
        let mut steps = Vec::with_capacity(self.n);
        let (mut level, mut layer) = (0usize, Layer::F);
        for remaining in (1..=self.n).rev() {
            let row = &self.completions[remaining - 1];
            let mut chosen = None;
            for step in Step::ALL {
                let Some((to, next)) = transition(level, layer, step, self.n + 1) else {
                    continue;
                };
                let block = &row[to][next.index()];
                if rank < *block {
                    chosen = Some((step, to, next));
                    break;
                }
                rank -= block;
            }
            let (step, to, next) = chosen.expect("rank below total always decodes");
            steps.push(step);
            level = to;
            layer = next;
        }
        Some(Path::new(steps).expect("decoded words are valid"))
    }

    /// Uniform draw over the class.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Path {
        let total = self.total();
        let rank = match total.to_u64() {
            Some(t) => BigUint::from(rng.gen_range(0..t)),
            None => rng.gen_biguint_below(total),
        };
        self.unrank(&rank).expect("rank drawn below total")
    }
}

/// Level and layer after `step`, if the step is allowed from `(level,
/// layer)` and stays within `levels`.
fn transition(level: usize, layer: Layer, step: Step, levels: usize) -> Option<(usize, Layer)> {
    if !layer.allows(step) {
        return None;
    }
    let to = level as i64 + step.rise();
    if to < 0 || to as usize >= levels {
        return None;
    }
    Some((to as usize, step.layer()))
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Endless uniform draws from stream 0 of the seeded generator.
#[derive(Clone, Debug)]
pub struct SampleStream {
    sampler: Sampler,
    rng: ChaCha20Rng,
}

impl SampleStream {
    pub fn new(sampler: Sampler, seed: u64) -> Self {
        SampleStream {
            sampler,
            rng: rng_for(seed, 0),
        }
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }
}

impl Iterator for SampleStream {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        Some(self.sampler.sample(&mut self.rng))
    }
}

/// Single-threaded reference sampler: `spec.count` draws from one stream.
pub fn sample_uniform(spec: &SamplerSpec) -> Result<Vec<Path>, SampleError> {
    let sampler = Sampler::new(spec.n, spec.final_level)?;
    Ok(SampleStream::new(sampler, spec.seed)
        .take(spec.count)
        .collect())
}

/// Splits the draws into `threads` contiguous chunks; chunk `i` uses stream
/// `i + 1` of the seeded generator. The output depends on `threads` but is
/// deterministic for a fixed thread count.
pub fn sample_uniform_parallel(
    spec: &SamplerSpec,
    threads: usize,
) -> Result<Vec<Path>, SampleError> {
    if threads == 0 {
        return Err(SampleError::NoThreads);
    }
    let sampler = Sampler::new(spec.n, spec.final_level)?;
    let chunk = spec.count.div_ceil(threads).max(1);
    let chunks: Vec<Vec<Path>> = (0..threads)
        .into_par_iter()
        .map(|i| {
            let start = (i * chunk).min(spec.count);
            let end = ((i + 1) * chunk).min(spec.count);
            let mut rng = rng_for(spec.seed, i as u64 + 1);
            (start..end).map(|_| sampler.sample(&mut rng)).collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMetadata {
    pub seed: u64,
    pub rng_id: String,
    pub n: usize,
    pub level: Option<usize>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    pub metadata: SampleMetadata,
    pub samples: Vec<PathJson>,
}

impl SampleSet {
    pub fn new(spec: &SamplerSpec, paths: &[Path]) -> Self {
        SampleSet {
            metadata: SampleMetadata {
                seed: spec.seed,
                rng_id: RNG_ID.to_string(),
                n: spec.n,
                level: spec.final_level,
                count: paths.len(),
            },
            samples: paths.iter().map(Path::to_json).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::path::{enumerate, EnumFilter};

    #[test]
    fn unranking_lists_the_class_in_order() {
        let s = Sampler::new(3, Some(0)).unwrap();
        let words: Vec<String> = (0..5u32)
            .map(|r| s.unrank(&BigUint::from(r)).unwrap().word())
            .collect();
        let listed: Vec<String> = enumerate(3, EnumFilter::returning())
            .unwrap()
            .iter()
            .map(Path::word)
            .collect();
        assert_eq!(words, listed);
        assert!(s.unrank(&BigUint::from(5u32)).is_none());
    }

    #[test]
    fn single_path_class() {
        let spec = SamplerSpec {
            n: 1,
            final_level: Some(0),
            seed: 3,
            count: 20,
        };
        assert!(sample_uniform(&spec)
            .unwrap()
            .iter()
            .all(|p| p.word() == "F"));
    }

    #[test]
    fn empty_class_is_rejected() {
        assert_eq!(
            Sampler::new(2, Some(5)).unwrap_err(),
            SampleError::EmptyClass { n: 2, level: 5 }
        );
    }

    #[test]
    fn any_level_total_matches_all_partial_paths() {
        assert_eq!(
            *Sampler::new(10, None).unwrap().total(),
            BigUint::from(30413u32)
        );
    }

    #[test]
    fn frequencies_at_length_three() {
        let spec = SamplerSpec {
            n: 3,
            final_level: Some(0),
            seed: 11,
            count: 50_000,
        };
        let mut freq: BTreeMap<String, usize> = BTreeMap::new();
        for p in sample_uniform(&spec).unwrap() {
            *freq.entry(p.word()).or_default() += 1;
        }
        assert_eq!(freq.len(), 5);
        for (w, c) in freq {
            let f = c as f64 / 50_000.0;
            assert!((f - 0.2).abs() < 0.01, "{w}: {f}");
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let spec = SamplerSpec {
            n: 6,
            final_level: Some(0),
            seed: 42,
            count: 100,
        };
        let a = serde_json::to_string(&SampleSet::new(&spec, &sample_uniform(&spec).unwrap()));
        let b = serde_json::to_string(&SampleSet::new(&spec, &sample_uniform(&spec).unwrap()));
        assert_eq!(a.unwrap(), b.unwrap());
        let p1 = sample_uniform_parallel(&spec, 4).unwrap();
        let p2 = sample_uniform_parallel(&spec, 4).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(p1.len(), 100);
    }

    #[test]
    fn large_classes_use_the_bigint_draw() {
        let s = Sampler::new(60, Some(0)).unwrap();
        assert!(s.total().to_u64().is_none());
        let mut rng = rng_for(1, 0);
        let p = s.sample(&mut rng);
        assert_eq!((p.len(), p.final_level()), (60, 0));
    }
}
