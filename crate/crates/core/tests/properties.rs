use num_bigint::BigUint;
use proptest::prelude::*;

use skew_motzkin::dpcount::{CountOptions, CountTable, MarkedCountTable};
use skew_motzkin::path::{parse_word, validate, EnumFilter, Enumerator, Layer, Path, Step};
use skew_motzkin::sampler::{sample_uniform, Sampler, SamplerSpec};
use skew_motzkin::series::{MarkCap, MarkPoly, Rational, Series};
use skew_motzkin::{MarkedSeries, TruncatedSeries};

fn series(coeffs: Vec<i64>) -> TruncatedSeries {
    let p = coeffs.len() as i64;
    TruncatedSeries::rational_poly(&coeffs, p)
}

fn coeffs(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, len)
}

fn unit_coeffs() -> impl Strategy<Value = Vec<i64>> {
    (
        prop_oneof![Just(1i64), Just(-1), Just(2), Just(3)],
        coeffs(3..10),
    )
        .prop_map(|(c0, mut v)| {
            v[0] = c0;
            v
        })
}

fn common(a: &TruncatedSeries, b: &TruncatedSeries) -> i64 {
    a.precision().min(b.precision())
}

type Terms = Vec<(u32, u32, i64)>;

fn mark_terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec((0u32..5, 0u32..5, -4i64..=4), 0..6)
}

fn marked(terms: &[Terms], cap: MarkCap) -> MarkedSeries {
    let polys = terms
        .iter()
        .map(|t| MarkPoly::from_integer_terms(t, cap))
        .collect();
    Series::new(cap, 0, polys, terms.len() as i64)
}

/// Drops every term above `cap` in either mark.
fn restrict(s: &MarkedSeries, cap: MarkCap) -> MarkedSeries {
    let polys = (s.valuation()..s.precision())
        .map(|n| {
            let p = s.coeff(n).unwrap();
            let terms: Vec<(u32, u32, i64)> = p
                .terms()
                .map(|(&(a, b), c)| (a, b, i64::try_from(c.to_integer()).unwrap()))
                .collect();
            MarkPoly::from_integer_terms(&terms, cap)
        })
        .collect();
    Series::new(cap, s.valuation(), polys, s.precision())
}

fn step() -> impl Strategy<Value = Step> {
    prop::sample::select(Step::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_associative_and_commutative(a in coeffs(1..12), b in coeffs(1..12), c in coeffs(1..12)) {
        let (a, b, c) = (series(a), series(b), series(c));
        let p = common(&a, &b).min(c.precision());
        prop_assert!((&(&a + &b) + &c).agrees_with(&(&a + &(&b + &c)), p));
        prop_assert!((&a + &b).agrees_with(&(&b + &a), p));
        prop_assert!((&a - &a).agrees_with(&TruncatedSeries::zero((), a.precision()), a.precision()));
    }

    #[test]
    fn multiplication_is_a_commutative_ring(a in coeffs(1..10), b in coeffs(1..10), c in coeffs(1..10)) {
        let (a, b, c) = (series(a), series(b), series(c));
        let p = common(&a, &b).min(c.precision());
        prop_assert!((&(&a * &b) * &c).agrees_with(&(&a * &(&b * &c)), p));
        prop_assert!((&a * &b).agrees_with(&(&b * &a), p));
        prop_assert!((&a * &(&b + &c)).agrees_with(&(&(&a * &b) + &(&a * &c)), p));
        let one = TruncatedSeries::one((), a.precision());
        prop_assert!((&a * &one).agrees_with(&a, a.precision()));
    }

    #[test]
    fn units_invert(a in unit_coeffs()) {
        let a = series(a);
        let inv = a.invert().unwrap();
        prop_assert!((&a * &inv).agrees_with(&TruncatedSeries::one((), a.precision()), a.precision()));
    }

    #[test]
    fn square_root_of_square(mut a in coeffs(2..10)) {
        a[0] = 1;
        let a = series(a);
        let root = (&a * &a).sqrt().unwrap();
        prop_assert!(root.agrees_with(&a, a.precision()));
    }

    #[test]
    fn truncation_commutes_with_products(a in coeffs(4..14), b in coeffs(4..14), cut in 1i64..4) {
        let (a, b) = (series(a), series(b));
        let p = common(&a, &b) - cut;
        let full = (&a * &b).truncate(p);
        let early = &a.truncate(p) * &b.truncate(p);
        prop_assert_eq!(full.precision(), p);
        prop_assert!(full.agrees_with(&early, p));
    }

    #[test]
    fn laurent_shift_round_trips(a in coeffs(1..8), k in -4i64..4) {
        let a = series(a);
        prop_assert_eq!(a.shift(k).shift(-k), a);
    }

    #[test]
    fn mark_cap_is_a_ring_quotient(
        x in prop::collection::vec(mark_terms(), 1..5),
        y in prop::collection::vec(mark_terms(), 1..5),
        small in 0u32..4,
    ) {
        let (lo, hi) = (MarkCap(small), MarkCap(8));
        let (xs, ys) = (marked(&x, hi), marked(&y, hi));
        let exact = restrict(&(&xs * &ys), lo);
        let capped = &marked(&x, lo) * &marked(&y, lo);
        let p = xs.precision().min(ys.precision());
        prop_assert!(exact.agrees_with(&capped, p));
        let sum = restrict(&(&xs + &ys), lo);
        prop_assert!(sum.agrees_with(&(&marked(&x, lo) + &marked(&y, lo)), p));
    }

    #[test]
    fn validate_matches_the_oracle(word in prop::collection::vec(step(), 0..10)) {
        let report = validate(&word);
        let listed = Enumerator::default()
            .enumerate(word.len(), EnumFilter::default())
            .unwrap()
            .iter()
            .any(|p| p.steps() == word.as_slice());
        prop_assert_eq!(report.valid, listed);
        prop_assert_eq!(Path::new(word.clone()).is_ok(), listed);
        if let Some(v) = report.violation {
            prop_assert!(validate(&word[..v.index]).valid);
        }
    }

    #[test]
    fn word_round_trip(word in prop::collection::vec(step(), 0..20)) {
        let text: String = word.iter().map(|s| s.as_char()).collect();
        prop_assert_eq!(parse_word(&text).unwrap(), word);
    }

    #[test]
    fn dp_matches_oracle(n in 0usize..=10, cap in prop::option::of(0usize..5)) {
        let options = CountOptions { height_cap: cap };
        let table = CountTable::build(n, options);
        let marked = MarkedCountTable::build(n, options);
        let mut tally = std::collections::HashMap::<(usize, Layer), u64>::new();
        Enumerator::default().for_each(n, EnumFilter::default(), |w| {
            let p = Path::new(w.to_vec()).unwrap();
            if cap.is_none_or(|h| p.height() <= h) {
                *tally.entry((p.final_level(), p.layer())).or_default() += 1;
            }
        }).unwrap();
        for j in 0..=n {
            for layer in Layer::ALL {
                let want = BigUint::from(tally.get(&(j, layer)).copied().unwrap_or(0));
                prop_assert_eq!(table.entry(n, j, layer).unwrap(), want.clone());
                let forgot: BigUint = marked.entry(n, j, layer).unwrap().values().sum();
                prop_assert_eq!(forgot, want);
            }
        }
    }

    #[test]
    fn samples_are_valid_and_on_target(n in 1usize..40, level in prop::option::of(0usize..6), seed: u64) {
        let spec = SamplerSpec { n, final_level: level, seed, count: 20 };
        match Sampler::new(n, level) {
            Ok(_) => {
                for p in sample_uniform(&spec).unwrap() {
                    prop_assert!(validate(p.steps()).valid);
                    prop_assert_eq!(p.len(), n);
                    if let Some(j) = level {
                        prop_assert_eq!(p.final_level(), j);
                    }
                }
            }
            Err(_) => prop_assert!(level.is_some_and(|j| j > n)),
        }
    }
}

#[test]
fn rational_series_scale() {
    let a = series(vec![2, 4, 6]);
    let half = Rational::new(1.into(), 2.into());
    assert_eq!(a.scale(&half), series(vec![1, 2, 3]));
}
