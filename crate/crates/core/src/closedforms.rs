//! Closed-form generating functions evaluated as truncated series.
//!
//! Everything is built from the kernel roots
//!
//! ```text
//! u1, u2 = (1 - z + z^2 + z^3 +/- (1+z) W) / (2z),   W = sqrt(1 - 4z + 2z^2 + z^4)
//! ```
//!
//! where `u2 = 2z + O(z^2)` is the root cancelled by the kernel method and
//! level `j` is extracted with `[u^j] 1/(u - u1) = -u1^-(j+1)`.
//!
//! Every public `gf_*` function takes an `order` and returns a series whose
//! coefficients `z^0 ..= z^order` are exact.

use crate::path::Layer;
use crate::series::{MarkCap, MarkPoly, MarkedSeries, Rational, TruncatedSeries};
use num_bigint::BigInt;

/// Extra coefficients carried through intermediate steps.
const GUARD: i64 = 4;

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Working context: the absolute precision used for intermediate series.
#[derive(Clone, Copy)]
struct Ctx {
    precision: i64,
}

impl Ctx {
    fn for_order(order: usize) -> Ctx {
        Ctx {
            precision: order as i64 + 1 + GUARD,
        }
    }

    /// Polynomials are exact; give them enough room never to be the
    /// precision bottleneck.
    fn poly(&self, coeffs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::rational_poly(coeffs, self.precision + 2 * GUARD)
    }
}

/// `s / (c z^k)` without losing precision.
fn div_monomial(s: &TruncatedSeries, c: i64, k: i64) -> TruncatedSeries {
    s.shift(-k).scale(&rat(1, c))
}

fn inv(s: &TruncatedSeries) -> TruncatedSeries {
    s.invert()
        .expect("denominator has an invertible leading term")
}

/// Truncates to `z^order` and checks the promised precision was reached.
fn finish(s: TruncatedSeries, order: usize) -> TruncatedSeries {
    let want = order as i64 + 1;
    assert!(
        s.precision() >= want,
        "closed form computed to z^{} but z^{} was requested",
        s.precision() - 1,
        order
    );
    s.truncate(want)
}

/// The kernel `2z - u + zu - z^2 u + z u^2 - z^3 - z^3 u = z (u - u1)(u - u2)`
/// as coefficients of `u^0, u^1, u^2`.
fn kernel_coeffs(ctx: &Ctx) -> [TruncatedSeries; 3] {
    [
        ctx.poly(&[0, 2, 0, -1]),
        ctx.poly(&[-1, 1, -1, -1]),
        ctx.poly(&[0, 1]),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelRoots {
    /// Valuation -1.
    pub u1: TruncatedSeries,
    /// `2z + O(z^2)`.
    pub u2: TruncatedSeries,
    pub w: TruncatedSeries,
}

fn kernel_roots_ctx(ctx: &Ctx) -> KernelRoots {
    let w = ctx
        .poly(&[1, -4, 2, 0, 1])
        .truncate(ctx.precision)
        .sqrt()
        .unwrap();
    let base = ctx.poly(&[1, -1, 1, 1]);
    let tail = &ctx.poly(&[1, 1]) * &w;
    KernelRoots {
        u1: div_monomial(&(&base + &tail), 2, 1),
        u2: div_monomial(&(&base - &tail), 2, 1),
        w,
    }
}

/// `u1`, `u2` and `W`, each exact through `z^order`.
pub fn kernel_roots(order: usize) -> KernelRoots {
    let r = kernel_roots_ctx(&Ctx::for_order(order));
    KernelRoots {
        u1: finish(r.u1, order),
        u2: finish(r.u2, order),
        w: finish(r.w, order),
    }
}

/// Return paths: `((1-z)^2 - W) / (2z^2)`.
pub fn gf_sm(order: usize) -> TruncatedSeries {
    let ctx = Ctx::for_order(order);
    let w = kernel_roots_ctx(&ctx).w;
    finish(div_monomial(&(&ctx.poly(&[1, -2, 1]) - &w), 2, 2), order)
}

fn gf_sm_ctx(ctx: &Ctx) -> TruncatedSeries {
    let w = kernel_roots_ctx(ctx).w;
    div_monomial(&(&ctx.poly(&[1, -2, 1]) - &w), 2, 2)
}

/// Factor multiplying `u1^-(j+1)` in the level-`j` coefficient of a layer.
fn layer_numerator(ctx: &Ctx, roots: &KernelRoots, layer: Layer) -> TruncatedSeries {
    let z = ctx.poly(&[0, 1]);
    let one_plus_z = inv(&ctx.poly(&[1, 1]));
    let u2 = &roots.u2;
    match layer {
        Layer::F => div_monomial(&(&ctx.poly(&[1, -1, 1, 1]) - &(&z * u2)), 1, 1),
        Layer::G => &(u2 - &z) * &one_plus_z,
        Layer::H => &(&ctx.poly(&[1, 1, -2, -1]) + &(&z * u2)) * &one_plus_z,
        Layer::K => &(u2 - &ctx.poly(&[0, 2, 1])) * &one_plus_z,
    }
}

fn level_numerator(ctx: &Ctx, roots: &KernelRoots) -> TruncatedSeries {
    let z = ctx.poly(&[0, 1]);
    let num = &ctx.poly(&[1, 1, -2, -1]) + &(&z * &roots.u2);
    div_monomial(&(&num * &inv(&ctx.poly(&[1, 1]))), 1, 1)
}

fn u1_power(roots: &KernelRoots, j: usize) -> TruncatedSeries {
    inv(&roots.u1).pow(j as u32 + 1)
}

/// Partial paths ending at level `j`:
/// `(1 + z - 2z^2 - z^3 + z u2) / (z (1+z) u1^(j+1))`.
pub fn gf_level(j: usize, order: usize) -> TruncatedSeries {
    let ctx = Ctx::for_order(order);
    let roots = kernel_roots_ctx(&ctx);
    finish(&level_numerator(&ctx, &roots) * &u1_power(&roots, j), order)
}

/// Level-`j` paths whose last step puts them in `layer`.
pub fn gf_layer_level(layer: Layer, j: usize, order: usize) -> TruncatedSeries {
    let ctx = Ctx::for_order(order);
    let roots = kernel_roots_ctx(&ctx);
    finish(
        &layer_numerator(&ctx, &roots, layer) * &u1_power(&roots, j),
        order,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer0Constants {
    pub g0: TruncatedSeries,
    pub h0: TruncatedSeries,
    pub k0: TruncatedSeries,
}

/// The boundary series `g0, h0, k0` identified at `u = 0`.
pub fn gf_layer0_constants(order: usize) -> Layer0Constants {
    let ctx = Ctx::for_order(order);
    let w = kernel_roots_ctx(&ctx).w;
    let p = |c: &[i64]| ctx.poly(c);
    // 2 z^2 (z^2 - 2)
    let den = inv(&p(&[-2, 0, 1]));

    // -z^5 + z^3 W - z^2 - z W + 3z - 1 + W
    let g_num = &(&p(&[-1, 3, -1, 0, 0, -1]) + &(&p(&[1, -1, 0, 1]) * &w)) * &den;
    // -(-z^2 + 2z - 1 + W) / (2z)
    let h_num = -(&p(&[-1, 2, -1]) + &w);
    // -(-z^4 + z^3 + z^2 W + z W - 3z + 1 - W)
    let k_num = -(&(&p(&[1, -3, 0, 1, -1]) + &(&p(&[-1, 1, 1]) * &w)) * &den);

    Layer0Constants {
        g0: finish(div_monomial(&g_num, 2, 2), order),
        h0: finish(div_monomial(&h_num, 2, 1), order),
        k0: finish(div_monomial(&k_num, 2, 2), order),
    }
}

/// All partial paths, any final level (the substitution `u = 1`).
pub fn gf_total(order: usize) -> TruncatedSeries {
    let ctx = Ctx::for_order(order);
    let w = kernel_roots_ctx(&ctx).w;
    let num = &ctx.poly(&[2, -3, -7, -1, 1]) - &(&ctx.poly(&[2, 3, 1]) * &w);
    // 2z (1+z)(2z^2 + 3z - 1)
    let den = inv(&(&ctx.poly(&[1, 1]) * &ctx.poly(&[-1, 3, 2])));
    finish(div_monomial(&(&num * &den), 2, 1), order)
}

/// `u2` with flat steps marked by `t` and left steps by `w`.
pub fn marked_u2(order: usize, cap: MarkCap) -> MarkedSeries {
    let precision = order as i64 + 1 + GUARD;
    marked_u2_at(precision, cap)
}

fn marked_u2_at(precision: i64, cap: MarkCap) -> MarkedSeries {
    let poly = |terms: &[(u32, u32, i64)]| MarkPoly::from_integer_terms(terms, cap);
    let series = |cs: Vec<MarkPoly>| MarkedSeries::new(cap, 0, cs, precision + 2 * GUARD);
    // 1 - z^2 w
    let left = series(vec![poly(&[(0, 0, 1)]), poly(&[]), poly(&[(0, 1, -1)])]);
    // 1 - 2tz + (t^2 - 4 - w) z^2 - 2tw z^3 - w t^2 z^4
    let right = series(vec![
        poly(&[(0, 0, 1)]),
        poly(&[(1, 0, -2)]),
        poly(&[(2, 0, 1), (0, 0, -4), (0, 1, -1)]),
        poly(&[(1, 1, -2)]),
        poly(&[(2, 1, -1)]),
    ]);
    let root = (&left * &right).truncate(precision).sqrt().unwrap();
    // 1 - tz + w z^2 + tw z^3
    let base = series(vec![
        poly(&[(0, 0, 1)]),
        poly(&[(1, 0, -1)]),
        poly(&[(0, 1, 1)]),
        poly(&[(1, 1, 1)]),
    ]);
    (&base - &root).shift(-1).scale(&rat(1, 2))
}

/// Return paths counted by length, flats (`t`) and lefts (`w`):
/// `(u2 - z w) / (z (1 + t w z))`. The mark cap defaults to `order`.
pub fn gf_marked(order: usize, cap: Option<MarkCap>) -> MarkedSeries {
    let cap = cap.unwrap_or(MarkCap(order as u32));
    let precision = order as i64 + 1 + GUARD;
    let wide = precision + 2 * GUARD;
    let u2 = marked_u2_at(precision, cap);
    let zw = MarkedSeries::monomial(MarkPoly::w(cap), 1, cap, wide);
    let one = MarkPoly::from_integer_terms(&[(0, 0, 1)], cap);
    let tw = MarkPoly::from_integer_terms(&[(1, 1, 1)], cap);
    let denom = MarkedSeries::new(cap, 0, vec![one, tw], wide);
    let s = (&u2 - &zw)
        .shift(-1)
        .div(&denom)
        .expect("1 + t w z is a unit");
    let want = order as i64 + 1;
    assert!(s.precision() >= want);
    s.truncate(want)
}

/// Pieces of the bounded-height closed form
/// `s[n] = (Ao l+^n + Bo l-^n) / (Au l+^n + Bu l-^n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedHeightForm {
    pub ao: TruncatedSeries,
    pub bo: TruncatedSeries,
    pub au: TruncatedSeries,
    pub bu: TruncatedSeries,
    /// `(1 + z) W`.
    pub omega: TruncatedSeries,
    /// Roots of `X^2 - (1 - z + z^2 + z^3) X + (2z^2 - z^4)`.
    pub lambda_plus: TruncatedSeries,
    pub lambda_minus: TruncatedSeries,
}

fn bounded_form_ctx(ctx: &Ctx) -> BoundedHeightForm {
    let p = |c: &[i64]| ctx.poly(c);
    let omega = &p(&[1, 1]) * &kernel_roots_ctx(ctx).w;
    // z^3 + z^2 + 3z - 1
    let q = p(&[-1, 3, 1, 1]);
    let po = &q * &p(&[1, 1]);
    let qo = &p(&[-1, 1]) * &omega;
    let pu = &p(&[1, 0, -1]) * &q;
    let su = &(&p(&[-1, 3, -1, 1]) * &inv(&p(&[1, -1]))) * &omega;
    let trace = p(&[1, -1, 1, 1]);
    let half = rat(1, 2);
    BoundedHeightForm {
        ao: &po + &qo,
        bo: &po - &qo,
        au: &pu + &su,
        bu: &pu - &su,
        lambda_plus: (&trace + &omega).scale(&half),
        lambda_minus: (&trace - &omega).scale(&half),
        omega,
    }
}

pub fn bounded_height_form(order: usize) -> BoundedHeightForm {
    let f = bounded_form_ctx(&Ctx::for_order(order));
    BoundedHeightForm {
        ao: finish(f.ao, order),
        bo: finish(f.bo, order),
        au: finish(f.au, order),
        bu: finish(f.bu, order),
        omega: finish(f.omega, order),
        lambda_plus: finish(f.lambda_plus, order),
        lambda_minus: finish(f.lambda_minus, order),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundedMethod {
    /// The `Ao, Bo, Au, Bu` ratio with powers of the characteristic roots.
    Closed,
    /// The three-term recurrence on numerator and denominator, seeded by
    /// solving the `H = 0` and `H = 1` systems directly.
    Recurrence,
}

/// Numerator and denominator of `s[H]` normalized as Cramer's rule gives
/// them: `D = det(I - zM)` for the height-`H` system `x = zMx + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedRatio {
    pub numerator: TruncatedSeries,
    pub denominator: TruncatedSeries,
}

impl BoundedRatio {
    pub fn series(&self) -> TruncatedSeries {
        &self.numerator * &inv(&self.denominator)
    }
}

/// Solves the finite height-`max_height` system by elimination over
/// truncated series. All pivots have constant term 1 since the matrix is
/// `I - zM`.
pub fn solve_bounded_system(max_height: usize, precision: i64) -> BoundedRatio {
    let h = max_height;
    // Unknown layout: f_1..f_H, g_0..g_{H-1}, h_0..h_H, k_0..k_{H-1}.
    let f_idx = |j: usize| (j >= 1 && j <= h).then(|| j - 1);
    let g_idx = |j: usize| (j < h).then(|| h + j);
    let h_idx = |j: usize| (j <= h).then(|| 2 * h + j);
    let k_idx = |j: usize| (j < h).then(|| 3 * h + 1 + j);
    let size = 4 * h + 1;

    // Row coefficients as multiples of z (M is a 0/1 matrix times z).
    let mut m = vec![vec![0i64; size]; size];
    let mut b = vec![0i64; size];
    {
        let mut put = |row: usize, var: char, j: usize| {
            let col = match var {
                'f' if j == 0 => {
                    b[row] += 1;
                    return;
                }
                'f' => f_idx(j),
                'g' => g_idx(j),
                'h' => h_idx(j),
                _ => k_idx(j),
            };
            if let Some(c) = col {
                m[row][c] += 1;
            }
        };
        for j in 0..=h {
            if let Some(r) = f_idx(j) {
                for v in ['f', 'g', 'h'] {
                    put(r, v, j - 1);
                }
            }
            if let Some(r) = g_idx(j) {
                for v in ['f', 'g', 'h', 'k'] {
                    put(r, v, j + 1);
                }
            }
            if let Some(r) = h_idx(j) {
                for v in ['f', 'g', 'h', 'k'] {
                    put(r, v, j);
                }
            }
            if let Some(r) = k_idx(j) {
                for v in ['g', 'h', 'k'] {
                    put(r, v, j + 1);
                }
            }
        }
    }

    let z_times = |c: i64| TruncatedSeries::rational_poly(&[0, c], precision);
    let mut a: Vec<Vec<TruncatedSeries>> = (0..size)
        .map(|r| {
            (0..size)
                .map(|c| {
                    let diag = TruncatedSeries::rational_poly(&[(r == c) as i64], precision);
                    &diag - &z_times(m[r][c])
                })
                .collect()
        })
        .collect();
    let mut rhs: Vec<TruncatedSeries> = b.iter().map(|&c| z_times(c)).collect();

    let mut det = TruncatedSeries::one((), precision);
    for col in 0..size {
        let pivot_inv = inv(&a[col][col]);
        det = &det * &a[col][col];
        for row in col + 1..size {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = &a[row][col] * &pivot_inv;
            let (top, bottom) = a.split_at_mut(row);
            for (t, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *t = &*t - &(&factor * p);
            }
            let delta = &factor * &rhs[col];
            rhs[row] = &rhs[row] - &delta;
        }
    }
    let mut x = vec![TruncatedSeries::zero((), precision); size];
    for row in (0..size).rev() {
        let mut acc = rhs[row].clone();
        for c in row + 1..size {
            acc = &acc - &(&a[row][c] * &x[c]);
        }
        x[row] = &acc * &inv(&a[row][row]);
    }

    let mut s = TruncatedSeries::one((), precision);
    for idx in [g_idx(0), h_idx(0), k_idx(0)].into_iter().flatten() {
        s = &s + &x[idx];
    }
    BoundedRatio {
        numerator: &s * &det,
        denominator: det,
    }
}

/// Numerator/denominator pairs of `s[0..=max_height]` from the recurrence
/// `X_{n+2} = (1 - z + z^2 + z^3) X_{n+1} - (2z^2 - z^4) X_n`.
pub fn bounded_recurrence(max_height: usize, precision: i64) -> Vec<BoundedRatio> {
    let trace = TruncatedSeries::rational_poly(&[1, -1, 1, 1], precision);
    let norm = TruncatedSeries::rational_poly(&[0, 0, 2, 0, -1], precision);
    let mut out = vec![solve_bounded_system(0, precision)];
    if max_height >= 1 {
        out.push(solve_bounded_system(1, precision));
    }
    while out.len() <= max_height {
        let n = out.len();
        let step = |a: &TruncatedSeries, b: &TruncatedSeries| &(&trace * a) - &(&norm * b);
        let next = BoundedRatio {
            numerator: step(&out[n - 1].numerator, &out[n - 2].numerator),
            denominator: step(&out[n - 1].denominator, &out[n - 2].denominator),
        };
        out.push(next);
    }
    out
}

/// Return paths of height at most `max_height`.
pub fn gf_bounded(max_height: usize, order: usize, method: BoundedMethod) -> TruncatedSeries {
    let ctx = Ctx::for_order(order);
    let s = match method {
        BoundedMethod::Closed => {
            let f = bounded_form_ctx(&ctx);
            let n = max_height as u32;
            let lp = f.lambda_plus.pow(n);
            let lm = f.lambda_minus.pow(n);
            let num = &(&f.ao * &lp) + &(&f.bo * &lm);
            let den = &(&f.au * &lp) + &(&f.bu * &lm);
            &num * &inv(&den)
        }
        BoundedMethod::Recurrence => bounded_recurrence(max_height, ctx.precision)
            .pop()
            .expect("at least one entry")
            .series(),
    };
    finish(s, order)
}

/// Return paths of height greater than `max_height`: `s[inf] - s[H]`.
pub fn gf_excess_height(max_height: usize, order: usize) -> TruncatedSeries {
    let ctx = Ctx::for_order(order);
    let bounded = gf_bounded(max_height, order + GUARD as usize, BoundedMethod::Closed);
    finish(&gf_sm_ctx(&ctx) - &bounded, order)
}

/// `[u^j] F(u)` computed from the un-cancelled form `F(u) = N(u) / kernel(u)`
/// with `N(u) = 2z - z^3 + u (-1 + z + z^2 + (z^2 + z^3)(g0 + h0 + k0))`.
/// `1/kernel(u)` is expanded as a power series in `u` over Laurent series in
/// `z`, so every coefficient passes through heavy cancellation; agreement
/// with [`gf_layer_level`] confirms the cancelled factor really divides out.
pub fn uncancelled_layer_f(j: usize, order: usize) -> TruncatedSeries {
    let extra = j as i64 + 2;
    let ctx = Ctx {
        precision: order as i64 + 1 + GUARD + extra,
    };
    let [k0, k1, k2] = kernel_coeffs(&ctx);
    let k0_inv = inv(&k0);
    let boundary = &gf_sm_ctx(&ctx) - &ctx.poly(&[1]);
    let n0 = ctx.poly(&[0, 2, 0, -1]);
    let n1 = &ctx.poly(&[-1, 1, 1]) + &(&ctx.poly(&[0, 0, 1, 1]) * &boundary);

    // 1/kernel = sum c_i u^i with c_i = -(k1 c_{i-1} + k2 c_{i-2}) / k0.
    let mut c: Vec<TruncatedSeries> = vec![k0_inv.clone()];
    for i in 1..=j {
        let mut acc = &k1 * &c[i - 1];
        if i >= 2 {
            acc = &acc + &(&k2 * &c[i - 2]);
        }
        c.push(-(&acc * &k0_inv));
    }
    let mut out = &n0 * &c[j];
    if j >= 1 {
        out = &out + &(&n1 * &c[j - 1]);
    }
    finish(out, order)
}

/// `[z^n]` as integers for `n = 0..=order`; panics on a fractional
/// coefficient, which would mean a broken formula.
pub fn integer_sequence(s: &TruncatedSeries, order: usize) -> Vec<BigInt> {
    s.integer_coeffs(order as i64)
        .unwrap_or_else(|e| panic!("non-integer coefficient: {e}"))
}

/// One of the named generating functions, for front ends that pick a
/// series by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Sm,
    Level(usize),
    Total,
    Bounded(usize),
    LayerLevel(Layer, usize),
}

impl Generator {
    pub fn evaluate(self, order: usize) -> TruncatedSeries {
        match self {
            Generator::Sm => gf_sm(order),
            Generator::Level(j) => gf_level(j, order),
            Generator::Total => gf_total(order),
            Generator::Bounded(h) => gf_bounded(h, order, BoundedMethod::Closed),
            Generator::LayerLevel(l, j) => gf_layer_level(l, j, order),
        }
    }

    pub fn name(self) -> String {
        match self {
            Generator::Sm => "sm".into(),
            Generator::Level(j) => format!("level:{j}"),
            Generator::Total => "total".into(),
            Generator::Bounded(h) => format!("bounded:{h}"),
            Generator::LayerLevel(l, j) => format!("layer:{l}:{j}"),
        }
    }
}

impl std::str::FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| format!("expected a nonnegative integer, got {p:?}"))
        };
        match parts.as_slice() {
            ["sm"] => Ok(Generator::Sm),
            ["total"] => Ok(Generator::Total),
            ["level", j] => Ok(Generator::Level(num(j)?)),
            ["bounded", h] => Ok(Generator::Bounded(num(h)?)),
            ["layer", l, j] => {
                let mut chars = l.chars();
                let layer = match (chars.next(), chars.next()) {
                    (Some(c), None) => Layer::from_char(c),
                    _ => None,
                }
                .ok_or_else(|| format!("unknown layer {l:?}"))?;
                Ok(Generator::LayerLevel(layer, num(j)?))
            }
            _ => Err(format!("unknown generating function {s:?}")),
        }
    }
}

/// `1 / (1 - z)` to the given order, the all-flat series.
pub fn geometric(order: usize) -> TruncatedSeries {
    let p = order as i64 + 1;
    TruncatedSeries::rational_poly(&[1, -1], p)
        .invert()
        .unwrap()
}
