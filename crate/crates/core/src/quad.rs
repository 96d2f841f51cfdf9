//! Deterministic adaptive quadrature.
//!
//! All integrals in the crate go through [`adaptive`]: a globally adaptive
//! bisection scheme that refines in synchronous passes. Every pass evaluates
//! the nodes of all freshly split segments (concurrently when the `parallel`
//! feature is on), then re-accumulates the segment contributions in
//! ascending left-endpoint order with pairwise summation. The refinement
//! decisions depend only on the computed values, so the result is
//! bit-identical for any worker count.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{CasimirError, Result};
use crate::parallel;

/// Hard cap on the number of live segments in a single adaptive integral.
const MAX_SEGMENTS: usize = 4096;

/// Interpolatory rule applied on every segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseRule {
    /// 15-point Kronrod extension of the 7-point Gauss rule.
    #[default]
    GaussKronrod15,
    /// 33-point Clenshaw–Curtis rule, error from the embedded 17-point rule.
    ClenshawCurtis33,
}

/// Tolerances and budgets governing an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub base_rule: BaseRule,
    /// Scale `s` of the map `x = s t / (1 - t)`. `None` lets the caller
    /// pick a physically motivated scale.
    pub transform_scale: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-5,
            abs_tol: 0.0,
            max_depth: 30,
            base_rule: BaseRule::GaussKronrod15,
            transform_scale: None,
        }
    }
}

impl QuadratureSpec {
    pub const MIN_REL_TOL: f64 = 1e-10;
    pub const MAX_DEPTH: u32 = 40;

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_rule(mut self, rule: BaseRule) -> Self {
        self.base_rule = rule;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.transform_scale = Some(scale);
        self
    }

    /// Spec for an integral nested one level inside this one.
    pub fn inner(&self) -> Self {
        let mut inner = *self;
        inner.rel_tol = (self.rel_tol * 0.1).max(Self::MIN_REL_TOL);
        inner.abs_tol = 0.0;
        inner.transform_scale = None;
        inner
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= Self::MIN_REL_TOL) || !self.rel_tol.is_finite() {
            return Err(CasimirError::InvalidQuadrature(format!(
                "rel_tol must be >= {:e}, got {}",
                Self::MIN_REL_TOL,
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(CasimirError::InvalidQuadrature(format!(
                "abs_tol must be non-negative, got {}",
                self.abs_tol
            )));
        }
        if self.max_depth > Self::MAX_DEPTH {
            return Err(CasimirError::InvalidQuadrature(format!(
                "max_depth must be <= {}, got {}",
                Self::MAX_DEPTH,
                self.max_depth
            )));
        }
        if let Some(s) = self.transform_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CasimirError::InvalidQuadrature(format!(
                    "transform_scale must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of one adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Deepest bisection level reached; large values flag endpoint singularities.
    pub depth: u32,
}

impl IntegralResult {
    fn zero() -> Self {
        Self {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
            depth: 0,
        }
    }

    pub(crate) fn scaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self.error_estimate *= factor.abs();
        self
    }
}

/// Serial (`Sequential`) or data-parallel (`Parallel`) node evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n if n <= 8 => values.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1] (positive half).
const GK15_X: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for GK15_X[1], [3], [5], [7].
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Clenshaw–Curtis weights on [-1, 1] for `n` intervals (`n + 1` nodes at
/// `cos(j pi / n)`), `n` even.
fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..=n)
        .map(|j| {
            let theta = j as f64 * std::f64::consts::PI / nf;
            let mut s = 0.0;
            for m in 1..=n / 2 {
                let b = if m == n / 2 { 1.0 } else { 2.0 };
                s += b / (4.0 * (m * m) as f64 - 1.0) * (2.0 * m as f64 * theta).cos();
            }
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            c / nf * (1.0 - s)
        })
        .collect()
}

struct CcTables {
    x: Vec<f64>,
    w33: Vec<f64>,
    w17: Vec<f64>,
}

fn cc_tables() -> &'static CcTables {
    static TABLES: std::sync::OnceLock<CcTables> = std::sync::OnceLock::new();
    TABLES.get_or_init(|| CcTables {
        x: (0..=32)
            .map(|j| (j as f64 * std::f64::consts::PI / 32.0).cos())
            .collect(),
        w33: clenshaw_curtis_weights(32),
        w17: clenshaw_curtis_weights(16),
    })
}

impl BaseRule {
    fn nodes(&self, a: f64, b: f64) -> Vec<f64> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        match self {
            BaseRule::GaussKronrod15 => {
                let mut x = Vec::with_capacity(15);
                x.push(c);
                for &xi in &GK15_X[..7] {
                    x.push(c - h * xi);
                    x.push(c + h * xi);
                }
                x
            }
            BaseRule::ClenshawCurtis33 => cc_tables().x.iter().map(|&xi| c + h * xi).collect(),
        }
    }

    /// Returns (value, error estimate) from function values at `nodes(a, b)`.
    fn combine(&self, a: f64, b: f64, fv: &[f64]) -> (f64, f64) {
        let h = 0.5 * (b - a);
        let (kron, gauss, mean_abs_dev, res_abs) = match self {
            BaseRule::GaussKronrod15 => {
                let fc = fv[0];
                let mut rk = fc * GK15_WK[7];
                let mut rg = fc * GK15_WG[3];
                let mut rabs = rk.abs();
                for j in 0..7 {
                    let (f1, f2) = (fv[1 + 2 * j], fv[2 + 2 * j]);
                    rk += GK15_WK[j] * (f1 + f2);
                    rabs += GK15_WK[j] * (f1.abs() + f2.abs());
                    if j % 2 == 1 {
                        rg += GK15_WG[j / 2] * (f1 + f2);
                    }
                }
                let mean = 0.5 * rk;
                let mut asc = GK15_WK[7] * (fc - mean).abs();
                for j in 0..7 {
                    asc += GK15_WK[j] * ((fv[1 + 2 * j] - mean).abs() + (fv[2 + 2 * j] - mean).abs());
                }
                (rk, rg, asc, rabs)
            }
            BaseRule::ClenshawCurtis33 => {
                let t = cc_tables();
                let mut r33 = 0.0;
                let mut rabs = 0.0;
                for (w, f) in t.w33.iter().zip(fv) {
                    r33 += w * f;
                    rabs += w * f.abs();
                }
                let r17: f64 = t.w17.iter().enumerate().map(|(j, w)| w * fv[2 * j]).sum();
                let mean = 0.5 * r33;
                let asc: f64 = t.w33.iter().zip(fv).map(|(w, f)| w * (f - mean).abs()).sum();
                (r33, r17, asc, rabs)
            }
        };
        let value = kron * h;
        let res_abs = res_abs * h.abs();
        let res_asc = mean_abs_dev * h.abs();
        let mut err = ((kron - gauss) * h).abs();
        if res_asc != 0.0 && err != 0.0 {
            err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
        }
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * res_abs);
        }
        (value, err)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

fn evaluate_segments<F>(f: &F, spans: &[(f64, f64, u32)], rule: BaseRule, exec: Exec) -> Vec<Segment>
where
    F: Fn(f64) -> f64 + Sync,
{
    let nodes: Vec<f64> = spans.iter().flat_map(|&(a, b, _)| rule.nodes(a, b)).collect();
    let values = match exec {
        Exec::Sequential => nodes.iter().map(|&x| f(x)).collect::<Vec<_>>(),
        Exec::Parallel => parallel::map(&nodes, |&x| f(x)),
    };
    let per = values.len() / spans.len().max(1);
    spans
        .iter()
        .zip(values.chunks(per.max(1)))
        .map(|(&(a, b, depth), fv)| {
            let (value, error) = rule.combine(a, b, fv);
            Segment { a, b, value, error, depth }
        })
        .collect()
}

/// Globally adaptive integral of `f` over the union of `[breaks[i], breaks[i+1]]`.
pub fn adaptive<F>(f: &F, breaks: &[f64], spec: &QuadratureSpec, exec: Exec) -> IntegralResult
where
    F: Fn(f64) -> f64 + Sync,
{
    if breaks.len() < 2 || breaks.first() == breaks.last() {
        return IntegralResult::zero();
    }
    let rule = spec.base_rule;
    let nodes_per_segment = rule.nodes(0.0, 1.0).len();
    let spans: Vec<(f64, f64, u32)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1], 0))
        .collect();
    let total_width: f64 = spans.iter().map(|s| s.1 - s.0).sum();
    let mut segments = evaluate_segments(f, &spans, rule, exec);
    let mut evaluations = spans.len() * nodes_per_segment;

    loop {
        let values: Vec<f64> = segments.iter().map(|s| s.value).collect();
        let errors: Vec<f64> = segments.iter().map(|s| s.error).collect();
        let value = pairwise_sum(&values);
        let error = pairwise_sum(&errors);
        let depth = segments.iter().map(|s| s.depth).max().unwrap_or(0);
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        let done = |converged| IntegralResult {
            value,
            error_estimate: error,
            evaluations,
            converged,
            depth,
        };
        if !value.is_finite() || !error.is_finite() {
            return done(false);
        }
        if error <= tol {
            return done(true);
        }

        let refinable = |s: &Segment| s.depth < spec.max_depth && s.error > 0.0;
        let mut split: Vec<bool> = segments
            .iter()
            .map(|s| refinable(s) && s.error > tol * (s.b - s.a) / total_width)
            .collect();
        if !split.iter().any(|&x| x) {
            let worst = segments
                .iter()
                .enumerate()
                .filter(|(_, s)| refinable(s))
                .max_by(|x, y| x.1.error.total_cmp(&y.1.error));
            match worst {
                Some((i, _)) => split[i] = true,
                None => return done(false),
            }
        }
        let n_split = split.iter().filter(|&&x| x).count();
        if segments.len() + n_split > MAX_SEGMENTS {
            return done(false);
        }

        let children: Vec<(f64, f64, u32)> = segments
            .iter()
            .zip(&split)
            .filter(|(_, &s)| s)
            .flat_map(|(s, _)| {
                let m = 0.5 * (s.a + s.b);
                [(s.a, m, s.depth + 1), (m, s.b, s.depth + 1)]
            })
            .collect();
        evaluations += children.len() * nodes_per_segment;
        let mut fresh = evaluate_segments(f, &children, rule, exec).into_iter();

        let mut next = Vec::with_capacity(segments.len() + n_split);
        for (seg, &s) in segments.iter().zip(&split) {
            if s {
                next.push(fresh.next().expect("left child"));
                next.push(fresh.next().expect("right child"));
            } else {
                next.push(*seg);
            }
        }
        segments = next;
    }
}

/// `∫_a^b f(x) dx`. Reversed limits give the negated integral.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> IntegralResult
where
    F: Fn(f64) -> f64 + Sync,
{
    if a == b {
        return IntegralResult::zero();
    }
    if b < a {
        return integrate_interval(f, b, a, spec).scaled(-1.0);
    }
    adaptive(&f, &[a, b], spec, Exec::Sequential)
}

/// The scale of the semi-infinite map, defaulting to 1.
fn scale_of(spec: &QuadratureSpec) -> f64 {
    spec.transform_scale.unwrap_or(1.0)
}

/// Integrand of `∫_a^∞ f` after `x = a + s t / (1 - t)`.
pub(crate) fn mapped<F>(f: &F, a: f64, s: f64) -> impl Fn(f64) -> f64 + Sync + '_
where
    F: Fn(f64) -> f64 + Sync,
{
    move |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let x = a + s * t / one_minus;
        let v = f(x) * s / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }
}

/// `∫_0^∞ f(x) dx` via `x = s t / (1 - t)`, adaptive on `t ∈ (0, 1)`.
pub fn integrate_semi_infinite<F>(f: F, spec: &QuadratureSpec) -> IntegralResult
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_from(f, 0.0, spec, Exec::Sequential)
}

/// `∫_a^∞ f(x) dx` via `x = a + s t / (1 - t)`.
pub fn integrate_from<F>(f: F, a: f64, spec: &QuadratureSpec, exec: Exec) -> IntegralResult
where
    F: Fn(f64) -> f64 + Sync,
{
    let g = mapped(&f, a, scale_of(spec));
    adaptive(&g, &[0.0, 1.0], spec, exec)
}

/// `(1/(2π)²) · 2 ∫_0^∞ r dr ∫_0^π dθ f(r, θ)` for `f` even in `θ`.
///
/// The radial map uses `spec.transform_scale`; the angular integral runs
/// at the tighter [`QuadratureSpec::inner`] tolerance.
pub fn integrate_polar<F>(f: F, spec: &QuadratureSpec) -> IntegralResult
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let inner = spec.inner();
    let failures = AtomicUsize::new(0);
    let radial = |r: f64| {
        let ang = adaptive(&|th: f64| f(r, th), &[0.0, std::f64::consts::PI], &inner, Exec::Sequential);
        if !ang.converged {
            failures.fetch_add(1, Ordering::Relaxed);
        }
        r * ang.value
    };
    let mut res = integrate_semi_infinite(radial, spec);
    if failures.load(Ordering::Relaxed) > 0 {
        res.converged = false;
    }
    res.scaled(2.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI))
}
