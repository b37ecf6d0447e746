//! Density probes at a point under anisotropic dilations, and the
//! counterexample separating approximate continuity at the origin from the
//! distributional limit `<|f(2^{-j}·)|, g> → <1, g>`.
//!
//! Windows are `A^{-j} B_r + x`. Monte Carlo estimates draw `u` uniformly in
//! `B_r` and test `A^{-j} u + x`, so the sampling cell never degenerates.
//! One-dimensional sets with an exact measure bypass sampling entirely.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::Profile;
use crate::lattice::DilationMatrix;
use crate::refinable::ProbeSpec;

/// Samples per independently seeded batch.
const BATCH: usize = 4096;

/// Spikes of the counterexample summed explicitly; the rest is added in
/// closed form.
pub const SPIKE_LEVELS: u32 = 60;

pub trait MeasurableSet: Send + Sync {
    fn dim(&self) -> usize;

    fn contains(&self, y: &[f64]) -> bool;

    /// Exact measure of the intersection with `[lo, hi]` (one dimension only).
    fn exact_measure_in(&self, _lo: f64, _hi: f64) -> Option<f64> {
        None
    }

    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy)]
pub struct WholeSpace {
    pub n: usize,
}

impl MeasurableSet for WholeSpace {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, _y: &[f64]) -> bool {
        true
    }

    fn exact_measure_in(&self, lo: f64, hi: f64) -> Option<f64> {
        (self.n == 1).then(|| (hi - lo).max(0.0))
    }

    fn describe(&self) -> String {
        format!("R^{}", self.n)
    }
}

/// Finite union of closed intervals on the line (endpoints may be infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Self {
        intervals.retain(|(a, b)| a < b);
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { intervals: merged }
    }

    pub fn whole_line() -> Self {
        Self::new(vec![(f64::NEG_INFINITY, f64::INFINITY)])
    }

    pub fn complement_of(lo: f64, hi: f64) -> Self {
        Self::new(vec![(f64::NEG_INFINITY, lo), (hi, f64::INFINITY)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }
}

impl MeasurableSet for IntervalUnion {
    fn dim(&self) -> usize {
        1
    }

    fn contains(&self, y: &[f64]) -> bool {
        self.intervals.iter().any(|(a, b)| *a <= y[0] && y[0] <= *b)
    }

    fn exact_measure_in(&self, lo: f64, hi: f64) -> Option<f64> {
        Some(
            self.intervals
                .iter()
                .map(|(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
                .sum(),
        )
    }

    fn describe(&self) -> String {
        format!("interval union {:?}", self.intervals)
    }
}

/// Set given by a membership predicate.
pub struct PredicateSet<F> {
    n: usize,
    name: String,
    f: F,
}

impl<F> PredicateSet<F>
where
    F: Fn(&[f64]) -> bool + Send + Sync,
{
    pub fn new(n: usize, name: impl Into<String>, f: F) -> Self {
        Self {
            n,
            name: name.into(),
            f,
        }
    }
}

impl<F> MeasurableSet for PredicateSet<F>
where
    F: Fn(&[f64]) -> bool + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, y: &[f64]) -> bool {
        (self.f)(y)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Spike `ℓ` of the counterexample: the open interval
/// `(2^{-ℓ-1}, 2^{-ℓ-1} + 2^{-2ℓ-2})`.
pub fn spike(l: u32) -> (f64, f64) {
    let a = 0.5f64.powi(l as i32 + 1);
    (a, a + 0.25f64.powi(l as i32 + 1))
}

/// Index of the spike containing `y`, if any.
fn spike_index(y: f64) -> Option<u32> {
    if !(y > 0.0 && y < 1.0) {
        return None;
    }
    let guess = (-y.log2()).floor() as i64 - 1;
    (guess - 1..=guess + 1)
        .filter(|l| *l >= 0)
        .map(|l| l as u32)
        .find(|&l| {
            let (a, b) = spike(l);
            a < y && y < b
        })
}

/// Measure of the union of spikes `ℓ ≥ 0` inside `[lo, hi]`.
fn spike_measure_in(lo: f64, hi: f64) -> f64 {
    let mut total: f64 = (0..=SPIKE_LEVELS)
        .map(|l| {
            let (a, b) = spike(l);
            (b.min(hi) - a.max(lo)).max(0.0)
        })
        .sum();
    // the remaining spikes sit inside (0, 2^{-L-1}] and have total length 4^{-L-1}/3
    let (_, last_end) = spike(SPIKE_LEVELS + 1);
    if lo <= 0.0 && hi >= last_end {
        total += 0.25f64.powi(SPIKE_LEVELS as i32 + 1) / 3.0;
    }
    total
}

/// The counterexample `f = χ[-1,1] + Σ_ℓ 2^{ℓ+2} χ(spike ℓ)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CounterexampleFunction;

impl CounterexampleFunction {
    pub fn value(&self, y: f64) -> f64 {
        if !(-1.0..=1.0).contains(&y) {
            return 0.0;
        }
        match spike_index(y) {
            Some(l) => 1.0 + 2f64.powi(l as i32 + 2),
            None => 1.0,
        }
    }
}

impl Profile for CounterexampleFunction {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, s: &[f64]) -> Complex64 {
        Complex64::new(self.value(s[0]), 0.0)
    }

    fn describe(&self) -> String {
        "counterexample f".into()
    }

    fn superlevel_set(&self, target: Complex64, delta: f64) -> Option<Arc<dyn MeasurableSet>> {
        // exact only when no spike value qualifies; spike values are 1 + 2^{ℓ+2} ≥ 5
        let spike_hit = (0..=SPIKE_LEVELS + 2)
            .any(|l| (Complex64::new(1.0 + 2f64.powi(l as i32 + 2), 0.0) - target).norm() < delta);
        if spike_hit || (target.re > 4.0 && delta > 1.0) {
            return None;
        }
        Some(Arc::new(CounterexampleLevelSet {
            base: (Complex64::new(1.0, 0.0) - target).norm() < delta,
            outside: target.norm() < delta,
        }))
    }
}

/// Union of selected pieces of the counterexample's level structure: the
/// base `F = [-1,1] \ spikes` and/or the outside `R \ [-1,1]`.
#[derive(Debug, Clone, Copy)]
pub struct CounterexampleLevelSet {
    pub base: bool,
    pub outside: bool,
}

impl CounterexampleLevelSet {
    /// The set `F` on which the counterexample equals one.
    pub fn f_set() -> Self {
        Self {
            base: true,
            outside: false,
        }
    }
}

impl MeasurableSet for CounterexampleLevelSet {
    fn dim(&self) -> usize {
        1
    }

    fn contains(&self, y: &[f64]) -> bool {
        let y = y[0];
        if (-1.0..=1.0).contains(&y) {
            self.base && spike_index(y).is_none()
        } else {
            self.outside
        }
    }

    fn exact_measure_in(&self, lo: f64, hi: f64) -> Option<f64> {
        let mut m = 0.0;
        if self.base {
            let a = lo.max(-1.0);
            let b = hi.min(1.0);
            if b > a {
                m += (b - a) - spike_measure_in(a, b);
            }
        }
        if self.outside {
            m += (hi.min(-1.0) - lo).max(0.0) + (hi - lo.max(1.0)).max(0.0);
        }
        Some(m)
    }

    fn describe(&self) -> String {
        format!("counterexample level set {self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub ratio: f64,
    pub stderr: f64,
    pub samples: usize,
    pub exact: bool,
}

/// `|E ∩ (A^{-j} B_r + x)| / |A^{-j} B_r|`, exactly when the set allows it.
pub fn density_ratio(
    set: &dyn MeasurableSet,
    dilation: &DilationMatrix,
    x: &[f64],
    r: f64,
    j: i32,
    samples: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    check_density_args(set, dilation, x, r, samples)?;
    if dilation.dim() == 1 {
        let half = r * (dilation.entry(0, 0).unsigned_abs() as f64).powi(-j);
        if let Some(m) = set.exact_measure_in(x[0] - half, x[0] + half) {
            return Ok(DensityEstimate {
                ratio: (m / (2.0 * half)).clamp(0.0, 1.0),
                stderr: 0.0,
                samples: 0,
                exact: true,
            });
        }
    }
    density_ratio_monte_carlo(set, dilation, x, r, j, samples, seed)
}

/// Monte Carlo estimate regardless of any exact path.
pub fn density_ratio_monte_carlo(
    set: &dyn MeasurableSet,
    dilation: &DilationMatrix,
    x: &[f64],
    r: f64,
    j: i32,
    samples: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    check_density_args(set, dilation, x, r, samples)?;
    let n = dilation.dim();
    let shrink = dilation.power_f64(-j);
    let batches = samples.div_ceil(BATCH);
    let hits: usize = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut u = vec![0.0; n];
            let mut y = vec![0.0; n];
            let mut hits = 0usize;
            for _ in 0..count {
                sample_ball(&mut rng, r, &mut u);
                for i in 0..n {
                    y[i] = x[i] + (0..n).map(|k| shrink[i * n + k] * u[k]).sum::<f64>();
                }
                if set.contains(&y) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(DensityEstimate {
        ratio: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        exact: false,
    })
}

fn check_density_args(
    set: &dyn MeasurableSet,
    dilation: &DilationMatrix,
    x: &[f64],
    r: f64,
    samples: usize,
) -> Result<()> {
    let n = dilation.dim();
    if set.dim() != n || x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if set.dim() != n { set.dim() } else { x.len() },
        });
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if samples < 1000 {
        return Err(Error::InvalidParameter(format!(
            "density estimates need at least 1000 samples, got {samples}"
        )));
    }
    Ok(())
}

/// Uniform point of the Euclidean ball of radius `r`, by rejection from the
/// enclosing cube.
fn sample_ball(rng: &mut ChaCha8Rng, r: f64, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
            norm2 += *v * *v;
        }
        if norm2 <= 1.0 {
            out.iter_mut().for_each(|v| *v *= r);
            return;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitVerdict {
    ConvergesToOne,
    ConvergesToZero,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub label: String,
    pub j_values: Vec<i32>,
    pub ratios: Vec<f64>,
    pub stderr: Vec<f64>,
    pub exact: bool,
    pub verdict: LimitVerdict,
}

impl DensityCurve {
    /// `|last − target|`, or one when the last three values move away from
    /// the target by more than three standard errors.
    pub fn trend_residual(&self, target: f64) -> f64 {
        let Some(&last) = self.ratios.last() else {
            return 1.0;
        };
        let start = self.ratios.len().saturating_sub(3);
        let monotone = (start + 1..self.ratios.len()).all(|i| {
            let slack = 3.0 * (self.stderr[i - 1].powi(2) + self.stderr[i].powi(2)).sqrt() + 1e-12;
            let step = self.ratios[i] - self.ratios[i - 1];
            if target >= 0.5 {
                step >= -slack
            } else {
                step <= slack
            }
        });
        let gap = (last - target).abs();
        if monotone {
            gap
        } else {
            gap.max(1.0)
        }
    }

    /// Sets the verdict against `target` (0 or 1) with tolerance `delta`.
    pub fn classify(&mut self, target: f64, delta: f64) {
        self.verdict = if self.trend_residual(target) <= delta {
            if target >= 0.5 {
                LimitVerdict::ConvergesToOne
            } else {
                LimitVerdict::ConvergesToZero
            }
        } else {
            LimitVerdict::Inconclusive
        };
    }
}

/// Density of `set` at `x` over the probe's `j` values. The verdict is
/// assigned against `target`.
pub fn density_curve(
    label: &str,
    set: &dyn MeasurableSet,
    dilation: &DilationMatrix,
    x: &[f64],
    probe: &ProbeSpec,
    target: f64,
) -> Result<DensityCurve> {
    let estimates: Vec<DensityEstimate> = probe
        .j_values
        .iter()
        .map(|&j| {
            density_ratio(
                set,
                dilation,
                x,
                probe.radius,
                j,
                probe.samples,
                level_seed(probe.seed, j),
            )
        })
        .collect::<Result<_>>()?;
    let mut curve = DensityCurve {
        label: label.to_string(),
        j_values: probe.j_values.clone(),
        ratios: estimates.iter().map(|e| e.ratio).collect(),
        stderr: estimates.iter().map(|e| e.stderr).collect(),
        exact: estimates.iter().all(|e| e.exact),
        verdict: LimitVerdict::Inconclusive,
    };
    curve.classify(target, probe.delta);
    Ok(curve)
}

/// Seed for level `j`, so different levels draw independent samples.
pub fn level_seed(seed: u64, j: i32) -> u64 {
    seed ^ (j as i64 as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Density at `x` of `{y : |f(y) − target| < delta}`. A converging-to-one
/// curve supports approximate continuity at `x` with value `target`; the
/// probe cannot refute it.
pub fn approx_continuity_probe(
    f: &dyn Profile,
    dilation: &DilationMatrix,
    x: &[f64],
    target: Complex64,
    delta: f64,
    probe: &ProbeSpec,
) -> Result<DensityCurve> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let label = format!("|f - {target}| < {delta}");
    match f.superlevel_set(target, delta) {
        Some(set) => density_curve(&label, set.as_ref(), dilation, x, probe, 1.0),
        None => {
            let set = PredicateSet::new(f.dim(), label.clone(), |y: &[f64]| {
                (f.eval(y) - target).norm() < delta
            });
            density_curve(&label, &set, dilation, x, probe, 1.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocallyNonzeroResult {
    /// Smallest `j` whose zero fraction is below `epsilon`.
    pub passing_j: Option<i32>,
    /// `(j, zero fraction, stderr)` for every probed level.
    pub fractions: Vec<(i32, f64, f64)>,
}

/// Scans `j = 0..=j_max` for the first window `A^{-j} B_r + x` in which
/// `{f = 0}` occupies less than `epsilon` of the measure.
#[allow(clippy::too_many_arguments)]
pub fn locally_nonzero_probe(
    f: &dyn Profile,
    dilation: &DilationMatrix,
    x: &[f64],
    epsilon: f64,
    r: f64,
    j_max: i32,
    samples: usize,
    seed: u64,
) -> Result<LocallyNonzeroResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    const ZERO: f64 = 1e-12;
    let exact = f.superlevel_set(Complex64::new(0.0, 0.0), ZERO);
    let predicate = PredicateSet::new(f.dim(), "zero set", |y: &[f64]| f.eval(y).norm() < ZERO);
    let set: &dyn MeasurableSet = match &exact {
        Some(s) => s.as_ref(),
        None => &predicate,
    };
    let mut fractions = Vec::new();
    for j in 0..=j_max {
        let e = density_ratio(set, dilation, x, r, j, samples, level_seed(seed, j))?;
        fractions.push((j, e.ratio, e.stderr));
        if e.ratio < epsilon {
            return Ok(LocallyNonzeroResult {
                passing_j: Some(j),
                fractions,
            });
        }
    }
    Ok(LocallyNonzeroResult {
        passing_j: None,
        fractions,
    })
}

/// Nonnegative test function for the distributional pairing.
pub trait TestBump: Send + Sync {
    fn eval(&self, t: f64) -> f64;

    /// Points where the function may fail to be smooth or changes regime;
    /// quadrature splits there. Must include the support endpoints.
    fn breakpoints(&self) -> Vec<f64>;
}

/// `1` on `[-1,1]`, `0` outside `(-2,2)`, joined by the smooth step
/// `h(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)})`. Since `h(s) + h(1-s) = 1`
/// its integral is exactly 3.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmoothTrapezoid;

fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

impl TestBump for SmoothTrapezoid {
    fn eval(&self, t: f64) -> f64 {
        smooth_step(2.0 - t.abs())
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![-2.0, -1.0, 1.0, 2.0]
    }
}

/// Checks nonnegativity, value one on `[-1,1]`, support in `[-2,2]` and
/// monotonicity on the transition intervals by dense sampling.
pub fn validate_test_bump(g: &dyn TestBump) -> Result<()> {
    const N: usize = 4000;
    let bad = |msg: String| Err(Error::BadTestFunction(msg));
    let mut prev_left = 0.0;
    let mut prev_right = 1.0;
    for i in 0..=N {
        let s = i as f64 / N as f64;
        let inner = g.eval(-1.0 + 2.0 * s);
        if (inner - 1.0).abs() > 1e-12 {
            return bad(format!("g({}) = {inner}, expected 1", -1.0 + 2.0 * s));
        }
        for out in [-4.0 + 2.0 * s, 2.0 + 2.0 * s] {
            let v = g.eval(out);
            if out.abs() > 2.0 && v != 0.0 {
                return bad(format!("g({out}) = {v} outside [-2,2]"));
            }
        }
        let left = g.eval(-2.0 + s);
        let right = g.eval(1.0 + s);
        if left < 0.0 || right < 0.0 || !left.is_finite() || !right.is_finite() {
            return bad("g must be finite and nonnegative".into());
        }
        if left < prev_left - 1e-15 {
            return bad(format!("g decreases at {}", -2.0 + s));
        }
        if right > prev_right + 1e-15 {
            return bad(format!("g increases at {}", 1.0 + s));
        }
        prev_left = left;
        prev_right = right;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRecord {
    pub j: u32,
    /// `2^j ∫_{-2^{-j}}^{2^{-j}} f`, exact.
    pub q_j: BigRational,
    /// `<|f(2^{-j}·)|, g>`.
    pub pairing: f64,
    /// `<1, g>`.
    pub one_pairing: f64,
}

/// `2^j ∫_{-2^{-j}}^{2^{-j}} f(y) dy` in exact arithmetic: spikes up to
/// `SPIKE_LEVELS` summed one by one, the rest by the geometric tail.
pub fn counterexample_q(j: u32) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            num_traits::pow(two.clone(), e as usize)
        } else {
            num_traits::pow(two.clone(), (-e) as usize).recip()
        }
    };
    let window = pow2(-(j as i64));
    // the base indicator contributes the full window [-2^{-j}, 2^{-j}]
    let mut integral = window.clone() * &two;
    // spike ℓ lies inside the window iff ℓ ≥ j; its mass is 2^{ℓ+2} 4^{-ℓ-1} = 2^{-ℓ}
    for l in j..=SPIKE_LEVELS.max(j) {
        if l > SPIKE_LEVELS {
            break;
        }
        integral += pow2(-(l as i64));
    }
    let tail_start = SPIKE_LEVELS.max(j.saturating_sub(1)) + 1;
    integral += pow2(1 - tail_start as i64);
    integral / window
}

/// Exact density of `F` in `2^{-j}[-1,1]`: `1 − 2^{-j}/6`.
pub fn counterexample_density_exact(j: u32) -> BigRational {
    let six_pow = BigRational::from_integer(BigInt::from(6) * (BigInt::one() << j as usize));
    BigRational::one() - six_pow.recip()
}

/// The distributional pairing of the counterexample at level `j`.
pub fn han_counterexample(j: u32, g: Option<&dyn TestBump>) -> Result<CounterexampleRecord> {
    let default = SmoothTrapezoid;
    let g = g.unwrap_or(&default);
    validate_test_bump(g)?;
    const TOL: f64 = 1e-13;
    let integrate = |a: f64, b: f64, h: &dyn Fn(f64) -> f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        quadrature::double_exponential::integrate(h, a, b, TOL).integral
    };
    let mut cuts = g.breakpoints();
    cuts.sort_by(f64::total_cmp);
    let one_pairing: f64 = cuts
        .windows(2)
        .map(|w| integrate(w[0], w[1], &|t| g.eval(t)))
        .sum();

    // f(2^{-j} t) = χ[-2^j, 2^j](t) + Σ_ℓ 2^{ℓ+2} χ(2^j spike ℓ)(t)
    let scale = 2f64.powi(j as i32);
    let (lo, hi) = (cuts[0], *cuts.last().unwrap());
    let base: f64 = cuts
        .windows(2)
        .map(|w| integrate(w[0].max(-scale), w[1].min(scale), &|t| g.eval(t)))
        .sum();
    let mut spikes = 0.0;
    for l in 0..=SPIKE_LEVELS {
        let (a, b) = spike(l);
        let (a, b) = (a * scale, b * scale);
        if b <= lo || a >= hi {
            continue;
        }
        let weight = 2f64.powi(l as i32 + 2);
        let mut inner = vec![a.max(lo), b.min(hi)];
        inner.extend(cuts.iter().copied().filter(|c| *c > a && *c < b));
        inner.sort_by(f64::total_cmp);
        spikes += weight
            * inner
                .windows(2)
                .map(|w| integrate(w[0], w[1], &|t| g.eval(t)))
                .sum::<f64>();
    }
    // remaining spikes sit where g is one; each has mass 2^{j-ℓ}
    let (tail_a, _) = spike(SPIKE_LEVELS + 1);
    if tail_a * scale <= 1.0 {
        spikes += 2f64.powi(j as i32 - SPIKE_LEVELS as i32);
    }
    Ok(CounterexampleRecord {
        j,
        q_j: counterexample_q(j),
        pairing: base + spikes,
        one_pairing,
    })
}
