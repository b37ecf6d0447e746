//! Periodic filters, bracket products and zero-set masks.
//!
//! Filters are `Z^n`-periodic functions on the torus. Trigonometric
//! polynomials are evaluated exactly anywhere with the sign convention
//! `H(t) = Σ c_k e^{-2πi k·t}`; on a [`Grid`] the phase `k·a mod M` is reduced
//! in integers first so values at `t` and `t + m` agree bit for bit.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx_continuity::MeasurableSet;
use crate::error::{Error, Result};
use crate::lattice::{common_denominator, DilationMatrix};

/// Relative tolerance deciding whether a bracket sum has converged.
pub const BRACKET_REL_TOL: f64 = 1e-6;

/// Default relative threshold of the zero-set mask.
pub const DEFAULT_TAU_ZERO: f64 = 1e-10;

/// Default bracket truncation radius for dimension `n`.
pub fn default_bracket_radius(n: usize) -> usize {
    if n == 1 {
        64
    } else {
        8
    }
}

/// Uniform grid `{a/M : a ∈ {0..M-1}^n}` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub m: usize,
}

impl Grid {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid needs positive dimension and resolution (n = {n}, M = {m})"
            )));
        }
        Ok(Self { n, m })
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat index; the last coordinate varies fastest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<i64> {
        let mut a = vec![0i64; self.n];
        for i in (0..self.n).rev() {
            a[i] = (idx % self.m) as i64;
            idx /= self.m;
        }
        a
    }

    /// Flat index of an integer vector, reduced modulo `M`.
    pub fn flat_index(&self, a: &[i64]) -> usize {
        let m = self.m as i64;
        a.iter()
            .fold(0usize, |acc, &v| acc * self.m + v.rem_euclid(m) as usize)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .into_iter()
            .map(|a| a as f64 / self.m as f64)
            .collect()
    }

    pub fn point_rational(&self, idx: usize) -> Vec<Rational64> {
        self.multi_index(idx)
            .into_iter()
            .map(|a| Rational64::new(a, self.m as i64))
            .collect()
    }

    /// Index of `t_idx + p` modulo `Z^n`, or `None` when `p` is not a grid
    /// shift.
    pub fn shift(&self, idx: usize, p: &[Rational64]) -> Option<usize> {
        let mut a = self.multi_index(idx);
        for (ai, pi) in a.iter_mut().zip(p) {
            let scaled = *pi * Rational64::from_integer(self.m as i64);
            if !scaled.is_integer() {
                return None;
            }
            *ai += scaled.to_integer();
        }
        Some(self.flat_index(&a))
    }

    /// Index of `B t` modulo `Z^n` for an integer matrix `B`.
    pub fn dilate(&self, idx: usize, b: &DilationMatrix) -> usize {
        self.flat_index(&b.apply_int(&self.multi_index(idx)))
    }

    /// Checks that every offset in `points` is an exact grid shift.
    pub fn check_compatible(&self, points: &[Vec<Rational64>]) -> Result<()> {
        let denominator = common_denominator(points);
        if self.m as i64 % denominator != 0 {
            return Err(Error::GridNotCosetCompatible {
                resolution: self.m,
                denominator,
            });
        }
        Ok(())
    }

    /// Smallest multiple of `denominator` that is at least `m`.
    pub fn compatible_resolution(m: usize, denominator: i64) -> usize {
        let d = denominator.max(1) as usize;
        m.max(1).div_ceil(d) * d
    }
}

/// Trigonometric polynomial `Σ c_k e^{-2πi k·t}` with finitely many terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TermList", try_from = "TermList")]
pub struct TrigPolynomial {
    n: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct Term {
    k: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

/// Serialized form: JSON objects cannot have vector keys.
#[derive(Serialize, Deserialize)]
struct TermList {
    n: usize,
    terms: Vec<Term>,
}

impl From<TrigPolynomial> for TermList {
    fn from(p: TrigPolynomial) -> Self {
        Self {
            n: p.n,
            terms: p
                .coeffs
                .into_iter()
                .map(|(k, c)| Term { k, re: c.re, im: c.im })
                .collect(),
        }
    }
}

impl TryFrom<TermList> for TrigPolynomial {
    type Error = Error;

    fn try_from(list: TermList) -> Result<Self> {
        TrigPolynomial::from_terms(
            list.n,
            list.terms.into_iter().map(|t| (t.k, Complex64::new(t.re, t.im))),
        )
    }
}

impl TrigPolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], c);
        p
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut p = Self::zero(n);
        for (k, c) in terms {
            if k.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: k.len(),
                });
            }
            p.add_term(k, c);
        }
        Ok(p)
    }

    /// Real coefficients in one dimension, `terms[i] = (k, c_k)`.
    pub fn from_real_1d(terms: &[(i64, f64)]) -> Self {
        let mut p = Self::zero(1);
        for &(k, c) in terms {
            p.add_term(vec![k], Complex64::new(c, 0.0));
        }
        p
    }

    fn add_term(&mut self, k: Vec<i64>, c: Complex64) {
        let entry = self.coeffs.entry(k).or_insert(Complex64::zero());
        *entry += c;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<i64>, Complex64> {
        &self.coeffs
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c * s)).collect(),
        }
    }

    pub fn eval(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: t.len(),
            });
        }
        Ok(self.at(t))
    }

    /// Evaluation without the dimension check.
    pub fn at(&self, t: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(t).map(|(ki, ti)| *ki as f64 * ti).sum();
                c * Complex64::cis(-2.0 * PI * phase)
            })
            .sum()
    }

    /// Evaluation at a rational point; the phase is reduced modulo one in
    /// exact arithmetic, so `t` and `t + m` give identical results.
    pub fn eval_rational(&self, t: &[Rational64]) -> Result<Complex64> {
        if t.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: t.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let phase: Rational64 = k
                    .iter()
                    .zip(t)
                    .map(|(ki, ti)| Rational64::from_integer(*ki) * ti)
                    .sum();
                let frac = phase - phase.floor();
                let x = *frac.numer() as f64 / *frac.denom() as f64;
                c * Complex64::cis(-2.0 * PI * x)
            })
            .sum())
    }

    /// Exact-phase evaluation at a grid point.
    pub fn at_grid(&self, grid: &Grid, idx: usize) -> Complex64 {
        let a = grid.multi_index(idx);
        let m = grid.m as i64;
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let r = k
                    .iter()
                    .zip(&a)
                    .fold(0i64, |acc, (ki, ai)| (acc + (ki % m) * ai) % m)
                    .rem_euclid(m);
                c * Complex64::cis(-2.0 * PI * r as f64 / m as f64)
            })
            .sum()
    }
}

/// Values of a filter on a grid, read off-grid at the nearest grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFilter {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl SampledFilter {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "sampled filter has {} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn at(&self, t: &[f64]) -> Complex64 {
        let m = self.grid.m as f64;
        let a: Vec<i64> = t.iter().map(|x| (x * m).round() as i64).collect();
        self.values[self.grid.flat_index(&a)]
    }
}

/// A `Z^n`-periodic filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    Trig(TrigPolynomial),
    /// `height` times the periodized indicator of the half-open box `[lo, hi)`.
    PeriodicBox {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default = "unit_height")]
        height: f64,
    },
    Sampled(SampledFilter),
}

fn unit_height() -> f64 {
    1.0
}

impl From<TrigPolynomial> for Filter {
    fn from(p: TrigPolynomial) -> Self {
        Filter::Trig(p)
    }
}

impl Filter {
    pub fn dim(&self) -> usize {
        match self {
            Filter::Trig(p) => p.dim(),
            Filter::PeriodicBox { lo, .. } => lo.len(),
            Filter::Sampled(s) => s.grid.n,
        }
    }

    pub fn eval(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: t.len(),
            });
        }
        Ok(self.at(t))
    }

    pub fn at(&self, t: &[f64]) -> Complex64 {
        match self {
            Filter::Trig(p) => p.at(t),
            Filter::PeriodicBox { lo, hi, height } => {
                let inside = t.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| {
                    let width = h - l;
                    width >= 1.0 || (x - l).rem_euclid(1.0) < width
                });
                Complex64::new(if inside { *height } else { 0.0 }, 0.0)
            }
            Filter::Sampled(s) => s.at(t),
        }
    }

    /// Value at a grid point, exact for every variant.
    pub fn at_grid(&self, grid: &Grid, idx: usize) -> Result<Complex64> {
        match self {
            Filter::Trig(p) => Ok(p.at_grid(grid, idx)),
            Filter::PeriodicBox { lo, hi, height } => {
                let a = grid.multi_index(idx);
                let m = grid.m as f64;
                let inside = a.iter().zip(lo.iter().zip(hi)).all(|(ai, (l, h))| {
                    let width = h - l;
                    let x = *ai as f64 - l * m;
                    width >= 1.0 || x.rem_euclid(m) < width * m
                });
                Ok(Complex64::new(if inside { *height } else { 0.0 }, 0.0))
            }
            Filter::Sampled(s) => {
                if s.grid != *grid {
                    return Err(Error::GridMismatch {
                        filter: s.grid.m,
                        requested: grid.m,
                    });
                }
                Ok(s.values[idx])
            }
        }
    }

    /// All values on a grid.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        (0..grid.len())
            .into_par_iter()
            .map(|i| self.at_grid(grid, i))
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Filter {
        match self {
            Filter::Trig(p) => Filter::Trig(p.scaled(Complex64::new(s, 0.0))),
            Filter::Sampled(f) => Filter::Sampled(SampledFilter {
                grid: f.grid,
                values: f.values.iter().map(|v| v * s).collect(),
            }),
            Filter::PeriodicBox { lo, hi, height } => Filter::PeriodicBox {
                lo: lo.clone(),
                hi: hi.clone(),
                height: height * s,
            },
        }
    }
}

/// Anything that can be evaluated as a function on `R^n` in the frequency
/// domain: refinable profiles, framelets, closed forms.
pub trait Profile: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, s: &[f64]) -> Complex64;

    fn describe(&self) -> String {
        "profile".to_string()
    }

    /// Exact description of `{s : |f(s) - target| < delta}` when one is
    /// available; density probes then bypass Monte Carlo.
    fn superlevel_set(&self, _target: Complex64, _delta: f64) -> Option<Arc<dyn MeasurableSet>> {
        None
    }
}

impl fmt::Debug for dyn Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Profile defined by a closure.
pub struct FnProfile<F> {
    n: usize,
    f: F,
    name: String,
}

impl<F> FnProfile<F>
where
    F: Fn(&[f64]) -> Complex64 + Send + Sync,
{
    pub fn new(n: usize, name: impl Into<String>, f: F) -> Self {
        Self {
            n,
            f,
            name: name.into(),
        }
    }
}

impl<F> Profile for FnProfile<F>
where
    F: Fn(&[f64]) -> Complex64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, s: &[f64]) -> Complex64 {
        (self.f)(s)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Value of a truncated bracket sum together with its tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketValue {
    /// Sum over `|k|_∞ ≤ K`.
    pub value: f64,
    /// Difference between the radius-`2K` and radius-`K` sums.
    pub tail: f64,
    pub converged: bool,
}

/// `[φ̂, φ̂](t) = Σ_{|k|_∞ ≤ K} |φ̂(t + k)|²`.
#[derive(Clone)]
pub struct BracketFunction {
    source: Arc<dyn Profile>,
    radius: usize,
}

impl fmt::Debug for BracketFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BracketFunction")
            .field("source", &self.source.describe())
            .field("radius", &self.radius)
            .finish()
    }
}

impl BracketFunction {
    pub fn new(source: Arc<dyn Profile>, radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidParameter(
                "bracket radius must be at least 1".into(),
            ));
        }
        Ok(Self { source, radius })
    }

    pub fn source(&self) -> &Arc<dyn Profile> {
        &self.source
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// The radius-`K` sum.
    pub fn eval(&self, t: &[f64]) -> f64 {
        self.shell_sums(t, self.radius)[self.radius]
    }

    /// The radius-`K` sum with a tail estimate from the radius-`2K` sum.
    pub fn eval_with_tail(&self, t: &[f64]) -> Result<BracketValue> {
        let k = self.radius;
        let sums = self.shell_sums(t, 2 * k);
        let value = sums[k];
        let tail = sums[2 * k] - value;
        let previous = value - sums[k / 2];
        let scale = sums[2 * k].max(f64::MIN_POSITIVE);
        if tail > previous * (1.0 + 1e-9) && tail > 1e-12 * scale {
            return Err(Error::NonConvergent {
                tail,
                previous_tail: previous,
            });
        }
        let converged = tail <= BRACKET_REL_TOL * value.max(0.0) || tail == 0.0;
        Ok(BracketValue {
            value,
            tail,
            converged,
        })
    }

    /// Cumulative sums indexed by radius `0..=r`. The sum is centred at the
    /// representative of `t` nearest the origin, which makes it periodic.
    fn shell_sums(&self, t: &[f64], r: usize) -> Vec<f64> {
        let t: Vec<f64> = t.iter().map(|x| x - x.round()).collect();
        let n = t.len();
        let mut shells = vec![0.0; r + 1];
        let r = r as i64;
        let mut k = vec![-r; n];
        let mut s = vec![0.0; n];
        loop {
            for i in 0..n {
                s[i] = t[i] + k[i] as f64;
            }
            let ring = k.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as usize;
            shells[ring] += self.source.eval(&s).norm_sqr();
            let mut i = n;
            loop {
                if i == 0 {
                    let mut acc = 0.0;
                    for v in shells.iter_mut() {
                        acc += *v;
                        *v = acc;
                    }
                    return shells;
                }
                i -= 1;
                if k[i] < r {
                    k[i] += 1;
                    break;
                }
                k[i] = -r;
            }
        }
    }
}

/// The bracket value at a single point.
pub fn bracket_product(bracket: &BracketFunction, t: &[f64]) -> Result<BracketValue> {
    if t.len() != bracket.dim() {
        return Err(Error::DimensionMismatch {
            expected: bracket.dim(),
            got: t.len(),
        });
    }
    bracket.eval_with_tail(t)
}

/// Grid mask of the numerical zero set `N_φ̂` of a bracket product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetMask {
    pub grid: Grid,
    /// `true` where the point belongs to the zero set.
    pub masked: Vec<bool>,
    pub bracket_values: Vec<f64>,
    pub tau_zero: f64,
}

impl ZeroSetMask {
    /// A mask that excludes nothing.
    pub fn empty(grid: Grid) -> Self {
        Self {
            grid,
            masked: vec![false; grid.len()],
            bracket_values: Vec::new(),
            tau_zero: 0.0,
        }
    }

    pub fn is_masked(&self, idx: usize) -> bool {
        self.masked[idx]
    }

    pub fn masked_fraction(&self) -> f64 {
        if self.masked.is_empty() {
            return 0.0;
        }
        self.masked.iter().filter(|m| **m).count() as f64 / self.masked.len() as f64
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.grid != *grid {
            return Err(Error::GridMismatch {
                filter: self.grid.m,
                requested: grid.m,
            });
        }
        Ok(())
    }
}

pub fn zero_set_mask(bracket: &BracketFunction, grid: &Grid, tau_zero: f64) -> Result<ZeroSetMask> {
    if tau_zero.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidParameter(format!(
            "tau_zero must be positive, got {tau_zero}"
        )));
    }
    if grid.n != bracket.dim() {
        return Err(Error::DimensionMismatch {
            expected: bracket.dim(),
            got: grid.n,
        });
    }
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| bracket.eval(&grid.point(i)))
        .collect();
    let max = values.iter().copied().fold(0.0, f64::max);
    let threshold = tau_zero * max;
    let masked = values
        .iter()
        .map(|&v| max == 0.0 || v < threshold)
        .collect();
    Ok(ZeroSetMask {
        grid: *grid,
        masked,
        bracket_values: values,
        tau_zero,
    })
}
