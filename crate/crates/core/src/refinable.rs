//! Refinable profiles `φ̂` evaluated through the truncated infinite product
//! `Π_{j=1}^{J} H0((A*)^{-j} t)`, their normalization by the bracket product,
//! and the admissibility probe at the origin.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx_continuity::{
    density_curve, IntervalUnion, LimitVerdict, MeasurableSet, PredicateSet,
};
use crate::error::{Error, Result};
use crate::filters::{BracketFunction, Filter, Profile};
use crate::lattice::DilationMatrix;
use crate::report::VerificationReport;

pub const DEFAULT_DEPTH: usize = 30;

/// Tolerance on the `J → 2J` drift before a product is called converged.
pub const DEPTH_DRIFT_TOL: f64 = 1e-6;

/// Largest number of profile evaluations a single probe may request.
pub const PROBE_EVALUATION_LIMIT: usize = 400_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    #[default]
    Complex,
    Modulus,
}

/// Analytic profiles used to override the product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `e^{-iπ shift Σ s_i} Π_i sinc(s_i)^power` with `sinc(x) = sin(πx)/(πx)`.
    Sinc { power: u32, shift: f64 },
    /// Indicator of the box `[lo, hi]` (or `[lo, hi)` when not closed).
    Indicator {
        lo: Vec<f64>,
        hi: Vec<f64>,
        closed: bool,
    },
}

pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

impl ClosedForm {
    pub fn haar() -> Self {
        ClosedForm::Sinc {
            power: 1,
            shift: 1.0,
        }
    }

    pub fn hat() -> Self {
        ClosedForm::Sinc {
            power: 2,
            shift: 0.0,
        }
    }

    pub fn eval(&self, s: &[f64]) -> Complex64 {
        match self {
            ClosedForm::Sinc { power, shift } => {
                let modulus: f64 = s.iter().map(|x| sinc(*x).powi(*power as i32)).product();
                let phase = -PI * shift * s.iter().sum::<f64>();
                Complex64::from_polar(modulus, phase)
            }
            ClosedForm::Indicator { lo, hi, closed } => {
                let inside = s.iter().zip(lo.iter().zip(hi)).all(|(x, (l, h))| {
                    *x >= *l && if *closed { *x <= *h } else { *x < *h }
                });
                Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
            }
        }
    }
}

/// `φ̂` from a mask by the truncated product, optionally overridden by a
/// closed form.
#[derive(Debug, Clone)]
pub struct PhiHat {
    dilation: DilationMatrix,
    mask: Filter,
    depth: usize,
    mode: EvalMode,
    closed_form: Option<ClosedForm>,
    /// Row-major `(A*)^{-1}`.
    inv_adjoint: Vec<f64>,
}

impl PhiHat {
    pub fn new(dilation: DilationMatrix, mask: Filter, depth: usize) -> Result<Self> {
        if depth < 1 {
            return Err(Error::DepthTooSmall);
        }
        if mask.dim() != dilation.dim() {
            return Err(Error::DimensionMismatch {
                expected: dilation.dim(),
                got: mask.dim(),
            });
        }
        let origin = mask.at(&vec![0.0; dilation.dim()]).norm();
        if (origin - 1.0).abs() > 1e-12 {
            log::warn!("mask has |H0(0)| = {origin}; the product does not normalize φ̂(0)");
        }
        let inv_adjoint = dilation.adjoint().power_f64(-1);
        Ok(Self {
            dilation,
            mask,
            depth,
            mode: EvalMode::Complex,
            closed_form: None,
            inv_adjoint,
        })
    }

    pub fn with_mode(mut self, mode: EvalMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_closed_form(mut self, form: ClosedForm) -> Self {
        self.closed_form = Some(form);
        self
    }

    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        if depth < 1 {
            return Err(Error::DepthTooSmall);
        }
        let mut out = self.clone();
        out.depth = depth;
        Ok(out)
    }

    pub fn dilation(&self) -> &DilationMatrix {
        &self.dilation
    }

    pub fn mask(&self) -> &Filter {
        &self.mask
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    /// Evaluation honouring the closed-form override.
    pub fn eval(&self, t: &[f64]) -> Result<Complex64> {
        self.check_dim(t)?;
        Ok(self.value(t))
    }

    /// The truncated product at depth `J`, ignoring any closed form.
    pub fn product(&self, t: &[f64], depth: usize) -> Result<Complex64> {
        self.check_dim(t)?;
        if depth < 1 {
            return Err(Error::DepthTooSmall);
        }
        Ok(self.product_unchecked(t, depth))
    }

    /// `|P_J(t) − P_{2J}(t)|` for the configured depth.
    pub fn depth_drift(&self, t: &[f64]) -> Result<f64> {
        let a = self.product(t, self.depth)?;
        let b = self.product(t, 2 * self.depth)?;
        Ok((a - b).norm())
    }

    fn check_dim(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.dilation.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dilation.dim(),
                got: t.len(),
            });
        }
        Ok(())
    }

    fn value(&self, t: &[f64]) -> Complex64 {
        match (&self.closed_form, self.mode) {
            (Some(f), EvalMode::Complex) => f.eval(t),
            (Some(f), EvalMode::Modulus) => Complex64::new(f.eval(t).norm(), 0.0),
            (None, _) => self.product_unchecked(t, self.depth),
        }
    }

    fn product_unchecked(&self, t: &[f64], depth: usize) -> Complex64 {
        let n = t.len();
        let mut s = t.to_vec();
        let mut next = vec![0.0; n];
        let mut acc = Complex64::new(1.0, 0.0);
        let mut modulus = 1.0;
        for _ in 0..depth {
            for (i, v) in next.iter_mut().enumerate() {
                *v = (0..n).map(|j| self.inv_adjoint[i * n + j] * s[j]).sum();
            }
            std::mem::swap(&mut s, &mut next);
            let h = self.mask.at(&s);
            match self.mode {
                EvalMode::Complex => acc *= h,
                EvalMode::Modulus => modulus *= h.norm(),
            }
        }
        match self.mode {
            EvalMode::Complex => acc,
            EvalMode::Modulus => Complex64::new(modulus, 0.0),
        }
    }
}

impl Profile for PhiHat {
    fn dim(&self) -> usize {
        self.dilation.dim()
    }

    fn eval(&self, s: &[f64]) -> Complex64 {
        self.value(s)
    }

    fn describe(&self) -> String {
        match &self.closed_form {
            Some(f) => format!("phi_hat closed form {f:?}"),
            None => format!("phi_hat product, depth {}", self.depth),
        }
    }

    fn superlevel_set(&self, target: Complex64, delta: f64) -> Option<Arc<dyn MeasurableSet>> {
        // only the one-dimensional indicator has an exact description
        match &self.closed_form {
            Some(ClosedForm::Indicator { lo, hi, .. }) if lo.len() == 1 => {
                let inside = (Complex64::new(1.0, 0.0) - target).norm() < delta;
                let outside = target.norm() < delta;
                let set = match (inside, outside) {
                    (true, true) => IntervalUnion::whole_line(),
                    (true, false) => IntervalUnion::new(vec![(lo[0], hi[0])]),
                    (false, true) => IntervalUnion::complement_of(lo[0], hi[0]),
                    (false, false) => IntervalUnion::new(Vec::new()),
                };
                Some(Arc::new(set))
            }
            _ => None,
        }
    }
}

/// `φ̂ / [φ̂, φ̂]^{1/2}` with the convention `0/0 = 0`.
#[derive(Clone)]
pub struct NormalizedPhiHat {
    source: Arc<dyn Profile>,
    bracket: BracketFunction,
}

impl fmt::Debug for NormalizedPhiHat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormalizedPhiHat")
            .field("bracket", &self.bracket)
            .finish()
    }
}

pub fn normalize_scaling(
    phi: Arc<dyn Profile>,
    bracket: &BracketFunction,
) -> Result<NormalizedPhiHat> {
    let same = std::ptr::addr_eq(Arc::as_ptr(&phi), Arc::as_ptr(bracket.source()));
    if !same {
        return Err(Error::InvalidParameter(
            "bracket must be built from the profile being normalized".into(),
        ));
    }
    Ok(NormalizedPhiHat {
        source: phi,
        bracket: bracket.clone(),
    })
}

impl Profile for NormalizedPhiHat {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn eval(&self, s: &[f64]) -> Complex64 {
        let v = self.source.eval(s);
        let b = self.bracket.eval(s);
        if b <= 0.0 || v.norm_sqr() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            v / b.sqrt()
        }
    }

    fn describe(&self) -> String {
        format!("normalized {}", self.source.describe())
    }
}

/// Parameters of a Monte Carlo density probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub radius: f64,
    pub j_values: Vec<i32>,
    pub samples: usize,
    pub seed: u64,
    pub delta: f64,
    /// `|φ̂| ≤ zero_tol` counts as a zero.
    pub zero_tol: f64,
    pub bracket_radius: usize,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            radius: 1.0,
            j_values: vec![2, 4, 6, 8, 10],
            samples: 100_000,
            seed: 0x5eed,
            delta: 0.02,
            zero_tol: 1e-12,
            bracket_radius: 16,
        }
    }
}

impl ProbeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !(self.delta > 0.0) {
            return Err(Error::InvalidParameter(
                "probe radius and delta must be positive".into(),
            ));
        }
        if self.samples < 1000 {
            return Err(Error::InvalidParameter(format!(
                "probe needs at least 1000 samples, got {}",
                self.samples
            )));
        }
        if self.j_values.is_empty() || self.bracket_radius == 0 {
            return Err(Error::InvalidParameter(
                "probe needs j values and a positive bracket radius".into(),
            ));
        }
        Ok(())
    }
}

/// Admissibility of `φ̂` at the origin: (B) the zero set has vanishing
/// density in `(A*)^{-j} B_r`, and (C) `|φ̂|²/[φ̂,φ̂]` is approximately
/// continuous with value one there.
pub fn fmra_check(
    phi: Arc<dyn Profile>,
    dilation: &DilationMatrix,
    probe: &ProbeSpec,
) -> Result<VerificationReport> {
    probe.validate()?;
    let n = dilation.dim();
    if phi.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: phi.dim(),
        });
    }
    let cells = (2 * probe.bracket_radius + 1).pow(n as u32);
    let requested = probe
        .samples
        .saturating_mul(probe.j_values.len())
        .saturating_mul(cells + 1);
    if requested > PROBE_EVALUATION_LIMIT {
        return Err(Error::ProbeBudgetExceeded {
            requested,
            limit: PROBE_EVALUATION_LIMIT,
        });
    }
    let adjoint = dilation.adjoint();
    let origin = vec![0.0; n];

    let zero_tol = probe.zero_tol;
    let phi_b = phi.clone();
    let zeros = PredicateSet::new(n, "zero set of phi_hat", move |s: &[f64]| {
        phi_b.eval(s).norm() <= zero_tol
    });
    let mut zero_curve = density_curve(
        "FMRA-B zero fraction",
        &zeros,
        &adjoint,
        &origin,
        probe,
        0.0,
    )?;
    zero_curve.classify(0.0, probe.delta);

    let bracket = BracketFunction::new(phi.clone(), probe.bracket_radius)?;
    let delta = probe.delta;
    let phi_c = phi.clone();
    let level = PredicateSet::new(n, "| |phi_hat|^2/[phi_hat,phi_hat] - 1 | < delta", move |s: &[f64]| {
        let b = bracket.eval(s);
        let v = phi_c.eval(s).norm_sqr();
        let ratio = if b > 0.0 { v / b } else { 0.0 };
        (ratio - 1.0).abs() < delta
    });
    let mut level_curve = density_curve(
        "FMRA-C superlevel density",
        &level,
        &adjoint,
        &origin,
        probe,
        1.0,
    )?;
    level_curve.classify(1.0, probe.delta);

    let b = curve_report("FMRA-B", zero_curve, 0.0, probe.delta);
    let c = curve_report("FMRA-C", level_curve, 1.0, probe.delta)
        .with_note("superlevel sets are one-sided witnesses: a pass supports the property, a fail does not refute it");
    Ok(VerificationReport::composite("FMRA", vec![b, c])
        .with_note(format!("probe: {probe:?}"))
        .with_note("raw mask H0 used in place of the zero-set-corrected mask"))
}

pub(crate) fn curve_report(
    condition: &str,
    curve: crate::approx_continuity::DensityCurve,
    target: f64,
    delta: f64,
) -> VerificationReport {
    let residual = curve.trend_residual(target);
    let expected = if target == 1.0 {
        LimitVerdict::ConvergesToOne
    } else {
        LimitVerdict::ConvergesToZero
    };
    let mut r = VerificationReport::scalar(condition, residual, delta);
    if curve.verdict != expected {
        r.verdict = crate::report::Verdict::Fail;
    }
    r.curves.push(curve);
    r
}
