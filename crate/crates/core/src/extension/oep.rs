//! Oblique extension: weighted coset conditions, the fundamental function
//! and the reduction of an oblique bank to a unitary one.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{coset_conditions, FilterBank, GridSamples};
use crate::approx_continuity::{density_curve, PredicateSet};
use crate::error::{Error, Result};
use crate::filters::{Filter, Grid, Profile, SampledFilter, ZeroSetMask};
use crate::refinable::{curve_report, ProbeSpec};
use crate::report::VerificationReport;

/// Partial sums beyond this size are treated as divergent.
pub const DIVERGENCE_GUARD: f64 = 1e12;

pub const DEFAULT_THETA_TERMS: usize = 40;

fn weight_samples(bank: &FilterBank, grid: &Grid, tol: f64) -> Result<Vec<Complex64>> {
    let weight = bank.weight.as_ref().ok_or(Error::MissingWeight)?;
    let values = weight.sample(grid)?;
    if let Some((i, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| v.re < -tol || v.im.abs() > tol)
    {
        return Err(Error::NegativeWeight {
            t: grid.point(i),
            value: v.re,
        });
    }
    Ok(values)
}

/// Oblique extension conditions: (b) and (c) on the grid, and (a) the
/// density at the origin of `{|S |φ̂|² − 1| < δ}`.
pub fn check_oep(
    bank: &FilterBank,
    phi: Arc<dyn Profile>,
    mask: &ZeroSetMask,
    grid: &Grid,
    tol: f64,
    probe: &ProbeSpec,
) -> Result<VerificationReport> {
    mask.check_grid(grid)?;
    probe.validate()?;
    let weights = weight_samples(bank, grid, tol)?;
    let samples = GridSamples::new(bank, grid)?;
    let (b, c) = coset_conditions(&samples, Some(&weights), mask, tol, ("SOEP0", "SOEPk"));

    let weight = bank.weight.clone().ok_or(Error::MissingWeight)?;
    let delta = probe.delta;
    let set = PredicateSet::new(bank.dim(), "|S |phi_hat|^2 - 1| < delta", move |s: &[f64]| {
        (weight.at(s).re * phi.eval(s).norm_sqr() - 1.0).abs() < delta
    });
    let adjoint = bank.dilation.adjoint();
    let origin = vec![0.0; bank.dim()];
    let curve = density_curve("SOEP origin density", &set, &adjoint, &origin, probe, 1.0)?;
    let a = curve_report("SOEP-origin", curve, 1.0, delta)
        .with_note("superlevel sets are one-sided witnesses: a pass supports the property, a fail does not refute it");
    Ok(VerificationReport::composite("OEP", vec![b, c, a]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub value: f64,
    /// `Θ_0, …, Θ_M`.
    pub partial_sums: Vec<f64>,
    /// `|Θ_M(t) − (Θ_{M−1}(A*t) |H0(t)|² + Σ_ℓ |H_ℓ(t)|²)|`.
    pub recursion_residual: f64,
}

/// Terms `Σ_ℓ |H_ℓ(u_m)|² Π_{k<m} |H0(u_k)|²` along the orbit
/// `u_{m+1} = A* u_m mod 1`.
fn theta_partial_sums(bank: &FilterBank, t: &[f64], terms: usize) -> Result<Vec<f64>> {
    let adjoint = bank.dilation.adjoint();
    let mut u: Vec<f64> = t.to_vec();
    let mut product = 1.0;
    let mut total = 0.0;
    let mut sums = Vec::with_capacity(terms + 1);
    for m in 0..=terms {
        let high: f64 = bank.highpass.iter().map(|h| h.at(&u).norm_sqr()).sum();
        total += high * product;
        if !total.is_finite() || total > DIVERGENCE_GUARD {
            return Err(Error::Divergent {
                value: total,
                terms: m + 1,
            });
        }
        sums.push(total);
        product *= bank.lowpass.at(&u).norm_sqr();
        u = adjoint.apply(&u).into_iter().map(|x| x - x.floor()).collect();
    }
    Ok(sums)
}

/// `Θ(t) ≈ Σ_{m=0}^{M} Σ_ℓ |H_ℓ(A*^m t)|² Π_{k<m} |H0(A*^k t)|²`.
pub fn fundamental_function(bank: &FilterBank, t: &[f64], terms: usize) -> Result<ThetaValue> {
    if t.len() != bank.dim() {
        return Err(Error::DimensionMismatch {
            expected: bank.dim(),
            got: t.len(),
        });
    }
    let partial_sums = theta_partial_sums(bank, t, terms)?;
    let value = *partial_sums.last().expect("at least one term");
    let recursion_residual = if terms == 0 {
        0.0
    } else {
        let u1: Vec<f64> = bank
            .dilation
            .adjoint()
            .apply(t)
            .into_iter()
            .map(|x| x - x.floor())
            .collect();
        let shifted = theta_partial_sums(bank, &u1, terms - 1)?;
        let high: f64 = bank.highpass.iter().map(|h| h.at(t).norm_sqr()).sum();
        let rhs = shifted.last().unwrap() * bank.lowpass.at(t).norm_sqr() + high;
        (value - rhs).abs()
    };
    Ok(ThetaValue {
        value,
        partial_sums,
        recursion_residual,
    })
}

/// `Q0 = √(S(A*t)/S(t)) H0`, `Q_ℓ = H_ℓ/√S` on the grid, with `0/0 = 0`.
pub fn oep_reduce(bank: &FilterBank, grid: &Grid, tol: f64) -> Result<FilterBank> {
    let weights = weight_samples(bank, grid, tol)?;
    let samples = GridSamples::new(bank, grid)?;
    let s: Vec<f64> = weights.iter().map(|w| w.re.max(0.0)).collect();
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let q0: Vec<Complex64> = (0..grid.len())
        .map(|i| samples.lowpass[i] * ratio(s[samples.dilated[i]], s[i]).sqrt())
        .collect();
    let highpass = samples
        .highpass
        .iter()
        .map(|h| {
            let values = (0..grid.len())
                .map(|i| if s[i] > 0.0 { h[i] / s[i].sqrt() } else { Complex64::new(0.0, 0.0) })
                .collect();
            SampledFilter::new(*grid, values).map(Filter::Sampled)
        })
        .collect::<Result<Vec<_>>>()?;
    FilterBank::new(
        bank.dilation.clone(),
        Filter::Sampled(SampledFilter::new(*grid, q0)?),
        highpass,
    )
}

/// Oblique bank for a lowpass filter and weight: the reduced lowpass is
/// completed unitarily and the result is lifted back by `√S`.
pub fn oep_complete(
    lowpass: &Filter,
    weight: &Filter,
    dilation: &crate::lattice::DilationMatrix,
    grid: &Grid,
    tol: f64,
) -> Result<FilterBank> {
    let seed = FilterBank::new(dilation.clone(), lowpass.clone(), vec![])?.with_weight(weight.clone())?;
    let reduced = oep_reduce(&seed, grid, tol)?;
    let done = super::uep_complete(&reduced.lowpass, dilation, grid, tol)?;
    let roots: Vec<f64> = weight_samples(&seed, grid, tol)?
        .iter()
        .map(|w| w.re.max(0.0).sqrt())
        .collect();
    let highpass = done
        .filters
        .iter()
        .map(|f| {
            let values = (0..grid.len())
                .map(|i| f.at_grid(grid, i).map(|v| v * roots[i]))
                .collect::<Result<Vec<_>>>()?;
            SampledFilter::new(*grid, values).map(Filter::Sampled)
        })
        .collect::<Result<Vec<_>>>()?;
    FilterBank::new(dilation.clone(), lowpass.clone(), highpass)?.with_weight(weight.clone())
}
