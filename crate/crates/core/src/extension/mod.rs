//! Filter banks and the extension-principle conditions on them.
//!
//! Every condition is checked on a grid whose resolution makes the coset
//! offsets `p_k` exact grid shifts, and only at points outside the numerical
//! zero set of the bracket product.

pub mod completion;
pub mod oep;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{Filter, Grid, Profile, ZeroSetMask};
use crate::lattice::{coset_reps, CosetReps, DilationMatrix};
use crate::report::{ResidualAccumulator, VerificationReport};

pub use completion::{hermitian_psd_sqrt, rank_one_completion, uep_complete, CompletionResult};
pub use oep::{check_oep, fundamental_function, oep_complete, oep_reduce, ThetaValue};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBank {
    pub dilation: DilationMatrix,
    pub lowpass: Filter,
    pub highpass: Vec<Filter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Filter>,
}

impl FilterBank {
    pub fn new(dilation: DilationMatrix, lowpass: Filter, highpass: Vec<Filter>) -> Result<Self> {
        let n = dilation.dim();
        for f in std::iter::once(&lowpass).chain(&highpass) {
            if f.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: f.dim(),
                });
            }
        }
        Ok(Self {
            dilation,
            lowpass,
            highpass,
            weight: None,
        })
    }

    pub fn with_weight(mut self, weight: Filter) -> Result<Self> {
        if weight.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: weight.dim(),
            });
        }
        self.weight = Some(weight);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dilation.dim()
    }

    pub fn generators(&self) -> usize {
        self.highpass.len()
    }

    pub fn reps(&self) -> CosetReps {
        coset_reps(&self.dilation)
    }
}

/// Filter values sampled once on a grid together with the coset shift table.
pub(crate) struct GridSamples {
    pub grid: Grid,
    pub lowpass: Vec<Complex64>,
    pub highpass: Vec<Vec<Complex64>>,
    /// `shifts[k][idx]` is the index of `t_idx + p_k`.
    pub shifts: Vec<Vec<usize>>,
    /// Index of `A* t_idx` modulo one.
    pub dilated: Vec<usize>,
}

impl GridSamples {
    pub fn new(bank: &FilterBank, grid: &Grid) -> Result<Self> {
        if grid.n != bank.dim() {
            return Err(Error::DimensionMismatch {
                expected: bank.dim(),
                got: grid.n,
            });
        }
        let reps = bank.reps();
        grid.check_compatible(&reps.gamma_dual)?;
        let shifts = reps
            .gamma_dual
            .iter()
            .map(|p| {
                (0..grid.len())
                    .map(|idx| grid.shift(idx, p).ok_or(Error::OrbitNotOnGrid { index: idx }))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let adjoint = bank.dilation.adjoint();
        let dilated = (0..grid.len()).map(|i| grid.dilate(i, &adjoint)).collect();
        Ok(Self {
            grid: *grid,
            lowpass: bank.lowpass.sample(grid)?,
            highpass: bank
                .highpass
                .iter()
                .map(|h| h.sample(grid))
                .collect::<Result<_>>()?,
            shifts,
            dilated,
        })
    }
}

fn check_mask(mask: &ZeroSetMask, grid: &Grid) -> Result<()> {
    mask.check_grid(grid)
}

/// Residual sweep over every grid point selected by `keep`.
pub(crate) fn sweep<F>(grid: &Grid, keep: impl Fn(usize) -> bool + Sync, residual: F) -> ResidualAccumulator
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..grid.len())
        .into_par_iter()
        .filter(|&i| keep(i))
        .fold(ResidualAccumulator::new, |mut acc, i| {
            acc.push(&grid.point(i), residual(i));
            acc
        })
        .reduce(ResidualAccumulator::new, ResidualAccumulator::merge)
}

/// Weighted coset conditions. With `weight = None` these are the unitary
/// conditions; otherwise `S(A*t)` multiplies the lowpass terms and `S(t)`
/// replaces the constant on the diagonal.
pub(crate) fn coset_conditions(
    samples: &GridSamples,
    weight: Option<&[Complex64]>,
    mask: &ZeroSetMask,
    tol: f64,
    names: (&str, &str),
) -> (VerificationReport, VerificationReport) {
    let grid = samples.grid;
    let s_at = |i: usize| weight.map_or(1.0, |w| w[i].re);
    let s_dil = |i: usize| weight.map_or(1.0, |w| w[samples.dilated[i]].re);
    let masked = mask.masked_fraction();

    let diag = sweep(&grid, |i| !mask.is_masked(i), |i| {
        let mut v = s_dil(i) * samples.lowpass[i].norm_sqr();
        for h in &samples.highpass {
            v += h[i].norm_sqr();
        }
        (v - s_at(i)).abs()
    });
    let mut diag = diag.finish(names.0, Some(grid), masked, tol);

    let d = samples.shifts.len();
    let mut off = ResidualAccumulator::new();
    for k in 1..d {
        let shift = &samples.shifts[k];
        let acc = sweep(
            &grid,
            |i| !mask.is_masked(i) && !mask.is_masked(shift[i]),
            |i| {
                let j = shift[i];
                let mut v = samples.lowpass[i] * samples.lowpass[j].conj() * s_dil(i);
                for h in &samples.highpass {
                    v += h[i] * h[j].conj();
                }
                v.norm()
            },
        );
        off = off.merge(acc);
    }
    let mut off = off.finish(names.1, Some(grid), masked, tol);
    if d == 1 {
        off = off.with_note("no nonzero coset offsets");
    }
    diag.notes.push(format!("masked fraction {masked}"));
    (diag, off)
}

/// Unitary extension conditions on unmasked grid points.
pub fn check_uep(
    bank: &FilterBank,
    mask: &ZeroSetMask,
    grid: &Grid,
    tol: f64,
) -> Result<VerificationReport> {
    check_mask(mask, grid)?;
    let samples = GridSamples::new(bank, grid)?;
    let (uep0, uepk) = coset_conditions(&samples, None, mask, tol, ("UEP0", "UEPk"));
    Ok(VerificationReport::composite("UEP", vec![uep0, uepk]))
}

/// `|Σ_k H0(t+p_k) conj(H_ℓ(t+p_k))|` at an arbitrary point.
pub fn orthogonality_residual_at(bank: &FilterBank, t: &[f64], l: usize) -> Result<f64> {
    if t.len() != bank.dim() {
        return Err(Error::DimensionMismatch {
            expected: bank.dim(),
            got: t.len(),
        });
    }
    let h = bank
        .highpass
        .get(l)
        .ok_or_else(|| Error::InvalidParameter(format!("no highpass filter {l}")))?;
    let reps = bank.reps();
    let mut sum = Complex64::new(0.0, 0.0);
    for p in reps.gamma_dual_f64() {
        let s: Vec<f64> = t.iter().zip(&p).map(|(a, b)| a + b).collect();
        sum += bank.lowpass.at(&s) * h.at(&s).conj();
    }
    Ok(sum.norm())
}

/// Orthogonality of the wavelet spaces to the scaling space:
/// `Σ_k H0(t+p_k) conj(H_ℓ(t+p_k)) = 0` for every `ℓ`.
pub fn mra_orthogonality_check(
    bank: &FilterBank,
    mask: &ZeroSetMask,
    grid: &Grid,
    tol: f64,
) -> Result<VerificationReport> {
    check_mask(mask, grid)?;
    let samples = GridSamples::new(bank, grid)?;
    let subs = samples
        .highpass
        .iter()
        .enumerate()
        .map(|(l, h)| {
            let acc = sweep(grid, |i| !mask.is_masked(i), |i| {
                samples
                    .shifts
                    .iter()
                    .map(|shift| samples.lowpass[shift[i]] * h[shift[i]].conj())
                    .sum::<Complex64>()
                    .norm()
            });
            acc.finish(
                format!("ORTHO-{}", l + 1),
                Some(*grid),
                mask.masked_fraction(),
                tol,
            )
        })
        .collect();
    Ok(VerificationReport::composite("ORTHO", subs))
}

/// `ψ̂(s) = H((A*)^{-1} s) φ̂((A*)^{-1} s)`.
#[derive(Clone)]
pub struct Framelet {
    filter: Filter,
    phi: Arc<dyn Profile>,
    inv_adjoint: Vec<f64>,
    label: String,
}

impl fmt::Debug for Framelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Framelet").field("label", &self.label).finish()
    }
}

impl Profile for Framelet {
    fn dim(&self) -> usize {
        self.phi.dim()
    }

    fn eval(&self, s: &[f64]) -> Complex64 {
        let n = s.len();
        let u: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| self.inv_adjoint[i * n + j] * s[j]).sum())
            .collect();
        self.filter.at(&u) * self.phi.eval(&u)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

pub fn build_framelets(bank: &FilterBank, phi: Arc<dyn Profile>) -> Result<Vec<Framelet>> {
    if phi.dim() != bank.dim() {
        return Err(Error::DimensionMismatch {
            expected: bank.dim(),
            got: phi.dim(),
        });
    }
    let inv_adjoint = bank.dilation.adjoint().power_f64(-1);
    Ok(bank
        .highpass
        .iter()
        .enumerate()
        .map(|(l, h)| Framelet {
            filter: h.clone(),
            phi: phi.clone(),
            inv_adjoint: inv_adjoint.clone(),
            label: format!("psi_{}", l + 1),
        })
        .collect())
}

/// `c · f`.
pub struct ScaledProfile {
    pub inner: Arc<dyn Profile>,
    pub factor: f64,
}

impl Profile for ScaledProfile {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, s: &[f64]) -> Complex64 {
        self.inner.eval(s) * self.factor
    }

    fn describe(&self) -> String {
        format!("{} x {}", self.factor, self.inner.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::TrigPolynomial;
    use crate::lattice::validate_dilation;
    use crate::refinable::{ClosedForm, PhiHat, DEFAULT_DEPTH};
    use std::f64::consts::{PI, SQRT_2};

    fn dyadic() -> DilationMatrix {
        validate_dilation(&[vec![2]]).unwrap()
    }

    pub(crate) fn haar_bank() -> FilterBank {
        FilterBank::new(
            dyadic(),
            TrigPolynomial::from_real_1d(&[(0, 0.5), (1, 0.5)]).into(),
            vec![TrigPolynomial::from_real_1d(&[(0, 0.5), (1, -0.5)]).into()],
        )
        .unwrap()
    }

    pub(crate) fn spline_bank() -> FilterBank {
        let r = SQRT_2 / 4.0;
        FilterBank::new(
            dyadic(),
            TrigPolynomial::from_real_1d(&[(-1, 0.25), (0, 0.5), (1, 0.25)]).into(),
            vec![
                TrigPolynomial::from_real_1d(&[(-1, r), (1, -r)]).into(),
                TrigPolynomial::from_real_1d(&[(-1, -0.25), (0, 0.5), (1, -0.25)]).into(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn haar_and_spline_uep() {
        let grid = Grid::new(1, 4096).unwrap();
        let mask = ZeroSetMask::empty(grid);
        for bank in [haar_bank(), spline_bank()] {
            let r = check_uep(&bank, &mask, &grid, 1e-12).unwrap();
            assert!(r.passed(), "{r:#?}");
            for i in (0..grid.len()).step_by(37) {
                assert!(bank.lowpass.at_grid(&grid, i).unwrap().norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn perturbed_haar_fails() {
        let mut bank = haar_bank();
        bank.highpass[0] = bank.highpass[0].scaled(0.9);
        let grid = Grid::new(1, 4096).unwrap();
        let r = check_uep(&bank, &ZeroSetMask::empty(grid), &grid, 1e-12).unwrap();
        assert!(!r.passed());
        let r0 = r.find("UEP0").unwrap();
        assert!((r0.max_residual - 0.19).abs() < 1e-12, "{}", r0.max_residual);
    }

    #[test]
    fn incompatible_grid() {
        let grid = Grid::new(1, 4095).unwrap();
        assert!(matches!(
            check_uep(&haar_bank(), &ZeroSetMask::empty(grid), &grid, 1e-12),
            Err(Error::GridNotCosetCompatible { .. })
        ));
    }

    #[test]
    fn orthogonality_examples() {
        let grid = Grid::new(1, 4096).unwrap();
        let mask = ZeroSetMask::empty(grid);
        let r = mra_orthogonality_check(&haar_bank(), &mask, &grid, 1e-12).unwrap();
        assert!(r.passed());
        let r = mra_orthogonality_check(&spline_bank(), &mask, &grid, 1e-12).unwrap();
        assert!(!r.passed());
        let first = r.find("ORTHO-1").unwrap();
        assert!((first.max_residual - SQRT_2 / 4.0).abs() < 1e-10);
        assert!((first.worst_points[0].t[0] * 8.0).fract() == 0.0);
        let at = orthogonality_residual_at(&spline_bank(), &[0.125], 0).unwrap();
        assert!((at - SQRT_2 / 4.0).abs() < 1e-10);
        let mut zero = haar_bank();
        zero.highpass = vec![TrigPolynomial::zero(1).into()];
        assert!(mra_orthogonality_check(&zero, &mask, &grid, 1e-12).unwrap().passed());
    }

    #[test]
    fn framelet_values() {
        let bank = haar_bank();
        let phi: Arc<dyn Profile> = Arc::new(
            PhiHat::new(dyadic(), bank.lowpass.clone(), DEFAULT_DEPTH)
                .unwrap()
                .with_closed_form(ClosedForm::haar()),
        );
        let psi = build_framelets(&bank, phi.clone()).unwrap();
        assert!((psi[0].eval(&[1.0]).norm() - 2.0 / PI).abs() < 1e-12);
        assert_eq!(psi[0].eval(&[0.0]).norm(), 0.0);
        let mut zero = bank.clone();
        zero.highpass = vec![TrigPolynomial::zero(1).into()];
        let psi = build_framelets(&zero, phi).unwrap();
        assert_eq!(psi[0].eval(&[0.7]).norm(), 0.0);
    }
}
