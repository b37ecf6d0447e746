//! Pointwise unitary completion of a lowpass filter.
//!
//! For each coset orbit `{t + p_k}` the row `r = (H0(t + p_k))_k` is
//! completed by `B = (I − r* r)^{1/2}`; the columns of `(r; B)` are then
//! orthonormal, which is exactly the set of unitary coset conditions.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::FilterBank;
use crate::error::{Error, Result};
use crate::filters::{Filter, Grid, SampledFilter};
use crate::lattice::{coset_reps, DilationMatrix};

#[derive(Debug, Clone)]
pub struct CompletionResult {
    /// `d_A` grid-sampled highpass filters.
    pub filters: Vec<Filter>,
    /// Largest deviation of the column Gram matrix of `(r; B)` from `I`.
    pub orthonormality_residual: f64,
    pub orbits: usize,
}

impl CompletionResult {
    pub fn into_bank(self, dilation: DilationMatrix, lowpass: Filter) -> Result<FilterBank> {
        FilterBank::new(dilation, lowpass, self.filters)
    }
}

/// `(I − r* r)^{1/2} = I − (1 − √(1 − ‖r‖²)) r* r / ‖r‖²` for `‖r‖ ≤ 1`.
pub fn rank_one_completion(r: &[Complex64]) -> DMatrix<Complex64> {
    let d = r.len();
    let norm2: f64 = r.iter().map(|v| v.norm_sqr()).sum();
    let mut b = DMatrix::<Complex64>::identity(d, d);
    if norm2 == 0.0 {
        return b;
    }
    let c = 1.0 - (1.0 - norm2).max(0.0).sqrt();
    for i in 0..d {
        for j in 0..d {
            b[(i, j)] -= r[i].conj() * r[j] * (c / norm2);
        }
    }
    b
}

/// Principal square root of a Hermitian positive semidefinite matrix;
/// slightly negative eigenvalues are clamped to zero.
pub fn hermitian_psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(m.clone());
    let roots = eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}

/// Largest entry of `|Gram(r; B) − I|`.
pub fn column_residual(r: &[Complex64], b: &DMatrix<Complex64>) -> f64 {
    let d = r.len();
    let mut worst: f64 = 0.0;
    for j in 0..d {
        for k in 0..d {
            let mut g = r[j].conj() * r[k];
            for l in 0..d {
                g += b[(l, j)].conj() * b[(l, k)];
            }
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

pub fn uep_complete(
    lowpass: &Filter,
    dilation: &DilationMatrix,
    grid: &Grid,
    tol: f64,
) -> Result<CompletionResult> {
    if grid.n != dilation.dim() || lowpass.dim() != dilation.dim() {
        return Err(Error::DimensionMismatch {
            expected: dilation.dim(),
            got: if grid.n != dilation.dim() { grid.n } else { lowpass.dim() },
        });
    }
    let reps = coset_reps(dilation);
    grid.check_compatible(&reps.gamma_dual)?;
    let d = reps.len();
    let h0 = lowpass.sample(grid)?;

    let mut values = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; d];
    let mut done = vec![false; grid.len()];
    let mut residual: f64 = 0.0;
    let mut orbits = 0;
    for base in 0..grid.len() {
        if done[base] {
            continue;
        }
        let orbit = reps
            .gamma_dual
            .iter()
            .map(|p| grid.shift(base, p).ok_or(Error::OrbitNotOnGrid { index: base }))
            .collect::<Result<Vec<_>>>()?;
        let r: Vec<Complex64> = orbit.iter().map(|&i| h0[i]).collect();
        let norm2: f64 = r.iter().map(|v| v.norm_sqr()).sum();
        if norm2 > 1.0 + tol {
            return Err(Error::SubQmfViolated {
                t: grid.point(base),
                value: norm2,
            });
        }
        let b = rank_one_completion(&r);
        residual = residual.max(column_residual(&r, &b));
        for (k, &i) in orbit.iter().enumerate() {
            done[i] = true;
            for (l, filter) in values.iter_mut().enumerate() {
                filter[i] = b[(l, k)];
            }
        }
        orbits += 1;
    }
    let filters = values
        .into_iter()
        .map(|v| SampledFilter::new(*grid, v).map(Filter::Sampled))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompletionResult {
        filters,
        orthonormality_residual: residual,
        orbits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::check_uep;
    use crate::filters::{TrigPolynomial, ZeroSetMask};
    use crate::lattice::validate_dilation;
    use proptest::prelude::*;

    #[test]
    fn haar_completion() {
        let a = validate_dilation(&[vec![2]]).unwrap();
        let grid = Grid::new(1, 4096).unwrap();
        let h0: Filter = TrigPolynomial::from_real_1d(&[(0, 0.5), (1, 0.5)]).into();
        let res = uep_complete(&h0, &a, &grid, 1e-12).unwrap();
        assert!(res.orthonormality_residual < 1e-12);
        assert_eq!(res.orbits, 2048);
        let bank = res.into_bank(a, h0).unwrap();
        let r = check_uep(&bank, &ZeroSetMask::empty(grid), &grid, 1e-12).unwrap();
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn quincunx_completion() {
        let a = validate_dilation(&[vec![1, 1], vec![1, -1]]).unwrap();
        let grid = Grid::new(2, 32).unwrap();
        let h0: Filter = TrigPolynomial::from_terms(
            2,
            vec![(vec![0, 0], 0.5.into()), (vec![1, 0], 0.5.into())],
        )
        .unwrap()
        .into();
        let res = uep_complete(&h0, &a, &grid, 1e-12).unwrap();
        assert!(res.orthonormality_residual < 1e-12);
        let bank = res.into_bank(a, h0).unwrap();
        assert!(check_uep(&bank, &ZeroSetMask::empty(grid), &grid, 1e-12).unwrap().passed());
    }

    #[test]
    fn sub_qmf_violation() {
        let a = validate_dilation(&[vec![2]]).unwrap();
        let grid = Grid::new(1, 64).unwrap();
        let h0: Filter = TrigPolynomial::constant(1, 1.1.into()).into();
        assert!(matches!(
            uep_complete(&h0, &a, &grid, 1e-12),
            Err(Error::SubQmfViolated { .. })
        ));
    }

    #[test]
    fn spline_at_origin() {
        let b = rank_one_completion(&[1.0.into(), 0.0.into()]);
        assert!((b[(0, 0)]).norm() < 1e-15);
        assert!((b[(0, 1)]).norm() < 1e-15);
        assert!((b[(1, 0)]).norm() < 1e-15);
        assert!((b[(1, 1)] - 1.0).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn rank_one_matches_eigen_route(
            parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..6),
            scale in 0.0f64..1.0,
        ) {
            let raw: Vec<Complex64> = parts.iter().map(|(a, b)| Complex64::new(*a, *b)).collect();
            let norm = raw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
            let r: Vec<Complex64> = raw.iter().map(|v| v * (scale / norm)).collect();
            let d = r.len();
            let closed = rank_one_completion(&r);
            let mut m = DMatrix::<Complex64>::identity(d, d);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] -= r[i].conj() * r[j];
                }
            }
            let eig = hermitian_psd_sqrt(&m);
            prop_assert!((&closed - &eig).norm() < 1e-7);
            prop_assert!(column_residual(&r, &closed) < 1e-12);
        }
    }
}
