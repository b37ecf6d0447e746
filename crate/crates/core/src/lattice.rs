//! Integer-lattice algebra for expansive dilation matrices.
//!
//! A [`DilationMatrix`] is an integer matrix whose eigenvalues all lie outside
//! the closed unit disc. [`coset_reps`] enumerates canonical representatives of
//! `Z^n / A Z^n` and of `(A*)^{-1} Z^n / Z^n`; the latter are kept as exact
//! rationals because every coset condition shifts filters by them.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIMENSION: usize = 8;

/// Eigenvalue moduli must exceed one by at least this much.
const EXPANSIVE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct DilationMatrix {
    n: usize,
    entries: Vec<i64>,
    det: i64,
    eigen_moduli: Vec<f64>,
    adjugate: Vec<i64>,
}

impl TryFrom<Vec<Vec<i64>>> for DilationMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        validate_dilation(&rows)
    }
}

impl From<DilationMatrix> for Vec<Vec<i64>> {
    fn from(a: DilationMatrix) -> Self {
        a.rows()
    }
}

/// Validates a raw integer matrix as an expansive dilation.
pub fn validate_dilation(rows: &[Vec<i64>]) -> Result<DilationMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            row_lengths: rows.iter().map(Vec::len).collect(),
        });
    }
    if n > MAX_DIMENSION {
        return Err(Error::UnsupportedDimension(n));
    }
    let entries: Vec<i64> = rows.iter().flatten().copied().collect();
    DilationMatrix::from_row_major(n, entries)
}

impl DilationMatrix {
    pub fn from_row_major(n: usize, entries: Vec<i64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                row_lengths: vec![entries.len()],
            });
        }
        if n > MAX_DIMENSION {
            return Err(Error::UnsupportedDimension(n));
        }
        let det = integer_det(n, &entries);
        if det == 0 {
            return Err(Error::ZeroDeterminant);
        }
        let eigen_moduli = eigenvalue_moduli(n, &entries);
        if eigen_moduli.iter().any(|&m| m <= 1.0 + EXPANSIVE_MARGIN) {
            return Err(Error::NotExpansive {
                moduli: eigen_moduli,
            });
        }
        let adjugate = integer_adjugate(n, &entries);
        Ok(Self {
            n,
            entries,
            det,
            eigen_moduli,
            adjugate,
        })
    }

    /// Scalar dilation `a·I_n`.
    pub fn scalar(n: usize, a: i64) -> Result<Self> {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = a;
        }
        Self::from_row_major(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    /// Signed determinant.
    pub fn det(&self) -> i64 {
        self.det
    }

    /// `d_A = |det A|`, the number of cosets of `Z^n / A Z^n`.
    pub fn d_a(&self) -> usize {
        self.det.unsigned_abs() as usize
    }

    pub fn eigen_moduli(&self) -> &[f64] {
        &self.eigen_moduli
    }

    /// The adjoint `A*`, which for a real matrix is the transpose.
    pub fn adjoint(&self) -> DilationMatrix {
        let n = self.n;
        let mut entries = vec![0; n * n];
        let mut adjugate = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.entries[j * n + i];
                adjugate[i * n + j] = self.adjugate[j * n + i];
            }
        }
        DilationMatrix {
            n,
            entries,
            det: self.det,
            eigen_moduli: self.eigen_moduli.clone(),
            adjugate,
        }
    }

    pub fn apply_int(&self, k: &[i64]) -> Vec<i64> {
        mat_vec_int(self.n, &self.entries, k)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] as f64 * x[j]).sum())
            .collect()
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let det = self.det as f64;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.adjugate[i * n + j] as f64 * x[j])
                    .sum::<f64>()
                    / det
            })
            .collect()
    }

    /// `A^j x` for any integer `j`.
    pub fn apply_power(&self, x: &[f64], j: i32) -> Vec<f64> {
        let mut y = x.to_vec();
        if j >= 0 {
            for _ in 0..j {
                y = self.apply(&y);
            }
        } else {
            for _ in 0..(-j) {
                y = self.apply_inverse(&y);
            }
        }
        y
    }

    /// Integer power `A^j`, `j >= 0`, row-major.
    pub fn int_power(&self, j: u32) -> Vec<i64> {
        let n = self.n;
        let mut acc: Vec<i64> = (0..n * n)
            .map(|idx| i64::from(idx / n == idx % n))
            .collect();
        for _ in 0..j {
            acc = mat_mul_int(n, &acc, &self.entries);
        }
        acc
    }

    /// Real matrix `A^j` (negative `j` uses the inverse), row-major.
    pub fn power_f64(&self, j: i32) -> Vec<f64> {
        let n = self.n;
        let mut cols = Vec::with_capacity(n * n);
        for c in 0..n {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            cols.push(self.apply_power(&e, j));
        }
        let mut out = vec![0.0; n * n];
        for (c, col) in cols.iter().enumerate() {
            for r in 0..n {
                out[r * n + c] = col[r];
            }
        }
        out
    }

    /// `true` when `k ∈ A Z^n`.
    pub fn in_image(&self, k: &[i64]) -> bool {
        let det = self.det;
        mat_vec_int(self.n, &self.adjugate, k)
            .iter()
            .all(|v| v.rem_euclid(det.abs()) == 0)
    }

    /// `A^{-1} k` as exact rationals.
    pub fn inverse_rational(&self, k: &[i64]) -> Vec<Rational64> {
        mat_vec_int(self.n, &self.adjugate, k)
            .into_iter()
            .map(|v| Rational64::new(v, self.det))
            .collect()
    }

    /// Canonical representative of `k` modulo `A Z^n`: the unique integer
    /// point of `A [0,1)^n` congruent to `k`.
    pub fn reduce(&self, k: &[i64]) -> Vec<i64> {
        let coords = self.inverse_rational(k);
        let shift: Vec<i64> = coords.iter().map(|c| c.floor().to_integer()).collect();
        let ashift = self.apply_int(&shift);
        k.iter().zip(&ashift).map(|(a, b)| a - b).collect()
    }
}

/// Coset representatives of `Z^n / A Z^n` (omega) and of
/// `(A*)^{-1} Z^n / Z^n` (gamma_dual, with `p_0 = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetReps {
    pub omega: Vec<Vec<i64>>,
    pub gamma_dual: Vec<Vec<Rational64>>,
}

impl CosetReps {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Least common denominator of every gamma_dual coordinate.
    pub fn common_denominator(&self) -> i64 {
        common_denominator(&self.gamma_dual)
    }

    pub fn gamma_dual_f64(&self) -> Vec<Vec<f64>> {
        self.gamma_dual
            .iter()
            .map(|p| p.iter().map(|c| *c.numer() as f64 / *c.denom() as f64).collect())
            .collect()
    }
}

pub fn coset_reps(a: &DilationMatrix) -> CosetReps {
    CosetReps {
        omega: integer_reps(a),
        gamma_dual: fractional_reps(&a.adjoint()),
    }
}

/// Canonical representatives of `Z^n / M Z^n`: the integer points of
/// `M [0,1)^n`, sorted lexicographically.
pub fn integer_reps(m: &DilationMatrix) -> Vec<Vec<i64>> {
    reps_from_candidates(m, bounding_box(m))
}

/// Reduces every candidate modulo `M Z^n`, deduplicates and sorts.
pub fn reps_from_candidates<I>(m: &DilationMatrix, candidates: I) -> Vec<Vec<i64>>
where
    I: IntoIterator<Item = Vec<i64>>,
{
    let set: BTreeSet<Vec<i64>> = candidates.into_iter().map(|k| m.reduce(&k)).collect();
    let reps: Vec<Vec<i64>> = set.into_iter().collect();
    debug_assert_eq!(reps.len(), m.d_a());
    reps
}

/// Representatives of `M^{-1} Z^n / Z^n` in `[0,1)^n`, sorted
/// lexicographically (so the origin comes first).
pub fn fractional_reps(m: &DilationMatrix) -> Vec<Vec<Rational64>> {
    let mut reps: Vec<Vec<Rational64>> = integer_reps(m)
        .iter()
        .map(|q| m.inverse_rational(q).into_iter().map(|c| c.fract_nonneg()).collect())
        .collect();
    reps.sort();
    reps.dedup();
    reps
}

pub fn common_denominator(points: &[Vec<Rational64>]) -> i64 {
    points
        .iter()
        .flatten()
        .fold(1i64, |acc, c| num_integer_lcm(acc, *c.denom()))
}

/// Every integer point of the bounding box of `M [0,1]^n`.
pub fn bounding_box(m: &DilationMatrix) -> Vec<Vec<i64>> {
    let n = m.dim();
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let row = (0..n).map(|j| m.entry(i, j));
            let lo: i64 = row.clone().filter(|v| *v < 0).sum();
            let hi: i64 = row.filter(|v| *v > 0).sum();
            (lo, hi)
        })
        .collect();
    box_points(&ranges)
}

/// All integer vectors in the product of inclusive ranges.
pub fn box_points(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for &(lo, hi) in ranges {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1).max(0) as usize);
        for prefix in &out {
            for v in lo..=hi {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

trait FractNonneg {
    fn fract_nonneg(self) -> Self;
}

impl FractNonneg for Rational64 {
    fn fract_nonneg(self) -> Self {
        let f = self - self.floor();
        if f.is_zero() {
            Rational64::zero()
        } else {
            f
        }
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.abs()
    }
    (a / gcd(a, b) * b).abs()
}

fn mat_vec_int(n: usize, m: &[i64], k: &[i64]) -> Vec<i64> {
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * k[j]).sum())
        .collect()
}

fn mat_mul_int(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
        }
    }
    out
}

/// Fraction-free Gaussian elimination (Bareiss), exact for integer input.
fn integer_det(n: usize, entries: &[i64]) -> i64 {
    if n == 0 {
        return 1;
    }
    let mut m: Vec<i128> = entries.iter().map(|&v| v as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                return 0;
            };
            for c in 0..n {
                m.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
            }
        }
        prev = m[k * n + k];
    }
    (sign * m[n * n - 1]) as i64
}

fn integer_adjugate(n: usize, entries: &[i64]) -> Vec<i64> {
    if n == 1 {
        return vec![1];
    }
    let mut adj = vec![0; n * n];
    let mut minor = Vec::with_capacity((n - 1) * (n - 1));
    for i in 0..n {
        for j in 0..n {
            minor.clear();
            for r in (0..n).filter(|&r| r != i) {
                for c in (0..n).filter(|&c| c != j) {
                    minor.push(entries[r * n + c]);
                }
            }
            let cof = integer_det(n - 1, &minor);
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            // adjugate is the transposed cofactor matrix
            adj[j * n + i] = sign * cof;
        }
    }
    adj
}

fn eigenvalue_moduli(n: usize, entries: &[i64]) -> Vec<f64> {
    let values: Vec<f64> = entries.iter().map(|&v| v as f64).collect();
    let m = DMatrix::from_row_slice(n, n, &values);
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    moduli
}
