//! Frame-side checks computed in the frequency domain.
//!
//! Inner-product energies are never sampled in time. For a profile `ĝ` the
//! level-`j` energy of the translates is folded onto the torus,
//!
//! `Σ_k |<f, D^j τ_k g>|² = d^j ∫_{T^n} |Σ_m f̂(B^j(s+m)) conj ĝ(s+m)|² ds`,
//!
//! with `B = A*`, and the torus integral is a lattice rule. All translation
//! sums are therefore complete; only the scale range is truncated.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{build_framelets, FilterBank};
use crate::filters::{Profile, TrigPolynomial, ZeroSetMask};
use crate::lattice::{box_points, fractional_reps, integer_reps, DilationMatrix};
use crate::report::{ResidualAccumulator, VerificationReport};

/// Band-limited test signal `f̂(ξ) = c · bump(|ξ|/R) · P(ξ/(2R))` with
/// `bump(r) = exp(1 − 1/(1 − r²))` and a seeded trigonometric polynomial `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSignal {
    n: usize,
    radius: f64,
    poly: TrigPolynomial,
    scale: f64,
    norm_sq: f64,
}

/// Highest frequency in the random modulation of a test signal.
const SIGNAL_DEGREE: i64 = 3;

impl TestSignal {
    /// Seeded signal normalized to `‖f‖ = 1`.
    pub fn random(n: usize, radius: f64, seed: u64) -> Result<Self> {
        if n == 0 || !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "test signal needs n >= 1 and a positive radius (n = {n}, R = {radius})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ranges = vec![(-SIGNAL_DEGREE, SIGNAL_DEGREE); n];
        let terms: Vec<(Vec<i64>, Complex64)> = box_points(&ranges)
            .into_iter()
            .map(|k| {
                let bias = if k.iter().all(|v| *v == 0) { 1.5 } else { 0.0 };
                let c = Complex64::new(
                    rng.random_range(-1.0..1.0) + bias,
                    rng.random_range(-1.0..1.0),
                );
                (k, c)
            })
            .collect();
        let mut signal = Self {
            n,
            radius,
            poly: TrigPolynomial::from_terms(n, terms)?,
            scale: 1.0,
            norm_sq: 0.0,
        };
        let raw = signal.integrate_norm();
        signal.scale = 1.0 / raw.sqrt();
        signal.norm_sq = signal.integrate_norm();
        Ok(signal)
    }

    pub fn zero(n: usize, radius: f64) -> Self {
        Self {
            n,
            radius,
            poly: TrigPolynomial::zero(n),
            scale: 0.0,
            norm_sq: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `‖f‖² = ∫ |f̂|²`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn spectrum(&self, xi: &[f64]) -> Complex64 {
        let r2: f64 = xi.iter().map(|x| x * x).sum::<f64>() / (self.radius * self.radius);
        if r2 >= 1.0 || self.scale == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let bump = (1.0 - 1.0 / (1.0 - r2)).exp();
        let u: Vec<f64> = xi.iter().map(|x| x / (2.0 * self.radius)).collect();
        self.poly.at(&u) * (bump * self.scale)
    }

    /// Trapezoid rule on `[-R, R]^n`; the integrand vanishes to all orders at
    /// the boundary, so the rule converges faster than any power.
    fn integrate_norm(&self) -> f64 {
        let q: usize = match self.n {
            1 => 8192,
            2 => 512,
            _ => 64,
        };
        let h = 2.0 * self.radius / q as f64;
        let ranges = vec![(0i64, q as i64 - 1); self.n];
        let total: f64 = box_points(&ranges)
            .par_iter()
            .map(|a| {
                let xi: Vec<f64> = a.iter().map(|v| -self.radius + (*v as f64 + 0.5) * h).collect();
                self.spectrum(&xi).norm_sqr()
            })
            .sum();
        total * h.powi(self.n as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub j_min: i32,
    pub j_max: i32,
}

impl ScaleRange {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max {
            return Err(Error::InvalidParameter(format!(
                "empty scale range [{j_min}, {j_max}]"
            )));
        }
        Ok(Self { j_min, j_max })
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }
}

/// Resolution policy for torus lattice rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub min_points: usize,
    pub oversample: f64,
    /// Largest number of integrand evaluations per energy.
    pub max_evaluations: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            min_points: 256,
            oversample: 8.0,
            max_evaluations: 200_000_000,
        }
    }
}

impl Quadrature {
    /// Points per axis for an integrand whose signal factor is stretched by
    /// `stretch` and whose profile factor oscillates on scale `1/extent`.
    pub fn resolution(&self, radius: f64, stretch: f64, extent: f64) -> usize {
        let wanted = self.oversample * (stretch * 12.0 / radius + extent);
        (wanted.ceil() as usize).max(self.min_points).next_power_of_two()
    }
}

fn frobenius(m: &[f64]) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn mat_vec(n: usize, m: &[f64], x: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| (0..n).map(|j| m[i * n + j] * x[j]).sum())
        .collect()
}

/// Folded energy `scale · weight · Σ_nodes |Σ_m f̂(F(s+m)) conj ĝ(G(s+m))|²`.
struct Fold<'a> {
    signal: &'a TestSignal,
    profile: &'a dyn Profile,
    /// Matrix applied before the signal.
    f_mat: Vec<f64>,
    /// Inverse of `f_mat`, used to bound the support.
    f_inv: Vec<f64>,
    /// Matrix applied before the profile; `None` is the identity.
    g_mat: Option<Vec<f64>>,
}

impl Fold<'_> {
    fn energy(&self, nodes: &[Vec<f64>], weight: f64, quad: &Quadrature) -> Result<f64> {
        let n = self.signal.dim();
        let half: Vec<f64> = (0..n)
            .map(|i| {
                let row = &self.f_inv[i * n..(i + 1) * n];
                self.signal.radius() * row.iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect();
        let per_node: f64 = half.iter().map(|w| 2.0 * w + 2.0).product();
        let requested = (nodes.len() as f64 * per_node).min(usize::MAX as f64) as usize;
        if requested > quad.max_evaluations {
            return Err(Error::QuadratureBudget {
                requested,
                limit: quad.max_evaluations,
            });
        }
        let total: f64 = nodes
            .par_iter()
            .map(|s| {
                let ranges: Vec<(i64, i64)> = (0..n)
                    .map(|i| ((-half[i] - s[i]).ceil() as i64, (half[i] - s[i]).floor() as i64))
                    .collect();
                let mut acc = Complex64::new(0.0, 0.0);
                let mut x = vec![0.0; n];
                for m in box_points(&ranges) {
                    for i in 0..n {
                        x[i] = s[i] + m[i] as f64;
                    }
                    let fv = self.signal.spectrum(&mat_vec(n, &self.f_mat, &x));
                    if fv.norm_sqr() == 0.0 {
                        continue;
                    }
                    let gv = match &self.g_mat {
                        Some(g) => self.profile.eval(&mat_vec(n, g, &x)),
                        None => self.profile.eval(&x),
                    };
                    acc += fv * gv.conj();
                }
                acc.norm_sqr()
            })
            .sum();
        Ok(total * weight)
    }
}

fn grid_nodes(n: usize, m: usize) -> Vec<Vec<f64>> {
    box_points(&vec![(0, m as i64 - 1); n])
        .into_iter()
        .map(|a| a.into_iter().map(|v| v as f64 / m as f64).collect())
        .collect()
}

fn check_dims(signal: &TestSignal, profile: &dyn Profile, dilation: &DilationMatrix) -> Result<()> {
    let n = dilation.dim();
    for got in [signal.dim(), profile.dim()] {
        if got != n {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    Ok(())
}

/// `Σ_k |<f, D^j τ_k g>|²`.
pub fn level_energy(
    signal: &TestSignal,
    profile: &dyn Profile,
    dilation: &DilationMatrix,
    j: i32,
    quad: &Quadrature,
) -> Result<f64> {
    check_dims(signal, profile, dilation)?;
    if signal.norm_sq() == 0.0 {
        return Ok(0.0);
    }
    let b = dilation.adjoint();
    let n = b.dim();
    let fold = Fold {
        signal,
        profile,
        f_mat: b.power_f64(j),
        f_inv: b.power_f64(-j),
        g_mat: None,
    };
    let m = quad.resolution(signal.radius(), frobenius(&fold.f_mat), 1.0);
    let nodes = grid_nodes(n, m);
    let d = b.d_a() as f64;
    fold.energy(&nodes, d.powi(j) / (m as f64).powi(n as i32), quad)
}

/// `Σ_k |<f, d^{j/2} τ_k D^j ψ>|²` for `j < 0`: the oversampled levels of the
/// quasi-affine system.
pub fn quasi_affine_energy(
    signal: &TestSignal,
    profile: &dyn Profile,
    dilation: &DilationMatrix,
    j: i32,
    quad: &Quadrature,
) -> Result<f64> {
    check_dims(signal, profile, dilation)?;
    if j >= 0 {
        return level_energy(signal, profile, dilation, j, quad);
    }
    if signal.norm_sq() == 0.0 {
        return Ok(0.0);
    }
    let b = dilation.adjoint();
    let n = b.dim();
    let n_id: Vec<f64> = (0..n * n).map(|i| f64::from(u8::from(i / n == i % n))).collect();
    let g_mat = b.power_f64(-j);
    let extent = frobenius(&g_mat);
    let fold = Fold {
        signal,
        profile,
        f_mat: n_id.clone(),
        f_inv: n_id,
        g_mat: Some(g_mat),
    };
    let m = quad.resolution(signal.radius(), 1.0, extent);
    let nodes = grid_nodes(n, m);
    fold.energy(&nodes, 1.0 / (m as f64).powi(n as i32), quad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleResult {
    pub j: i32,
    /// Level-`j` scaling energy.
    pub lhs: f64,
    /// Level-`(j−1)` scaling plus wavelet energies.
    pub rhs: f64,
    pub residual: f64,
    pub coarse_scaling: f64,
    pub coarse_wavelets: Vec<f64>,
}

/// Two-scale energy identity between levels `j` and `j − 1`.
///
/// The level-`j` integral is taken over the nodes `B^{-1}(a/M + q_i)`, the
/// preimages of the level-`(j−1)` grid, so both sides use matching rules and
/// the residual measures the filter identity rather than quadrature error.
pub fn two_scale_energy(
    bank: &FilterBank,
    phi: Arc<dyn Profile>,
    signal: &TestSignal,
    j: i32,
    quad: &Quadrature,
) -> Result<TwoScaleResult> {
    let dilation = &bank.dilation;
    check_dims(signal, phi.as_ref(), dilation)?;
    let b = dilation.adjoint();
    let n = b.dim();
    let d = b.d_a() as f64;
    let psis = build_framelets(bank, phi.clone())?;
    if signal.norm_sq() == 0.0 {
        return Ok(TwoScaleResult {
            j,
            lhs: 0.0,
            rhs: 0.0,
            residual: 0.0,
            coarse_scaling: 0.0,
            coarse_wavelets: vec![0.0; psis.len()],
        });
    }
    let fine = b.power_f64(j);
    let m = quad.resolution(signal.radius(), frobenius(&fine), 1.0);
    let coarse_nodes = grid_nodes(n, m);
    let weight = d.powi(j - 1) / (m as f64).powi(n as i32);

    let coarse = |profile: &dyn Profile| {
        Fold {
            signal,
            profile,
            f_mat: b.power_f64(j - 1),
            f_inv: b.power_f64(1 - j),
            g_mat: None,
        }
        .energy(&coarse_nodes, weight, quad)
    };
    let coarse_scaling = coarse(phi.as_ref())?;
    let coarse_wavelets = psis
        .iter()
        .map(|p| coarse(p))
        .collect::<Result<Vec<_>>>()?;

    let shifts = integer_reps(&b);
    let b_ref = &b;
    let fine_nodes: Vec<Vec<f64>> = coarse_nodes
        .iter()
        .flat_map(|u| {
            shifts.iter().map(move |q| {
                let v: Vec<f64> = u.iter().zip(q).map(|(a, c)| a + *c as f64).collect();
                b_ref.apply_inverse(&v)
            })
        })
        .collect();
    let lhs = Fold {
        signal,
        profile: phi.as_ref(),
        f_mat: fine,
        f_inv: b.power_f64(-j),
        g_mat: None,
    }
    .energy(&fine_nodes, d.powi(j) / (d * (m as f64).powi(n as i32)), quad)?;
    let rhs = coarse_scaling + coarse_wavelets.iter().sum::<f64>();
    Ok(TwoScaleResult {
        j,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        coarse_scaling,
        coarse_wavelets,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub j_values: Vec<i32>,
    pub energies: Vec<f64>,
    pub norm_sq: f64,
    pub passed: bool,
}

/// Level energies of the scaling function at coarse scales. Passes when the
/// last energy is at most `1%` of `‖f‖²` and the last three decrease.
pub fn coarse_scale_decay(
    phi: &dyn Profile,
    dilation: &DilationMatrix,
    signal: &TestSignal,
    j_values: &[i32],
    quad: &Quadrature,
) -> Result<DecayCurve> {
    let energies = j_values
        .iter()
        .map(|&j| level_energy(signal, phi, dilation, j, quad))
        .collect::<Result<Vec<_>>>()?;
    let norm_sq = signal.norm_sq();
    let last = energies.last().copied().unwrap_or(0.0);
    let start = energies.len().saturating_sub(3);
    let decreasing = energies[start..].windows(2).all(|w| w[1] <= w[0]);
    Ok(DecayCurve {
        j_values: j_values.to_vec(),
        energies,
        norm_sq,
        passed: decreasing && last <= 0.01 * norm_sq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    /// Smallest unmasked bracket value: an inner estimate of the lower bound.
    pub lower: f64,
    /// Largest unmasked bracket value: an inner estimate of the upper bound.
    pub upper: f64,
    pub masked_fraction: f64,
}

pub fn translate_frame_bounds(mask: &ZeroSetMask) -> Result<FrameBounds> {
    let values = mask
        .bracket_values
        .iter()
        .zip(&mask.masked)
        .filter(|(_, m)| !**m)
        .map(|(v, _)| *v);
    let (lower, upper) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lower > upper {
        return Err(Error::EmptyAfterMask);
    }
    Ok(FrameBounds {
        lower,
        upper,
        masked_fraction: mask.masked_fraction(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Affine,
    QuasiAffine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsevalOutcome {
    /// Captured energy over `‖f‖²`; `None` when `f = 0`.
    pub ratio: Option<f64>,
    pub energy: f64,
    pub norm_sq: f64,
    /// `(j, energy)` summed over generators.
    pub levels: Vec<(i32, f64)>,
    /// Energy of the two boundary levels over `‖f‖²`, a proxy for the
    /// omitted scales.
    pub boundary_indicator: f64,
}

pub fn empirical_parseval(
    psis: &[Arc<dyn Profile>],
    dilation: &DilationMatrix,
    signal: &TestSignal,
    range: ScaleRange,
    system: SystemKind,
    quad: &Quadrature,
) -> Result<ParsevalOutcome> {
    let mut levels = Vec::new();
    for j in range.levels() {
        let mut e = 0.0;
        for psi in psis {
            e += match system {
                SystemKind::Affine => level_energy(signal, psi.as_ref(), dilation, j, quad)?,
                SystemKind::QuasiAffine => quasi_affine_energy(signal, psi.as_ref(), dilation, j, quad)?,
            };
        }
        levels.push((j, e));
    }
    let norm_sq = signal.norm_sq();
    let energy: f64 = levels.iter().map(|(_, e)| e).sum();
    if norm_sq == 0.0 {
        return Ok(ParsevalOutcome {
            ratio: None,
            energy,
            norm_sq,
            levels,
            boundary_indicator: 0.0,
        });
    }
    let first = levels.first().map_or(0.0, |l| l.1);
    let last = if levels.len() > 1 { levels.last().map_or(0.0, |l| l.1) } else { 0.0 };
    let boundary_indicator = (first + last) / norm_sq;
    if boundary_indicator > 0.1 {
        return Err(Error::TruncationDominates {
            indicator: boundary_indicator,
        });
    }
    Ok(ParsevalOutcome {
        ratio: Some(energy / norm_sq),
        energy,
        norm_sq,
        levels,
        boundary_indicator,
    })
}

#[derive(Debug, Clone)]
pub struct CalderonOutcome {
    pub report: VerificationReport,
    /// `(t, truncated Calderón sum)` per sample point.
    pub profile: Vec<(Vec<f64>, f64)>,
    /// Largest contribution of the two boundary octaves.
    pub tail_indicator: f64,
    pub q_list: Vec<Vec<i64>>,
}

/// All `q` with `|q|_∞ ≤ 2` outside `A* Z^n`, plus the nonzero coset
/// representatives of `Z^n / A* Z^n`.
pub fn default_q_list(dilation: &DilationMatrix) -> Vec<Vec<i64>> {
    let b = dilation.adjoint();
    let mut out: Vec<Vec<i64>> = box_points(&vec![(-2, 2); b.dim()])
        .into_iter()
        .filter(|q| !b.in_image(q))
        .collect();
    for q in integer_reps(&b) {
        if !b.in_image(&q) && !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// Truncated Calderón sums against one and cross sums against zero.
pub fn calderon_check(
    psis: &[Arc<dyn Profile>],
    dilation: &DilationMatrix,
    points: &[Vec<f64>],
    range: ScaleRange,
    q_list: Option<Vec<Vec<i64>>>,
    tol: f64,
) -> Result<CalderonOutcome> {
    let n = dilation.dim();
    let b = dilation.adjoint();
    let q_list = q_list.unwrap_or_else(|| default_q_list(dilation));
    for q in &q_list {
        if q.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.len(),
            });
        }
        if b.in_image(q) {
            return Err(Error::QInDilatedLattice { q: q.clone() });
        }
    }
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }
    let levels: Vec<i32> = range.levels().collect();
    let mats: Vec<Vec<f64>> = levels.iter().map(|&j| b.power_f64(j)).collect();

    let per_point: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|t| {
            let mut sum = 0.0;
            let mut edge = 0.0;
            for (idx, m) in mats.iter().enumerate() {
                let s = mat_vec(n, m, t);
                let e: f64 = psis.iter().map(|p| p.eval(&s).norm_sqr()).sum();
                sum += e;
                if idx == 0 || idx + 1 == mats.len() {
                    edge += e;
                }
            }
            let mut cross: f64 = 0.0;
            for q in &q_list {
                let tq: Vec<f64> = t.iter().zip(q).map(|(a, b)| a + *b as f64).collect();
                let mut c = Complex64::new(0.0, 0.0);
                for (m, &j) in mats.iter().zip(&levels) {
                    if j < 0 {
                        continue;
                    }
                    let s1 = mat_vec(n, m, t);
                    let s2 = mat_vec(n, m, &tq);
                    for p in psis {
                        c += p.eval(&s1) * p.eval(&s2).conj();
                    }
                }
                cross = cross.max(c.norm());
            }
            (sum, edge, cross)
        })
        .collect();

    let mut sums = ResidualAccumulator::new();
    let mut crosses = ResidualAccumulator::new();
    let mut profile = Vec::with_capacity(points.len());
    let mut tail: f64 = 0.0;
    for (t, (sum, edge, cross)) in points.iter().zip(&per_point) {
        sums.push(t, sum - 1.0);
        crosses.push(t, *cross);
        profile.push((t.clone(), *sum));
        tail = tail.max(*edge);
    }
    let calderon = sums
        .finish("CALDERON", None, 0.0, tol)
        .with_note(format!("scales {}..={}; boundary-octave contribution {tail:e}", range.j_min, range.j_max));
    let cross = crosses
        .finish("CROSS", None, 0.0, tol)
        .with_note(format!("tested q (finite subset of Z^n minus A*Z^n): {q_list:?}"));
    Ok(CalderonOutcome {
        report: VerificationReport::composite("CALDERON+CROSS", vec![calderon, cross]),
        profile,
        tail_indicator: tail,
        q_list,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosetFold {
    /// `∫ g`.
    pub integral: Complex64,
    /// `∫ g(Â t) dt`.
    pub dilated: Complex64,
    /// `d^{-1} ∫ Σ_i g(A^{-1} t + q_i) dt`.
    pub folded: Complex64,
    pub residual_dilated: f64,
    pub residual_folded: f64,
}

/// Both coset-folding identities for a trigonometric polynomial, integrated
/// by a lattice rule that is exact for every frequency involved.
pub fn coset_fold_integral(
    g: &TrigPolynomial,
    dilation: &DilationMatrix,
    resolution: Option<usize>,
) -> Result<CosetFold> {
    let n = dilation.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.dim(),
        });
    }
    let degree = g
        .coeffs()
        .keys()
        .flat_map(|k| dilation.adjoint().apply_int(k).into_iter().chain(k.iter().copied()))
        .map(|v| v.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let m = resolution.unwrap_or(2 * degree + 2).max(degree + 1);
    let nodes = grid_nodes(n, m);
    let w = 1.0 / (m as f64).powi(n as i32);
    let reps = fractional_reps(dilation);
    let reps: Vec<Vec<f64>> = reps
        .iter()
        .map(|p| p.iter().map(|c| *c.numer() as f64 / *c.denom() as f64).collect())
        .collect();
    let d = reps.len() as f64;
    let (mut plain, mut dilated, mut folded) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for t in &nodes {
        plain += g.at(t);
        dilated += g.at(&dilation.apply(t));
        let base = dilation.apply_inverse(t);
        for q in &reps {
            let s: Vec<f64> = base.iter().zip(q).map(|(a, b)| a + b).collect();
            folded += g.at(&s);
        }
    }
    let (plain, dilated, folded) = (plain * w, dilated * w, folded * (w / d));
    Ok(CosetFold {
        integral: plain,
        dilated,
        folded,
        residual_dilated: (dilated - plain).norm(),
        residual_folded: (folded - plain).norm(),
    })
}
