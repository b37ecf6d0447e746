//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tightframe::approx_continuity::{
    counterexample_density_exact, counterexample_q, density_ratio_monte_carlo, han_counterexample,
    CounterexampleLevelSet,
};
use tightframe::extension::{
    build_framelets, check_oep, check_uep, fundamental_function, mra_orthogonality_check, oep_complete,
    oep_reduce, orthogonality_residual_at, uep_complete, ScaledProfile,
};
use tightframe::filters::{zero_set_mask, BracketFunction};
use tightframe::frame_analysis::{
    calderon_check, coarse_scale_decay, empirical_parseval, translate_frame_bounds, two_scale_energy,
    Quadrature, ScaleRange, SystemKind, TestSignal,
};
use tightframe::lattice::{coset_reps, integer_reps};
use tightframe::refinable::{EvalMode, ProbeSpec, DEFAULT_DEPTH};
use tightframe::{
    validate_dilation, ClosedForm, DilationMatrix, Filter, FilterBank, Grid, PhiHat, Profile, Rational64,
    TrigPolynomial, ZeroSetMask,
};

type Outcome = Result<(bool, String), String>;

fn dyadic() -> DilationMatrix {
    validate_dilation(&[vec![2]]).unwrap()
}

fn haar_lowpass() -> Filter {
    TrigPolynomial::from_real_1d(&[(0, 0.5), (1, 0.5)]).into()
}

fn haar_bank() -> FilterBank {
    FilterBank::new(
        dyadic(),
        haar_lowpass(),
        vec![TrigPolynomial::from_real_1d(&[(0, 0.5), (1, -0.5)]).into()],
    )
    .unwrap()
}

fn haar_phi() -> Arc<dyn Profile> {
    Arc::new(
        PhiHat::new(dyadic(), haar_lowpass(), DEFAULT_DEPTH)
            .unwrap()
            .with_closed_form(ClosedForm::haar()),
    )
}

fn hat_phi() -> Arc<dyn Profile> {
    Arc::new(
        PhiHat::new(
            dyadic(),
            TrigPolynomial::from_real_1d(&[(-1, 0.25), (0, 0.5), (1, 0.25)]).into(),
            DEFAULT_DEPTH,
        )
        .unwrap()
        .with_closed_form(ClosedForm::hat()),
    )
}

fn haar_psis() -> Vec<Arc<dyn Profile>> {
    build_framelets(&haar_bank(), haar_phi())
        .unwrap()
        .into_iter()
        .map(|p| Arc::new(p) as Arc<dyn Profile>)
        .collect()
}

fn spline_bank() -> FilterBank {
    let r2 = std::f64::consts::SQRT_2 / 4.0;
    FilterBank::new(
        dyadic(),
        TrigPolynomial::from_real_1d(&[(-1, 0.25), (0, 0.5), (1, 0.25)]).into(),
        vec![
            TrigPolynomial::from_real_1d(&[(-1, r2), (1, -r2)]).into(),
            TrigPolynomial::from_real_1d(&[(-1, -0.25), (0, 0.5), (1, -0.25)]).into(),
        ],
    )
    .unwrap()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn ac1() -> Outcome {
    let grid = Grid::new(1, 4096).map_err(err)?;
    let start = Instant::now();
    let r = check_uep(&haar_bank(), &ZeroSetMask::empty(grid), &grid, 1e-12).map_err(err)?;
    let elapsed = start.elapsed();
    Ok((
        r.passed() && r.max_residual < 1e-12 && elapsed < Duration::from_secs(1),
        format!("max residual {:.3e}, {:.1} ms", r.max_residual, elapsed.as_secs_f64() * 1e3),
    ))
}

fn ac2() -> Outcome {
    let grid = Grid::new(1, 4096).map_err(err)?;
    let bank = spline_bank();
    let mask = ZeroSetMask::empty(grid);
    let uep = check_uep(&bank, &mask, &grid, 1e-12).map_err(err)?;
    let ortho = mra_orthogonality_check(&bank, &mask, &grid, 1e-12).map_err(err)?;
    let at = orthogonality_residual_at(&bank, &[0.125], 0).map_err(err)?;
    let target = std::f64::consts::SQRT_2 / 4.0;
    Ok((
        uep.max_residual < 1e-12 && !ortho.passed() && (at - target).abs() < 1e-10,
        format!(
            "UEP max {:.3e}; orthogonality check fails, residual at 1/8 = {at:.12} (target {target:.12})",
            uep.max_residual
        ),
    ))
}

fn ac3() -> Outcome {
    let phi = PhiHat::new(dyadic(), haar_lowpass(), DEFAULT_DEPTH).map_err(err)?;
    let value = phi.product(&[0.5], DEFAULT_DEPTH).map_err(err)?.norm();
    let target = 2.0 / std::f64::consts::PI;
    let modulus = phi.clone().with_mode(EvalMode::Modulus);
    let drift = (modulus.product(&[0.5], 2 * DEFAULT_DEPTH).map_err(err)?
        - modulus.product(&[0.5], DEFAULT_DEPTH).map_err(err)?)
    .norm();
    Ok((
        (value - target).abs() < 1e-6 && drift < 1e-6,
        format!("|phi(1/2)| = {value:.12}, error {:.2e}, J->2J drift {drift:.2e}", (value - target).abs()),
    ))
}

fn ac4() -> Outcome {
    let bank = haar_bank();
    let third = fundamental_function(&bank, &[1.0 / 3.0], 40).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = rng.random_range(0.0..1.0);
        worst = worst.max(fundamental_function(&bank, &[t], 40).map_err(err)?.recursion_residual);
    }
    let zero = fundamental_function(&bank, &[0.0], 40).map_err(err)?.value;
    Ok((
        (third.value - 1.0).abs() < 1e-6 && worst < 1e-12 && zero == 0.0,
        format!("theta(1/3) = {:.12}, worst recursion residual {worst:.2e}, theta(0) = {zero}", third.value),
    ))
}

fn ac5() -> Outcome {
    let grid = Grid::new(1, 4096).map_err(err)?;
    let weight: Filter = TrigPolynomial::from_real_1d(&[(-1, 1.0 / 6.0), (0, 2.0 / 3.0), (1, 1.0 / 6.0)]).into();
    let bank = oep_complete(&haar_lowpass(), &weight, &dyadic(), &grid, 1e-12).map_err(err)?;
    let mask = ZeroSetMask::empty(grid);
    let probe = ProbeSpec {
        samples: 20_000,
        ..ProbeSpec::default()
    };
    let oep = check_oep(&bank, haar_phi(), &mask, &grid, 1e-10, &probe).map_err(err)?;
    let grid_max = ["SOEP0", "SOEPk"]
        .iter()
        .filter_map(|c| oep.find(c))
        .map(|r| r.max_residual)
        .fold(0.0, f64::max);
    let reduced = oep_reduce(&bank, &grid, 1e-10).map_err(err)?;
    let uep = check_uep(&reduced, &mask, &grid, 1e-10).map_err(err)?;
    Ok((
        oep.passed() && grid_max < 1e-10 && uep.max_residual < 1e-10,
        format!("OEP max {grid_max:.3e}, reduced UEP max {:.3e}", uep.max_residual),
    ))
}

fn ac6() -> Outcome {
    let grid = Grid::new(1, 4096).map_err(err)?;
    let done = uep_complete(&haar_lowpass(), &dyadic(), &grid, 1e-12).map_err(err)?;
    let rejected = matches!(
        uep_complete(&TrigPolynomial::constant(1, 1.1.into()).into(), &dyadic(), &grid, 1e-12),
        Err(tightframe::Error::SubQmfViolated { .. })
    );
    Ok((
        done.orthonormality_residual < 1e-12 && done.orbits == 2048 && rejected,
        format!(
            "{} orbits, worst column residual {:.3e}, H0 = 1.1 rejected: {rejected}",
            done.orbits, done.orthonormality_residual
        ),
    ))
}

fn ac7() -> Outcome {
    let points: Vec<Vec<f64>> = (0..256).map(|i| vec![(i as f64 + 0.5) / 256.0]).collect();
    let range = ScaleRange::new(-25, 25).map_err(err)?;
    let out = calderon_check(&haar_psis(), &dyadic(), &points, range, Some(vec![vec![1]]), 1e-4).map_err(err)?;
    let sum_err = out.profile.iter().map(|(_, s)| (s - 1.0).abs()).fold(0.0, f64::max);
    let cross = out.report.find("CROSS").map(|r| r.max_residual).unwrap_or(f64::INFINITY);
    let half: Vec<Arc<dyn Profile>> = haar_psis()
        .into_iter()
        .map(|p| Arc::new(ScaledProfile { inner: p, factor: 0.5 }) as Arc<dyn Profile>)
        .collect();
    let scaled = calderon_check(&half, &dyadic(), &points, range, Some(vec![vec![1]]), 1e-4).map_err(err)?;
    let scaled_err = scaled.profile.iter().map(|(_, s)| (s - 0.25).abs()).fold(0.0, f64::max);
    Ok((
        sum_err < 1e-4 && cross < 1e-8 && !scaled.report.passed() && scaled_err < 1e-4,
        format!("max |sum-1| {sum_err:.2e}, cross {cross:.2e}, scaled system max |sum-0.25| {scaled_err:.2e}"),
    ))
}

fn ac8() -> Outcome {
    let quad = Quadrature::default();
    let mut perturbed = haar_bank();
    perturbed.highpass[0] = perturbed.highpass[0].scaled(0.9);
    let (mut worst, mut weakest) = (0.0f64, f64::INFINITY);
    for seed in 1..=5 {
        let f = TestSignal::random(1, 16.0, seed).map_err(err)?;
        worst = worst.max(two_scale_energy(&haar_bank(), haar_phi(), &f, 3, &quad).map_err(err)?.residual);
        weakest = weakest.min(two_scale_energy(&perturbed, haar_phi(), &f, 3, &quad).map_err(err)?.residual);
    }
    Ok((
        worst < 1e-8 && weakest > 1e-3,
        format!("Haar residual max {worst:.2e}, perturbed residual min {weakest:.3e}"),
    ))
}

fn ac9() -> Outcome {
    let grid = Grid::new(1, 1024).map_err(err)?;
    let hat = BracketFunction::new(hat_phi(), 64).map_err(err)?;
    let hb = translate_frame_bounds(&zero_set_mask(&hat, &grid, 1e-10).map_err(err)?).map_err(err)?;
    let shannon: Arc<dyn Profile> = Arc::new(
        PhiHat::new(dyadic(), haar_lowpass(), DEFAULT_DEPTH)
            .map_err(err)?
            .with_closed_form(ClosedForm::Indicator {
                lo: vec![-0.25],
                hi: vec![0.25],
                closed: false,
            }),
    );
    let sb = BracketFunction::new(shannon, 64).map_err(err)?;
    let sh = translate_frame_bounds(&zero_set_mask(&sb, &grid, 1e-10).map_err(err)?).map_err(err)?;
    Ok((
        (hb.lower - 1.0 / 3.0).abs() < 1e-6
            && (hb.upper - 1.0).abs() < 1e-6
            && (sh.lower - 1.0).abs() < 1e-6
            && (sh.upper - 1.0).abs() < 1e-6
            && (sh.masked_fraction - 0.5).abs() < 0.01,
        format!(
            "hat ({:.9}, {:.9}); Shannon ({:.9}, {:.9}) masked {:.4}",
            hb.lower, hb.upper, sh.lower, sh.upper, sh.masked_fraction
        ),
    ))
}

fn ac10() -> Outcome {
    let quad = Quadrature::default();
    let range = ScaleRange::new(-8, 8).map_err(err)?;
    let start = Instant::now();
    let (mut lo, mut hi, mut gap) = (f64::INFINITY, 0.0f64, 0.0f64);
    for seed in [7, 8, 9] {
        let f = TestSignal::random(1, 4.0, seed).map_err(err)?;
        let a = empirical_parseval(&haar_psis(), &dyadic(), &f, range, SystemKind::Affine, &quad).map_err(err)?;
        let q = empirical_parseval(&haar_psis(), &dyadic(), &f, range, SystemKind::QuasiAffine, &quad)
            .map_err(err)?;
        let (ra, rq) = (a.ratio.unwrap_or(f64::NAN), q.ratio.unwrap_or(f64::NAN));
        lo = lo.min(ra);
        hi = hi.max(ra);
        gap = gap.max((ra - rq).abs());
    }
    let elapsed = start.elapsed();
    Ok((
        lo >= 0.99 && hi <= 1.0001 && gap < 1e-2 && elapsed < Duration::from_secs(60),
        format!("affine ratios in [{lo:.6}, {hi:.6}], max |affine-quasi| {gap:.2e}, {:.1} s", elapsed.as_secs_f64()),
    ))
}

fn ac11() -> Outcome {
    let four = BigRational::from_integer(BigInt::from(4));
    let q_ok = (0..=10).all(|j| counterexample_q(j) == four);
    let mut pair_ok = true;
    let mut min_pairing = f64::INFINITY;
    let mut one = 0.0;
    for j in 0..=10 {
        let rec = han_counterexample(j, None).map_err(err)?;
        min_pairing = min_pairing.min(rec.pairing);
        one = rec.one_pairing;
        pair_ok &= rec.pairing >= 4.0 - 1e-9 && rec.pairing > rec.one_pairing && (rec.one_pairing - 3.0).abs() < 1e-6;
    }
    let set = CounterexampleLevelSet::f_set();
    let mut worst_sigma: f64 = 0.0;
    for j in 1..=8 {
        let est = density_ratio_monte_carlo(&set, &dyadic(), &[0.0], 1.0, j, 100_000, 0xacce55).map_err(err)?;
        let exact = counterexample_density_exact(j as u32).to_f64().unwrap_or(f64::NAN);
        let sigma = est.stderr.max(1e-12);
        worst_sigma = worst_sigma.max((est.ratio - exact).abs() / sigma);
    }
    Ok((
        q_ok && pair_ok && worst_sigma < 3.0,
        format!("q_j = 4 for j=0..10: {q_ok}; min pairing {min_pairing:.9}, <1,g> = {one:.9}; worst MC deviation {worst_sigma:.2} sigma"),
    ))
}

fn ac12() -> Outcome {
    let quad = Quadrature::default();
    let f = TestSignal::random(1, 16.0, 12).map_err(err)?;
    let js: Vec<i32> = (-10..=-1).rev().collect();
    let haar = coarse_scale_decay(haar_phi().as_ref(), &dyadic(), &f, &js, &quad).map_err(err)?;
    let hat = coarse_scale_decay(hat_phi().as_ref(), &dyadic(), &f, &js, &quad).map_err(err)?;
    let (eh, et) = (*haar.energies.last().unwrap(), *hat.energies.last().unwrap());
    Ok((
        eh < 1e-2 * haar.norm_sq && et < 1e-2 * hat.norm_sq,
        format!("energy at j=-10: Haar {eh:.3e}, hat {et:.3e} (norm^2 {:.6})", haar.norm_sq),
    ))
}

/// Independent count of the integer points of `A[0,1)^n`: `k` qualifies iff
/// `0 <= adj(A) k / det < 1` in every coordinate.
fn brute_force_count(m: &[Vec<i64>]) -> usize {
    let n = m.len();
    let (adj, det) = adjugate(m);
    let reach: i64 = m.iter().map(|r| r.iter().map(|v| v.abs()).sum::<i64>()).max().unwrap_or(0);
    let mut count = 0;
    let total = (2 * reach + 1).pow(n as u32);
    for idx in 0..total {
        let mut rest = idx;
        let k: Vec<i64> = (0..n)
            .map(|_| {
                let v = rest % (2 * reach + 1) - reach;
                rest /= 2 * reach + 1;
                v
            })
            .collect();
        let inside = adj.iter().all(|row| {
            let num: i64 = row.iter().zip(&k).map(|(a, b)| a * b).sum();
            let (num, den) = if det < 0 { (-num, -det) } else { (num, det) };
            num >= 0 && num < den
        });
        count += usize::from(inside);
    }
    count
}

fn adjugate(m: &[Vec<i64>]) -> (Vec<Vec<i64>>, i64) {
    match m.len() {
        1 => (vec![vec![1]], m[0][0]),
        2 => (
            vec![vec![m[1][1], -m[0][1]], vec![-m[1][0], m[0][0]]],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ),
        _ => {
            let c = |i: usize, j: usize| {
                let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
                let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
            };
            let adj: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| c(j, i)).collect()).collect();
            let det = (0..3).map(|j| m[0][j] * c(0, j)).sum();
            (adj, det)
        }
    }
}

fn ac13() -> Outcome {
    let quincunx = validate_dilation(&[vec![1, 1], vec![1, -1]]).map_err(err)?;
    let gamma = coset_reps(&quincunx).gamma_dual;
    let half = Rational64::new(1, 2);
    let zero = Rational64::from_integer(0);
    let gamma_ok = gamma == vec![vec![zero, zero], vec![half, half]];
    let battery: Vec<Vec<Vec<i64>>> = vec![
        vec![vec![2]],
        vec![vec![-3]],
        vec![vec![2, 0], vec![0, 2]],
        vec![vec![1, 1], vec![1, -1]],
        vec![vec![2, 1], vec![0, 2]],
        vec![vec![1, -1], vec![1, 1]],
        vec![vec![3, 0], vec![0, 2]],
        vec![vec![0, 2], vec![1, 0]],
        vec![vec![2, 1], vec![1, 3]],
        vec![vec![2, 0, 0], vec![0, 2, 1], vec![0, 0, 2]],
    ];
    let mut mismatches = Vec::new();
    for m in &battery {
        let a = validate_dilation(m).map_err(err)?;
        let d = a.d_a() as usize;
        let counts = [integer_reps(&a).len(), coset_reps(&a).len(), brute_force_count(m)];
        if counts.iter().any(|c| *c != d) {
            mismatches.push(format!("{m:?}: {counts:?} vs {d}"));
        }
    }
    Ok((
        gamma_ok && mismatches.is_empty(),
        format!(
            "quincunx gamma {}; {} matrices, mismatches {mismatches:?}",
            gamma
                .iter()
                .map(|p| format!("({})", p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")))
                .collect::<Vec<_>>()
                .join(" "),
            battery.len()
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 13] = [
        ("AC-1", "Haar unitary extension on 4096 points", ac1),
        ("AC-2", "linear-spline framelet, orthogonality check fails", ac2),
        ("AC-3", "Haar infinite product", ac3),
        ("AC-4", "fundamental function", ac4),
        ("AC-5", "oblique extension pipeline", ac5),
        ("AC-6", "unitary completion", ac6),
        ("AC-7", "Calderon sums", ac7),
        ("AC-8", "two-scale energy identity", ac8),
        ("AC-9", "translate frame bounds", ac9),
        ("AC-10", "empirical Parseval", ac10),
        ("AC-11", "approximate continuity counterexample", ac11),
        ("AC-12", "coarse-scale decay", ac12),
        ("AC-13", "lattice battery", ac13),
    ];
    let mut failures = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!ok);
        println!(
            "[{}] {id} {name}: {detail} ({:.2} s)",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
