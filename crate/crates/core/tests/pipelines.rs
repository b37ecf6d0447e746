use std::sync::Arc;

use tightframe::extension::{build_framelets, check_uep, uep_complete};
use tightframe::filters::{zero_set_mask, BracketFunction};
use tightframe::frame_analysis::{calderon_check, ScaleRange};
use tightframe::refinable::{fmra_check, ProbeSpec, DEFAULT_DEPTH};
use tightframe::{
    validate_dilation, ClosedForm, Filter, FilterBank, Grid, PhiHat, Profile, TrigPolynomial, VerificationReport,
};

fn haar_lowpass() -> Filter {
    TrigPolynomial::from_real_1d(&[(0, 0.5), (1, 0.5)]).into()
}

#[test]
fn completed_haar_bank_gives_calderon_sums_of_one() {
    let a = validate_dilation(&[vec![2]]).unwrap();
    let grid = Grid::new(1, 1024).unwrap();
    let done = uep_complete(&haar_lowpass(), &a, &grid, 1e-12).unwrap();
    let bank = done.into_bank(a.clone(), haar_lowpass()).unwrap();
    let mask = zero_set_mask(
        &BracketFunction::new(
            Arc::new(PhiHat::new(a.clone(), haar_lowpass(), DEFAULT_DEPTH).unwrap().with_closed_form(ClosedForm::haar())),
            64,
        )
        .unwrap(),
        &grid,
        1e-10,
    )
    .unwrap();
    assert!(check_uep(&bank, &mask, &grid, 1e-12).unwrap().passed());

    // sampled filters are exact on grid points, so evaluate Calderón sums at
    // points whose dyadic orbit stays on the grid
    let phi: Arc<dyn Profile> =
        Arc::new(PhiHat::new(a.clone(), haar_lowpass(), DEFAULT_DEPTH).unwrap().with_closed_form(ClosedForm::haar()));
    let psis: Vec<Arc<dyn Profile>> = build_framelets(&bank, phi)
        .unwrap()
        .into_iter()
        .map(|p| Arc::new(p) as Arc<dyn Profile>)
        .collect();
    let points: Vec<Vec<f64>> = (1..8).map(|i| vec![i as f64 / 8.0]).collect();
    let out = calderon_check(&psis, &a, &points, ScaleRange::new(-30, 30).unwrap(), Some(vec![vec![1]]), 1e-4).unwrap();
    for (_, s) in &out.profile {
        assert!((s - 1.0).abs() < 1e-4, "{s}");
    }
}

#[test]
fn quincunx_completion_passes_uep() {
    let a = validate_dilation(&[vec![1, 1], vec![1, -1]]).unwrap();
    let grid = Grid::new(2, 64).unwrap();
    let h0: Filter = TrigPolynomial::from_terms(2, vec![(vec![0, 0], 0.5.into()), (vec![1, 0], 0.5.into())])
        .unwrap()
        .into();
    let done = uep_complete(&h0, &a, &grid, 1e-12).unwrap();
    assert_eq!(done.filters.len(), 2);
    let bank = done.into_bank(a, h0).unwrap();
    let r = check_uep(&bank, &tightframe::ZeroSetMask::empty(grid), &grid, 1e-12).unwrap();
    assert!(r.passed());
    assert!(r.max_residual < 1e-12);
}

#[test]
fn bank_and_report_round_trip_through_json() {
    let a = validate_dilation(&[vec![2]]).unwrap();
    let bank = FilterBank::new(a, haar_lowpass(), vec![TrigPolynomial::from_real_1d(&[(0, 0.5), (1, -0.5)]).into()])
        .unwrap();
    let text = serde_json::to_string(&bank).unwrap();
    let back: FilterBank = serde_json::from_str(&text).unwrap();
    assert_eq!(back.highpass.len(), 1);
    let grid = Grid::new(1, 256).unwrap();
    let r = check_uep(&back, &tightframe::ZeroSetMask::empty(grid), &grid, 1e-12).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let r2: VerificationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(r2.verdict, r.verdict);
    assert_eq!(r2.max_residual, r.max_residual);
}

#[test]
fn fmra_probe_on_shannon_type_profile() {
    let a = validate_dilation(&[vec![2]]).unwrap();
    let phi: Arc<dyn Profile> = Arc::new(
        PhiHat::new(a.clone(), haar_lowpass(), DEFAULT_DEPTH)
            .unwrap()
            .with_closed_form(ClosedForm::Indicator { lo: vec![-0.25], hi: vec![0.25], closed: false }),
    );
    let probe = ProbeSpec { samples: 5000, ..ProbeSpec::default() };
    assert!(fmra_check(phi, &a, &probe).unwrap().passed());
}
