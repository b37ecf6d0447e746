//! Example banks shipped with the tool, with their expected verdicts.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use tightframe::extension::oep_complete;
use tightframe::{validate_dilation, ClosedForm, Filter, FilterBank, Grid, TrigPolynomial};

use crate::bankfile::{BankFile, Expected, Metadata};
use crate::CliError;

pub const NAMES: [&str; 5] = ["haar", "linear-spline", "shannon-fmra", "quincunx-haar", "haar-oep"];

fn expected(pairs: &[(&str, Expected)]) -> BTreeMap<String, Expected> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn meta(name: &str, provenance: &str, pairs: &[(&str, Expected)]) -> Metadata {
    Metadata {
        name: Some(name.to_string()),
        provenance: Some(provenance.to_string()),
        expected: expected(pairs),
    }
}

fn real(terms: &[(i64, f64)]) -> Filter {
    TrigPolynomial::from_real_1d(terms).into()
}

const UNITARY_MATRIX: [&str; 7] = [
    "verify-uep",
    "build-framelet",
    "complete",
    "frame-bounds",
    "calderon",
    "two-scale",
    "density-probe",
];

fn all_pass() -> Vec<(&'static str, Expected)> {
    UNITARY_MATRIX.iter().map(|s| (*s, Expected::Pass)).collect()
}

pub fn bundled(name: &str) -> Result<BankFile, CliError> {
    let dyadic = validate_dilation(&[vec![2]])?;
    let file = match name {
        "haar" => {
            let bank = FilterBank::new(dyadic, real(&[(0, 0.5), (1, 0.5)]), vec![real(&[(0, 0.5), (1, -0.5)])])?;
            BankFile::from_bank(
                &bank,
                Some(ClosedForm::haar()),
                meta("haar", "Haar mask with its quadrature-mirror highpass", &all_pass()),
            )
        }
        "linear-spline" => {
            let r = SQRT_2 / 4.0;
            let bank = FilterBank::new(
                dyadic,
                real(&[(-1, 0.25), (0, 0.5), (1, 0.25)]),
                vec![real(&[(-1, r), (1, -r)]), real(&[(-1, -0.25), (0, 0.5), (1, -0.25)])],
            )?;
            BankFile::from_bank(
                &bank,
                Some(ClosedForm::hat()),
                meta(
                    "linear-spline",
                    "piecewise-linear B-spline mask with two unitary-extension highpass filters",
                    &all_pass(),
                ),
            )
        }
        "shannon-fmra" => {
            let bank = FilterBank::new(
                dyadic,
                Filter::PeriodicBox {
                    lo: vec![-0.125],
                    hi: vec![0.125],
                    height: 1.0,
                },
                vec![Filter::PeriodicBox {
                    lo: vec![0.125],
                    hi: vec![0.875],
                    height: 1.0,
                }],
            )?;
            BankFile::from_bank(
                &bank,
                Some(ClosedForm::Indicator {
                    lo: vec![-0.25],
                    hi: vec![0.25],
                    closed: false,
                }),
                meta(
                    "shannon-fmra",
                    "band-limited scaling function whose translates span a frame but not a Riesz basis",
                    &all_pass(),
                ),
            )
        }
        "quincunx-haar" => {
            let a = validate_dilation(&[vec![1, 1], vec![1, -1]])?;
            let low = TrigPolynomial::from_terms(2, vec![(vec![0, 0], 0.5.into()), (vec![1, 0], 0.5.into())])?;
            let high = TrigPolynomial::from_terms(2, vec![(vec![0, 0], 0.5.into()), (vec![1, 0], (-0.5).into())])?;
            let bank = FilterBank::new(a, low.into(), vec![high.into()])?;
            BankFile::from_bank(
                &bank,
                None,
                meta("quincunx-haar", "two-tap mask under the quincunx dilation", &all_pass()),
            )
        }
        "haar-oep" => {
            let grid = Grid::new(1, 1024)?;
            let weight = real(&[(-1, 1.0 / 6.0), (0, 2.0 / 3.0), (1, 1.0 / 6.0)]);
            let bank = oep_complete(&real(&[(0, 0.5), (1, 0.5)]), &weight, &dyadic, &grid, 1e-12)?;
            BankFile::from_bank(
                &bank,
                Some(ClosedForm::haar()),
                meta(
                    "haar-oep",
                    "Haar mask with an oblique weight; highpass filters from completing the reduced mask",
                    &[("verify-oep", Expected::Pass), ("verify-uep", Expected::Fail)],
                ),
            )
        }
        other => {
            return Err(CliError::Parse(format!(
                "unknown bundled example '{other}' (known: {})",
                NAMES.join(", ")
            )))
        }
    };
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_bank_loads() {
        for name in NAMES {
            let file = bundled(name).unwrap();
            let loaded = file.load().unwrap();
            assert!(!loaded.metadata.expected.is_empty());
            assert_eq!(loaded.bank.dim(), file.dimension);
        }
    }

    #[test]
    fn quincunx_records_half_shift() {
        let file = bundled("quincunx-haar").unwrap();
        assert_eq!(
            file.gamma_dual.unwrap(),
            vec![vec!["0".to_string(), "0".to_string()], vec!["1/2".to_string(), "1/2".to_string()]]
        );
    }
}
