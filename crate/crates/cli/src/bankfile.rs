//! Human-editable filter-bank files (JSON).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tightframe::filters::SampledFilter;
use tightframe::{coset_reps, Complex64, validate_dilation, ClosedForm, Filter, FilterBank, Grid, Rational64, TrigPolynomial};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Sampled filters on grids up to this size are converted back to
/// coefficient lists when the conversion is exact.
const COMPRESS_LIMIT: usize = 1 << 14;
const COMPRESS_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficient {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default = "one")]
    pub height: f64,
}

fn one() -> f64 {
    1.0
}

/// Values on the grid `a/M`, last coordinate fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub resolution: usize,
    pub values: Vec<[f64; 2]>,
}

/// One filter: exactly one of the three bodies must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Coefficient>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic_box: Option<BoxSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedWeight {
    /// `S ≡ 1`.
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub named: Option<NamedWeight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Coefficient>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    /// Expected verdict per subcommand.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expected: BTreeMap<String, Expected>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankFile {
    pub schema_version: u32,
    pub dimension: usize,
    /// Row-major integer entries of the dilation matrix.
    pub dilation: Vec<i64>,
    /// Lowpass first, then the highpass filters.
    pub filters: Vec<FilterEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    /// Closed form for the scaling function, overriding the product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ClosedForm>,
    /// Coset representatives of `Z^n / A* Z^n` as exact fractions such as
    /// `"1/2"`; checked against the dilation on load when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_dual: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub metadata: Metadata,
}

/// A bank ready for the library.
#[derive(Debug, Clone)]
pub struct LoadedBank {
    pub bank: FilterBank,
    pub scaling: Option<ClosedForm>,
    pub labels: Vec<String>,
    pub metadata: Metadata,
}

fn poly_from(n: usize, coeffs: &[Coefficient]) -> Result<TrigPolynomial, CliError> {
    TrigPolynomial::from_terms(n, coeffs.iter().map(|c| (c.k.clone(), Complex64::new(c.re, c.im))))
        .map_err(|e| CliError::Parse(e.to_string()))
}

fn coeffs_from(p: &TrigPolynomial) -> Vec<Coefficient> {
    p.coeffs()
        .iter()
        .map(|(k, c)| Coefficient {
            k: k.clone(),
            re: c.re,
            im: c.im,
        })
        .collect()
}

fn sampled_from(n: usize, spec: &SampleSpec) -> Result<Filter, CliError> {
    let grid = Grid::new(n, spec.resolution).map_err(|e| CliError::Parse(e.to_string()))?;
    let values = spec.values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    SampledFilter::new(grid, values)
        .map(Filter::Sampled)
        .map_err(|e| CliError::Parse(e.to_string()))
}

fn samples_of(s: &SampledFilter) -> SampleSpec {
    SampleSpec {
        resolution: s.grid.m,
        values: s.values.iter().map(|v| [v.re, v.im]).collect(),
    }
}

pub fn format_rational(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(text: &str) -> Option<Rational64> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational64::new(p, q))
        }
        None => text.parse().ok().map(Rational64::from_integer),
    }
}

impl FilterEntry {
    fn to_filter(&self, n: usize) -> Result<Filter, CliError> {
        let bodies = [
            self.coefficients.is_some(),
            self.periodic_box.is_some(),
            self.samples.is_some(),
        ];
        if bodies.iter().filter(|b| **b).count() != 1 {
            return Err(CliError::Parse(format!(
                "filter '{}' needs exactly one of coefficients, periodic_box, samples",
                self.label
            )));
        }
        if let Some(c) = &self.coefficients {
            return Ok(poly_from(n, c)?.into());
        }
        if let Some(b) = &self.periodic_box {
            if b.lo.len() != n || b.hi.len() != n {
                return Err(CliError::Parse(format!("filter '{}': box dimension differs from {n}", self.label)));
            }
            return Ok(Filter::PeriodicBox {
                lo: b.lo.clone(),
                hi: b.hi.clone(),
                height: b.height,
            });
        }
        sampled_from(n, self.samples.as_ref().expect("checked above"))
    }

    pub fn from_filter(label: impl Into<String>, filter: &Filter) -> Self {
        let mut entry = FilterEntry {
            label: label.into(),
            coefficients: None,
            periodic_box: None,
            samples: None,
        };
        match filter {
            Filter::Trig(p) => entry.coefficients = Some(coeffs_from(p)),
            Filter::PeriodicBox { lo, hi, height } => {
                entry.periodic_box = Some(BoxSpec {
                    lo: lo.clone(),
                    hi: hi.clone(),
                    height: *height,
                })
            }
            Filter::Sampled(s) => match compress(s) {
                Some(p) => entry.coefficients = Some(coeffs_from(&p)),
                None => entry.samples = Some(samples_of(s)),
            },
        }
        entry
    }
}

/// Coefficients of the trigonometric interpolant of a sampled filter, kept
/// only when it is sparse and reproduces every sample.
pub fn compress(s: &SampledFilter) -> Option<TrigPolynomial> {
    let grid = s.grid;
    if grid.len() > COMPRESS_LIMIT {
        return None;
    }
    let m = grid.m as i64;
    let roots: Vec<Complex64> = (0..m)
        .map(|r| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / m as f64))
        .collect();
    let points: Vec<Vec<i64>> = (0..grid.len()).map(|i| grid.multi_index(i)).collect();
    let mut terms = Vec::new();
    for kidx in 0..grid.len() {
        // symmetric frequency range (-M/2, M/2]
        let k: Vec<i64> = grid
            .multi_index(kidx)
            .into_iter()
            .map(|v| if v > m / 2 { v - m } else { v })
            .collect();
        let mut c = Complex64::new(0.0, 0.0);
        for (a, v) in points.iter().zip(&s.values) {
            let phase: i64 = k.iter().zip(a).map(|(x, y)| x * y).sum::<i64>().rem_euclid(m);
            c += v * roots[phase as usize];
        }
        c /= grid.len() as f64;
        if c.norm() > COMPRESS_TOL {
            terms.push((k, c));
        }
        if terms.len() > grid.len() / 8 {
            return None;
        }
    }
    let poly = TrigPolynomial::from_terms(grid.n, terms).ok()?;
    let exact = (0..grid.len()).all(|i| (poly.at_grid(&grid, i) - s.values[i]).norm() < 1e-12);
    exact.then_some(poly)
}

impl BankFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(&self) -> Result<LoadedBank, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let n = self.dimension;
        if n == 0 || self.dilation.len() != n * n {
            return Err(CliError::Parse(format!(
                "dilation has {} entries, expected {} for dimension {n}",
                self.dilation.len(),
                n * n
            )));
        }
        let rows: Vec<Vec<i64>> = self.dilation.chunks(n).map(<[i64]>::to_vec).collect();
        let dilation = validate_dilation(&rows)?;
        if let Some(listed) = &self.gamma_dual {
            let computed = coset_reps(&dilation).gamma_dual;
            let parsed: Option<Vec<Vec<Rational64>>> = listed
                .iter()
                .map(|p| p.iter().map(|s| parse_rational(s)).collect())
                .collect();
            let parsed = parsed.ok_or_else(|| CliError::Parse("gamma_dual entries must be fractions".into()))?;
            if parsed != computed {
                return Err(CliError::Precondition(format!(
                    "gamma_dual in file does not match the dilation (computed {:?})",
                    format_gamma(&computed)
                )));
            }
        }
        let (first, rest) = self
            .filters
            .split_first()
            .ok_or_else(|| CliError::Parse("bank has no filters".into()))?;
        let lowpass = first.to_filter(n)?;
        let highpass = rest.iter().map(|f| f.to_filter(n)).collect::<Result<Vec<_>, _>>()?;
        let mut bank = FilterBank::new(dilation, lowpass, highpass)?;
        if let Some(w) = &self.weight {
            bank = bank.with_weight(weight_filter(n, w)?)?;
        }
        Ok(LoadedBank {
            bank,
            scaling: self.scaling.clone(),
            labels: self.filters.iter().map(|f| f.label.clone()).collect(),
            metadata: self.metadata.clone(),
        })
    }

    pub fn from_bank(bank: &FilterBank, scaling: Option<ClosedForm>, metadata: Metadata) -> Self {
        let n = bank.dim();
        let dilation = bank.dilation.rows().into_iter().flatten().collect();
        let mut filters = vec![FilterEntry::from_filter("H0", &bank.lowpass)];
        for (l, h) in bank.highpass.iter().enumerate() {
            filters.push(FilterEntry::from_filter(format!("H{}", l + 1), h));
        }
        let weight = bank.weight.as_ref().map(|w| {
            let entry = FilterEntry::from_filter("S", w);
            WeightSpec {
                named: None,
                coefficients: entry.coefficients,
                samples: entry.samples,
            }
        });
        BankFile {
            schema_version: SCHEMA_VERSION,
            dimension: n,
            dilation,
            filters,
            weight,
            scaling,
            gamma_dual: Some(format_gamma(&coset_reps(&bank.dilation).gamma_dual)),
            metadata,
        }
    }
}

fn weight_filter(n: usize, w: &WeightSpec) -> Result<Filter, CliError> {
    let count = [w.named.is_some(), w.coefficients.is_some(), w.samples.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if count != 1 {
        return Err(CliError::Parse("weight needs exactly one of named, coefficients, samples".into()));
    }
    if let Some(NamedWeight::Unit) = w.named {
        return Ok(TrigPolynomial::constant(n, Complex64::new(1.0, 0.0)).into());
    }
    if let Some(c) = &w.coefficients {
        return Ok(poly_from(n, c)?.into());
    }
    sampled_from(n, w.samples.as_ref().expect("checked above"))
}

pub fn format_gamma(gamma: &[Vec<Rational64>]) -> Vec<Vec<String>> {
    gamma.iter().map(|p| p.iter().map(format_rational).collect()).collect()
}
