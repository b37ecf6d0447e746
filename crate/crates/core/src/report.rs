//! Residual statistics and verdicts shared by every checker.

use serde::{Deserialize, Serialize};

use crate::approx_continuity::DensityCurve;
use crate::filters::Grid;

/// Number of worst points kept in a report.
pub const WORST_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    pub t: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub condition: String,
    pub grid: Option<Grid>,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub worst_points: Vec<WorstPoint>,
    pub masked_fraction: f64,
    pub evaluated_points: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sub_reports: Vec<VerificationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<DensityCurve>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Report built from a single residual value.
    pub fn scalar(condition: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let mut acc = ResidualAccumulator::new();
        acc.push(&[], residual);
        acc.finish(condition, None, 0.0, tolerance)
    }

    /// Report combining sub-reports; passes iff all of them pass.
    ///
    /// When all sub-reports share a tolerance the maxima are reported as-is.
    /// Otherwise each maximum is divided by its own tolerance and the
    /// composite tolerance is one.
    pub fn composite(condition: impl Into<String>, subs: Vec<VerificationReport>) -> Self {
        let same_tol = subs.windows(2).all(|w| w[0].tolerance == w[1].tolerance);
        let (max, mean, tolerance) = if subs.is_empty() {
            (0.0, 0.0, 1.0)
        } else if same_tol {
            let tol = subs[0].tolerance;
            let max = subs.iter().map(|r| r.max_residual).fold(0.0, f64::max);
            let total: usize = subs.iter().map(|r| r.evaluated_points).sum();
            let mean = if total == 0 {
                0.0
            } else {
                subs.iter()
                    .map(|r| r.mean_residual * r.evaluated_points as f64)
                    .sum::<f64>()
                    / total as f64
            };
            (max, mean.min(max), tol)
        } else {
            let ratios: Vec<(f64, f64)> = subs
                .iter()
                .map(|r| {
                    let tol = if r.tolerance > 0.0 { r.tolerance } else { 1.0 };
                    (r.max_residual / tol, r.mean_residual / tol)
                })
                .collect();
            let max = ratios.iter().map(|r| r.0).fold(0.0, f64::max);
            let mean = ratios.iter().map(|r| r.1).sum::<f64>() / ratios.len() as f64;
            (max, mean.min(max), 1.0)
        };
        let all_pass = subs.iter().all(VerificationReport::passed);
        let mut worst: Vec<WorstPoint> = subs.iter().flat_map(|r| r.worst_points.clone()).collect();
        worst.sort_by(|a, b| b.residual.total_cmp(&a.residual));
        worst.truncate(WORST_POINTS);
        let mut notes = Vec::new();
        if !same_tol {
            notes.push(
                "sub-reports use different tolerances; residuals shown relative to each tolerance"
                    .to_string(),
            );
        }
        VerificationReport {
            condition: condition.into(),
            grid: subs.iter().find_map(|r| r.grid),
            max_residual: max,
            mean_residual: mean,
            worst_points: worst,
            masked_fraction: subs.iter().map(|r| r.masked_fraction).fold(0.0, f64::max),
            evaluated_points: subs.iter().map(|r| r.evaluated_points).sum(),
            tolerance,
            verdict: if all_pass { Verdict::Pass } else { Verdict::Fail },
            notes,
            sub_reports: subs,
            curves: Vec::new(),
        }
    }

    /// Finds a sub-report by condition name, searching recursively.
    pub fn find(&self, condition: &str) -> Option<&VerificationReport> {
        if self.condition == condition {
            return Some(self);
        }
        self.sub_reports.iter().find_map(|r| r.find(condition))
    }
}

/// Running max/mean with a bounded list of worst points.
#[derive(Debug, Clone, Default)]
pub struct ResidualAccumulator {
    max: f64,
    sum: f64,
    count: usize,
    worst: Vec<WorstPoint>,
}

impl ResidualAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: &[f64], residual: f64) {
        // NaN must never pass silently
        let r = if residual.is_nan() { f64::INFINITY } else { residual.abs() };
        self.max = self.max.max(r);
        self.sum += r;
        self.count += 1;
        if self.worst.len() < WORST_POINTS || r > self.worst.last().map_or(0.0, |w| w.residual) {
            self.worst.push(WorstPoint {
                t: t.to_vec(),
                residual: r,
            });
            self.worst.sort_by(|a, b| b.residual.total_cmp(&a.residual));
            self.worst.truncate(WORST_POINTS);
        }
    }

    pub fn merge(mut self, other: ResidualAccumulator) -> Self {
        self.max = self.max.max(other.max);
        self.sum += other.sum;
        self.count += other.count;
        self.worst.extend(other.worst);
        self.worst.sort_by(|a, b| b.residual.total_cmp(&a.residual));
        self.worst.truncate(WORST_POINTS);
        self
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn finish(
        self,
        condition: impl Into<String>,
        grid: Option<Grid>,
        masked_fraction: f64,
        tolerance: f64,
    ) -> VerificationReport {
        let mean = if self.count == 0 {
            0.0
        } else {
            (self.sum / self.count as f64).min(self.max)
        };
        VerificationReport {
            condition: condition.into(),
            grid,
            max_residual: self.max,
            mean_residual: mean,
            worst_points: self.worst,
            masked_fraction,
            evaluated_points: self.count,
            tolerance,
            verdict: if self.max <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            notes: Vec::new(),
            sub_reports: Vec::new(),
            curves: Vec::new(),
        }
    }
}
