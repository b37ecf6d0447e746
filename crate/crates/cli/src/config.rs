//! Run configuration: file values first, then command-line overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tightframe::filters::{default_bracket_radius, Grid, DEFAULT_TAU_ZERO};
use tightframe::frame_analysis::Quadrature;
use tightframe::refinable::{ProbeSpec, DEFAULT_DEPTH};
use tightframe::{CosetReps, DilationMatrix, Filter, FilterBank};

use crate::CliError;

/// Probe bracket radius in two or more dimensions: near the origin the
/// terms with `k ≠ 0` are already negligible, and the full radius costs
/// `(2K+1)^n` evaluations per sample.
const PROBE_BRACKET_RADIUS_MULTI: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Grid points per axis; defaults by dimension and is raised to the
    /// next coset-compatible value.
    pub grid: Option<usize>,
    pub tol_uep: f64,
    pub tol_oep: f64,
    pub tol_calderon: f64,
    pub tol_energy: f64,
    pub tau_zero: f64,
    /// Depth of the truncated infinite product; by default 30 dyadic
    /// octaves' worth of contraction.
    pub depth: Option<usize>,
    pub bracket_radius: Option<usize>,
    pub theta_terms: usize,
    /// Inclusive scale range `[j_min, j_max]`.
    pub range: Option<(i32, i32)>,
    pub two_scale_level: i32,
    pub signals: u64,
    pub signal_radius: Option<f64>,
    pub seed: u64,
    /// Calderón sample points (total).
    pub sample_points: usize,
    pub probe: ProbeSpec,
    /// Levels for the counterexample table.
    pub counterexample_j: (u32, u32),
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: None,
            tol_uep: 1e-12,
            tol_oep: 1e-10,
            tol_calderon: 1e-4,
            tol_energy: 1e-8,
            tau_zero: DEFAULT_TAU_ZERO,
            depth: None,
            bracket_radius: None,
            theta_terms: 40,
            range: None,
            two_scale_level: 3,
            signals: 3,
            signal_radius: None,
            seed: 0x5eed,
            sample_points: 256,
            probe: ProbeSpec {
                samples: 20_000,
                ..ProbeSpec::default()
            },
            counterexample_j: (1, 6),
        }
    }
}

/// Command-line values that override the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub range: Option<(i32, i32)>,
}

/// `a..b`, inclusive at both ends.
pub fn parse_range(text: &str) -> Result<(i32, i32), String> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| format!("expected a range like -8..8, got '{text}'"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: i32 = a.trim().parse().map_err(|_| format!("bad range start in '{text}'"))?;
    let b: i32 = b.trim().parse().map_err(|_| format!("bad range end in '{text}'"))?;
    if a > b {
        return Err(format!("empty range '{text}'"));
    }
    Ok((a, b))
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(m) = o.grid {
            self.grid = Some(m);
        }
        if let Some(t) = o.tol {
            self.tol_uep = t;
            self.tol_oep = t;
            self.tol_calderon = t;
            self.tol_energy = t;
        }
        if let Some(s) = o.seed {
            self.seed = s;
            self.probe.seed = s;
        }
        if let Some(d) = o.depth {
            self.depth = Some(d);
        }
        if let Some(r) = o.range {
            self.range = Some(r);
            if r.0 >= 0 {
                self.counterexample_j = (r.0 as u32, r.1 as u32);
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let tolerances = [
            ("tol_uep", self.tol_uep),
            ("tol_oep", self.tol_oep),
            ("tol_calderon", self.tol_calderon),
            ("tol_energy", self.tol_energy),
            ("tau_zero", self.tau_zero),
        ];
        for (name, v) in tolerances {
            if !(v > 0.0) {
                return Err(CliError::Precondition(format!("{name} must be positive, got {v}")));
            }
        }
        if self.depth == Some(0) {
            return Err(CliError::Precondition("depth must be at least 1".into()));
        }
        if self.signals == 0 || self.sample_points == 0 {
            return Err(CliError::Precondition("signals and sample_points must be positive".into()));
        }
        if let Some((a, b)) = self.range {
            if a > b {
                return Err(CliError::Precondition(format!("empty range [{a}, {b}]")));
            }
        }
        if self.counterexample_j.0 > self.counterexample_j.1 {
            return Err(CliError::Precondition("empty counterexample range".into()));
        }
        self.probe.validate()?;
        Ok(())
    }

    /// Resolves the grid for a bank: sampled filters pin the resolution,
    /// otherwise the requested or default size is raised until every coset
    /// representative lies on the grid.
    pub fn resolve_grid(&mut self, bank: &FilterBank, reps: &CosetReps) -> Result<Grid, CliError> {
        let n = bank.dim();
        let sampled = std::iter::once(&bank.lowpass)
            .chain(&bank.highpass)
            .chain(bank.weight.as_ref())
            .find_map(|f| match f {
                Filter::Sampled(s) => Some(s.grid.m),
                _ => None,
            });
        let requested = self.grid.or(sampled).unwrap_or(match n {
            1 => 4096,
            2 => 64,
            _ => 16,
        });
        let m = Grid::compatible_resolution(requested, reps.common_denominator());
        if m != requested {
            log::warn!("grid {requested} is not coset-compatible; using {m}");
        }
        self.grid = Some(m);
        Ok(Grid::new(n, m)?)
    }

    /// Fills in the depth and, when left at their defaults, rescales the
    /// probe levels so one unit of `j` contracts by about a factor of two
    /// for any dilation.
    pub fn resolve_scales(&mut self, dilation: &DilationMatrix) {
        if dilation.dim() > 1 && self.probe.bracket_radius == ProbeSpec::default().bracket_radius {
            self.probe.bracket_radius = PROBE_BRACKET_RADIUS_MULTI;
        }
        let rho = dilation.eigen_moduli().iter().copied().fold(f64::INFINITY, f64::min);
        let per_octave = (std::f64::consts::LN_2 / rho.ln()).max(1.0);
        if self.depth.is_none() {
            self.depth = Some((DEFAULT_DEPTH as f64 * per_octave - 1e-9).ceil() as usize);
        }
        if self.probe.j_values == ProbeSpec::default().j_values && per_octave > 1.0 {
            self.probe.j_values = self
                .probe
                .j_values
                .iter()
                .map(|j| (*j as f64 * per_octave).round() as i32)
                .collect();
        }
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(DEFAULT_DEPTH)
    }

    pub fn bracket_radius(&self, n: usize) -> usize {
        self.bracket_radius.unwrap_or_else(|| default_bracket_radius(n))
    }

    pub fn signal_radius(&self, n: usize) -> f64 {
        self.signal_radius.unwrap_or(if n == 1 { 16.0 } else { 8.0 })
    }

    pub fn quadrature(&self, n: usize) -> Quadrature {
        Quadrature {
            min_points: if n == 1 { 256 } else { 32 },
            ..Quadrature::default()
        }
    }
}
