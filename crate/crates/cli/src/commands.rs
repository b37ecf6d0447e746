//! Subcommand implementations. Each writes `<name>.report.json` and its CSV
//! files into the output directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;
use tightframe::approx_continuity::{
    approx_continuity_probe, counterexample_density_exact, counterexample_q, density_ratio_monte_carlo,
    han_counterexample, CounterexampleLevelSet,
};
use tightframe::extension::{build_framelets, check_oep, check_uep, uep_complete};
use tightframe::filters::zero_set_mask;
use tightframe::frame_analysis::{calderon_check, translate_frame_bounds, two_scale_energy, ScaleRange, TestSignal};
use tightframe::refinable::fmra_check;
use tightframe::report::Verdict;
use tightframe::{
    validate_dilation, BracketFunction, DensityCurve, Grid, PhiHat, Profile, VerificationReport, ZeroSetMask,
};

use crate::bankfile::{BankFile, Expected, LoadedBank, Metadata};
use crate::bundled::{bundled, NAMES};
use crate::config::RunConfig;
use crate::{CliError, EXIT_FAIL, EXIT_PASS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    VerifyUep,
    VerifyOep,
    BuildFramelet,
    Complete,
    FrameBounds,
    Calderon,
    TwoScale,
    DensityProbe,
    Counterexample,
}

impl SubcommandKind {
    pub const ALL: [SubcommandKind; 9] = [
        SubcommandKind::VerifyUep,
        SubcommandKind::VerifyOep,
        SubcommandKind::BuildFramelet,
        SubcommandKind::Complete,
        SubcommandKind::FrameBounds,
        SubcommandKind::Calderon,
        SubcommandKind::TwoScale,
        SubcommandKind::DensityProbe,
        SubcommandKind::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SubcommandKind::VerifyUep => "verify-uep",
            SubcommandKind::VerifyOep => "verify-oep",
            SubcommandKind::BuildFramelet => "build-framelet",
            SubcommandKind::Complete => "complete",
            SubcommandKind::FrameBounds => "frame-bounds",
            SubcommandKind::Calderon => "calderon",
            SubcommandKind::TwoScale => "two-scale",
            SubcommandKind::DensityProbe => "density-probe",
            SubcommandKind::Counterexample => "counterexample",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub kind: SubcommandKind,
    pub report: VerificationReport,
    pub report_path: PathBuf,
    pub csv_paths: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Serialize)]
struct RunRecord<'a> {
    subcommand: &'a str,
    bank: Option<String>,
    config: &'a RunConfig,
    verdict: Verdict,
    report: &'a VerificationReport,
    details: serde_json::Value,
}

struct Context {
    loaded: LoadedBank,
    grid: Grid,
    phi: Arc<dyn Profile>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn coord_header(n: usize, prefix: &str) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn nums(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

fn context(bank_path: &Path, config: &mut RunConfig) -> Result<Context, CliError> {
    let loaded = BankFile::read(bank_path)?.load()?;
    let reps = loaded.bank.reps();
    let grid = config.resolve_grid(&loaded.bank, &reps)?;
    config.resolve_scales(&loaded.bank.dilation);
    let mut phi = PhiHat::new(loaded.bank.dilation.clone(), loaded.bank.lowpass.clone(), config.depth())?;
    if let Some(form) = &loaded.scaling {
        phi = phi.with_closed_form(form.clone());
    }
    Ok(Context {
        loaded,
        grid,
        phi: Arc::new(phi),
    })
}

fn mask(ctx: &Context, config: &RunConfig) -> Result<ZeroSetMask, CliError> {
    let bracket = BracketFunction::new(ctx.phi.clone(), config.bracket_radius(ctx.grid.n))?;
    Ok(zero_set_mask(&bracket, &ctx.grid, config.tau_zero)?)
}

fn worst_rows(report: &VerificationReport, rows: &mut Vec<Vec<String>>) {
    for w in report.worst_points.iter().filter(|w| !w.t.is_empty()) {
        let mut row = vec![report.condition.clone(), w.residual.to_string()];
        row.extend(nums(&w.t));
        rows.push(row);
    }
    for s in &report.sub_reports {
        worst_rows(s, rows);
    }
}

fn curve_rows(curve: &DensityCurve) -> Vec<Vec<String>> {
    curve
        .j_values
        .iter()
        .zip(&curve.ratios)
        .zip(&curve.stderr)
        .map(|((j, r), s)| vec![j.to_string(), r.to_string(), s.to_string()])
        .collect()
}

fn density_header() -> Vec<String> {
    ["j", "ratio", "stderr"].map(String::from).to_vec()
}

fn print_summary(name: &str, report: &VerificationReport) {
    println!(
        "{name}: {} ({} max residual {:.3e}, tolerance {:.1e})",
        if report.passed() { "PASS" } else { "FAIL" },
        report.condition,
        report.max_residual,
        report.tolerance
    );
    if !report.passed() {
        print_failures(report, 1);
    }
}

fn print_failures(report: &VerificationReport, depth: usize) {
    let pad = "  ".repeat(depth);
    if report.sub_reports.is_empty() {
        for w in report.worst_points.iter().filter(|w| !w.t.is_empty()) {
            println!("{pad}{} worst t = {:?} residual {:.3e}", report.condition, w.t, w.residual);
        }
        for note in &report.notes {
            println!("{pad}{}: {note}", report.condition);
        }
    }
    for s in report.sub_reports.iter().filter(|s| !s.passed()) {
        println!("{pad}{} FAIL: max residual {:.3e}", s.condition, s.max_residual);
        print_failures(s, depth + 1);
    }
}

/// Runs one subcommand and writes its artifacts.
pub fn execute(
    kind: SubcommandKind,
    bank_path: Option<&Path>,
    config: &RunConfig,
    out: &Path,
) -> Result<Outcome, CliError> {
    config.validate()?;
    let mut config = config.clone();
    let name = kind.name();
    let mut csv_paths = Vec::new();
    let mut csv = |suffix: &str, header: Vec<String>, rows: Vec<Vec<String>>| -> Result<(), CliError> {
        let path = out.join(format!("{name}.{suffix}.csv"));
        write_csv(&path, &header, &rows)?;
        csv_paths.push(path);
        Ok(())
    };

    let (report, details) = if kind == SubcommandKind::Counterexample {
        counterexample(&config, &mut csv)?
    } else {
        let bank_path = bank_path.ok_or_else(|| CliError::Parse(format!("{name} needs a bank file")))?;
        let ctx = context(bank_path, &mut config)?;
        let n = ctx.grid.n;
        match kind {
            SubcommandKind::VerifyUep => {
                if ctx.loaded.bank.highpass.is_empty() {
                    return Err(CliError::Precondition("bank has no highpass filters".into()));
                }
                let m = mask(&ctx, &config)?;
                let report = check_uep(&ctx.loaded.bank, &m, &ctx.grid, config.tol_uep)?;
                let mut rows = Vec::new();
                worst_rows(&report, &mut rows);
                let mut header = vec!["condition".to_string(), "residual".to_string()];
                header.extend(coord_header(n, "t"));
                csv("worst", header, rows)?;
                (report, json!({ "masked_fraction": m.masked_fraction() }))
            }
            SubcommandKind::VerifyOep => {
                let m = mask(&ctx, &config)?;
                let report = check_oep(&ctx.loaded.bank, ctx.phi.clone(), &m, &ctx.grid, config.tol_oep, &config.probe)?;
                if let Some(curve) = report.find("SOEP-origin").and_then(|r| r.curves.first()) {
                    csv("density", density_header(), curve_rows(curve))?;
                }
                let mut rows = Vec::new();
                worst_rows(&report, &mut rows);
                let mut header = vec!["condition".to_string(), "residual".to_string()];
                header.extend(coord_header(n, "t"));
                csv("worst", header, rows)?;
                (report, json!({ "masked_fraction": m.masked_fraction() }))
            }
            SubcommandKind::BuildFramelet => {
                let psis = build_framelets(&ctx.loaded.bank, ctx.phi.clone())?;
                let mut rows = Vec::new();
                for i in 0..=1024 {
                    let mut s = vec![0.0; n];
                    s[0] = -8.0 + i as f64 / 64.0;
                    let mut row = nums(&s);
                    row.push(ctx.phi.eval(&s).norm().to_string());
                    row.extend(psis.iter().map(|p| p.eval(&s).norm().to_string()));
                    rows.push(row);
                }
                let mut header = coord_header(n, "s");
                header.push("abs_phi".into());
                header.extend((1..=psis.len()).map(|l| format!("abs_psi{l}")));
                csv("profile", header, rows)?;
                let report = fmra_check(ctx.phi.clone(), &ctx.loaded.bank.dilation, &config.probe)?;
                for sub in &report.sub_reports {
                    if let Some(curve) = sub.curves.first() {
                        csv(&sub.condition.to_lowercase(), density_header(), curve_rows(curve))?;
                    }
                }
                (report, json!({ "framelets": psis.len() }))
            }
            SubcommandKind::Complete => {
                let bank = &ctx.loaded.bank;
                let done = uep_complete(&bank.lowpass, &bank.dilation, &ctx.grid, config.tol_uep)?;
                let ortho = VerificationReport::scalar("ORTHONORMALITY", done.orthonormality_residual, config.tol_uep);
                let orbits = done.orbits;
                let completed = done.into_bank(bank.dilation.clone(), bank.lowpass.clone())?;
                let uep = check_uep(&completed, &ZeroSetMask::empty(ctx.grid), &ctx.grid, config.tol_uep)?;
                let metadata = Metadata {
                    name: ctx.loaded.metadata.name.as_ref().map(|s| format!("{s}-completed")),
                    provenance: Some(format!("unitary completion of {} on a {}-point grid", bank_path.display(), ctx.grid.m)),
                    expected: [("verify-uep".to_string(), Expected::Pass)].into(),
                };
                let file = BankFile::from_bank(&completed, ctx.loaded.scaling.clone(), metadata);
                let path = out.join("complete.bank.json");
                file.write(&path)?;
                (
                    VerificationReport::composite("COMPLETE", vec![ortho, uep]),
                    json!({ "orbits": orbits, "bank": path.display().to_string() }),
                )
            }
            SubcommandKind::FrameBounds => {
                let m = mask(&ctx, &config)?;
                let bounds = translate_frame_bounds(&m)?;
                let rows = (0..ctx.grid.len())
                    .map(|i| {
                        let mut row = nums(&ctx.grid.point(i));
                        row.push(m.bracket_values[i].to_string());
                        row.push(m.is_masked(i).to_string());
                        row
                    })
                    .collect();
                let mut header = coord_header(n, "t");
                header.push("bracket".into());
                header.push("masked".into());
                csv("bracket", header, rows)?;
                let ratio = if bounds.upper > 0.0 { bounds.lower / bounds.upper } else { 0.0 };
                let report = VerificationReport::scalar("FRAME-BOUNDS", 1.0 - ratio, 1.0 - config.tau_zero).with_note(
                    format!(
                        "lower {:.12}, upper {:.12}, masked fraction {:.6}; inner estimates from grid sampling",
                        bounds.lower, bounds.upper, bounds.masked_fraction
                    ),
                );
                (report, serde_json::to_value(bounds).unwrap_or_default())
            }
            SubcommandKind::Calderon => {
                let psis: Vec<Arc<dyn Profile>> = build_framelets(&ctx.loaded.bank, ctx.phi.clone())?
                    .into_iter()
                    .map(|p| Arc::new(p) as Arc<dyn Profile>)
                    .collect();
                let per_axis = (config.sample_points as f64).powf(1.0 / n as f64).round().max(1.0) as usize;
                let points: Vec<Vec<f64>> = (0..per_axis.pow(n as u32))
                    .map(|mut i| {
                        (0..n)
                            .map(|_| {
                                let c = i % per_axis;
                                i /= per_axis;
                                (c as f64 + 0.5) / per_axis as f64
                            })
                            .collect()
                    })
                    .collect();
                let (a, b) = config.range.unwrap_or((-25, 25));
                let out_c = calderon_check(
                    &psis,
                    &ctx.loaded.bank.dilation,
                    &points,
                    ScaleRange::new(a, b)?,
                    None,
                    config.tol_calderon,
                )?;
                let rows = out_c
                    .profile
                    .iter()
                    .map(|(t, s)| {
                        let mut row = nums(t);
                        row.push(s.to_string());
                        row
                    })
                    .collect();
                let mut header = coord_header(n, "t");
                header.push("sum".into());
                csv("profile", header, rows)?;
                (
                    out_c.report,
                    json!({ "q_list": out_c.q_list, "tail_indicator": out_c.tail_indicator, "range": [a, b] }),
                )
            }
            SubcommandKind::TwoScale => {
                let quad = config.quadrature(n);
                let j = config.two_scale_level;
                let mut subs = Vec::new();
                let mut rows = Vec::new();
                for s in 0..config.signals {
                    let seed = config.seed.wrapping_add(s);
                    let f = TestSignal::random(n, config.signal_radius(n), seed)?;
                    let r = two_scale_energy(&ctx.loaded.bank, ctx.phi.clone(), &f, j, &quad)?;
                    rows.push(vec![seed.to_string(), r.lhs.to_string(), r.rhs.to_string(), r.residual.to_string()]);
                    subs.push(VerificationReport::scalar(format!("TWO-SCALE seed {seed}"), r.residual, config.tol_energy));
                }
                csv("energies", ["seed", "lhs", "rhs", "residual"].map(String::from).to_vec(), rows)?;
                (VerificationReport::composite("TWO-SCALE", subs), json!({ "level": j }))
            }
            SubcommandKind::DensityProbe => {
                let adjoint = ctx.loaded.bank.dilation.adjoint();
                let origin = vec![0.0; n];
                let target = ctx.phi.eval(&origin);
                let curve =
                    approx_continuity_probe(ctx.phi.as_ref(), &adjoint, &origin, target, config.probe.delta, &config.probe)?;
                csv("density", density_header(), curve_rows(&curve))?;
                let mut report =
                    VerificationReport::scalar("DENSITY-ORIGIN", curve.trend_residual(1.0), config.probe.delta);
                report.curves.push(curve);
                (report, json!({ "target": [target.re, target.im] }))
            }
            SubcommandKind::Counterexample => unreachable!("handled above"),
        }
    };

    print_summary(name, &report);
    let record = RunRecord {
        subcommand: name,
        bank: bank_path.map(|p| p.display().to_string()),
        config: &config,
        verdict: report.verdict,
        report: &report,
        details,
    };
    let report_path = out.join(format!("{name}.report.json"));
    let text = serde_json::to_string_pretty(&record).map_err(|e| io_err(&report_path, e))?;
    std::fs::write(&report_path, text + "\n").map_err(|e| io_err(&report_path, e))?;
    Ok(Outcome {
        kind,
        report,
        report_path,
        csv_paths,
    })
}

type CsvSink<'a> = dyn FnMut(&str, Vec<String>, Vec<Vec<String>>) -> Result<(), CliError> + 'a;

fn counterexample(config: &RunConfig, csv: &mut CsvSink<'_>) -> Result<(VerificationReport, serde_json::Value), CliError> {
    let dyadic = validate_dilation(&[vec![2]])?;
    let set = CounterexampleLevelSet::f_set();
    let (j0, j1) = config.counterexample_j;
    let mut rows = Vec::new();
    let mut subs = Vec::new();
    for j in j0..=j1 {
        let q = counterexample_q(j);
        let rec = han_counterexample(j, None)?;
        let exact = counterexample_density_exact(j).to_f64().unwrap_or(f64::NAN);
        let mc = density_ratio_monte_carlo(&set, &dyadic, &[0.0], 1.0, j as i32, config.probe.samples, config.seed)?;
        let q_ok = q.is_integer() && q.to_integer() == 4.into();
        let sigma = (mc.ratio - exact).abs() / mc.stderr.max(1e-12);
        rows.push(vec![
            j.to_string(),
            q.to_string(),
            rec.pairing.to_string(),
            rec.one_pairing.to_string(),
            exact.to_string(),
            mc.ratio.to_string(),
            mc.stderr.to_string(),
        ]);
        subs.push(VerificationReport::scalar(format!("Q j={j}"), if q_ok { 0.0 } else { 1.0 }, 0.5));
        subs.push(
            VerificationReport::scalar(
                format!("PAIRING j={j}"),
                if rec.pairing > rec.one_pairing { 0.0 } else { 1.0 },
                0.5,
            )
                .with_note(format!("pairing {} vs <1,g> {}", rec.pairing, rec.one_pairing)),
        );
        subs.push(VerificationReport::scalar(format!("DENSITY j={j}"), sigma, 3.0));
    }
    csv(
        "table",
        ["j", "q_j", "pairing", "one_pairing", "density_exact", "density_mc", "density_stderr"]
            .map(String::from)
            .to_vec(),
        rows,
    )?;
    Ok((
        VerificationReport::composite("COUNTEREXAMPLE", subs),
        json!({ "levels": [j0, j1], "samples": config.probe.samples }),
    ))
}

/// Writes the bundled banks; with `selftest` runs each applicable
/// subcommand and compares the verdict with the recorded expectation.
pub fn examples(out: &Path, selftest: bool, config: &RunConfig) -> Result<i32, CliError> {
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for name in NAMES {
        let file = bundled(name)?;
        let path = out.join(format!("{name}.bank.json"));
        file.write(&path)?;
        println!("wrote {}", path.display());
        if !selftest {
            continue;
        }
        for (sub, expected) in &file.metadata.expected {
            let kind = SubcommandKind::from_name(sub)
                .ok_or_else(|| CliError::Parse(format!("{name}: unknown subcommand '{sub}' in metadata")))?;
            let dir = out.join(name);
            std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
            let code = match execute(kind, Some(&path), config, &dir) {
                Ok(o) => o.exit_code(),
                Err(e) => {
                    eprintln!("{name} {sub}: {e}");
                    e.exit_code()
                }
            };
            let want = if *expected == Expected::Pass { EXIT_PASS } else { EXIT_FAIL };
            mismatches += usize::from(code != want);
            rows.push(vec![
                name.to_string(),
                sub.clone(),
                format!("{expected:?}").to_lowercase(),
                code.to_string(),
                (code == want).to_string(),
            ]);
        }
    }
    if selftest {
        let dir = out.join("counterexample");
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let code = execute(SubcommandKind::Counterexample, None, config, &dir)?.exit_code();
        mismatches += usize::from(code != EXIT_PASS);
        rows.push(vec![
            "-".into(),
            "counterexample".into(),
            "pass".into(),
            code.to_string(),
            (code == EXIT_PASS).to_string(),
        ]);
        let path = out.join("selftest.csv");
        write_csv(
            &path,
            &["bank", "subcommand", "expected", "exit_code", "match"].map(String::from),
            &rows,
        )?;
        println!("selftest: {} of {} runs matched", rows.len() - mismatches, rows.len());
    }
    Ok(if mismatches == 0 { EXIT_PASS } else { EXIT_FAIL })
}
