//! Command-line surface for the gamma2 toolkit.
//!
//! Exit codes: 0 success, 1 check or constraint failure, 2 usage error.
//! All outputs are deterministic functions of (config, seed); CSV output
//! always has a header row and prints floats with 17 significant digits.

// Comparisons spelled `!(x > 0.0)` are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use gamma2::bounds::{
    format_float, minimize_upper_alpha3, minimize_upper_lambda3, BoundReport, ScalarMinResult,
};
use gamma2::families::{
    make_constant, make_quartic, sample_random_axisymmetric_stream,
    sample_random_symmetric_stream, scaled_quartic, FamilyDescriptor, PolyMode,
};
use gamma2::functionals::{FunctionalReport, Rule, SymmetricPositiveFunction};
use gamma2::heatflow::{
    check_dissipation, decompose, integrated_inequality, trace_flow, LegendreSpectrum,
};
use gamma2::quadrature::{SphereQuadrature, ZQuadrature};
use gamma2::verify::{run_suite, SuiteConfig};
use gamma2::Gamma2Error;

#[derive(Parser)]
#[command(
    name = "gamma2",
    about = "Gamma_2, log-Sobolev and Poincare functionals for symmetric functions on the sphere",
    version
)]
struct Cli {
    /// JSON config file; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Debug)]
enum MinimizeTarget {
    Lambda3,
    Alpha3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Family {
    Quartic,
    ScaledQuartic,
    Random,
    Constant,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bound table for one dimension.
    Bounds {
        #[arg(long)]
        d: Option<usize>,
    },
    /// Reproduce the quartic-family minima of the upper-bound expressions.
    Minimize {
        #[arg(value_enum)]
        target: MinimizeTarget,
    },
    /// Functional report for a single test function.
    Ratio {
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        quad_n: Option<usize>,
    },
    /// Functional reports over a logarithmic t-grid of the quartic family.
    Sweep {
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        t_steps: Option<usize>,
        #[arg(long)]
        quad_n: Option<usize>,
    },
    /// Spectral heat flow of quartic (or constant) initial data.
    Heatflow {
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        quad_n: Option<usize>,
    },
    /// Random search over symmetric test functions on S².
    Search {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        quad_n: Option<usize>,
    },
    /// Run the identity/inequality verification suite.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Negative-control hook: shifts tau in the combination check.
        #[arg(long)]
        perturb_tau: Option<f64>,
    },
}

/// File-config counterpart of the flags; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d: Option<usize>,
    t: Option<f64>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    t_steps: Option<usize>,
    t_final: Option<f64>,
    steps: Option<usize>,
    quad_n: Option<usize>,
    seed: Option<u64>,
    count: Option<usize>,
    amplitude: Option<f64>,
    family: Option<Family>,
    format: Option<Format>,
    out: Option<PathBuf>,
    perturb_tau: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[derive(Debug)]
enum CliError {
    Math(Gamma2Error),
    Io(std::io::Error),
    Config(String),
    CheckFailed(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Math(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::CheckFailed(m) => write!(f, "{m}"),
        }
    }
}

impl From<Gamma2Error> for CliError {
    fn from(e: Gamma2Error) -> Self {
        CliError::Math(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_cfg: FileConfig = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => FileConfig::default(),
    };
    let format = cli.format.or(file_cfg.format).unwrap_or(Format::Csv);
    let out = cli.out.clone().or_else(|| file_cfg.out.clone());

    let text = match cli.command {
        Command::Bounds { d } => {
            let d = d.or(file_cfg.d).unwrap_or(3);
            let report = BoundReport::for_dimension(d)?;
            match format {
                Format::Json => to_json(&report)?,
                Format::Csv => format!("{}\n{}\n", BoundReport::CSV_HEADER, report.csv_row()),
            }
        }
        Command::Minimize { target } => {
            let result = match target {
                MinimizeTarget::Lambda3 => minimize_upper_lambda3()?,
                MinimizeTarget::Alpha3 => minimize_upper_alpha3()?,
            };
            render_min_result(&result, format)?
        }
        Command::Ratio {
            family,
            t,
            seed,
            amplitude,
            quad_n,
        } => {
            let family = family.or(file_cfg.family).unwrap_or(Family::Quartic);
            let t = t.or(file_cfg.t).unwrap_or(1.0);
            let seed = seed.or(file_cfg.seed).unwrap_or(0);
            let amplitude = amplitude.or(file_cfg.amplitude).unwrap_or(0.5);
            let quad_n = quad_n.or(file_cfg.quad_n).unwrap_or(64);
            let (f, rule) = build_function(family, t, seed, amplitude, quad_n)?;
            let report = FunctionalReport::evaluate(&f, &rule)?;
            match format {
                Format::Json => to_json(&serde_json::json!({
                    "family": f.descriptor(),
                    "report": report,
                }))?,
                Format::Csv => {
                    let t_field = match family {
                        Family::Quartic | Family::ScaledQuartic => format_float(t),
                        _ => String::new(),
                    };
                    format!(
                        "{}\n{}\n",
                        report_csv_header(),
                        report_csv_row(&t_field, &report)
                    )
                }
            }
        }
        Command::Sweep {
            t_min,
            t_max,
            t_steps,
            quad_n,
        } => {
            let t_min = t_min.or(file_cfg.t_min).unwrap_or(0.05);
            let t_max = t_max.or(file_cfg.t_max).unwrap_or(100.0);
            let t_steps = t_steps.or(file_cfg.t_steps).unwrap_or(50);
            let quad_n = quad_n.or(file_cfg.quad_n).unwrap_or(64);
            if !(t_min > 0.0) || !(t_max > t_min) || t_steps < 2 {
                return Err(CliError::Config(format!(
                    "sweep needs 0 < t_min < t_max and t_steps >= 2 (got {t_min}, {t_max}, {t_steps})"
                )));
            }
            let rule = Rule::Axisym(ZQuadrature::gauss(quad_n, 3)?);
            let mut rows = Vec::with_capacity(t_steps);
            for i in 0..t_steps {
                let t = (t_min.ln()
                    + (t_max.ln() - t_min.ln()) * i as f64 / (t_steps - 1) as f64)
                    .exp();
                let f = make_quartic(t)?;
                let report = FunctionalReport::evaluate(&f, &rule)?;
                rows.push((t, report));
            }
            match format {
                Format::Json => to_json(
                    &rows
                        .iter()
                        .map(|(t, r)| serde_json::json!({"t": t, "report": r}))
                        .collect::<Vec<_>>(),
                )?,
                Format::Csv => {
                    let mut s = report_csv_header();
                    s.push('\n');
                    for (t, r) in &rows {
                        s.push_str(&report_csv_row(&format_float(*t), r));
                        s.push('\n');
                    }
                    s
                }
            }
        }
        Command::Heatflow {
            family,
            t,
            t_final,
            steps,
            quad_n,
        } => {
            let family = family.or(file_cfg.family).unwrap_or(Family::Quartic);
            let t = t.or(file_cfg.t).unwrap_or(0.69214);
            let t_final = t_final.or(file_cfg.t_final).unwrap_or(5.0);
            let steps = steps.or(file_cfg.steps).unwrap_or(20);
            let quad_n = quad_n.or(file_cfg.quad_n).unwrap_or(64);
            if steps < 1 || !(t_final > 0.0) {
                return Err(CliError::Config(format!(
                    "heatflow needs steps >= 1 and t_final > 0 (got {steps}, {t_final})"
                )));
            }
            let rule = ZQuadrature::gauss(quad_n, 3)?;
            let spectrum = match family {
                Family::Quartic => decompose(&{
                    let q = gamma2::families::QuarticFamily::new(t)?;
                    q.profile()
                }, 4, &rule)?,
                Family::Constant => LegendreSpectrum::from_even_coeffs(vec![1.0])?,
                other => {
                    return Err(CliError::Config(format!(
                        "heatflow initial data must be quartic or constant (got {other:?})"
                    )))
                }
            };
            let times: Vec<f64> = (0..=steps)
                .map(|i| t_final * i as f64 / steps as f64)
                .collect();
            let trace = trace_flow(&spectrum, &times, &rule)?;
            // Dissipation residuals at an interior probe time plus the
            // integrated slack for the certified lower bound 5.5.
            let dt = 1e-4;
            let probe = (t_final / 10.0).max(dt);
            let (residual_h, residual_i) = check_dissipation(&spectrum, probe, dt, &rule)?;
            let slack = integrated_inequality(&spectrum, t_final, 5.5, &rule)?;
            let footer = serde_json::json!({
                "probe_time": probe,
                "dt": dt,
                "residual_h": residual_h,
                "residual_i": residual_i,
                "lambda": 5.5,
                "integrated_slack": slack,
            });
            match format {
                Format::Json => to_json(&serde_json::json!({
                    "trace": trace,
                    "dissipation": footer,
                }))?,
                Format::Csv => format!("{}# {}\n", trace.to_csv(), footer),
            }
        }
        Command::Search {
            seed,
            count,
            amplitude,
            quad_n,
        } => {
            let seed = seed.or(file_cfg.seed).unwrap_or(0);
            let count = count.or(file_cfg.count).unwrap_or(1000);
            let amplitude = amplitude.or(file_cfg.amplitude).unwrap_or(2.0);
            let quad_n = quad_n.or(file_cfg.quad_n).unwrap_or(48);
            let summary = search(seed, count, amplitude, quad_n)?;
            match format {
                Format::Json => to_json(&summary)?,
                Format::Csv => summary.to_csv(),
            }
        }
        Command::Verify { seed, perturb_tau } => {
            let cfg = SuiteConfig {
                seed: seed.or(file_cfg.seed).unwrap_or(SuiteConfig::default().seed),
                tau_perturbation: perturb_tau.or(file_cfg.perturb_tau).unwrap_or(0.0),
            };
            let summary = run_suite(&cfg)?;
            let text = to_json(&summary)?;
            write_output(&out, &text)?;
            if !summary.all_pass() {
                return Err(CliError::CheckFailed(
                    "verification suite reported failures".into(),
                ));
            }
            return Ok(());
        }
    };
    write_output(&out, &text)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn render_min_result(result: &ScalarMinResult, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => to_json(result)?,
        Format::Csv => format!(
            "t_star,value,evaluations,bracket_lo,bracket_hi\n{},{},{},{},{}\n",
            format_float(result.t_star),
            format_float(result.value),
            result.evaluations,
            format_float(result.bracket.0),
            format_float(result.bracket.1),
        ),
    })
}

fn report_csv_header() -> String {
    "t,mass,fisher,entropy,gamma2_direct,gamma2_bochner,hsq,gamma2_ratio,log_sobolev_ratio,poincare_ratio_sqrtf".to_string()
}

fn report_csv_row(t_field: &str, r: &FunctionalReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        t_field,
        format_float(r.mass),
        format_float(r.fisher),
        format_float(r.entropy),
        format_float(r.gamma2_direct),
        format_float(r.gamma2_bochner),
        format_float(r.hsq),
        format_float(r.gamma2_ratio),
        format_float(r.log_sobolev_ratio),
        format_float(r.poincare_ratio_sqrtf),
    )
}

fn build_function(
    family: Family,
    t: f64,
    seed: u64,
    amplitude: f64,
    quad_n: usize,
) -> Result<(SymmetricPositiveFunction, Rule), CliError> {
    Ok(match family {
        Family::Quartic => (
            make_quartic(t)?,
            Rule::Axisym(ZQuadrature::gauss(quad_n, 3)?),
        ),
        Family::ScaledQuartic => (
            scaled_quartic(t)?,
            Rule::Axisym(ZQuadrature::gauss(quad_n, 3)?),
        ),
        Family::Constant => (
            make_constant(1.0)?,
            Rule::Axisym(ZQuadrature::gauss(quad_n, 3)?),
        ),
        Family::Random => {
            let rule = Rule::Sphere(SphereQuadrature::product(quad_n, 2 * quad_n)?);
            let f = sample_random_symmetric_stream(seed, 0, amplitude, PolyMode::LogDensity, &rule)?;
            (f, rule)
        }
    })
}

/// Summary of a random search over symmetric test functions.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SearchSummary {
    seed: u64,
    count: usize,
    evaluated: usize,
    skipped_positivity: usize,
    skipped_consistency: usize,
    min_gamma2_ratio: Option<f64>,
    max_gamma2_ratio: Option<f64>,
    mean_gamma2_ratio: Option<f64>,
    argmin: Option<FamilyDescriptor>,
}

impl SearchSummary {
    fn to_csv(&self) -> String {
        let opt = |v: &Option<f64>| v.map(format_float).unwrap_or_default();
        format!(
            "seed,count,evaluated,skipped_positivity,skipped_consistency,min_gamma2_ratio,max_gamma2_ratio,mean_gamma2_ratio\n{},{},{},{},{},{},{},{}\n",
            self.seed,
            self.count,
            self.evaluated,
            self.skipped_positivity,
            self.skipped_consistency,
            opt(&self.min_gamma2_ratio),
            opt(&self.max_gamma2_ratio),
            opt(&self.mean_gamma2_ratio),
        )
    }
}

/// Deterministic random search: sample k draws its amplitude in
/// [0.01, amplitude], alternates density / log-density modes and alternates
/// between ambient 21-monomial draws and axisymmetric two-monomial draws
/// (both representations of the symmetric class); samples that fail the
/// positivity floor or the quadrature consistency check are counted and
/// skipped.
fn search(seed: u64, count: usize, amplitude: f64, quad_n: usize) -> Result<SearchSummary, CliError> {
    use rand::prelude::*;
    let sphere_rule = Rule::Sphere(SphereQuadrature::product(quad_n, 2 * quad_n)?);
    let z_rule = Rule::Axisym(ZQuadrature::gauss(quad_n.max(32), 3)?);
    let mut summary = SearchSummary {
        seed,
        count,
        evaluated: 0,
        skipped_positivity: 0,
        skipped_consistency: 0,
        min_gamma2_ratio: None,
        max_gamma2_ratio: None,
        mean_gamma2_ratio: None,
        argmin: None,
    };
    let mut sum = 0.0;
    let lo_amp = 0.01f64.min(amplitude);
    for k in 0..count as u64 {
        let mut amp_rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5_5a5a);
        amp_rng.set_stream(k);
        let amp = amp_rng.random_range(lo_amp..=amplitude);
        let mode = if k % 2 == 0 {
            PolyMode::LogDensity
        } else {
            PolyMode::Density
        };
        let (drawn, rule) = if k % 4 < 2 {
            (
                sample_random_symmetric_stream(seed, k, amp, mode, &sphere_rule),
                &sphere_rule,
            )
        } else {
            (
                sample_random_axisymmetric_stream(seed, k, amp, mode, &z_rule),
                &z_rule,
            )
        };
        let f = match drawn {
            Ok(f) => f,
            Err(Gamma2Error::SamplingFailed { .. }) | Err(Gamma2Error::PositivityViolation { .. }) => {
                summary.skipped_positivity += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let ratio = match gamma2::functionals::gamma2_ratio(&f, rule) {
            Ok(r) => r,
            Err(Gamma2Error::UndefinedRatio(_)) => {
                // Constant draw (amplitude can be ~0); nothing to record.
                continue;
            }
            Err(Gamma2Error::NumericalConsistency { .. })
            | Err(Gamma2Error::PositivityViolation { .. }) => {
                summary.skipped_consistency += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        summary.evaluated += 1;
        sum += ratio;
        if summary.min_gamma2_ratio.is_none_or(|m| ratio < m) {
            summary.min_gamma2_ratio = Some(ratio);
            summary.argmin = Some(f.descriptor().clone());
        }
        if summary.max_gamma2_ratio.is_none_or(|m| ratio > m) {
            summary.max_gamma2_ratio = Some(ratio);
        }
    }
    if summary.evaluated > 0 {
        summary.mean_gamma2_ratio = Some(sum / summary.evaluated as f64);
    }
    Ok(summary)
}
