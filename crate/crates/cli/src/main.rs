//! Command-line driver around the mode, transform, phase-matching,
//! amplitude and optimizer routines. One command per process; all output is
//! deterministic for a fixed config and seed.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration error,
//! 3 numerical error.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use egh_spdc::biphoton::jsa_grid;
use egh_spdc::decompose::decompose;
use egh_spdc::modes::{egh_eval, ModeIndex, TransversePoint};
use egh_spdc::optimizer::{brute_force_optimal, optimal_expansion};
use egh_spdc::transforms::egh_transverse_ft;
use egh_spdc::validate::{run_all, ValidateOptions};
use egh_spdc::Error as CoreError;

use config::{
    polarization_to_core, ComplexField, ConventionName, IndexSetName, RunConfig,
};
use output::{csv_writer, ensure_out_dir, read_field_csv, write_json, write_row};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, unreadable files, or invalid output locations.
    Config(String),
    /// A numerical routine rejected the inputs or failed to converge.
    Numerical(String),
    /// The validation suite reported failures.
    Validation(usize),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidGeometry(_)
            | CoreError::InvalidExpansion(_)
            | CoreError::InvalidInput(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "egh-spdc",
    version,
    about = "Biphoton spectra for pumps expanded in elegant Gauss-Hermite modes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export real-space values and the transverse spectrum of one pump mode.
    Modes(RunArgs),
    /// Evaluate the joint spectral amplitude over a transverse-frequency grid.
    Jsa(RunArgs),
    /// Optimize pump coefficients for a target direction (closed form and
    /// seeded brute force).
    Optimize(RunArgs),
    /// Project a sampled waist-plane field onto the mode basis.
    Decompose(RunArgs),
    /// Run the named-invariant validation suite.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed (brute-force optimizer).
    #[arg(long)]
    seed: Option<u64>,
    /// Momentum-mismatch convention override.
    #[arg(long, value_enum)]
    convention: Option<ConventionFlag>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, clap::ValueEnum)]
enum ConventionFlag {
    Paper,
    Exponent,
}

impl From<ConventionFlag> for ConventionName {
    fn from(f: ConventionFlag) -> Self {
        match f {
            ConventionFlag::Paper => ConventionName::Paper,
            ConventionFlag::Exponent => ConventionName::Exponent,
        }
    }
}

#[derive(Args)]
struct ValidateArgs {
    /// Test hook: flip the Fourier sign convention of the analytic
    /// reference, which must make the transform invariants fail.
    #[arg(long, hide = true)]
    perturb_ft_sign: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Modes(args) => cmd_modes(args),
        Command::Jsa(args) => cmd_jsa(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(()) => ExitCode::from(0),
        Err(CliError::Validation(failures)) => {
            eprintln!("validation failed: {failures} invariant(s)");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn cmd_modes(args: &RunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let geom = cfg.geometry()?;
    let section = cfg
        .modes
        .clone()
        .ok_or_else(|| CliError::Config("modes section required".into()))?;
    let idx = ModeIndex::new(section.index[0], section.index[1]);
    ensure_out_dir(&args.out)?;

    let values_path = args.out.join("mode_values.csv");
    let mut w = csv_writer(&values_path, "x_m,y_m,z_m,re,im")?;
    for x in egh_spdc::AxisSpec::from(section.x_m).values() {
        for y in egh_spdc::AxisSpec::from(section.y_m).values() {
            for z in egh_spdc::AxisSpec::from(section.z_m).values() {
                let v = egh_eval(idx, &geom, TransversePoint::new(x, y, z));
                write_row(&mut w, &[x, y, z, v.re, v.im])?;
            }
        }
    }
    drop(w);

    let spectrum_path = args.out.join("mode_spectrum.csv");
    let mut w = csv_writer(&spectrum_path, "nu_x_per_m,nu_y_per_m,z_m,re,im")?;
    let z = section.spectrum_z_m;
    for nu_x in egh_spdc::AxisSpec::from(section.nu_x_per_m).values() {
        for nu_y in egh_spdc::AxisSpec::from(section.nu_y_per_m).values() {
            let v = egh_transverse_ft(idx, &geom, nu_x, nu_y, z);
            write_row(&mut w, &[nu_x, nu_y, z, v.re, v.im])?;
        }
    }
    println!(
        "wrote {} and {}",
        values_path.display(),
        spectrum_path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct JsaMetadata {
    prefactor: ComplexField,
    convention: &'static str,
    envelope: EnvelopeEcho,
    f_s_hz: f64,
    f_i_hz: f64,
    axes: AxesEcho,
    notes: Vec<&'static str>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum EnvelopeEcho {
    Cw { f_p_hz: f64, grid_cell_hz: f64 },
    GaussianPulse { f_p_hz: f64, sigma_f_hz: f64 },
}

#[derive(Serialize)]
struct AxesEcho {
    nu_sx_per_m: Vec<f64>,
    nu_sy_per_m: Vec<f64>,
    nu_ix_per_m: Vec<f64>,
    nu_iy_per_m: Vec<f64>,
}

fn cmd_jsa(args: &RunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let geom = cfg.geometry()?;
    let expansion = cfg.expansion()?;
    let env = cfg.envelope()?;
    let crystal = cfg.crystal()?;
    let photons = cfg.photons()?.clone();
    let spec = cfg.grid_spec()?;
    let convention = cfg.convention(args.convention.map(Into::into));
    let pump_pol = cfg.pump_polarization();
    let s_pol = polarization_to_core(&photons.signal_polarization);
    let i_pol = polarization_to_core(&photons.idler_polarization);

    let grid = jsa_grid(
        &expansion,
        &geom,
        &crystal,
        &env,
        &pump_pol,
        &spec,
        photons.f_s_hz,
        photons.f_i_hz,
        s_pol,
        i_pol,
        convention,
    )?;

    ensure_out_dir(&args.out)?;
    let csv_path = args.out.join("jsa.csv");
    let mut w = csv_writer(
        &csv_path,
        "nu_sx_per_m,nu_sy_per_m,nu_ix_per_m,nu_iy_per_m,re,im",
    )?;
    for (a, &sx) in grid.nu_sx.iter().enumerate() {
        for (b, &sy) in grid.nu_sy.iter().enumerate() {
            for (c, &ix) in grid.nu_ix.iter().enumerate() {
                for (d, &iy) in grid.nu_iy.iter().enumerate() {
                    let amp = grid.amplitude([a, b, c, d]);
                    write_row(&mut w, &[sx, sy, ix, iy, amp.re, amp.im])?;
                }
            }
        }
    }
    drop(w);

    let envelope_echo = match env {
        egh_spdc::PumpEnvelope::Cw { f_p, grid_cell } => EnvelopeEcho::Cw {
            f_p_hz: f_p,
            grid_cell_hz: grid_cell,
        },
        egh_spdc::PumpEnvelope::GaussianPulse { f_p, sigma_f } => EnvelopeEcho::GaussianPulse {
            f_p_hz: f_p,
            sigma_f_hz: sigma_f,
        },
    };
    let meta = JsaMetadata {
        prefactor: grid.prefactor.into(),
        convention: match convention {
            egh_spdc::MismatchConvention::PaperLiteral => "paper",
            egh_spdc::MismatchConvention::ExponentConsistent => "exponent",
        },
        envelope: envelope_echo,
        f_s_hz: grid.f_s,
        f_i_hz: grid.f_i,
        axes: AxesEcho {
            nu_sx_per_m: grid.nu_sx.clone(),
            nu_sy_per_m: grid.nu_sy.clone(),
            nu_ix_per_m: grid.nu_ix.clone(),
            nu_iy_per_m: grid.nu_iy.clone(),
        },
        notes: vec![
            "csv re/im are full amplitudes including the prefactor",
            "a cw envelope is a discretized delta: 1 within half a grid cell of f_p, else 0",
            "nu_z components are fixed on-shell from (f, n); amplitudes are per transverse-frequency cell",
        ],
    };
    let meta_path = args.out.join("jsa_meta.json");
    write_json(&meta_path, &meta)?;
    println!("wrote {} and {}", csv_path.display(), meta_path.display());
    Ok(())
}

#[derive(Serialize)]
struct OptimizeReport {
    target: TargetEcho,
    max_order: u32,
    index_set: IndexSetName,
    seed: u64,
    paraxial: bool,
    closed_form: MethodReport,
    brute_force: MethodReport,
    deltas: DeltaReport,
}

#[derive(Serialize)]
struct TargetEcho {
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct MethodReport {
    objective: f64,
    iterations: usize,
    coefficients: Vec<CoefficientReport>,
}

#[derive(Serialize)]
struct CoefficientReport {
    n: u32,
    m: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct DeltaReport {
    objective: f64,
    max_coefficient_modulus: f64,
}

fn cmd_optimize(args: &RunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let (target, max_order, index_set) = cfg.target()?;
    let seed = cfg.seed(args.seed);
    if !target.is_paraxial() {
        eprintln!(
            "warning: |X| or |Y| exceeds 0.3; the closed form leaves the paraxial regime"
        );
    }

    let closed = optimal_expansion(&target, max_order, index_set);
    let brute = brute_force_optimal(&target, max_order, index_set, seed)?;

    let coeffs = |e: &egh_spdc::ModeExpansion| -> Vec<CoefficientReport> {
        e.iter()
            .map(|(idx, c)| CoefficientReport {
                n: idx.n,
                m: idx.m,
                re: c.re,
                im: c.im,
            })
            .collect()
    };
    let max_delta = closed
        .expansion
        .iter()
        .map(|(idx, c)| (c.norm() - brute.expansion.coefficient(idx).norm()).abs())
        .fold(0.0f64, f64::max);

    let report = OptimizeReport {
        target: TargetEcho {
            x: target.x,
            y: target.y,
        },
        max_order,
        index_set: match index_set {
            egh_spdc::IndexSet::AllNonzeroOrders => IndexSetName::AllNonzeroOrders,
            egh_spdc::IndexSet::StrictlyPositivePairs => IndexSetName::StrictlyPositivePairs,
        },
        seed,
        paraxial: target.is_paraxial(),
        closed_form: MethodReport {
            objective: closed.objective,
            iterations: closed.iterations,
            coefficients: coeffs(&closed.expansion),
        },
        brute_force: MethodReport {
            objective: brute.objective,
            iterations: brute.iterations,
            coefficients: coeffs(&brute.expansion),
        },
        deltas: DeltaReport {
            objective: (closed.objective - brute.objective).abs(),
            max_coefficient_modulus: max_delta,
        },
    };
    ensure_out_dir(&args.out)?;
    let path = args.out.join("optimize.json");
    write_json(&path, &report)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct DecomposeReport {
    max_order: u32,
    coefficients: Vec<CoefficientReport>,
    captured_power: f64,
    input_power: f64,
}

fn cmd_decompose(args: &RunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let geom = cfg.geometry()?;
    let section = cfg
        .decompose
        .clone()
        .ok_or_else(|| CliError::Config("decompose section required".into()))?;
    let field_path = args
        .config
        .parent()
        .unwrap_or_else(|| std::path::Path::new("."))
        .join(&section.field_csv);
    let field = read_field_csv(&field_path)?;
    let outcome = decompose(&field, &geom, section.max_order)?;

    let report = DecomposeReport {
        max_order: section.max_order,
        coefficients: outcome
            .expansion
            .iter()
            .map(|(idx, c)| CoefficientReport {
                n: idx.n,
                m: idx.m,
                re: c.re,
                im: c.im,
            })
            .collect(),
        captured_power: outcome.captured_power,
        input_power: outcome.input_power,
    };
    ensure_out_dir(&args.out)?;
    let path = args.out.join("decompose.json");
    write_json(&path, &report)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let checks = run_all(&ValidateOptions {
        perturb_ft_sign: args.perturb_ft_sign,
    });
    let mut failures = 0;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {} — {}", check.name, check.detail);
        if !check.passed {
            failures += 1;
        }
    }
    println!(
        "{} invariants, {} failed",
        checks.len(),
        failures
    );
    if failures > 0 {
        return Err(CliError::Validation(failures));
    }
    Ok(())
}
