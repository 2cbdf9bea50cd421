use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use mobius_cli::{execute, Convention, RunConfig, Source};
use mobius_core::experiments::PRESETS;

/// Single-photon transmission through a Möbius ring of coupled cavities.
#[derive(Debug, Parser)]
#[command(name = "mobius", version)]
#[command(group(ArgGroup::new("source").args(["preset", "config", "list_presets"]).required(true)))]
struct Args {
    /// Built-in scenario (see --list-presets).
    #[arg(long)]
    preset: Option<String>,

    /// TOML scenario file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, env = "MOBIUS_OUT", default_value = "out")]
    out: PathBuf,

    /// Lead self-energy form, applied to both leads.
    #[arg(long, value_enum)]
    convention: Option<Convention>,

    /// Imaginary part added to the energy.
    #[arg(long)]
    eta: Option<f64>,

    /// Lead cavity frequency, both leads.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,

    /// Lead hopping, both leads.
    #[arg(long)]
    zeta: Option<f64>,

    /// Grid size of momentum and band sweeps.
    #[arg(long)]
    k_points: Option<usize>,

    /// Grid size of detuning sweeps.
    #[arg(long)]
    delta_points: Option<usize>,

    /// Compare every transmission with the mode-matching solver.
    #[arg(long)]
    cross_check: bool,

    #[arg(long)]
    list_presets: bool,
}

fn main() -> ExitCode {
    // usage errors are validation failures (exit 1); 2 is reserved for the solver
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if args.list_presets {
        for (name, about) in PRESETS {
            println!("{name:<10} {about}");
        }
        return ExitCode::SUCCESS;
    }

    let source = match (args.preset, args.config) {
        (Some(p), _) => Source::Preset(p),
        (None, Some(c)) => Source::Config(c),
        (None, None) => unreachable!("clap enforces a source"),
    };
    let cfg = RunConfig {
        source,
        out: args.out,
        convention: args.convention,
        eta: args.eta,
        omega: args.omega,
        zeta: args.zeta,
        k_points: args.k_points,
        delta_points: args.delta_points,
        cross_check: args.cross_check,
    };

    match execute(&cfg) {
        Ok(report) => {
            println!("scenario {}", report.scenario.label);
            if let Some(nr) = report.max_abs_nr {
                println!("max |NR| = {nr:.6e}");
            }
            if report.oracle_checked > 0 {
                println!("cross-check: {} points agree", report.oracle_checked);
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
