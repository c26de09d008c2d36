use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fpw_core::com::SweepPlan;
use fpw_core::config::parse_density;
use fpw_core::workbench::{Command, DensitySweep, S21Mode, Workbench, COUPLING_THRESHOLD};

/// Flexural-plate-wave liquid sensor workbench.
#[derive(Parser, Debug)]
#[command(name = "fpw", version)]
struct Cli {
    /// Device description; the bundled reference device is used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Liquid library (`name density_kg_m3 viscosity_pa_s` per line).
    #[arg(long, global = true)]
    liquids: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Effective plate parameters.
    Plate,
    /// Loaded phase velocity, resonant frequency and sensitivities.
    Dispersion(DispersionArgs),
    /// S21 sweep written as CSV.
    S21(S21Args),
    /// Linear frequency-vs-density calibration.
    Fit {
        #[arg(long)]
        points: PathBuf,
    },
    /// Density from a measured frequency through a calibration.
    Invert {
        #[arg(long)]
        points: PathBuf,
        /// Hz
        #[arg(long)]
        freq: f64,
    },
    /// Viscous against inertial loading for one liquid.
    Coupling {
        #[arg(long)]
        liquid: String,
        #[arg(long, default_value_t = COUPLING_THRESHOLD)]
        threshold: f64,
    },
    /// Published liquid data next to the model.
    Reference,
    /// Liquids in the active library.
    Liquids,
}

#[derive(Args, Debug)]
struct DispersionArgs {
    #[arg(long)]
    liquid: Option<String>,
    /// In-plane residual tension, N/m.
    #[arg(long, default_value_t = 0.0)]
    tension: f64,
    /// Write a density sweep to this CSV.
    #[arg(long)]
    sweep_out: Option<PathBuf>,
    /// Accepts kg/m3 or g/cm3 suffixes.
    #[arg(long, default_value = "500", requires = "sweep_out")]
    sweep_min: String,
    #[arg(long, default_value = "2000", requires = "sweep_out")]
    sweep_max: String,
    #[arg(long, default_value_t = 31, requires = "sweep_out")]
    sweep_points: usize,
}

#[derive(Args, Debug)]
struct S21Args {
    /// Plate-wave velocity from the layer stack.
    #[arg(long, conflicts_with = "bulk", required_unless_present = "bulk")]
    fpw: bool,
    /// Free velocity from the [com] section.
    #[arg(long)]
    bulk: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = SweepPlan::DEFAULT_POINTS)]
    points: usize,
    #[arg(long)]
    liquid: Option<String>,
    /// Leave out the viscous shear-layer loss.
    #[arg(long)]
    no_viscous_loss: bool,
}

fn to_command(cmd: Cmd) -> Result<Command, String> {
    Ok(match cmd {
        Cmd::Plate => Command::Plate,
        Cmd::Dispersion(a) => {
            let sweep = match a.sweep_out {
                Some(out) => Some(DensitySweep {
                    out,
                    min: parse_density(&a.sweep_min, 0).map_err(|e| format!("--sweep-min: {e}"))?,
                    max: parse_density(&a.sweep_max, 0).map_err(|e| format!("--sweep-max: {e}"))?,
                    points: a.sweep_points,
                }),
                None => None,
            };
            Command::Dispersion {
                liquid: a.liquid,
                tension: a.tension,
                sweep,
            }
        }
        Cmd::S21(a) => Command::S21 {
            mode: if a.fpw { S21Mode::Fpw } else { S21Mode::Bulk },
            out: a.out,
            points: a.points,
            liquid: a.liquid,
            viscous_attenuation: !a.no_viscous_loss,
        },
        Cmd::Fit { points } => Command::Fit {
            points_file: points,
        },
        Cmd::Invert { points, freq } => Command::Invert {
            points_file: points,
            frequency: freq,
        },
        Cmd::Coupling { liquid, threshold } => Command::Coupling { liquid, threshold },
        Cmd::Reference => Command::Reference,
        Cmd::Liquids => Command::Liquids,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match to_command(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = Workbench::load(cli.config.as_deref(), cli.liquids.as_deref())
        .and_then(|wb| wb.run(&command));
    match result {
        Ok(run) => {
            for line in &run.lines {
                println!("{line}");
            }
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
            for path in &run.outputs {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::from(run.exit_status as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
