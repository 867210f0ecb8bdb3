mod args;
mod commands;
mod config;
mod error;
mod figures;
mod output;
mod table;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use config::Settings;
use error::{CliError, Kind, Result};
use output::Sink;

fn run(cli: Cli) -> Result<()> {
    let s = Settings::resolve(cli.global.flags())?;
    if let Some(n) = s.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::new(Kind::Internal, format!("cannot start thread pool: {e}")))?;
    }
    let sink = Sink::new(s.out.clone(), s.format());
    match cli.command {
        Command::Bands { tau_grid } => commands::bands(&s, &sink, tau_grid.as_deref()),
        Command::Fdcheck => commands::fdcheck(&s, &sink),
        Command::Gauge => commands::gauge(&s, &sink),
        Command::Pr => commands::pr(&s, &sink),
        Command::Wavefunction {
            band,
            points,
            gauge,
            basis,
        } => commands::wavefunction(&s, &sink, band, points, gauge, basis),
        Command::EpScan { pair, window } => commands::ep_scan_cmd(&s, &sink, &pair, &window),
        Command::EpClassify { pair, tau_ep } => commands::ep_classify_cmd(&s, &sink, &pair, tau_ep),
        Command::Dispersion { pair, at, side, vary } => {
            commands::dispersion_cmd(&s, &sink, &pair, at, &side, vary)
        }
        Command::Encircle {
            system,
            center,
            radius,
            steps,
            states,
            coupling,
        } => commands::encircle_cmd(&s, &sink, system, &center, radius, steps, &states, coupling),
        Command::Riemann {
            delta,
            g,
            coupling,
            resolution,
        } => commands::riemann(&sink, &delta, &g, coupling, resolution),
        Command::Truncated {
            model,
            v0,
            omega,
            omega_prime,
        } => commands::truncated(&s, &sink, &model, v0, omega, omega_prime),
        Command::Figure { name } => {
            let dir = figures::figure(name, s.out.clone(), s.format())?;
            log::info!("wrote bundle {}", dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::new(Kind::Usage, e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.kind.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
