use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use emgreen::cli::{self, Command};

#[derive(Parser)]
#[command(name = "emgreen", version, about = "Certificates for dispersive Green's functions")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Kramers-Kronig round trip, passivity and sum rule of ε
    KkEps(Common),
    /// Solves, Green samples, reciprocity and the resolvent norm bound
    Green(Common),
    /// Cavity mode expansion and Kramers-Kronig reconstruction of G
    Modes(Common),
    /// Vanishing of χ, X and E before t = 0 and outside the light cone
    Causality(Common),
    /// Cauchy loops in z, ξ and the Bloch wavevector
    Analyticity(Common),
    /// Large-|z| asymptotics and the resolvent-difference cap
    Asymptotic(Common),
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// CSV report path (stdout when absent and the config names none)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, common) = match args.command {
        Cmd::KkEps(c) => (Command::KkEps, c),
        Cmd::Green(c) => (Command::Green, c),
        Cmd::Modes(c) => (Command::Modes, c),
        Cmd::Causality(c) => (Command::Causality, c),
        Cmd::Analyticity(c) => (Command::Analyticity, c),
        Cmd::Asymptotic(c) => (Command::Asymptotic, c),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli::threads_from_env() {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = pool.install(|| cli::run(command, &common.config, common.seed));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::error_exit_code(&e) as u8);
        }
    };
    let written = match common.out.or(outcome.output) {
        Some(path) => std::fs::File::create(&path)
            .map_err(|e| emgreen::Error::Config(format!("cannot create {}: {e}", path.display())))
            .and_then(|f| outcome.report.write_csv(f)),
        None => outcome.report.write_csv(std::io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let r = &outcome.report;
    eprintln!("{}: {} rows, {} passed, {} failed", command.name(), r.rows.len(), r.passed(), r.failed());
    ExitCode::from(cli::report_exit_code(r) as u8)
}
