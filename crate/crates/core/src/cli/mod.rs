//! Batch driver: run configs in, CSV certificate reports out.
//!
//! Each command reads a strict TOML config, evaluates its checks and returns a
//! [`Report`]. Rows may be computed in parallel but keep config order.

mod analyticity;
mod asymptotic;
mod causality;
mod green;
mod kk_eps;
mod modes;

use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::config;
use crate::dispersion::PermittivityModel;
use crate::error::{Error, Result};
use crate::report::Report;

pub use analyticity::cmd_analyticity;
pub use asymptotic::cmd_asymptotic;
pub use causality::cmd_causality;
pub use green::cmd_green;
pub use kk_eps::cmd_kk_eps;
pub use modes::cmd_modes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    KkEps,
    Green,
    Modes,
    Causality,
    Analyticity,
    Asymptotic,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::KkEps => "kk-eps",
            Command::Green => "green",
            Command::Modes => "modes",
            Command::Causality => "causality",
            Command::Analyticity => "analyticity",
            Command::Asymptotic => "asymptotic",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        [
            Command::KkEps,
            Command::Green,
            Command::Modes,
            Command::Causality,
            Command::Analyticity,
            Command::Asymptotic,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }
}

/// Where a config came from and the seed in force.
#[derive(Debug, Clone)]
pub struct Context {
    pub config_path: PathBuf,
    pub seed: u64,
}

impl Context {
    pub fn resolve(&self, rel: &str) -> PathBuf {
        config::resolve(&self.config_path, rel)
    }

    pub fn load_medium(&self, rel: &str) -> Result<PermittivityModel> {
        config::load_medium(&self.resolve(rel))
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

/// Keys every run config may carry.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Header {
    command: Option<String>,
    seed: Option<u64>,
    output: Option<String>,
}

/// Result of a command run, ready to be written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub output: Option<PathBuf>,
}

/// Parse the config at `path` and run `command` on it.
pub fn run(command: Command, path: &Path, seed: Option<u64>) -> Result<Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| Error::Config(format!("config: {e}")))?;
    let mut header_table = toml::Table::new();
    let mut body = toml::Table::new();
    for (k, v) in table {
        if matches!(k.as_str(), "command" | "seed" | "output") {
            header_table.insert(k, v);
        } else {
            body.insert(k, v);
        }
    }
    let header: Header = header_table
        .try_into()
        .map_err(|e| Error::Config(format!("config: {e}")))?;
    if let Some(name) = &header.command {
        if name != command.name() {
            return Err(Error::Config(format!(
                "config is for `{name}`, not `{}`",
                command.name()
            )));
        }
    }
    let ctx = Context {
        config_path: path.to_path_buf(),
        seed: seed.or(header.seed).unwrap_or(0),
    };
    let body = toml::Value::Table(body);
    let report = match command {
        Command::KkEps => cmd_kk_eps(&ctx, parse_body(body)?)?,
        Command::Green => cmd_green(&ctx, parse_body(body)?)?,
        Command::Modes => cmd_modes(&ctx, parse_body(body)?)?,
        Command::Causality => cmd_causality(&ctx, parse_body(body)?)?,
        Command::Analyticity => cmd_analyticity(&ctx, parse_body(body)?)?,
        Command::Asymptotic => cmd_asymptotic(&ctx, parse_body(body)?)?,
    };
    Ok(Outcome {
        report,
        output: header.output.map(|o| ctx.resolve(&o)),
    })
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: toml::Value) -> Result<T> {
    body.try_into().map_err(|e| Error::Config(format!("config: {e}")))
}

/// Exit status for a failed run: 2 for input and domain errors, 1 for
/// numerical failures.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_)
        | Error::PoleProximity { .. }
        | Error::InvalidModel(_)
        | Error::GapViolation(_)
        | Error::Periodicity(_)
        | Error::Dimension { .. }
        | Error::Config(_) => 2,
        Error::Singular { .. } | Error::Quadrature { .. } | Error::NonDecaying { .. } | Error::NoConvergence { .. } => 1,
    }
}

/// Exit status for a finished report.
pub fn report_exit_code(report: &Report) -> i32 {
    if report.all_pass() {
        0
    } else {
        1
    }
}

/// Thread cap from `HG_THREADS`.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("HG_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Radical inverse of `i` in `base`.
pub(crate) fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// 2D Halton points with a seeded Cranley-Patterson shift.
pub(crate) fn shifted_halton(ctx: &Context, stream: u64, count: usize) -> Vec<[f64; 2]> {
    let mut rng = ctx.rng(stream);
    let shift = [rng.random::<f64>(), rng.random::<f64>()];
    (1..=count as u64)
        .map(|i| [(halton(i, 2) + shift[0]).fract(), (halton(i, 3) + shift[1]).fract()])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_prefix() {
        let v: Vec<f64> = (1..=4).map(|i| halton(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn command_names_round_trip() {
        for c in ["kk-eps", "green", "modes", "causality", "analyticity", "asymptotic"] {
            assert_eq!(Command::parse(c).unwrap().name(), c);
        }
        assert!(Command::parse("nope").is_none());
    }
}
