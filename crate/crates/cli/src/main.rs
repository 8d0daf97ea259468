//! `clcd`: placement, delivery, verification and rate analysis for
//! cache-level coded delivery.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use clcd_core::analysis::Scheme;

use config::{parse_cache_range, parse_list, parse_seed_range, FileConfig, Number, Params};

#[derive(Parser, Debug)]
#[command(name = "clcd", version, about = "Cache-level coded delivery toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML file with keys K, N, t, M, gamma, N_r, scheme.
    #[arg(long, short = 'c', global = true)]
    config: Option<PathBuf>,
    /// Number of users.
    #[arg(short = 'K', long = "users", global = true)]
    users: Option<usize>,
    /// Number of files.
    #[arg(short = 'N', long = "files", global = true)]
    files: Option<usize>,
    /// Caching level.
    #[arg(short = 't', long = "level", global = true)]
    level: Option<usize>,
    /// Cache size in files: integer, decimal or fraction such as 12/7.
    #[arg(short = 'M', long = "cache", global = true)]
    cache: Option<String>,
    /// Zipf exponent; `sweep` also takes a comma list.
    #[arg(long, global = true)]
    gamma: Option<String>,
    /// Number of uncached files.
    #[arg(long = "n-r", global = true)]
    uncached: Option<usize>,
    /// Scheme id (cl21, cl210, cl_t_exact, cl_t_greedy, conventional,
    /// naive_ms, naive_ms_removal, clcd_best).
    #[arg(long, global = true)]
    scheme: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print every user's cache contents as CSV.
    Place,
    /// Build the delivery schedule for one demand vector.
    Deliver {
        /// Comma-separated file ids, one per user.
        #[arg(long)]
        demand: String,
        /// Also run the decoding oracle.
        #[arg(long)]
        check: bool,
    },
    /// Decode random Zipf demands (or a dumped schedule) bit-exactly.
    Verify {
        /// Seed range `a..b` or `a..=b`.
        #[arg(long, default_value = "0..10")]
        seeds: String,
        /// Schedule dump from `deliver`; requires --demand.
        #[arg(long, requires = "demand")]
        schedule: Option<PathBuf>,
        #[arg(long)]
        demand: Option<String>,
    },
    /// Average rate of one scheme under the Zipf demand model.
    Rate {
        /// Cross-check the analytic average with this many sampled demands.
        #[arg(long)]
        monte_carlo: Option<usize>,
    },
    /// Average rates over a grid of gamma and M.
    Sweep {
        /// `lo:hi:step` or a comma list.
        #[arg(long = "M-range", default_value = "140:280:35")]
        m_range: String,
        /// Comma-separated scheme ids.
        #[arg(long, default_value = "naive_ms,naive_ms_removal,clcd_best")]
        schemes: String,
    },
    /// Scan N_r and report the one with the lowest average rate.
    OptimizeNr,
}

/// Gamma values swept when neither `--gamma` nor the config sets one.
const SWEEP_GAMMAS: &str = "0.7,0.75,0.8,0.85";

fn params(g: &Global, gamma_list: bool) -> Result<Params> {
    let file = match &g.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let over = FileConfig {
        users: g.users,
        files: g.files,
        t: g.level,
        cache: g.cache.clone().map(Number::Text),
        gamma: match &g.gamma {
            Some(s) if !gamma_list => Some(s.trim().parse().map_err(|_| anyhow::anyhow!("bad gamma {s:?}"))?),
            _ => None,
        },
        uncached: g.uncached,
        scheme: g.scheme.clone(),
    };
    Params::resolve(file, over)
}

fn demand(s: &str) -> Result<Vec<u32>> {
    let d: Vec<u32> = parse_list(s)?;
    if d.is_empty() {
        bail!("empty demand");
    }
    Ok(d)
}

fn run(cli: Cli) -> Result<commands::Output> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Place => commands::place(&params(g, false)?),
        Cmd::Deliver { demand: d, check } => {
            let p = params(g, false)?;
            let d = demand(d)?;
            if d.len() != p.users {
                bail!("demand has {} entries for K = {}", d.len(), p.users);
            }
            commands::deliver(&p, &d, *check)
        }
        Cmd::Verify { seeds, schedule, demand: d } => {
            let p = params(g, false)?;
            let seeds = parse_seed_range(seeds)?;
            match (schedule, d) {
                (Some(path), Some(d)) => commands::verify(&p, seeds, Some((path, &demand(d)?))),
                _ => commands::verify(&p, seeds, None),
            }
        }
        Cmd::Rate { monte_carlo } => commands::rate(&params(g, false)?, *monte_carlo),
        Cmd::Sweep { m_range, schemes } => {
            let p = params(g, true)?;
            let from_file = match &g.config {
                Some(path) => FileConfig::load(path)?.gamma,
                None => None,
            };
            let gammas: Vec<f64> = match (&g.gamma, from_file) {
                (Some(list), _) => parse_list(list)?,
                (None, Some(x)) => vec![x],
                (None, None) => parse_list(SWEEP_GAMMAS)?,
            };
            let schemes: Vec<Scheme> = match &p.scheme {
                Some(s) => vec![*s],
                None => parse_list(schemes)?,
            };
            commands::sweep_cmd(&p, &schemes, &gammas, &parse_cache_range(m_range)?)
        }
        Cmd::OptimizeNr => commands::optimize(&params(g, false)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            let _ = std::io::stderr().write_all(out.notes.as_bytes());
            if out.failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
