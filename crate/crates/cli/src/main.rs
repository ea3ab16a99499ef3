//! Command-line front end: parameter sweeps, single-point bound evaluation,
//! and self-check runs, emitting CSV with 12 significant digits.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or validation error.

mod check;
mod sweep;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use unext::bounds::{
    adaptive_depolarizing_bound, depolarizing_bound_with_grid, erasure_bound,
    pretty_strong_converse, BoundResult, BoundStatus, ChannelKind, ChannelParams, Witness,
    DEFAULT_T_GRID,
};
use unext::statefam::{extendibility_threshold, StateFamily};

#[derive(Parser)]
#[command(name = "unext", version, about = "Quantum rate bounds from k-extendibility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Isotropic,
    Werner,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    Depol,
    Erasure,
}

impl ChannelArg {
    pub fn kind(self) -> ChannelKind {
        match self {
            ChannelArg::Depol => ChannelKind::Depolarizing,
            ChannelArg::Erasure => ChannelKind::Erasure,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    PerK,
    BestK,
    CompareTbr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Depth {
    Quick,
    Full,
}

#[derive(Args)]
pub struct SweepArgs {
    /// key=value file supplying defaults for the other flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    channel: Option<ChannelArg>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n_min: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    /// comma list of k values / ranges, plus the token `limit` (e.g. "limit,2-10")
    #[arg(long)]
    k_list: Option<String>,
    /// depolarizing t-grid density
    #[arg(long)]
    t_grid_size: Option<usize>,
    /// CSV destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    mode: Option<ModeArg>,
}

#[derive(Subcommand)]
enum Command {
    /// k-extendibility thresholds of the symmetric state families
    Thresholds {
        #[arg(long, default_value = "both")]
        family: FamilyArg,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value = "2-10")]
        k_list: String,
    },
    /// One depolarizing-channel bound evaluation
    Depol {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        k: u64,
        #[arg(long, default_value_t = DEFAULT_T_GRID)]
        t_grid_size: usize,
    },
    /// One erasure-channel bound evaluation
    Erasure {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        k: u64,
    },
    /// Adaptive-protocol depolarizing bound
    Adaptive {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        k: u64,
    },
    /// Pretty-strong-converse rate bound
    Psc {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        k: u64,
    },
    /// Parameter sweep over (n, k) emitting one CSV row per point
    Sweep(SweepArgs),
    /// Self-check: anchors (quick) plus randomized cross-checks (full)
    Check {
        #[arg(long, default_value = "quick")]
        depth: Depth,
    },
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("UNEXT_THREADS") {
        match v.parse::<usize>() {
            Ok(t) if t >= 1 => unext::par::limit_threads(t),
            _ => {
                eprintln!("error: UNEXT_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// 12 significant digits, '.' decimal; NaN renders as an empty cell.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

pub fn witness_summary(w: &Witness) -> String {
    match w {
        Witness::None => String::new(),
        Witness::OptimalT(t) => format!("t={}", num(*t)),
        Witness::Coefficients(c) => {
            let nnz = c.iter().filter(|&&x| x > 1e-9).count();
            format!("c_nnz={nnz}")
        }
    }
}

pub const BOUND_HEADER: &str = "n,k,status,log2M_total,rate_per_use,divergence_E,witness_summary";

pub fn bound_row(n: u32, r: &BoundResult) -> String {
    let status = match r.status {
        BoundStatus::Valid => "valid",
        BoundStatus::Invalid => "invalid",
    };
    format!(
        "{},{},{},{},{},{},{}",
        n,
        r.k_used,
        status,
        num(r.log2m_total),
        num(r.rate_per_use),
        num(r.divergence_e),
        witness_summary(&r.witness)
    )
}

/// Parses "limit,2-4,7" into limit markers (None) and finite orders.
pub fn parse_k_list(s: &str) -> anyhow::Result<Vec<Option<u64>>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if part == "limit" {
            out.push(None);
            continue;
        }
        if let Some((a, b)) = part.split_once('-') {
            let a: u64 = a.trim().parse()?;
            let b: u64 = b.trim().parse()?;
            if a < 2 || b < a {
                anyhow::bail!("invalid k range {part:?} (need 2 <= lo <= hi)");
            }
            out.extend((a..=b).map(Some));
        } else {
            let k: u64 = part.parse()?;
            if k < 2 {
                anyhow::bail!("k must be >= 2, got {k}");
            }
            out.push(Some(k));
        }
    }
    if out.is_empty() {
        anyhow::bail!("empty k list");
    }
    Ok(out)
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Thresholds { family, d, k_list } => {
            let ks = parse_k_list(&k_list)?;
            let families: &[StateFamily] = match family {
                FamilyArg::Isotropic => &[StateFamily::Isotropic],
                FamilyArg::Werner => &[StateFamily::Werner],
                FamilyArg::Both => &[StateFamily::Isotropic, StateFamily::Werner],
            };
            println!("family,d,k,threshold");
            for fam in families {
                let name = match fam {
                    StateFamily::Isotropic => "isotropic",
                    StateFamily::Werner => "werner",
                };
                for k in ks.iter().flatten() {
                    let t = extendibility_threshold(*fam, d, *k)?;
                    println!("{name},{d},{k},{}", num(t));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Depol { p, n, eps, k, t_grid_size } => {
            let params = ChannelParams::new(ChannelKind::Depolarizing, p, n, eps, k)?;
            let r = depolarizing_bound_with_grid(&params, t_grid_size)?;
            println!("{BOUND_HEADER}");
            println!("{}", bound_row(n, &r));
            Ok(ExitCode::SUCCESS)
        }
        Command::Erasure { p, n, eps, k } => {
            let params = ChannelParams::new(ChannelKind::Erasure, p, n, eps, k)?;
            let r = erasure_bound(&params)?;
            println!("{BOUND_HEADER}");
            println!("{}", bound_row(n, &r));
            Ok(ExitCode::SUCCESS)
        }
        Command::Adaptive { p, n, eps, k } => {
            let params = ChannelParams::new(ChannelKind::Depolarizing, p, n, eps, k)?;
            let r = adaptive_depolarizing_bound(&params)?;
            println!("{BOUND_HEADER}");
            println!("{}", bound_row(n, &r));
            Ok(ExitCode::SUCCESS)
        }
        Command::Psc { eps, n, k } => {
            let rate = pretty_strong_converse(eps, n, k)?;
            println!("n,k,eps,rate_per_use");
            println!("{n},{k},{},{}", num(eps), num(rate));
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            sweep::run_sweep(args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { depth } => {
            let ok = check::run_checks(depth == Depth::Full);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
