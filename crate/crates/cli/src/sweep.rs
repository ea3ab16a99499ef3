//! Sweep execution: resolves flags against an optional key=value config
//! file, evaluates grid points concurrently, and emits rows in ascending
//! (n, k) order so output is byte-identical across runs.

use crate::{bound_row, num, ChannelArg, ModeArg, SweepArgs, BOUND_HEADER};
use anyhow::{bail, Context};
use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use unext::bounds::{
    best_over_k, depolarizing_bound_with_grid, erasure_bound, tbr_limit_bound_with_grid,
    BoundResult, ChannelKind, ChannelParams, DEFAULT_T_GRID,
};
use unext::par::par_map;

struct SweepConfig {
    channel: ChannelKind,
    p: f64,
    eps: f64,
    n_min: u32,
    n_max: u32,
    /// None marks the k-independent limit curve.
    k_list: Vec<Option<u64>>,
    t_grid_size: usize,
    output: Option<PathBuf>,
    mode: ModeArg,
}

fn read_config(path: &PathBuf) -> anyhow::Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {} is not key=value: {line:?}", lineno + 1);
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn from_config<T: std::str::FromStr>(
    map: &HashMap<String, String>,
    key: &str,
) -> anyhow::Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| anyhow::anyhow!("config key {key}={raw:?}: {e}")),
    }
}

fn resolve(args: SweepArgs) -> anyhow::Result<SweepConfig> {
    let map = match &args.config {
        Some(path) => read_config(path)?,
        None => HashMap::new(),
    };
    let channel = match args.channel {
        Some(c) => c,
        None => match map.get("channel").map(String::as_str) {
            Some("depol") => ChannelArg::Depol,
            Some("erasure") => ChannelArg::Erasure,
            Some(other) => bail!("config channel must be depol or erasure, got {other:?}"),
            None => bail!("missing --channel (or channel= in config)"),
        },
    };
    let p = match args.p.or(from_config(&map, "p")?) {
        Some(p) => p,
        None => bail!("missing --p (or p= in config)"),
    };
    let eps = args.eps.or(from_config(&map, "eps")?).unwrap_or(0.05);
    let n_min = args.n_min.or(from_config(&map, "n_min")?).unwrap_or(1);
    let n_max = match args.n_max.or(from_config(&map, "n_max")?) {
        Some(n) => n,
        None => bail!("missing --n-max (or n_max= in config)"),
    };
    if n_min < 1 || n_min > n_max {
        bail!("need 1 <= n_min <= n_max, got {n_min}..{n_max}");
    }
    let k_spec = args
        .k_list
        .or_else(|| map.get("k_list").cloned())
        .unwrap_or_else(|| "limit,2-10".to_string());
    let k_list = crate::parse_k_list(&k_spec)?;
    let t_grid_size = args
        .t_grid_size
        .or(from_config(&map, "t_grid_size")?)
        .unwrap_or(DEFAULT_T_GRID);
    let output = args.output.or_else(|| map.get("output").map(PathBuf::from));
    let mode = match args.mode {
        Some(m) => m,
        None => match map.get("mode").map(String::as_str) {
            Some("per_k") | None => ModeArg::PerK,
            Some("best_k") => ModeArg::BestK,
            Some("compare_tbr") => ModeArg::CompareTbr,
            Some(other) => bail!("config mode must be per_k, best_k or compare_tbr, got {other:?}"),
        },
    };
    Ok(SweepConfig {
        channel: channel.kind(),
        p,
        eps,
        n_min,
        n_max,
        k_list,
        t_grid_size,
        output,
        mode,
    })
}

fn point_bound(cfg: &SweepConfig, n: u32, k: Option<u64>) -> unext::Result<BoundResult> {
    let k_probe = k.unwrap_or(2);
    let params = ChannelParams::new(cfg.channel, cfg.p, n, cfg.eps, k_probe)?;
    match k {
        None => tbr_limit_bound_with_grid(&params, cfg.t_grid_size),
        Some(_) => match cfg.channel {
            ChannelKind::Depolarizing => depolarizing_bound_with_grid(&params, cfg.t_grid_size),
            ChannelKind::Erasure => erasure_bound(&params),
        },
    }
}

pub fn run_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let cfg = resolve(args)?;
    // validate the whole grid up front so usage errors precede any output
    ChannelParams::new(cfg.channel, cfg.p, cfg.n_min, cfg.eps, 2)?;

    let mut lines = Vec::new();
    match cfg.mode {
        ModeArg::PerK => {
            lines.push(BOUND_HEADER.to_string());
            let mut ks = cfg.k_list.clone();
            // ascending (n, k) with the limit row (k column 0) first
            ks.sort_by_key(|k| k.unwrap_or(0));
            ks.dedup();
            let mut tasks = Vec::new();
            for n in cfg.n_min..=cfg.n_max {
                for &k in &ks {
                    tasks.push((n, k));
                }
            }
            let rows = par_map(tasks, |(n, k)| {
                point_bound(&cfg, n, k).map(|r| bound_row(n, &r))
            });
            for row in rows {
                lines.push(row?);
            }
        }
        ModeArg::BestK => {
            lines.push(BOUND_HEADER.to_string());
            let finite: Vec<u64> = cfg.k_list.iter().copied().flatten().collect();
            if finite.is_empty() {
                bail!("best_k mode needs at least one finite k");
            }
            let tasks: Vec<u32> = (cfg.n_min..=cfg.n_max).collect();
            let rows = par_map(tasks, |n| {
                let params = ChannelParams::new(cfg.channel, cfg.p, n, cfg.eps, finite[0])?;
                best_over_k(&params, &finite).map(|r| bound_row(n, &r))
            });
            for row in rows {
                lines.push(row?);
            }
        }
        ModeArg::CompareTbr => {
            lines.push(format!("{BOUND_HEADER},tbr_rate"));
            let finite: Vec<u64> = cfg.k_list.iter().copied().flatten().collect();
            if finite.is_empty() {
                bail!("compare_tbr mode needs at least one finite k");
            }
            let tasks: Vec<u32> = (cfg.n_min..=cfg.n_max).collect();
            let rows = par_map(tasks, |n| -> unext::Result<String> {
                let params = ChannelParams::new(cfg.channel, cfg.p, n, cfg.eps, finite[0])?;
                let best = best_over_k(&params, &finite)?;
                let tbr = tbr_limit_bound_with_grid(&params, cfg.t_grid_size)?;
                Ok(format!("{},{}", bound_row(n, &best), num(tbr.rate_per_use)))
            });
            for row in rows {
                lines.push(row?);
            }
        }
    }

    let mut body = lines.join("\n");
    body.push('\n');
    match &cfg.output {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            f.write_all(body.as_bytes())?;
        }
        None => print!("{body}"),
    }
    Ok(())
}
