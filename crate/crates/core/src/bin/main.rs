//! Experiment CLI.
//!
//! Subcommands:
//!   validate-rate   closed-form ergodic rate vs Monte-Carlo, M in {2, 4, 6}
//!   optimize        two-timescale alternating optimization over drops
//!   sweep           sweep experiment with algorithm baselines, CSV output
//!   moments         channel moment-identity oracle table
//!
//! Common flags: --config PATH, --seed U64, --drops N, --samples N,
//! --out PATH, --algo NAMES. `sweep` adds --axis and --values, `optimize`
//! adds --intervals.

use cellfree_ris::channel::{PhaseConfig, PowerAllocation};
use cellfree_ris::harness::{
    alternating_optimize, run_experiment, Algo, AoOpts, ExperimentSpec, SweepAxis,
};
use cellfree_ris::rate::{
    closed_form_rate, closed_form_terms, moment_oracle, moment_rows_to_csv, monte_carlo_rate, McMode,
};
use cellfree_ris::scenario::{
    build_statistics, default_config, load_scenario, place_nodes, LayoutSpec, SystemConfig,
};
use cellfree_ris::seqrng::{mean_se, mix};
use cellfree_ris::{channel, CoreError};
use std::path::PathBuf;
use std::process::ExitCode;

struct Args {
    config: Option<PathBuf>,
    seed: u64,
    drops: usize,
    samples: usize,
    intervals: usize,
    out: Option<PathBuf>,
    algos: Vec<String>,
    axis: String,
    values: String,
}

impl Default for Args {
    fn default() -> Self {
        Self {
            config: None,
            seed: 1,
            drops: 20,
            samples: 10_000,
            intervals: 10,
            out: None,
            algos: vec!["proposed".into(), "uniform-power".into(), "random-phases".into()],
            axis: "none".into(),
            values: String::new(),
        }
    }
}

fn usage() -> &'static str {
    "usage: cellfree-ris <validate-rate|optimize|sweep|moments> [options]\n\
     options:\n\
       --config PATH     scenario file (key = value; see README)\n\
       --seed U64        base seed (default 1)\n\
       --drops N         number of drops (default 20)\n\
       --samples N       Monte-Carlo samples (default 10000)\n\
       --intervals N     coherence intervals per frame (default 10)\n\
       --out PATH        write CSV here (default: stdout)\n\
       --algo NAMES      comma-separated: proposed,uniform-power,random-phases,no-ris,das,centralized\n\
       --axis NAME       sweep axis: none|m|n|p_dbm|k_factor|cluster_x\n\
       --values LIST     comma-separated sweep values\n"
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut args = Args::default();
    let mut it = argv.iter();
    while let Some(flag) = it.next() {
        let mut value = || it.next().ok_or_else(|| format!("missing value for {flag}"));
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(value()?)),
            "--seed" => args.seed = value()?.parse().map_err(|e| format!("--seed: {e}"))?,
            "--drops" => args.drops = value()?.parse().map_err(|e| format!("--drops: {e}"))?,
            "--samples" => args.samples = value()?.parse().map_err(|e| format!("--samples: {e}"))?,
            "--intervals" => args.intervals = value()?.parse().map_err(|e| format!("--intervals: {e}"))?,
            "--out" => args.out = Some(PathBuf::from(value()?)),
            "--algo" => args.algos = value()?.split(',').map(|s| s.trim().to_string()).collect(),
            "--axis" => args.axis = value()?.to_string(),
            "--values" => args.values = value()?.to_string(),
            other => return Err(format!("unknown flag '{other}'\n{}", usage())),
        }
    }
    Ok(args)
}

fn load(args: &Args) -> Result<(SystemConfig, LayoutSpec), CoreError> {
    match &args.config {
        Some(path) => load_scenario(path),
        None => Ok((default_config(), LayoutSpec::UniformRandom)),
    }
}

fn emit(out: &Option<PathBuf>, csv: &str) -> Result<(), CoreError> {
    match out {
        Some(path) => {
            std::fs::write(path, csv)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Deterministic equal-average-power coefficients
/// `eta_ks = P / (K (||h_bar_ks||^2 + M chi_ks))`.
fn statistical_equal_power(
    stats: &cellfree_ris::scenario::StatisticalCsi,
    phases: &PhaseConfig,
) -> Result<PowerAllocation, CoreError> {
    let cfg = &stats.config;
    let ones = PowerAllocation::new(vec![1.0; cfg.k * cfg.s], cfg.k, cfg.s)?;
    let terms = closed_form_terms(stats, phases, &ones)?;
    let mut eta = vec![0.0; cfg.k * cfg.s];
    for k in 0..cfg.k {
        for s in 0..cfg.s {
            let mean_power = cellfree_ris::linalg::vec::norm2(&terms.h_bar[k * cfg.s + s])
                + cfg.m as f64 * stats.chi[stats.idx_ks(k, s)];
            eta[k * cfg.s + s] = cfg.p_max / (cfg.k as f64 * mean_power);
        }
    }
    PowerAllocation::new(eta, cfg.k, cfg.s)
}

fn cmd_validate_rate(args: &Args) -> Result<(), CoreError> {
    let (base, layout) = load(args)?;
    let mut csv = String::from("m,user,closed_form_bps_hz,monte_carlo_bps_hz,mc_se,rel_gap\n");
    for &m in &[2usize, 4, 6] {
        let mut cfg = base.clone();
        cfg.m = m;
        let geom = place_nodes(&cfg, &layout, args.seed)?;
        let stats = build_statistics(&cfg, &geom)?;
        let phases = PhaseConfig::random(cfg.l, cfg.n(), mix(args.seed, m as u64));
        let eta = statistical_equal_power(&stats, &phases)?;
        let terms = closed_form_terms(&stats, &phases, &eta)?;
        let cf = closed_form_rate(&terms, &cfg);
        let mc = monte_carlo_rate(
            &stats,
            &phases,
            &eta,
            args.samples,
            mix(args.seed, 77 + m as u64),
            McMode::MomentRatio,
        )?;
        for k in 0..cfg.k {
            let gap = (cf.rate[k] - mc.rate[k]).abs() / mc.rate[k].max(1e-300);
            csv.push_str(&format!(
                "{m},{k},{:.8e},{:.8e},{:.2e},{:.4e}\n",
                cf.rate[k], mc.rate[k], mc.se[k], gap
            ));
        }
        let sum_gap = (cf.weighted_sum - mc.weighted_sum).abs() / mc.weighted_sum;
        eprintln!(
            "M = {m}: closed-form WSR {:.4} vs MC {:.4} (gap {:.3}%)",
            cf.weighted_sum,
            mc.weighted_sum,
            100.0 * sum_gap
        );
    }
    emit(&args.out, &csv)
}

fn cmd_moments(args: &Args) -> Result<(), CoreError> {
    let (cfg, layout) = load(args)?;
    let geom = place_nodes(&cfg, &layout, args.seed)?;
    let stats = build_statistics(&cfg, &geom)?;
    let phases = PhaseConfig::random(cfg.l, cfg.n(), mix(args.seed, 3));
    let rows = moment_oracle(&stats, &phases, args.samples.max(1000), mix(args.seed, 4))?;
    let csv = moment_rows_to_csv(&rows);
    let worst = rows.iter().map(|r| r.z).fold(0.0f64, f64::max);
    eprintln!("{} identities, worst z-score {:.2}", rows.len(), worst);
    emit(&args.out, &csv)
}

fn cmd_optimize(args: &Args) -> Result<(), CoreError> {
    let (cfg, layout) = load(args)?;
    let mut finals = Vec::new();
    let mut csv = String::from("drop,round,avg_wsr_bps_hz\n");
    for d in 0..args.drops as u64 {
        let drop_seed = mix(args.seed, d);
        let geom = place_nodes(&cfg, &layout, drop_seed)?;
        let stats = build_statistics(&cfg, &geom)?;
        let reals: Vec<_> = (0..args.intervals)
            .map(|t| channel::sample_channels(&stats, mix(drop_seed, 0x1000 + t as u64)))
            .collect();
        let opts = AoOpts { seed: drop_seed, ..Default::default() };
        let res = alternating_optimize(&stats, &reals, &cfg, &opts)?;
        for (round, value) in res.trace.iter().enumerate() {
            csv.push_str(&format!("{d},{round},{value:.8e}\n"));
        }
        eprintln!(
            "drop {d}: avg WSR {:.4} bits/s/Hz after {} rounds (converged: {})",
            res.trace.last().unwrap(),
            res.rounds,
            res.converged
        );
        finals.push(*res.trace.last().unwrap());
    }
    let (mean, se) = mean_se(&finals);
    eprintln!("mean over {} drops: {:.4} +- {:.4} bits/s/Hz", args.drops, mean, se);
    emit(&args.out, &csv)
}

fn cmd_sweep(args: &Args) -> Result<(), CoreError> {
    let (base, layout) = load(args)?;
    let parse_floats = |text: &str| -> Result<Vec<f64>, CoreError> {
        text.split(',')
            .filter(|v| !v.trim().is_empty())
            .map(|v| v.trim().parse::<f64>().map_err(|e| CoreError::Spec(format!("--values: {e}"))))
            .collect()
    };
    let axis = match args.axis.as_str() {
        "none" => SweepAxis::None,
        "m" => SweepAxis::BsAntennas(parse_floats(&args.values)?.iter().map(|&v| v as usize).collect()),
        "n" => SweepAxis::RisElements(
            parse_floats(&args.values)?
                .iter()
                .map(|&v| {
                    let n = v as usize;
                    let r = (n as f64).sqrt() as usize;
                    if r * r == n {
                        (r, r)
                    } else {
                        (n, 1)
                    }
                })
                .collect(),
        ),
        "p_dbm" => SweepAxis::PowerDbm(parse_floats(&args.values)?),
        "k_factor" => SweepAxis::KFactor(parse_floats(&args.values)?),
        "cluster_x" => SweepAxis::UeClusterX(parse_floats(&args.values)?),
        other => return Err(CoreError::Spec(format!("unknown axis '{other}'"))),
    };
    let algos: Result<Vec<Algo>, CoreError> = args.algos.iter().map(|a| Algo::parse(a)).collect();
    let spec = ExperimentSpec {
        base,
        layout,
        axis,
        algos: algos?,
        drops: args.drops,
        intervals: args.intervals,
        seed: args.seed,
        ao: AoOpts::default(),
    };
    let result = run_experiment(&spec)?;
    emit(&args.out, &result.to_csv())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = argv.first().cloned() else {
        eprintln!("{}", usage());
        return ExitCode::FAILURE;
    };
    let args = match parse_args(&argv[1..]) {
        Ok(args) => args,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::FAILURE;
        }
    };
    let result = match command.as_str() {
        "validate-rate" => cmd_validate_rate(&args),
        "optimize" => cmd_optimize(&args),
        "sweep" => cmd_sweep(&args),
        "moments" => cmd_moments(&args),
        other => {
            eprintln!("unknown command '{other}'\n{}", usage());
            return ExitCode::FAILURE;
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
