//! `market`: evaluate, optimize, and validate the consumer-choice market
//! model from the command line.

mod config;
mod figures;
mod output;
mod sweep;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use config::{ScenarioConfig, Section};
use market_model::closed_form::optimal_price_quality;
use market_model::model::expected_profit_multi;
use market_model::montecarlo::{simulate_market, simulate_spam};
use market_model::optimizer::{
    best_variant_count, differentiation_decision, maximize_price_quality, maximize_qualities_with,
};
use market_model::spam::{spam_optimal_quality, spam_profit};
use output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "market",
    version,
    about = "Probabilistic consumer-choice market model: profit evaluation, quality/price optimization, phase diagrams, preset datasets, and Monte Carlo validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the dataset here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for sweeps and simulations (default: RAYON_NUM_THREADS
    /// or all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for simulation commands
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Expected profit of a configured product line
    Eval {
        #[arg(long)]
        config: PathBuf,
    },
    /// Maximize profit over the displayed qualities
    Optimize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Optimal profit for every variant count up to a maximum
    Variants {
        #[arg(long)]
        config: PathBuf,
        /// Overrides [display] m_max
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Production phase: nothing (0), one variant (1), or two (2)
    Phase {
        #[arg(long)]
        config: PathBuf,
    },
    /// Jointly optimize price and quality (homogeneous population)
    Price {
        #[arg(long)]
        config: PathBuf,
    },
    /// Optimal repeated-display strategy
    Spam {
        #[arg(long)]
        config: PathBuf,
    },
    /// Reproduce one of the built-in preset datasets
    Figure {
        /// Preset id: f2, f3, f4, f6, f7a, f7b, f8a, f8b, f10, f11, or f13
        id: String,
    },
    /// Run a configured 1-D or 2-D parameter sweep
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Cross-check the analytic expectation against Monte Carlo sampling
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Buyers to simulate (default: [population] n_buyers, else 1e6)
        #[arg(long)]
        buyers: Option<u64>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();

    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        // ignore the error if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some() {
        eprintln!("note: built without the parallel feature; --threads is ignored");
    }

    let (table, mut meta, config_output) = dispatch(&cli)?;
    meta["version"] = json!(env!("CARGO_PKG_VERSION"));

    let format = cli
        .format
        .or(config_output.as_ref().and_then(|o| o.format))
        .unwrap_or(Format::Csv);
    let out_path = cli.out.clone().or(config_output.and_then(|o| o.path));

    let mut payload = Vec::new();
    match format {
        Format::Csv => table.write_csv(&mut payload)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut payload, &table.to_json(meta))?;
            payload.push(b'\n');
        }
    }
    match out_path {
        Some(path) => std::fs::write(&path, payload)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().write_all(&payload)?,
    }
    Ok(())
}

type Dispatched = (Table, serde_json::Value, Option<config::OutputSpec>);

fn dispatch(cli: &Cli) -> Result<Dispatched> {
    match &cli.command {
        Command::Eval { config } => {
            let cfg = ScenarioConfig::load(config)?;
            cfg.require(&[Section::Population, Section::Product, Section::Cost], &[])?;
            let pop = cfg.population()?;
            let cost = cfg.cost()?;
            let line = cfg.product_line()?;
            let x = expected_profit_multi(&line, &pop, &cost)?;
            let mut table = Table::new(&["x", "total_profit", "n_buyers"]);
            table.push(vec![
                x.into(),
                (x * pop.n_buyers() as f64).into(),
                pop.n_buyers().into(),
            ]);
            Ok((table, json!({"command": "eval", "config": cfg}), cfg.output))
        }
        Command::Optimize { config } => {
            let cfg = ScenarioConfig::load(config)?;
            cfg.require(&[Section::Population, Section::Display, Section::Cost], &[])?;
            let pop = cfg.population()?;
            let cost = cfg.cost()?;
            let d = cfg.display.as_ref().unwrap();
            let m = d.m.context("[display] needs m")?;
            let r = maximize_qualities_with(
                m,
                &pop,
                &cost,
                d.weights.as_deref(),
                d.price.unwrap_or(1.0),
                d.beta.unwrap_or(1.0),
                d.gamma.unwrap_or(1.0),
            )?;
            let mut columns: Vec<String> = vec!["rank".into(), "x".into()];
            for i in 0..m {
                columns.push(format!("q{}", i + 1));
            }
            columns.push("distinct_qualities".into());
            let mut table = Table {
                columns,
                rows: Vec::new(),
            };
            for (rank, lm) in r.local_maxima.iter().enumerate() {
                let mut row: Vec<Cell> = vec![(rank as u64).into(), lm.value.into()];
                for &q in &lm.argument {
                    row.push(q.into());
                }
                row.push(distinct_levels(&lm.argument).into());
                table.push(row);
            }
            Ok((
                table,
                json!({"command": "optimize", "config": cfg}),
                cfg.output,
            ))
        }
        Command::Variants { config, m_max } => {
            let cfg = ScenarioConfig::load(config)?;
            cfg.require(&[Section::Population, Section::Cost], &[Section::Display])?;
            let pop = cfg.population()?;
            let cost = cfg.cost()?;
            let m_max = m_max
                .or(cfg.display.as_ref().and_then(|d| d.m_max))
                .context("pass --m-max or set [display] m_max")?;
            let counts = best_variant_count(m_max, &pop, &cost)?;
            let mut table = Table::new(&[
                "m",
                "x_star",
                "q_low",
                "q_high",
                "distinct_qualities",
                "chosen",
            ]);
            for (i, r) in counts.results.iter().enumerate() {
                table.push(vec![
                    (i as u64 + 1).into(),
                    r.global_value.into(),
                    r.global_arg[0].into(),
                    (*r.global_arg.last().unwrap()).into(),
                    (r.distinct_qualities as u64).into(),
                    (u64::from(i + 1 == counts.chosen_m)).into(),
                ]);
            }
            Ok((
                table,
                json!({"command": "variants", "m_max": m_max, "config": cfg}),
                cfg.output,
            ))
        }
        Command::Phase { config } => {
            let cfg = ScenarioConfig::load(config)?;
            cfg.require(&[Section::Population, Section::Cost], &[Section::Display])?;
            let pop = cfg.population()?;
            let cost = cfg.cost()?;
            let weights = cfg.display.as_ref().and_then(|d| d.weights.clone());
            let phase = differentiation_decision(&pop, &cost, weights.as_deref())?;
            let one = maximize_qualities_with(1, &pop, &cost, None, 1.0, 1.0, 1.0)?;
            let two = maximize_qualities_with(2, &pop, &cost, weights.as_deref(), 1.0, 1.0, 1.0)?;
            let mut table = Table::new(&["phase", "x1_star", "x2_star", "q2_low", "q2_high"]);
            table.push(vec![
                (phase.label() as u64).into(),
                one.global_value.into(),
                two.global_value.into(),
                two.global_arg[0].into(),
                two.global_arg[1].into(),
            ]);
            Ok((
                table,
                json!({"command": "phase", "config": cfg}),
                cfg.output,
            ))
        }
        Command::Price { config } => {
            let cfg = ScenarioConfig::load(config)?;
            cfg.require(&[Section::Population, Section::Cost], &[])?;
            let pop = cfg.population()?;
            let cost = cfg.cost()?;
            let r = maximize_price_quality(&pop, &cost)?;
            let closed = optimal_price_quality(pop.groups()[0].alpha())?;
            let mut table = Table::new(&["q_star", "p_star", "x_star", "q_closed", "p_closed"]);
            table.push(vec![
                r.global_arg[0].into(),
                r.global_arg[1].into(),
                r.global_value.into(),
                closed.q_star.into(),
                closed.p_star.into(),
            ]);
            Ok((
                table,
                json!({"command": "price", "config": cfg}),
                cfg.output,
            ))
        }
        Command::Spam { config } => {
            let cfg = ScenarioConfig::load(config)?;
            cfg.require(&[Section::Spam], &[])?;
            let scenario = cfg.spam_scenario()?;
            let opt = spam_optimal_quality(&scenario)?;
            let mut table = Table::new(&[
                "q_star",
                "m_star",
                "x_star",
                "m_star_formula",
                "q_root",
                "b",
            ]);
            table.push(vec![
                opt.q_star.into(),
                opt.m_star.into(),
                opt.x_star.into(),
                opt.m_star_real.into(),
                opt.q_root.unwrap_or(f64::NAN).into(),
                opt.b.into(),
            ]);
            Ok((table, json!({"command": "spam", "config": cfg}), cfg.output))
        }
        Command::Figure { id } => {
            let (table, params) = figures::run_figure(id)?;
            Ok((
                table,
                json!({"command": "figure", "id": id, "parameters": params}),
                None,
            ))
        }
        Command::Sweep { config } => {
            let cfg = ScenarioConfig::load(config)?;
            cfg.require(
                &[Section::Population, Section::Cost, Section::Sweep],
                &[Section::Product, Section::Display],
            )?;
            let (table, meta) = sweep::run_sweep(&cfg)?;
            Ok((
                table,
                json!({"command": "sweep", "sweep": meta, "config": cfg}),
                cfg.output,
            ))
        }
        Command::Validate { config, buyers } => {
            let cfg = ScenarioConfig::load(config)?;
            let table = run_validate(&cfg, *buyers, cli.seed)?;
            Ok((
                table,
                json!({"command": "validate", "seed": cli.seed, "config": cfg}),
                cfg.output.clone(),
            ))
        }
    }
}

fn distinct_levels(qualities: &[f64]) -> u64 {
    let mut qs = qualities.to_vec();
    qs.sort_by(f64::total_cmp);
    let mut distinct = 1u64;
    for w in qs.windows(2) {
        if w[1] - w[0] > market_model::optimizer::DISTINCT_QUALITY_TOL {
            distinct += 1;
        }
    }
    distinct
}

fn run_validate(cfg: &ScenarioConfig, buyers: Option<u64>, seed: u64) -> Result<Table> {
    let mut table = Table::new(&[
        "kind",
        "analytic",
        "sampled",
        "standard_error",
        "deviation_se",
        "pass",
    ]);
    if let Some(spec) = &cfg.spam {
        cfg.require(&[Section::Spam], &[])?;
        let scenario = cfg.spam_scenario()?;
        let (q, m) = match (spec.quality, spec.m) {
            (Some(q), Some(m)) => (q, m),
            _ => {
                let opt = spam_optimal_quality(&scenario)?;
                (
                    spec.quality.unwrap_or(opt.q_star),
                    spec.m.unwrap_or(opt.m_star),
                )
            }
        };
        let n = buyers.unwrap_or(1_000_000);
        let expected = spam_profit(q, m, &scenario)?;
        let report = simulate_spam(&scenario, q, m, n, seed)?;
        push_validation_row(&mut table, "spam", expected, &report);
    } else {
        cfg.require(&[Section::Population, Section::Product, Section::Cost], &[])?;
        let pop = cfg.population()?;
        let cost = cfg.cost()?;
        let line = cfg.product_line()?;
        let n = buyers
            .or(cfg.population.as_ref().and_then(|p| p.n_buyers))
            .unwrap_or(1_000_000);
        let expected = expected_profit_multi(&line, &pop, &cost)?;
        let report = simulate_market(&line, &pop, &cost, n, seed)?;
        push_validation_row(&mut table, "market", expected, &report);
    }
    Ok(table)
}

fn push_validation_row(
    table: &mut Table,
    kind: &str,
    expected: f64,
    report: &market_model::SimulationReport,
) {
    let dev = (report.profit_per_buyer - expected).abs() / report.standard_error;
    table.push(vec![
        kind.into(),
        expected.into(),
        report.profit_per_buyer.into(),
        report.standard_error.into(),
        dev.into(),
        u64::from(dev < 4.0).into(),
    ]);
}
