//! The `avlab` command line: argument model and command implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use avlab_core::curves::{attainability_curves, au_score_curves, curve_csv, CurvePoint};
use avlab_core::data::{
    builtin_scenarios, load_responses, load_scenario, render_report, responses_to_csv, scenario_a, scenario_b,
    write_atomic, write_report, ReportFormat,
};
use avlab_core::fitting::{fit_model, ModelKind, ResponseRecord};
use avlab_core::heuristics::{au_ballot, aut_ballot, complete_ballot, take_x_best, ModelParams, DEFAULT_EPSILON};
use avlab_core::synth::{generate_synthetic_cohort, CohortSpec, ParamRanges, WinnerAssignment};
use avlab_core::tables::{au_prediction_map, optimal_table};
use avlab_core::{evaluate_cohort, optimal_ballot, Scenario};
use avlab_service::ServiceConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Heuristic models of approval-voting behaviour.
#[derive(Debug, Parser)]
#[command(name = "avlab", version)]
pub struct Cli {
    /// Seed for anything random (synthetic cohorts, service draws).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "builtin")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario id.
    #[arg(long, value_parser = ["A", "B"])]
    pub builtin: Option<String>,
    /// Override the number of winners.
    #[arg(long)]
    pub k: Option<usize>,
    /// Override the number of missing ballots.
    #[arg(long)]
    pub missing: Option<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PredictModel {
    Complete,
    Takex,
    Au,
    Aut,
    Optimal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FitModel {
    Au,
    Aut,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Assignment {
    All,
    FirstThenOne,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predict a ballot for one scenario.
    Predict {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum)]
        model: PredictModel,
        /// Number of candidates for `takex`.
        #[arg(long)]
        x: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// AU prediction map over the α × β grid.
    Table2 {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Maximum expected utility for both built-in scenarios.
    Table4,
    /// Curve CSV: 1 = attainability vs share, 2 = AU scores vs β.
    Curves {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        figure: u8,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Fit AU or AUT per (voter, k) block.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        model: FitModel,
    },
    /// Leave-one-out accuracy of all five models.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        /// Also write the report here; `.json` selects JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate a synthetic response dataset.
    Simulate {
        #[arg(long, default_value_t = 100)]
        voters: usize,
        #[arg(long, value_parser = parse_model)]
        model: ModelKind,
        /// Probability of replacing a ballot with a uniform random one.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        beta_min: Option<u32>,
        #[arg(long)]
        beta_max: Option<u32>,
        #[arg(long)]
        tau_min: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        /// Start from the AUT ranges that leave-one-out recovers exactly.
        #[arg(long)]
        recoverable: bool,
        #[arg(long, value_enum, default_value = "all")]
        assignment: Assignment,
    },
    /// Run the experiment service.
    Serve {
        #[arg(long, env = "AVLAB_PORT")]
        port: Option<u16>,
        /// JSON service configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        shuffle: bool,
    },
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: avlab_core::Error| e.to_string())
}

/// A missing or inconsistent flag; the binary reports it with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: String) -> anyhow::Error {
    UsageError(message).into()
}

fn required<T>(v: Option<T>, flag: &str, model: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required for --model {model}")))
}

impl ScenarioArgs {
    fn load(&self, default: Option<&str>) -> Result<Scenario> {
        let base = match (&self.scenario, self.builtin.as_deref().or(default)) {
            (Some(path), _) => load_scenario(path)?,
            (None, Some(id)) => builtin_scenarios()
                .remove(id)
                .ok_or_else(|| anyhow!("unknown built-in scenario `{id}`"))?,
            (None, None) => return Err(usage("one of --scenario or --builtin is required".into())),
        };
        if self.k.is_none() && self.missing.is_none() {
            return Ok(base);
        }
        let k = self.k.unwrap_or(base.winners);
        let missing = self.missing.unwrap_or(base.tally.missing_ballots);
        Ok(base.with_condition(k, missing)?)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn params_text(p: &ModelParams, model: FitModel) -> String {
    match model {
        FitModel::Au => format!("alpha={} beta={}", p.alpha, p.beta),
        FitModel::Aut => format!("beta={} tau={}", p.beta, p.tau),
    }
}

#[allow(clippy::too_many_arguments)]
fn predict(
    args: &ScenarioArgs,
    model: PredictModel,
    x: Option<usize>,
    alpha: Option<f64>,
    beta: Option<f64>,
    tau: Option<f64>,
    epsilon: f64,
    as_json: bool,
) -> Result<String> {
    // Flag checks come first so a usage error wins over a bad scenario.
    let params = match model {
        PredictModel::Au => Some(ModelParams::au(required(alpha, "alpha", "au")?, required(beta, "beta", "au")?)),
        PredictModel::Aut => Some(ModelParams::aut(required(beta, "beta", "aut")?, required(tau, "tau", "aut")?)),
        PredictModel::Takex => {
            required(x, "x", "takex")?;
            None
        }
        _ => None,
    }
    .map(|p| p.with_epsilon(epsilon));
    if let Some(p) = &params {
        p.validate()?;
    }
    let s = args.load(None)?;
    let (ballot, value) = match model {
        PredictModel::Complete => (complete_ballot(&s), None),
        PredictModel::Takex => (take_x_best(&s, x.expect("checked"))?, None),
        PredictModel::Au => (au_ballot(&s, params.as_ref().expect("set"))?, None),
        PredictModel::Aut => (aut_ballot(&s, params.as_ref().expect("set"))?, None),
        PredictModel::Optimal => {
            let (b, v) = optimal_ballot(&s);
            (b, Some(v))
        }
    };
    let encoded = s.candidates.format_ballot(ballot);
    if as_json {
        return pretty(&json!({
            "scenarioId": s.id,
            "k": s.winners,
            "missing": s.tally.missing_ballots,
            "model": format!("{model:?}").to_lowercase(),
            "ballot": s.candidates.ballot_labels(ballot),
            "encoded": encoded,
            "params": params,
            "value": value,
        }));
    }
    Ok(match value {
        Some(v) => format!("{encoded} {v:.4}\n"),
        None => format!("{encoded}\n"),
    })
}

fn fit(data: &Path, model: FitModel, as_json: bool) -> Result<String> {
    let scenarios = builtin_scenarios();
    let records = load_responses(data, &scenarios)?;
    let mut blocks: BTreeMap<(String, u32), Vec<ResponseRecord>> = BTreeMap::new();
    for r in records {
        blocks.entry((r.voter_id.clone(), r.winners)).or_default().push(r);
    }
    let kind = match model {
        FitModel::Au => ModelKind::Au,
        FitModel::Aut => ModelKind::Aut,
    };
    let mut rows = Vec::with_capacity(blocks.len());
    for ((voter, k), block) in &blocks {
        let fit = fit_model(kind, block, &scenarios)?;
        rows.push((voter, *k, fit));
    }
    if as_json {
        let v: Vec<_> = rows
            .iter()
            .map(|(voter, k, f)| json!({ "voterId": voter, "winners": k, "params": f.params, "hits": f.hits, "total": f.total }))
            .collect();
        return pretty(&v);
    }
    let mut text = String::from("voter\tk\tparams\thits\n");
    for (voter, k, f) in rows {
        let p = f.params.expect("fitted models carry parameters");
        text += &format!("{voter}\t{k}\t{}\t{}/{}\n", params_text(&p, model), f.hits, f.total);
    }
    Ok(text)
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    seed: u64,
    voters: usize,
    model: ModelKind,
    noise: f64,
    alphas: Option<Vec<f64>>,
    beta: (Option<u32>, Option<u32>),
    tau: (Option<f64>, Option<f64>),
    recoverable: bool,
    assignment: Assignment,
    as_json: bool,
) -> Result<String> {
    let mut ranges = if recoverable {
        ParamRanges::recoverable_aut()
    } else {
        ParamRanges::default()
    };
    if let Some(a) = alphas {
        ranges.alphas = a;
    }
    ranges.beta = (beta.0.unwrap_or(ranges.beta.0), beta.1.unwrap_or(ranges.beta.1));
    ranges.tau = (tau.0.unwrap_or(ranges.tau.0), tau.1.unwrap_or(ranges.tau.1));
    let mut spec = CohortSpec::new(voters, model, seed);
    spec.ranges = ranges;
    spec.noise = noise;
    spec.assignment = match assignment {
        Assignment::All => WinnerAssignment::All,
        Assignment::FirstThenOne => WinnerAssignment::FirstThenOne,
    };
    let records = generate_synthetic_cohort(&spec, &builtin_scenarios())?;
    if as_json {
        pretty(&records)
    } else {
        Ok(responses_to_csv(&records))
    }
}

fn serve(
    seed: Option<u64>,
    port: Option<u16>,
    config: Option<&Path>,
    data_dir: Option<PathBuf>,
    shuffle: bool,
) -> Result<()> {
    let mut cfg = match config {
        Some(path) => ServiceConfig::from_file(path)?,
        None => ServiceConfig::default(),
    }
    .with_env()?;
    if let Some(p) = port {
        cfg.port = p;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if data_dir.is_some() {
        cfg.data_dir = data_dir;
    }
    cfg.shuffle |= shuffle;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(avlab_service::serve(cfg))?;
    Ok(())
}

/// Runs `cli`: renders the output of a one-shot command and writes it to
/// `--out` or stdout, or serves until shutdown.
pub fn run(cli: Cli) -> Result<()> {
    if let Command::Serve {
        port,
        config,
        data_dir,
        shuffle,
    } = cli.command
    {
        return serve(cli.seed, port, config.as_deref(), data_dir, shuffle);
    }
    let text = render(&cli)?;
    emit(cli.out.as_deref(), &text)
}

/// Parses `args` (program name first) and returns what the command would
/// print. `--out` is ignored; `serve` is rejected.
pub fn output_of<I, T>(args: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    render(&Cli::try_parse_from(args)?)
}

fn render(cli: &Cli) -> Result<String> {
    let text = match &cli.command {
        Command::Predict {
            scenario,
            model,
            x,
            alpha,
            beta,
            tau,
            epsilon,
        } => predict(scenario, *model, *x, *alpha, *beta, *tau, *epsilon, cli.json)?,
        Command::Table2 { scenario, epsilon } => {
            let map = au_prediction_map(&scenario.load(Some("A"))?, *epsilon)?;
            if cli.json {
                pretty(&map)?
            } else {
                map.to_text()
            }
        }
        Command::Table4 => {
            let table = optimal_table(&[scenario_a(), scenario_b()])?;
            if cli.json {
                pretty(&table)?
            } else {
                table.to_text()
            }
        }
        Command::Curves { figure, scenario } => {
            let points: Vec<CurvePoint> = match *figure {
                1 => attainability_curves(),
                _ => au_score_curves(&scenario.load(Some("B"))?)?,
            };
            if cli.json {
                pretty(&points)?
            } else {
                curve_csv(&points)
            }
        }
        Command::Fit { data, model } => fit(data, *model, cli.json)?,
        Command::Evaluate { data, report } => {
            let scenarios = builtin_scenarios();
            let records = load_responses(data, &scenarios)?;
            let result = evaluate_cohort(&records, &scenarios)?;
            if let Some(path) = report {
                write_report(&result, path)?;
            }
            let format = if cli.json { ReportFormat::Json } else { ReportFormat::Text };
            render_report(&result, format)
        }
        Command::Simulate {
            voters,
            model,
            noise,
            alphas,
            beta_min,
            beta_max,
            tau_min,
            tau_max,
            recoverable,
            assignment,
        } => simulate(
            cli.seed.unwrap_or(0),
            *voters,
            *model,
            *noise,
            alphas.clone(),
            (*beta_min, *beta_max),
            (*tau_min, *tau_max),
            *recoverable,
            *assignment,
            cli.json,
        )?,
        Command::Serve { .. } => return Err(usage("serve has no rendered output".into())),
    };
    Ok(text)
}
