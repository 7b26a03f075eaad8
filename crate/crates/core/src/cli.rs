//! Command-line front end: `fit`, `predict`, `simulate` and `evaluate`.
//!
//! Any subcommand accepts `--config FILE`, a file of `key=value` lines whose
//! keys are long flag names. Values from the file are applied first, so
//! flags on the command line win.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::boosting::{fit, fit_cv, FitConfig, Lambda};
use crate::data::{load_expression_csv, load_gmt, load_labels, ExpressionDataset, LabelVector, PathwayCollection};
use crate::error::{PkbError, Result};
use crate::evaluation::{evaluate, sweep_lambda, weights_csv};
use crate::kernels::KernelSpec;
use crate::model::PkbModel;
use crate::simulation::{generate, OutcomeRule, SimModel, SimSpec};
use crate::solvers::Penalty;

#[derive(Debug, Parser)]
#[command(name = "pkb", version, about = "Pathway-based kernel boosting classifier", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it with a pathway-weight report.
    Fit(FitArgs),
    /// Score new samples with a trained model.
    Predict(PredictArgs),
    /// Generate a synthetic dataset.
    Simulate(SimulateArgs),
    /// Nested cross-validation: test error and mean pathway weights.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Expression CSV, samples as rows.
    #[arg(long)]
    pub expression: PathBuf,
    /// Pathway definitions in GMT format.
    #[arg(long)]
    pub pathways: PathBuf,
    /// CSV of sample_id,label with labels 1/-1 or 1/0.
    #[arg(long)]
    pub labels: PathBuf,
    /// The expression CSV has genes as rows.
    #[arg(long)]
    pub genes_as_rows: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PenaltyArg {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Rbf,
    Poly3,
    Linear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutcomeArg {
    Bernoulli,
    Sign,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum, default_value = "l1")]
    pub penalty: PenaltyArg,
    #[arg(long, value_enum, default_value = "rbf")]
    pub kernel: KernelArg,
    /// Penalty weight, or `auto`.
    #[arg(long, default_value = "auto")]
    pub lambda: String,
    /// Multiplier applied to λ.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_factor: f64,
    /// Learning rate.
    #[arg(long, default_value_t = 0.05)]
    pub nu: f64,
    #[arg(long, default_value_t = 3)]
    pub inner_folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// λ multipliers scanned by `evaluate --sweep`.
    #[arg(long, value_delimiter = ',', default_value = "0.04,0.2,1,5,25")]
    pub lambda_grid: Vec<f64>,
}

impl TrainArgs {
    fn config(&self, max_iters: usize) -> Result<FitConfig> {
        let lambda = if self.lambda.eq_ignore_ascii_case("auto") {
            Lambda::Auto
        } else {
            let v: f64 = self
                .lambda
                .parse()
                .map_err(|_| PkbError::InvalidConfig(format!("--lambda expects a number or `auto`, got `{}`", self.lambda)))?;
            Lambda::Fixed(v)
        };
        let config = FitConfig {
            penalty: match self.penalty {
                PenaltyArg::L1 => Penalty::L1,
                PenaltyArg::L2 => Penalty::L2,
            },
            lambda,
            lambda_factor: self.lambda_factor,
            nu: self.nu,
            max_iters,
            inner_folds: self.inner_folds,
            kernel: match self.kernel {
                KernelArg::Rbf => KernelSpec::rbf(),
                KernelArg::Poly3 => KernelSpec::poly3(),
                KernelArg::Linear => KernelSpec::linear(),
            },
            seed: self.seed,
            lambda_grid_factors: self.lambda_grid.clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Iterations to run. When absent, chosen by inner cross-validation.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Largest iteration count scanned by cross-validation.
    #[arg(long, default_value_t = 500)]
    pub cv_max_iters: usize,
    #[arg(long)]
    pub model_out: PathBuf,
    /// Pathway-weight CSV; defaults to `<model-out>.weights.csv`.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model_in: PathBuf,
    #[arg(long)]
    pub expression: PathBuf,
    #[arg(long)]
    pub genes_as_rows: bool,
    /// Output CSV of sample_id,score,label.
    #[arg(long)]
    pub predictions_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub sim_model: u8,
    /// Total number of pathways.
    #[arg(long, default_value_t = 50)]
    pub sim_pathways: usize,
    #[arg(long, default_value_t = 5)]
    pub sim_pathway_size: usize,
    #[arg(long, default_value_t = 900)]
    pub sim_n: usize,
    #[arg(long, value_enum, default_value = "bernoulli")]
    pub outcome_rule: OutcomeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub train: TrainArgs,
    /// Largest iteration count scanned by the inner cross-validation.
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 3)]
    pub outer_folds: usize,
    /// Evaluate every λ multiplier of `--lambda-grid`.
    #[arg(long)]
    pub sweep: bool,
    /// Receives folds.csv and weights.csv, plus sweep.csv and one
    /// subdirectory per multiplier with `--sweep`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let args = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
    }
}

/// Replaces `--config FILE` (or `--config=FILE`) by the flags it lists,
/// placed right after the subcommand so explicit flags override them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut files = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => match it.next() {
                Some(path) => files.push(PathBuf::from(path)),
                None => return Err(PkbError::InvalidConfig("--config needs a file".into())),
            },
            Some(s) if s.starts_with("--config=") => files.push(PathBuf::from(&s["--config=".len()..])),
            _ => rest.push(a),
        }
    }
    if files.is_empty() || rest.len() < 2 {
        return Ok(rest);
    }
    let mut injected = Vec::new();
    for file in &files {
        injected.extend(read_config(file)?);
    }
    let mut out: Vec<OsString> = rest.drain(..2).collect();
    out.extend(injected);
    out.extend(rest);
    Ok(out)
}

fn read_config(path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).map_err(|e| PkbError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(PkbError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                column: None,
                message: "expected key=value".into(),
            });
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

fn load_training(data: &DataArgs) -> Result<(ExpressionDataset, PathwayCollection, LabelVector)> {
    let expr = load_expression_csv(&data.expression, !data.genes_as_rows)?;
    let gmt = load_gmt(&data.pathways, &expr)?;
    let labels = load_labels(&data.labels, &expr)?;
    info!(
        "{} samples, {} genes, {} pathways ({} omitted)",
        expr.n_samples(),
        expr.n_genes(),
        gmt.pathways.len(),
        gmt.omitted.len()
    );
    Ok((expr, gmt.pathways, labels))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| PkbError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| PkbError::io(path, e))
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let (expr, pathways, labels) = load_training(&args.data)?;
    let model = match args.max_iters {
        Some(t) => fit(&expr, &pathways, &labels, &args.train.config(t)?)?,
        None => {
            let (model, cv) = fit_cv(&expr, &pathways, &labels, &args.train.config(args.cv_max_iters)?)?;
            info!("refit on all samples for T* = {} iterations", cv.t_star);
            model
        }
    };
    info!("λ = {:.12e}, {} iterations", model.lambda(), model.iterations());
    model.save(&args.model_out)?;
    let report = args.report_out.clone().unwrap_or_else(|| {
        let mut p = args.model_out.clone().into_os_string();
        p.push(".weights.csv");
        PathBuf::from(p)
    });
    write_file(&report, &weights_csv(&model.pathway_weights()))?;
    info!("wrote {} and {}", args.model_out.display(), report.display());
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let model = PkbModel::load(&args.model_in)?;
    let expr = load_expression_csv(&args.expression, !args.genes_as_rows)?;
    let pred = model.predict(&expr)?;
    let mut out = String::from("sample_id,score,label\n");
    for ((id, s), l) in expr.sample_ids().iter().zip(&pred.scores).zip(&pred.labels) {
        let _ = writeln!(out, "{id},{s:.12e},{}", *l as i32);
    }
    write_file(&args.predictions_out, &out)?;
    info!("wrote {} predictions to {}", pred.scores.len(), args.predictions_out.display());
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let spec = SimSpec {
        model: SimModel::from_id(args.sim_model)?,
        n_pathways: args.sim_pathways,
        pathway_size: args.sim_pathway_size,
        n_samples: args.sim_n,
        seed: args.seed,
        outcome: match args.outcome_rule {
            OutcomeArg::Bernoulli => OutcomeRule::Bernoulli,
            OutcomeArg::Sign => OutcomeRule::Sign,
        },
    };
    let sim = generate(&spec)?;
    sim.write(&args.out_dir, &spec)?;
    info!("wrote simulated data to {}", args.out_dir.display());
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let (expr, pathways, labels) = load_training(&args.data)?;
    let config = args.train.config(args.max_iters)?;
    if args.sweep {
        let sweep = sweep_lambda(&expr, &pathways, &labels, &config, args.outer_folds)?;
        sweep.write(&args.out_dir)?;
        let best = sweep.best();
        info!(
            "best λ multiplier {}: mean test error {:.12e}; reports in {}",
            sweep.factors[best],
            sweep.runs[best].mean_error,
            args.out_dir.display()
        );
        return Ok(());
    }
    let ev = evaluate(&expr, &pathways, &labels, &config, args.outer_folds)?;
    ev.write(&args.out_dir)?;
    info!("mean test error {:.12e}; reports in {}", ev.mean_error, args.out_dir.display());
    Ok(())
}
