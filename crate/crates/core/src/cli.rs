//! Command-line front end behind the `rscf` binary.
//!
//! Exit status is 0 on success, 2 for configuration problems and 3 for
//! failures while running.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{optimize_delta, run_trials, single_trial, sweep_error_variance, sweep_snr, SweepMetadata, SweepResult};
use crate::output::{emit_curve, emit_results, metadata_json, sidecar_path, write_sink, CurveReport, Format};
use crate::scenario::{load_scenario, parse_override, parse_scenario, Scenario};

#[derive(Debug, Parser)]
#[command(name = "rscf", version, about = "Rate-splitting sum-rate simulator for cell-free and colocated MU-MIMO")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// ESR of every variant over the `snr_db` list.
    SweepSnr,
    /// ESR of every variant over the `sigma_e2` list at one SNR.
    SweepError,
    /// Full ESR-versus-delta curve of the configured variant.
    OptimizeDelta,
    /// One channel realization at one SNR.
    SingleTrial,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML). Without it every key takes its default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a scenario key, e.g. `--set snr_db=[0,10,20]`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// What a finished command reports on stderr.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub command: Command,
    pub variants: Vec<String>,
    pub points: usize,
    pub seed: u64,
    pub guarded: usize,
    pub out: Option<PathBuf>,
}

impl Summary {
    fn line(&self, seconds: f64) -> String {
        let sink = self.out.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
        format!(
            "{:?}: variants [{}], {} points, seed {}, {:.2} s, {} guarded SINRs -> {}",
            self.command,
            self.variants.join(", "),
            self.points,
            self.seed,
            seconds,
            self.guarded,
            sink
        )
    }
}

pub fn load(common: &CommonArgs) -> Result<Scenario> {
    let overrides = common.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>>>()?;
    let mut scenario = match &common.config {
        Some(path) => load_scenario(path, &overrides)?,
        None => parse_scenario("", &overrides)?,
    };
    if let Some(seed) = common.seed {
        scenario.config.seed = seed;
    }
    Ok(scenario)
}

fn single(list: &[f64], key: &str, command: &str) -> Result<()> {
    if list.len() == 1 {
        Ok(())
    } else {
        Err(Error::config(key, format!("{command} takes a single value, got {} values", list.len())))
    }
}

fn write_sweep(result: &SweepResult, format: Format, out: Option<&PathBuf>) -> Result<()> {
    write_sink(out.map(PathBuf::as_path), &emit_results(result, format)?)?;
    if let (Format::Csv, Some(path)) = (format, out) {
        write_sink(Some(&sidecar_path(path)), &metadata_json(&result.metadata)?)?;
    }
    Ok(())
}

/// Runs one command to completion, writing its output.
pub fn execute(command: Command, common: &CommonArgs) -> Result<Summary> {
    let scenario = load(common)?;
    let format = common.format.or(scenario.format).unwrap_or_default();
    let out = common.out.clone().or(scenario.output.clone());
    let base = &scenario.config;
    let labels = |vs: &[crate::experiment::Variant]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>();

    let result = match command {
        Command::SweepSnr => {
            single(&scenario.sigma_e2, "sigma_e2", "sweep-snr")?;
            sweep_snr(base, &scenario.snr_db, &scenario.variants)?
        }
        Command::SweepError => {
            single(&scenario.snr_db, "snr_db", "sweep-error")?;
            sweep_error_variance(base, &scenario.sigma_e2, &scenario.variants)?
        }
        Command::SingleTrial => {
            single(&scenario.snr_db, "snr_db", "single-trial")?;
            single(&scenario.sigma_e2, "sigma_e2", "single-trial")?;
            single_trial(base, &scenario.variants)?
        }
        Command::OptimizeDelta => {
            single(&scenario.snr_db, "snr_db", "optimize-delta")?;
            single(&scenario.sigma_e2, "sigma_e2", "optimize-delta")?;
            let set = run_trials(base)?;
            let search = optimize_delta(&set, base.delta_grid_step, base.esr_scope, base.sinr_model)?;
            let mut metadata = SweepMetadata::for_config(base);
            metadata.svd_ties = set.svd_ties;
            let bytes = match format {
                Format::Csv => emit_curve(&search.curve)?,
                Format::Json => {
                    let report = CurveReport {
                        variant: base.variant.to_string(),
                        delta_opt: search.delta_opt,
                        esr_bits_hz: search.best.esr(),
                        guarded_sinr_count: search.best.guarded,
                        curve: search.curve.clone(),
                        metadata: metadata.clone(),
                    };
                    serde_json::to_vec_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?
                }
            };
            write_sink(out.as_deref(), &bytes)?;
            if let (Format::Csv, Some(path)) = (format, &out) {
                write_sink(Some(&sidecar_path(path)), &metadata_json(&metadata)?)?;
            }
            return Ok(Summary {
                command,
                variants: vec![base.variant.to_string()],
                points: search.curve.len(),
                seed: base.seed,
                guarded: search.best.guarded,
                out,
            });
        }
    };
    write_sweep(&result, format, out.as_ref())?;
    let points = result.records.len() / scenario.variants.len().max(1);
    Ok(Summary {
        command,
        variants: labels(&scenario.variants),
        points,
        seed: base.seed,
        guarded: result.guarded_total(),
        out,
    })
}

fn exit_code(err: &Error) -> i32 {
    if err.is_config() {
        2
    } else {
        3
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let outcome = match cli.common.threads {
        Some(0) => Err(Error::config("threads", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Contract(e.to_string()))
            .and_then(|pool| pool.install(|| execute(cli.command, &cli.common))),
        None => execute(cli.command, &cli.common),
    };
    match outcome {
        Ok(summary) => {
            eprintln!("{}", summary.line(started.elapsed().as_secs_f64()));
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
