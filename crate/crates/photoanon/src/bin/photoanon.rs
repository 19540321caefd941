//! Command line front end: postprocess a pair, evaluate a manifest, render
//! reports, or generate the synthetic fixture tree.
//!
//! Exit codes are scriptable: 0 ok, 2 input error, 3 shape error,
//! 4 nothing evaluable.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use photoanon::eval::{evaluate, DatasetInputs};
use photoanon::fixtures;
use photoanon::manifest::read_manifest;
use photoanon::pipeline::postprocess;
use photoanon::raster::{load_image, load_mask, save_image};
use photoanon::report::{
    read_report, render_csv, render_markdown, to_canonical_json, write_report, MetricReport,
    RunConfig,
};
use photoanon::{Error, Result};

/// Environment variable supplying the default worker count.
const WORKERS_ENV: &str = "PHOTOANON_WORKERS";

#[derive(Parser)]
#[command(
    name = "photoanon",
    version,
    about = "Photometric post-processing and evaluation for face anonymization pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repair an anonymized image's lighting and color against its original.
    Postprocess(PostprocessArgs),
    /// Score every pair in a manifest and write a JSON report.
    Evaluate(EvaluateArgs),
    /// Render one or more JSON reports as a comparison table.
    Report(ReportArgs),
    /// Generate the synthetic fixture tree (pairs, sidecars, manifests).
    Fixtures(FixturesArgs),
}

/// Settings shared by the processing commands. A TOML config file supplies
/// base values; flags override it.
#[derive(Args)]
struct ConfigArgs {
    /// TOML config file (keys match the report's config block).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Pyramid detail levels kept from the anonymized image.
    #[arg(long, value_name = "K")]
    levels: Option<usize>,
    /// Bilateral spatial sigma in pixels (default scales with the image).
    #[arg(long, value_name = "SIGMA")]
    sigma_spatial: Option<f64>,
    /// Bilateral range sigma in gray units.
    #[arg(long, value_name = "SIGMA")]
    sigma_range: Option<f64>,
    /// Skip the relighting stage.
    #[arg(long)]
    no_relight: bool,
    /// Skip the pyramid detail blend.
    #[arg(long)]
    no_pyramid: bool,
    /// Skip the chroma transfer.
    #[arg(long)]
    no_color_transfer: bool,
    /// Cosine similarity above which a pair counts as re-identified.
    #[arg(long, value_name = "T")]
    reid_threshold: Option<f64>,
    /// Worker threads for pair evaluation (default: PHOTOANON_WORKERS or
    /// all cores). Does not change results, only speed.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
}

impl ConfigArgs {
    /// defaults < config file < environment (workers) < flags.
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                toml::from_str(&text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        config.workers = default_workers()?;
        if let Some(v) = self.levels {
            config.levels = v;
        }
        if let Some(v) = self.sigma_spatial {
            config.sigma_spatial = Some(v);
        }
        if let Some(v) = self.sigma_range {
            config.sigma_range = Some(v);
        }
        if self.no_relight {
            config.relight = false;
        }
        if self.no_pyramid {
            config.pyramid = false;
        }
        if self.no_color_transfer {
            config.color_transfer = false;
        }
        if let Some(v) = self.reid_threshold {
            config.reid_threshold = v;
        }
        if let Some(v) = self.workers {
            config.workers = v;
        }
        Ok(config)
    }
}

fn default_workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(value) => value
            .parse()
            .map_err(|_| Error::Parse(format!("{WORKERS_ENV}={value:?} is not a worker count"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, usize::from)),
    }
}

#[derive(Args)]
struct PostprocessArgs {
    /// The untouched original image.
    original: PathBuf,
    /// The anonymized image to repair.
    anonymized: PathBuf,
    /// Output PNG path.
    out: PathBuf,
    /// Mask restricting color-transfer statistics to a region.
    #[arg(long, value_name = "FILE")]
    mask: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Pair manifest CSV.
    manifest: PathBuf,
    /// Output report JSON path.
    out: PathBuf,
    /// Feature matrix CSV for the reference distribution.
    #[arg(long, value_name = "FILE", requires = "features_fake")]
    features_real: Option<PathBuf>,
    /// Feature matrix CSV for the anonymized distribution.
    #[arg(long, value_name = "FILE", requires = "features_real")]
    features_fake: Option<PathBuf>,
    /// Face detector hit table (image_id,detected CSV).
    #[arg(long, value_name = "FILE")]
    detections: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
    Md,
}

#[derive(Args)]
struct ReportArgs {
    /// Report JSON files; each becomes one table row named by file stem.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "md")]
    format: ReportFormat,
    /// Write here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixturesArgs {
    /// Directory to generate the fixture tree in.
    out: PathBuf,
}

fn cmd_postprocess(args: &PostprocessArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let original = load_image(&args.original)?;
    let anonymized = load_image(&args.anonymized)?;
    let mask = args.mask.as_deref().map(load_mask).transpose()?;
    let pipeline = config.pipeline_for(original.height(), original.width());
    let out = postprocess(&original, &anonymized, mask.as_ref(), &pipeline)?;
    save_image(&out, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let records = read_manifest(&args.manifest)?;
    let inputs = DatasetInputs {
        features_real: args.features_real.clone(),
        features_fake: args.features_fake.clone(),
        detections: args.detections.clone(),
    };
    let report = evaluate(&records, &config, &inputs)?;
    write_report(&report, &args.out)?;
    println!(
        "evaluated {} pairs -> {}",
        report.pairs.len(),
        args.out.display()
    );
    Ok(())
}

fn run_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let mut runs: Vec<(String, MetricReport)> = Vec::new();
    for path in &args.reports {
        runs.push((run_label(path), read_report(path)?));
    }
    let rendered = match args.format {
        ReportFormat::Csv => render_csv(&runs),
        ReportFormat::Md => render_markdown(&runs),
        ReportFormat::Json => {
            let mut out = String::new();
            for (_, report) in &runs {
                out += &to_canonical_json(report)?;
            }
            out
        }
    };
    match &args.out {
        Some(path) => fs::write(path, rendered).map_err(|e| Error::io(path, e))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn cmd_fixtures(args: &FixturesArgs) -> Result<()> {
    let set = fixtures::generate(&args.out)?;
    println!("fixture tree at {}", set.root.display());
    println!("  recovery pair: {}", set.recovery_original.display());
    println!("                 {}", set.recovery_anonymized.display());
    println!("  manifest:      {}", set.manifest.display());
    println!("  identity:      {}", set.identity_manifest.display());
    println!("  landmarks:     {}", set.landmarks_base.display());
    println!("                 {}", set.landmarks_shifted.display());
    println!("  detections:    {}", set.detections.display());
    println!("  features:      {}", set.features_real.display());
    println!("                 {}", set.features_fake.display());
    Ok(())
}

fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Io { .. } | Error::Image { .. } | Error::Parse(_) | Error::Degenerate(_) => 2,
        Error::Shape(_) => 3,
        Error::NothingEvaluable(_) => 4,
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Postprocess(args) => cmd_postprocess(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Report(args) => cmd_report(args),
        Command::Fixtures(args) => cmd_fixtures(args),
    };
    if let Err(error) = outcome {
        eprintln!("error: {error}");
        std::process::exit(exit_code(&error));
    }
}
