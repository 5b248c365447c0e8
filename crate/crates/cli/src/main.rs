//! `chartdoc-forge`: builds taxonomies, generates and debiases datasets,
//! renders single charts and scores predictions.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use chartdoc_core::chart::{build_chart, ChartOptions, ChartSpec, ChartSubtype, ColorCatalog};
use chartdoc_core::eval::{evaluate, read_predictions};
use chartdoc_core::hierarchy::{build_hierarchy, parse_edge_list};
use chartdoc_core::pipeline::{debias_dataset, generate, read_corpus, stats, GenConfig, PipelineError};
use chartdoc_core::render::render;
use chartdoc_core::rng::rng_from_seed;
use chartdoc_core::table::ingest_csv;
use clap::{Parser, Subcommand};
use log::info;

const LOG_ENV: &str = "CHARTDOC_FORGE_LOG";

#[derive(Parser)]
#[command(name = "chartdoc-forge", version, about = "Chart and document question-answering dataset generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the pruned entity tree from a hypernym edge list.
    BuildHierarchy {
        /// Edge list, one `child<TAB>parent[,parent...]` line per node.
        #[arg(long)]
        edges: PathBuf,
        /// Output file; `.json` writes the tree as JSON, anything else as an edge list.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a dataset directory.
    Generate {
        /// TOML configuration; defaults apply to missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed; overrides the config file.
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; the output does not depend on it.
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides the document count of the config.
        #[arg(long)]
        docs: Option<usize>,
        /// Replace a non-empty output directory.
        #[arg(long)]
        force: bool,
    },
    /// Re-balance yes/no answers of a dataset in place.
    Debias {
        #[arg(long)]
        dataset: PathBuf,
        /// Redraws tried per question; defaults to the dataset's config.
        #[arg(long)]
        max_attempts: Option<usize>,
    },
    /// Print corpus statistics of a dataset.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        /// Print JSON instead of tables.
        #[arg(long)]
        json: bool,
    },
    /// Render one chart to SVG.
    RenderChart {
        /// Chart spec as JSON, or a CSV table (entity names in the first row,
        /// one series per following row) together with `--subtype`.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Subtype name or code when `--spec` is a CSV table.
        #[arg(long)]
        subtype: Option<String>,
        /// Seed for styling when `--spec` is a CSV table.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the resolved chart spec as JSON.
        #[arg(long)]
        spec_out: Option<PathBuf>,
    },
    /// Score a predictions file against a dataset.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        /// `question_id<TAB>answer` lines.
        #[arg(long)]
        preds: PathBuf,
        /// Machine-readable report (JSON).
        #[arg(long)]
        report: PathBuf,
    },
}

/// Failure classes with their exit codes.
enum Failure {
    /// Bad arguments or inputs: exit 1.
    Invalid(anyhow::Error),
    /// Anything that went wrong while doing the work: exit 2.
    Runtime(anyhow::Error),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(_) | PipelineError::Input { .. } | PipelineError::ManifestMismatch(_) => Failure::Invalid(e.into()),
            PipelineError::Io { .. } | PipelineError::Doc { .. } => Failure::Runtime(e.into()),
        }
    }
}

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invalid(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Invalid)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(Failure::Runtime)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Runtime)
}

fn is_non_empty_dir(path: &Path) -> bool {
    fs::read_dir(path).map(|mut d| d.next().is_some()).unwrap_or(false)
}

fn build_hierarchy_cmd(edges: &Path, out: &Path) -> Result<(), Failure> {
    let dag = parse_edge_list(&read(edges)?).map_err(invalid)?;
    let tree = build_hierarchy(&dag).map_err(invalid)?;
    let text = if out.extension().is_some_and(|e| e == "json") { tree.to_json() } else { tree.to_edge_list() };
    write(out, &text)?;
    info!("{} input nodes, {} kept", dag.len(), tree.len());
    Ok(())
}

fn generate_cmd(
    config: Option<&Path>,
    seed: u64,
    out: &Path,
    jobs: Option<usize>,
    docs: Option<usize>,
    force: bool,
) -> Result<(), Failure> {
    let mut cfg = match config {
        Some(p) => GenConfig::from_toml(&read(p)?)?,
        None => GenConfig::default(),
    };
    cfg.master_seed = seed;
    if let Some(n) = docs {
        cfg.doc_count = n;
    }
    cfg.validate()?;
    if jobs == Some(0) {
        return Err(invalid(anyhow::anyhow!("--jobs must be at least 1")));
    }
    if out.is_file() {
        return Err(invalid(anyhow::anyhow!("{} is a file", out.display())));
    }
    if is_non_empty_dir(out) {
        if !force {
            return Err(invalid(anyhow::anyhow!("{} is not empty; pass --force to replace it", out.display())));
        }
        fs::remove_dir_all(out).with_context(|| format!("clearing {}", out.display())).map_err(Failure::Runtime)?;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build().map_err(runtime)?;
    let manifest = pool.install(|| generate(&cfg, out))?;
    println!("{}", manifest.digest);
    info!("{} documents, {} questions", manifest.counts.docs, manifest.counts.questions);
    Ok(())
}

fn debias_cmd(dataset: &Path, max_attempts: Option<usize>) -> Result<(), Failure> {
    let (manifest, report) = debias_dataset(dataset, max_attempts)?;
    let unbalanced: Vec<u32> = report.unbalanced().map(|t| t.template_id).collect();
    println!("yes share {:.4} -> {:.4}", report.yes_share_before, report.yes_share_after);
    println!("mutations {}", report.mutations());
    println!("unbalanced templates {unbalanced:?}");
    println!("digest {}", manifest.digest);
    Ok(())
}

fn stats_cmd(dataset: &Path, json: bool) -> Result<(), Failure> {
    let report = stats(dataset)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(runtime)?);
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}

fn load_spec(path: &Path, subtype: Option<&str>, seed: u64) -> Result<ChartSpec, Failure> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        let subtype: ChartSubtype = subtype
            .ok_or_else(|| invalid(anyhow::anyhow!("--subtype is required with a CSV table")))?
            .parse()
            .map_err(|e: chartdoc_core::chart::UnknownSubtype| invalid(anyhow::anyhow!("{e}")))?;
        let table = ingest_csv(text.as_bytes()).map_err(invalid)?;
        let id = format!("L_2023_01_01_00_00_00_0_{}", subtype.code());
        let (spec, _) = build_chart(table, subtype, id, &ChartOptions::default(), &ColorCatalog::bundled(), &mut rng_from_seed(seed))
            .map_err(invalid)?;
        Ok(spec)
    } else {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::Invalid)
    }
}

fn render_cmd(spec: &Path, out: &Path, subtype: Option<&str>, seed: u64, spec_out: Option<&Path>) -> Result<(), Failure> {
    let spec = load_spec(spec, subtype, seed)?;
    let svg = render(&spec).map_err(invalid)?;
    write(out, &svg.to_svg_string())?;
    if let Some(p) = spec_out {
        write(p, &(serde_json::to_string_pretty(&spec).map_err(runtime)? + "\n"))?;
    }
    Ok(())
}

fn evaluate_cmd(dataset: &Path, preds: &Path, report: &Path) -> Result<(), Failure> {
    let file = fs::File::open(preds).with_context(|| format!("opening {}", preds.display())).map_err(Failure::Invalid)?;
    let predictions = read_predictions(BufReader::new(file)).map_err(invalid)?;
    let corpus = read_corpus(dataset)?;
    let result = evaluate(&predictions, &corpus);
    if !result.unknown_ids.is_empty() {
        log::warn!("{} predictions name unknown questions; they were ignored", result.unknown_ids.len());
    }
    write(report, &(serde_json::to_string_pretty(&result).map_err(runtime)? + "\n"))?;
    print!("{}", result.to_text());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::BuildHierarchy { edges, out } => build_hierarchy_cmd(&edges, &out),
        Command::Generate { config, seed, out, jobs, docs, force } => generate_cmd(config.as_deref(), seed, &out, jobs, docs, force),
        Command::Debias { dataset, max_attempts } => debias_cmd(&dataset, max_attempts),
        Command::Stats { dataset, json } => stats_cmd(&dataset, json),
        Command::RenderChart { spec, out, subtype, seed, spec_out } => {
            render_cmd(&spec, &out, subtype.as_deref(), seed, spec_out.as_deref())
        }
        Command::Evaluate { dataset, preds, report } => evaluate_cmd(&dataset, &preds, &report),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
