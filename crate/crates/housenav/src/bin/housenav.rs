//! Thin command-line front end over the library: dataset generation,
//! experiment runs, report assembly, and trajectory rendering.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use housenav::bench::{
    baseline_agent, episode_house, generate_dataset, kendall_tau, load_dataset, render_topdown,
    spl, write_dataset, Episode, SplItem,
};
use housenav::episode::{
    read_trace, run_episode, write_trace, BackendKind, EpisodeResult, LowLevelKind, MemoryKind,
    RunConfig, SceneGraphMode,
};
use housenav::knowledge::KnowledgeBase;
use housenav::plan::LlmConfig;

#[derive(Parser)]
#[command(name = "housenav", about = "Multi-object navigation benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark dataset of seeded episodes.
    GenDataset(GenDatasetArgs),
    /// Run one configuration over a dataset and write per-episode results.
    Run(RunArgs),
    /// Aggregate run CSVs into a comparison table (CSV and markdown).
    Report(ReportArgs),
    /// Render one episode trace as a top-down SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenDatasetArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    min_rooms: usize,
    #[arg(long, default_value_t = 10)]
    max_rooms: usize,
    #[arg(long, default_value = "val")]
    data_type: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SceneGraphArg {
    Gt,
    Vo,
}

#[derive(Clone, Copy, ValueEnum)]
enum LowLevelArg {
    Ornav,
    Pnavs,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Heuristic,
    Llm,
}

#[derive(Clone, Copy, ValueEnum)]
enum MemoryArg {
    Graph,
    Llm,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = SceneGraphArg::Gt)]
    scene_graph: SceneGraphArg,
    #[arg(long, value_enum, default_value_t = LowLevelArg::Ornav)]
    low_level: LowLevelArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Heuristic)]
    backend: BackendArg,
    #[arg(long, value_enum, default_value_t = MemoryArg::Graph)]
    memory: MemoryArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-episode results CSV.
    #[arg(long)]
    out: PathBuf,
    /// Run the privileged baseline instead of the full pipeline.
    #[arg(long, default_value_t = false)]
    baseline: bool,
    /// Optional directory for per-episode trace files.
    #[arg(long)]
    traces_dir: Option<PathBuf>,
    /// Chat-completions endpoint for the LLM backend/memory.
    #[arg(long)]
    llm_endpoint: Option<String>,
    #[arg(long)]
    llm_model: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run CSVs to merge.
    #[arg(long, required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Aggregated CSV output path; a markdown table goes to stdout.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// Episode file (JSON-lines).
    #[arg(long)]
    episode: PathBuf,
    /// Index into the episode file.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Trace file (JSON-lines).
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let kb = KnowledgeBase::bundled();
    match cli.command {
        Command::GenDataset(a) => gen_dataset(a, &kb),
        Command::Run(a) => run(a, &kb),
        Command::Report(a) => report(a),
        Command::Render(a) => render(a, &kb),
    }
}

fn gen_dataset(a: GenDatasetArgs, kb: &KnowledgeBase) -> Result<()> {
    if a.min_rooms == 0 || a.min_rooms > a.max_rooms {
        bail!("room range {}..={} is invalid", a.min_rooms, a.max_rooms);
    }
    let episodes = generate_dataset(a.n, a.min_rooms..=a.max_rooms, &a.data_type, a.seed, kb)?;
    write_dataset(&a.out, &episodes)?;
    println!("wrote {} episodes to {}", episodes.len(), a.out.display());
    Ok(())
}

fn config_label(a: &RunArgs) -> String {
    if a.baseline {
        return "baseline".to_string();
    }
    format!(
        "{}_{}_{}_{}",
        match a.scene_graph {
            SceneGraphArg::Gt => "gt",
            SceneGraphArg::Vo => "vo",
        },
        match a.low_level {
            LowLevelArg::Ornav => "ornav",
            LowLevelArg::Pnavs => "pnavs",
        },
        match a.backend {
            BackendArg::Heuristic => "heuristic",
            BackendArg::Llm => "llm",
        },
        match a.memory {
            MemoryArg::Graph => "graph",
            MemoryArg::Llm => "llm",
        },
    )
}

fn run(a: RunArgs, kb: &KnowledgeBase) -> Result<()> {
    let episodes = load_dataset(&a.dataset, kb)?;
    let label = config_label(&a);
    let mut cfg = RunConfig::new(
        match a.scene_graph {
            SceneGraphArg::Gt => SceneGraphMode::Gt,
            SceneGraphArg::Vo => SceneGraphMode::Vo,
        },
        match a.low_level {
            LowLevelArg::Ornav => LowLevelKind::OrNav,
            LowLevelArg::Pnavs => LowLevelKind::PNavS,
        },
        a.seed,
    );
    cfg.backend = match a.backend {
        BackendArg::Heuristic => BackendKind::Heuristic,
        BackendArg::Llm => BackendKind::Llm,
    };
    cfg.memory = match a.memory {
        MemoryArg::Graph => MemoryKind::Graph,
        MemoryArg::Llm => MemoryKind::Llm,
    };
    if a.llm_endpoint.is_some() || a.llm_model.is_some() {
        let mut llm = LlmConfig::default();
        if let Some(endpoint) = a.llm_endpoint {
            llm.endpoint = endpoint;
        }
        if let Some(model) = a.llm_model {
            llm.model = model;
        }
        cfg.llm = Some(llm);
    }

    if let Some(dir) = &a.traces_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(&a.out)?);
    writeln!(
        out,
        "config,house_idx,success,steps,path_length,shortest_path_length,kendall_tau"
    )?;
    for ep in &episodes {
        let house = episode_house(ep, kb)?;
        let result: EpisodeResult = if a.baseline {
            baseline_agent(
                &house,
                ep,
                cfg.low_level,
                cfg.episode_seed(ep.house_idx),
            )
        } else {
            run_episode(&house, ep, &cfg, kb)
        };
        let tau = if result.success && !a.baseline {
            let order: Vec<String> = result.found.iter().map(|f| f.category.clone()).collect();
            kendall_tau(&order, &ep.shortest_path_targets_order)
                .map(|t| format!("{t:.6}"))
                .unwrap_or_default()
        } else {
            String::new()
        };
        writeln!(
            out,
            "{label},{},{},{},{:.6},{:.6},{tau}",
            ep.house_idx, result.success, result.steps, result.path_length,
            ep.shortest_path_length
        )?;
        if let Some(dir) = &a.traces_dir {
            write_trace(&dir.join(format!("episode_{:04}.jsonl", ep.house_idx)), &result.trace)?;
        }
    }
    println!("wrote {}", a.out.display());
    Ok(())
}

struct CsvRow {
    config: String,
    success: bool,
    path_length: f64,
    shortest: f64,
    tau: Option<f64>,
}

fn parse_run_csv(path: &PathBuf) -> Result<Vec<CsvRow>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            bail!("{}:{} has {} fields, expected 7", path.display(), i + 1, fields.len());
        }
        rows.push(CsvRow {
            config: fields[0].to_string(),
            success: fields[2].parse()?,
            path_length: fields[4].parse()?,
            shortest: fields[5].parse()?,
            tau: if fields[6].is_empty() {
                None
            } else {
                Some(fields[6].parse()?)
            },
        });
    }
    Ok(rows)
}

fn report(a: ReportArgs) -> Result<()> {
    let mut by_config: BTreeMap<String, Vec<CsvRow>> = BTreeMap::new();
    for input in &a.inputs {
        for row in parse_run_csv(input)? {
            by_config.entry(row.config.clone()).or_default().push(row);
        }
    }
    if by_config.is_empty() {
        bail!("no rows found in the input files");
    }

    let mut out = std::io::BufWriter::new(std::fs::File::create(&a.out)?);
    writeln!(out, "config,n_episodes,sr,spl,kendall_tau")?;
    println!("| Config | SR | SPL | KT |");
    println!("|--------|----|-----|----|");
    for (config, rows) in &by_config {
        let n = rows.len();
        let sr = rows.iter().filter(|r| r.success).count() as f64 / n as f64;
        let items: Vec<SplItem> = rows
            .iter()
            .map(|r| SplItem {
                success: r.success,
                shortest: r.shortest,
                actual: r.path_length,
            })
            .collect();
        let spl_value = spl(&items)?;
        let taus: Vec<f64> = rows.iter().filter_map(|r| r.tau).collect();
        let kt = if taus.is_empty() {
            "N/A".to_string()
        } else {
            format!("{:.3}", taus.iter().sum::<f64>() / taus.len() as f64)
        };
        writeln!(out, "{config},{n},{sr:.4},{spl_value:.4},{kt}")?;
        println!("| {config} | {:.2}% | {spl_value:.3} | {kt} |", sr * 100.0);
    }
    Ok(())
}

fn render(a: RenderArgs, kb: &KnowledgeBase) -> Result<()> {
    let episodes: Vec<Episode> = load_dataset(&a.episode, kb)?;
    let ep = episodes
        .get(a.index)
        .with_context(|| format!("episode index {} out of range", a.index))?;
    let house = episode_house(ep, kb)?;
    let trace = read_trace(&a.trace)?;
    let svg = render_topdown(&house, &trace)?;
    std::fs::write(&a.out, svg)?;
    println!("wrote {}", a.out.display());
    Ok(())
}
