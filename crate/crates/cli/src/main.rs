//! Verification CLI: builds deterministic test corpora, runs the identity,
//! certificate, band, bootstrap and units suites over them, and emits
//! JSON-lines reports, a summary table, norm tables and plot-ready CSV.
//!
//! Exit codes: 0 when every hard assertion passes, 1 on a numerical hard
//! failure (or, with `--strict`, a diagnostic failure), 2 on an invalid
//! manifest.

mod manifest;
mod runner;
mod suites;

use clap::{Parser, Subcommand, ValueEnum};
use manifest::{Suite, SuiteManifest};
use std::path::PathBuf;
use std::sync::Arc;
use torus_nse_core::corpus::{self, CorpusItem};
use torus_nse_core::grid::GridSpec;

#[derive(Parser)]
#[command(
    name = "nsv",
    about = "Pseudo-spectral identity certification for the stationary flow system on a periodic box",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites over a corpus and write reports.
    Run(RunArgs),
    /// Dump one corpus field as spectral CSV or raw nodal samples.
    DumpField(DumpArgs),
    /// Emit plot-ready sweep data (parameter, lhs, rhs, residual).
    PlotData(PlotArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Manifest path (JSON). Defaults are used when omitted.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Suite selection; overrides the manifest.
    #[arg(long)]
    suite: Option<Suite>,
    /// Nodes per axis; overrides the manifest grid.
    #[arg(long)]
    grid: Option<usize>,
    /// Base seed for the default corpus; overrides the manifest.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports.jsonl, summary.txt and norms.csv.
    #[arg(long, default_value = "nsv-out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Promote diagnostics to hard assertions.
    #[arg(long, default_value_t = false)]
    strict: bool,
}

#[derive(clap::Args)]
struct DumpArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    field_id: String,
    #[arg(long, value_enum, default_value_t = DumpFormat::Csv)]
    format: DumpFormat,
    #[arg(long, default_value = "nsv-out")]
    out: PathBuf,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpFormat {
    Csv,
    Raw,
}

#[derive(clap::Args)]
struct PlotArgs {
    #[arg(long, value_enum)]
    family: PlotFamily,
    #[arg(long, default_value = "nsv-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotFamily {
    /// Commutator kernel error against theta-quadrature order.
    CommutatorSweep,
    /// Sublevel-audit flux residual against grid resolution.
    SublevelSweep,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run(args),
        Command::DumpField(args) => dump_field(args),
        Command::PlotData(args) => plot_data(args),
    };
    std::process::exit(code);
}

struct LoadedManifest {
    grid: GridSpec,
    corpus: Vec<Arc<CorpusItem>>,
    manifest: SuiteManifest,
    base_seed: u64,
}

fn load_manifest(
    path: Option<&PathBuf>,
    grid_override: Option<usize>,
    seed_override: Option<u64>,
    need_corpus: bool,
) -> anyhow::Result<LoadedManifest> {
    let manifest = match path {
        Some(p) => SuiteManifest::from_path(p)?,
        None => SuiteManifest::default(),
    };
    let params = manifest
        .grid
        .clone()
        .unwrap_or_else(manifest::GridParams::desk_default);
    let grid = match grid_override {
        Some(n) => GridSpec::new(n, params.box_length, params.dealias_limit.min(n / 2 - 1))?,
        None => params.build()?,
    };
    let base_seed = seed_override.or(manifest.seed).unwrap_or(1);
    let corpus = if need_corpus {
        let corpus_manifest = manifest.corpus.clone().unwrap_or_else(|| {
            corpus::default_manifest(manifest.random_states.unwrap_or(20), base_seed)
        });
        corpus::build_corpus(grid, &corpus_manifest)?
            .into_iter()
            .map(Arc::new)
            .collect()
    } else {
        Vec::new()
    };
    Ok(LoadedManifest {
        grid,
        corpus,
        manifest,
        base_seed,
    })
}

fn run(args: RunArgs) -> i32 {
    // Resolve the suite list before deciding whether the corpus is needed.
    let pre = match args.manifest.as_ref() {
        Some(p) => match SuiteManifest::from_path(p) {
            Ok(m) => m,
            Err(err) => {
                eprintln!("invalid manifest: {err:#}");
                return 2;
            }
        },
        None => SuiteManifest::default(),
    };
    let suites = match args.suite {
        Some(Suite::All) => vec![
            Suite::Identity,
            Suite::Certify,
            Suite::Bands,
            Suite::Bootstrap,
            Suite::Units,
        ],
        Some(s) => vec![s],
        None => pre.selected_suites(),
    };
    let need_corpus = suites.iter().any(|s| *s != Suite::Units);
    let loaded = match load_manifest(args.manifest.as_ref(), args.grid, args.seed, need_corpus) {
        Ok(l) => l,
        Err(err) => {
            eprintln!("invalid manifest: {err:#}");
            return 2;
        }
    };

    let mut tasks = Vec::new();
    for suite in &suites {
        tasks.extend(suites::build_tasks(
            *suite,
            loaded.grid,
            &loaded.corpus,
            loaded.base_seed,
        ));
    }
    let mut outcome = runner::run_tasks(tasks, args.jobs);
    runner::apply_tolerance_overrides(&mut outcome, &loaded.manifest.tolerance_overrides);

    if let Err(err) = write_outputs(&args, &loaded, &outcome) {
        eprintln!("failed to write outputs: {err:#}");
        return 1;
    }

    let summary = runner::summary_table(&outcome);
    print!("{summary}");

    if outcome.hard_failures > 0 || (args.strict && outcome.diagnostic_failures > 0) {
        1
    } else {
        0
    }
}

fn write_outputs(
    args: &RunArgs,
    loaded: &LoadedManifest,
    outcome: &runner::RunOutcome,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let reports_path = loaded
        .manifest
        .output
        .reports
        .clone()
        .unwrap_or_else(|| "reports.jsonl".to_string());
    let summary_path = loaded
        .manifest
        .output
        .summary
        .clone()
        .unwrap_or_else(|| "summary.txt".to_string());
    let norms_path = loaded
        .manifest
        .output
        .norms
        .clone()
        .unwrap_or_else(|| "norms.csv".to_string());

    let mut jsonl = String::new();
    for (_, r) in &outcome.reports {
        jsonl.push_str(&r.to_json_line());
        jsonl.push('\n');
    }
    std::fs::write(args.out.join(reports_path), jsonl)?;
    std::fs::write(args.out.join(summary_path), runner::summary_table(outcome))?;
    std::fs::write(
        args.out.join(norms_path),
        suites::norm_table(&loaded.corpus)?,
    )?;
    Ok(())
}

fn dump_field(args: DumpArgs) -> i32 {
    let loaded = match load_manifest(args.manifest.as_ref(), args.grid, args.seed, true) {
        Ok(l) => l,
        Err(err) => {
            eprintln!("invalid manifest: {err:#}");
            return 2;
        }
    };
    let Some(item) = loaded.corpus.iter().find(|i| i.field_id() == args.field_id) else {
        eprintln!("unknown field_id {}", args.field_id);
        return 2;
    };
    let CorpusItem::Grid(state) = &**item else {
        eprintln!(
            "field {} is an analytic (grid-free) solution with no sampled dump",
            args.field_id
        );
        return 2;
    };
    if let Err(err) = std::fs::create_dir_all(&args.out) {
        eprintln!("cannot create output dir: {err}");
        return 1;
    }
    let result = match args.format {
        DumpFormat::Csv => {
            let comps = [
                state.v.component(0),
                state.v.component(1),
                state.v.component(2),
            ];
            let csv = torus_nse_core::spectral::spectral_csv(&[&comps[0], &comps[1], &comps[2]]);
            std::fs::write(args.out.join(format!("{}.csv", args.field_id)), csv)
        }
        DumpFormat::Raw => {
            let nodal = match torus_nse_core::spectral::inverse_vector(&state.v) {
                Ok(n) => n,
                Err(err) => {
                    eprintln!("{err}");
                    return 1;
                }
            };
            let (header, bytes) = torus_nse_core::grid::raw_dump(
                &args.field_id,
                &state.v.grid,
                &[&nodal.comps[0], &nodal.comps[1], &nodal.comps[2]],
            );
            std::fs::write(args.out.join(format!("{}.raw", args.field_id)), bytes).and_then(|()| {
                std::fs::write(
                    args.out.join(format!("{}.json", args.field_id)),
                    serde_json::to_string_pretty(&header).expect("header serializes"),
                )
            })
        }
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("dump failed: {err}");
            1
        }
    }
}

fn plot_data(args: PlotArgs) -> i32 {
    if let Err(err) = std::fs::create_dir_all(&args.out) {
        eprintln!("cannot create output dir: {err}");
        return 1;
    }
    let result = match args.family {
        PlotFamily::CommutatorSweep => commutator_sweep_csv()
            .and_then(|csv| Ok(std::fs::write(args.out.join("commutator-sweep.csv"), csv)?)),
        PlotFamily::SublevelSweep => sublevel_sweep_csv(args.seed.unwrap_or(3))
            .and_then(|csv| Ok(std::fs::write(args.out.join("sublevel-sweep.csv"), csv)?)),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("plot data failed: {err:#}");
            1
        }
    }
}

fn commutator_sweep_csv() -> anyhow::Result<String> {
    let (config, _) = suites::commutator_reference_config()?;
    let direct = torus_nse_core::bands::commutator_direct(
        &config.beta,
        torus_nse_core::bands::COMMUTATOR_SCALE,
        &config.w,
        &config.u,
    )?;
    let direct_scale = direct.max_coeff_abs();
    let mut csv = String::from("parameter,lhs,rhs,residual\n");
    for order in [2usize, 3, 4, 5, 6, 8, 10, 12] {
        let (field, report) =
            torus_nse_core::bands::commutator_kernel(&config.beta, &config.w, &config.u, order)?;
        csv.push_str(&format!(
            "{order},{},{},{}\n",
            field.max_coeff_abs(),
            direct_scale,
            report.residual
        ));
    }
    Ok(csv)
}

fn sublevel_sweep_csv(seed: u64) -> anyhow::Result<String> {
    let mut csv = String::from("parameter,lhs,rhs,residual\n");
    for n in [32usize, 64] {
        let grid = GridSpec::new(n, std::f64::consts::TAU, 10)?;
        let state =
            torus_nse_core::solutions::make_random_divfree(grid, seed, (2.0, 5.0), 1.0, 1.0)?;
        let q = torus_nse_core::spectral::inverse_scalar(&state.q)?;
        let q_min = q.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let report = torus_nse_core::nse::sublevel_energy_audit(&state, -0.5 * q_min)?;
        csv.push_str(&format!(
            "{n},{},{},{}\n",
            report.lhs, report.rhs, report.residual
        ));
    }
    Ok(csv)
}
