use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use resilience::pipeline::{with_threads, write_synth, Run, RunConfig};
use resilience::synth::SynthConfig;

/// Venue-level segregation and mobility resilience analysis.
///
/// Exit status: 0 on success, 2 for bad input or configuration, 1 otherwise.
#[derive(Parser)]
#[command(name = "resilience", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the input tables and print summary counts.
    Validate(RunArgs),
    /// Per-venue segregation and mobility change plus sector band shares.
    Analyze(RunArgs),
    /// Sector network, centrality and core/peripheral labels.
    Network(RunArgs),
    /// Nested OLS regressions of sector change on centrality.
    Regress(RunArgs),
    /// Core vs peripheral spatial and visitation comparison.
    Compare(RunArgs),
    /// All stages plus manifest.json.
    Report(RunArgs),
    /// Write a synthetic city in the input format.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory holding visits.csv, venues.csv and cbgs.csv.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    visits: Option<PathBuf>,
    #[arg(long)]
    venues: Option<PathBuf>,
    #[arg(long)]
    cbgs: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Extreme band as a fraction of venues.
    #[arg(long)]
    band: Option<f64>,
    /// Number of income groups.
    #[arg(long)]
    groups: Option<usize>,
    #[arg(long)]
    core_k: Option<usize>,
    /// Grid cell side for spatial entropy.
    #[arg(long)]
    cell_km: Option<f64>,
    #[arg(long)]
    bridge_radius_km: Option<f64>,
    /// Largest sample given an exact Wilcoxon p-value.
    #[arg(long)]
    wilcoxon_exact_max: Option<usize>,
}

impl RunArgs {
    fn resolve(&self) -> resilience::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("data", path(&self.data)),
            ("visits", path(&self.visits)),
            ("venues", path(&self.venues)),
            ("cbgs", path(&self.cbgs)),
            ("out", path(&self.out)),
            ("seed", self.seed.map(|v| v.to_string())),
            ("threads", self.threads.map(|v| v.to_string())),
            ("band", self.band.map(|v| v.to_string())),
            ("groups", self.groups.map(|v| v.to_string())),
            ("core_k", self.core_k.map(|v| v.to_string())),
            ("cell_km", self.cell_km.map(|v| v.to_string())),
            ("bridge_radius_km", self.bridge_radius_km.map(|v| v.to_string())),
            ("wilcoxon_exact_max", self.wilcoxon_exact_max.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                cfg.set(key, &value)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "synth")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = SynthConfig::default().n_cbgs)]
    n_cbgs: usize,
    #[arg(long, default_value_t = SynthConfig::default().n_sectors)]
    n_sectors: usize,
    #[arg(long, default_value_t = SynthConfig::default().n_venues)]
    n_venues: usize,
    #[arg(long, default_value_t = SynthConfig::default().core_fraction)]
    core_fraction: f64,
    /// In-shock visit budget multiplier; 1 gives a world without a shock.
    #[arg(long, default_value_t = SynthConfig::default().budget_contraction)]
    contraction: f64,
    #[arg(long, default_value_t = SynthConfig::default().niche_affinity)]
    niche_affinity: f64,
    #[arg(long)]
    threads: Option<usize>,
}

fn print_written(dir: &std::path::Path, names: &[String]) {
    for n in names {
        println!("wrote {}", dir.join(n).display());
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    let (args, stage) = match command {
        Command::Synth(a) => {
            let cfg = SynthConfig {
                n_cbgs: a.n_cbgs,
                n_sectors: a.n_sectors,
                n_venues: a.n_venues,
                core_fraction: a.core_fraction,
                budget_contraction: a.contraction,
                niche_affinity: a.niche_affinity,
                seed: a.seed,
            };
            let (ds, truth, paths) = with_threads(a.threads, || write_synth(&cfg, &a.out))??;
            println!(
                "{} venues, {} cbgs, {} sectors, {} planted core",
                ds.venues().len(),
                ds.cbgs().len(),
                ds.sectors().len(),
                truth.planted_core.len()
            );
            for p in paths {
                println!("wrote {}", p.display());
            }
            return Ok(());
        }
        Command::Validate(a) => (a, "validate"),
        Command::Analyze(a) => (a, "analyze"),
        Command::Network(a) => (a, "network"),
        Command::Regress(a) => (a, "regress"),
        Command::Compare(a) => (a, "compare"),
        Command::Report(a) => (a, "report"),
    };
    let cfg = args.resolve()?;
    let threads = cfg.threads;
    with_threads(threads, || -> resilience::Result<Vec<String>> {
        let run = Run::load(cfg)?;
        match stage {
            "validate" => {
                let report = run.validation();
                println!(
                    "ok: {} venues, {} cbgs, {} sectors, {} visit rows ({} pre-shock visits, {} in-shock visits)",
                    report.venues, report.cbgs, report.sectors, report.visit_rows, report.visits_pre, report.visits_shock
                );
                run.write_validation(&report)
            }
            "analyze" => run.write_analysis(&run.analyze()?),
            "network" => run.write_network(&run.network()?),
            "regress" => {
                let analysis = run.analyze()?;
                let net = run.network()?;
                run.write_regression(&run.regress(&analysis, &net)?)
            }
            "compare" => run.write_comparison(&run.compare(&run.network()?)?),
            "report" => run.report(),
            _ => unreachable!(),
        }
        .map(|w| {
            print_written(run.out_dir(), &w);
            w
        })
    })?
    .with_context(|| format!("{stage} failed"))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let input = err
                .chain()
                .find_map(|e| e.downcast_ref::<resilience::Error>())
                .is_some_and(resilience::Error::is_input_error);
            ExitCode::from(if input { 2 } else { 1 })
        }
    }
}
