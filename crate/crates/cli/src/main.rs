//! `fuzzy-evidence`: data generation, single-model evidence runs, roster
//! comparisons and report emission.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fuzzy_evidence::experiments::{
    builtin_plan_source, builtin_source, builtin_spec, cell_seed, compare_rows,
    comparison_markdown, emit_report, generate_stand_in, generate_synthetic, posterior_rows,
    run_cells, run_evidence, ComparisonRow, ExperimentPlan, PosteriorRow, SigmaBlock, SigmaValue,
    StandIn,
};
use fuzzy_evidence::model::{Dataset, ModelSpec, SigmaMode, SpecDocument};
use fuzzy_evidence::sampler::{EvidenceResult, Method, SamplerConfig};
use fuzzy_evidence::Error;

const OUT_ENV: &str = "FUZZY_EVIDENCE_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "fuzzy-evidence",
    version,
    about = "Nested-sampling evidence for fuzzy rule bases and GLMs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded dataset as CSV.
    Generate(GenerateArgs),
    /// Compute the evidence of one model on one dataset.
    Evidence(EvidenceArgs),
    /// Run every cell of an experiment plan and write the reports.
    Compare(CompareArgs),
    /// Build report tables from saved result files.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DataKind {
    /// Downtime data from the generating rule base.
    Synthetic,
    /// Uptime data from the first uptime rule base.
    StandIn,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of rows.
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, value_enum, default_value_t = DataKind::Synthetic)]
    kind: DataKind,
    /// Output noise standard deviation (stand-in data only).
    #[arg(long, default_value_t = fuzzy_evidence::experiments::STAND_IN_NOISE)]
    noise: f64,
    /// Output file; CSV goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvidenceArgs {
    /// Bundled model name or path to a model-spec TOML file.
    #[arg(long)]
    spec: String,
    /// Dataset CSV (header row, output in the last column).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Multi)]
    method: MethodArg,
    /// Number of live points.
    #[arg(long, default_value_t = 50)]
    n_live: usize,
    /// Stop once the remaining mass could add less than this to ln Z.
    #[arg(long, default_value_t = 0.5)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `est` to sample σ, or a positive number to fix it.
    #[arg(long)]
    sigma: Option<String>,
    /// Coefficient prior `LO,HI` applied to every coefficient.
    #[arg(long, allow_hyphen_values = true)]
    prior_range: Option<String>,
    /// Output directory [env: FUZZY_EVIDENCE_OUT, default: results].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Bundled plan name (`synthetic`, `real_world`) or path to a plan TOML.
    #[arg(long)]
    plan: String,
    /// Run only this method instead of the plan's list.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Override the plan's live points (plan default 50).
    #[arg(long)]
    n_live: Option<usize>,
    /// Override the plan's tolerance (plan default 0.5).
    #[arg(long)]
    tol: Option<f64>,
    /// Override the plan's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Run every model under this σ treatment only.
    #[arg(long)]
    sigma: Option<String>,
    /// Worker threads [default: number of processors].
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory [env: FUZZY_EVIDENCE_OUT, default: results].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory of result JSON files written by `evidence` or `compare`.
    #[arg(long)]
    results: PathBuf,
    /// Output directory [env: FUZZY_EVIDENCE_OUT, default: results].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Basic,
    Single,
    Multi,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Basic => Method::Basic,
            MethodArg::Single => Method::Single,
            MethodArg::Multi => Method::Multi,
        }
    }
}

/// How a command ended when it did not fail outright.
enum Outcome {
    Done,
    NotConverged,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Domain(format!("cannot create {}: {e}", dir.display())))
}

fn load_spec(name: &str) -> Result<ModelSpec, Error> {
    if builtin_source(name).is_some() {
        builtin_spec(name)
    } else {
        SpecDocument::load(name)?.build()
    }
}

fn parse_range(text: &str) -> Result<(f64, f64), Error> {
    let bad = || Error::Domain(format!("prior range must look like `LO,HI`, got `{text}`"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

/// File-name-safe form of a cell identity.
fn slug(parts: &[&str]) -> String {
    parts
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                        c
                    } else {
                        '_'
                    }
                })
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("__")
}

fn result_file(r: &EvidenceResult) -> String {
    format!(
        "{}.json",
        slug(&[&r.model, &r.prior, &r.sigma, r.config.method.as_str()])
    )
}

fn generate(args: GenerateArgs) -> Result<Outcome, Error> {
    let data = match args.kind {
        DataKind::Synthetic => generate_synthetic(args.seed, args.n)?,
        DataKind::StandIn => generate_stand_in(&StandIn {
            seed: args.seed,
            rows: args.n,
            noise: args.noise,
            ..StandIn::default()
        })?,
    };
    eprintln!(
        "resolved: kind={:?} seed={} rows={}",
        args.kind, args.seed, args.n
    );
    match args.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                create_dir(parent)?;
            }
            data.save(&path)?;
            eprintln!("wrote {}", path.display());
        }
        None => data.write_csv(std::io::stdout().lock())?,
    }
    Ok(Outcome::Done)
}

fn evidence(args: EvidenceArgs) -> Result<Outcome, Error> {
    let mut spec = load_spec(&args.spec)?;
    if let Some(s) = &args.sigma {
        spec = spec.with_sigma(s.parse::<SigmaMode>()?)?;
    }
    if let Some(r) = &args.prior_range {
        let (lo, hi) = parse_range(r)?;
        spec = spec.with_coefficient_range(lo, hi)?;
    }
    let data = Dataset::load(&args.data)?;
    let config = SamplerConfig {
        n_live: args.n_live,
        tol: args.tol,
        method: args.method.into(),
        seed: args.seed,
        ..SamplerConfig::default()
    };
    config.validate()?;
    let dir = out_dir(args.out);
    eprintln!(
        "resolved: model={} prior={} sigma={} method={} n_live={} tol={} seed={} enlargement={} data={} out={}",
        spec.name(),
        spec.prior_tag(),
        spec.sigma().tag(),
        config.method,
        config.n_live,
        config.tol,
        config.seed,
        config.enlargement,
        args.data.display(),
        dir.display()
    );

    let result = run_evidence(&spec, &data, &config)?;
    create_dir(&dir)?;
    let path = dir.join(result_file(&result));
    result.save(&path)?;
    println!(
        "{}\t{}\tlogZ = {:.4} ± {:.4}\tcalls = {}\titerations = {}\t{}",
        result.model,
        result.config.method,
        result.log_z,
        result.log_z_err,
        result.n_calls,
        result.n_iter,
        result.termination
    );
    eprintln!("wrote {}", path.display());
    Ok(if result.converged() {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

fn load_plan(name: &str) -> Result<ExperimentPlan, Error> {
    match builtin_plan_source(name) {
        Some(text) if !Path::new(name).exists() => ExperimentPlan::parse(text),
        _ => ExperimentPlan::load(name),
    }
}

fn compare(args: CompareArgs) -> Result<Outcome, Error> {
    let mut plan = load_plan(&args.plan)?;
    if let Some(m) = args.method {
        plan.sampler.methods = vec![m.into()];
    }
    if let Some(n) = args.n_live {
        plan.sampler.n_live = n;
    }
    if let Some(t) = args.tol {
        plan.sampler.tol = t;
    }
    if let Some(s) = args.seed {
        plan.sampler.seed = s;
    }
    if let Some(s) = &args.sigma {
        plan.sigma = Some(SigmaBlock {
            modes: vec![SigmaValue::from(s.parse::<SigmaMode>()?)],
        });
    }
    plan.validate()?;
    let dir = out_dir(args.out);
    eprint!("resolved plan:\n{}", plan.to_toml());
    let sigmas = plan.sigma_modes()?;
    for model in plan.resolve_roster()? {
        let specs = match &sigmas {
            Some(modes) => modes
                .iter()
                .map(|s| model.spec.with_sigma(*s))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![model.spec],
        };
        for spec in specs {
            for &m in &plan.sampler.methods {
                let seed = cell_seed(
                    plan.sampler.seed,
                    spec.name(),
                    m,
                    &spec.prior_tag(),
                    &spec.sigma().tag(),
                );
                eprintln!(
                    "cell: model={} prior={} sigma={} method={m} seed={seed}",
                    spec.name(),
                    spec.prior_tag(),
                    spec.sigma().tag()
                );
            }
        }
    }

    let cells = run_cells(&plan, args.workers)?;
    let rows: Vec<ComparisonRow> = cells.iter().map(|c| c.row.clone()).collect();
    let posteriors = posterior_rows(&cells);
    let results_dir = dir.join("results");
    create_dir(&results_dir)?;
    for r in cells.iter().filter_map(|c| c.result.as_ref()) {
        r.save(results_dir.join(result_file(r)))?;
    }
    for path in emit_report(&rows, &posteriors, &dir)? {
        eprintln!("wrote {}", path.display());
    }
    print!("{}", comparison_markdown(&rows));
    Ok(if rows.iter().all(|r| r.converged) {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

fn report(args: ReportArgs) -> Result<Outcome, Error> {
    let dir = &args.results;
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut results = paths
        .iter()
        .map(EvidenceResult::load)
        .collect::<Result<Vec<_>, _>>()?;
    // same order as a comparison run: descending evidence
    results.sort_by(|a, b| {
        compare_rows(
            &ComparisonRow::from_result(a),
            &ComparisonRow::from_result(b),
        )
    });
    let rows: Vec<ComparisonRow> = results.iter().map(ComparisonRow::from_result).collect();
    let posteriors: Vec<PosteriorRow> = results
        .iter()
        .filter_map(PosteriorRow::from_result)
        .collect();
    let out = out_dir(args.out);
    eprintln!(
        "resolved: results={} files={} out={}",
        dir.display(),
        paths.len(),
        out.display()
    );
    for path in emit_report(&rows, &posteriors, &out)? {
        eprintln!("wrote {}", path.display());
    }
    print!("{}", comparison_markdown(&rows));
    Ok(if rows.iter().all(|r| r.converged) {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("{}", line.trim());
            return ExitCode::from(1);
        }
    };
    env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or("warn,fuzzy_evidence::progress=info"),
    )
    .format_timestamp(None)
    .init();

    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Evidence(a) => evidence(a),
        Command::Compare(a) => compare(a),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("error: at least one run did not converge");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
