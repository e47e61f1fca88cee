use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gnnflow::analysis::{compare, run_sweep, Link, Param, SweepSpec, SweepValues};
use gnnflow::io::{emit, load_config, plot, write_atomic, Format, Override, RunConfig};
use gnnflow::oracle::{check_breakdown, random_engn, random_hygcn, random_tile, Discrepancy};
use gnnflow::{engn, hygcn, Accelerator, ModelError, MovementBreakdown};

const CONFIG_ENV: &str = "GNNFLOW_CONFIG";

#[derive(Parser)]
#[command(
    name = "gnnflow",
    version,
    about = "Data-movement models for the EnGN and HyGCN GNN accelerators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-level data movement for one tile.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        accel: Option<AccelArg>,
    },
    /// Evaluate over a range of one parameter.
    Sweep(SweepArgs),
    /// HyGCN against EnGN, level by level.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check closed forms against the step simulator.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        accel: Option<AccelArg>,
        /// Check N random (tile, config) pairs instead of the configured one.
        #[arg(long, value_name = "N")]
        random: Option<u64>,
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
    },
    /// Hierarchy-weighted energy estimate.
    Energy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        accel: Option<AccelArg>,
        #[arg(long = "w-l1", value_name = "X")]
        w_l1: Option<f64>,
        #[arg(long = "w-l2", value_name = "Y")]
        w_l2: Option<f64>,
        #[arg(long = "w-cache", value_name = "Z")]
        w_cache: Option<f64>,
    },
    /// Print the resolved configuration as TOML.
    Config {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Config file; defaults to $GNNFLOW_CONFIG when set.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set K=2000` or `--set gamma=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the result to FILE instead of stdout.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    accel: Option<AccelArg>,
    #[arg(long, value_name = "NAME")]
    param: Option<String>,
    /// Comma-separated values.
    #[arg(long, value_name = "LIST", conflicts_with = "range")]
    values: Option<String>,
    /// FROM:TO:STEP, or FROM:TO:xFACTOR for a geometric range.
    #[arg(long, value_name = "FROM:TO:STEP")]
    range: Option<String>,
    /// TARGET=COEF*SOURCE, applied at every point.
    #[arg(long = "link", value_name = "LINK")]
    links: Vec<String>,
    /// Also write an SVG chart.
    #[arg(long, value_name = "FILE")]
    plot: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PlotKind::StackedBar)]
    plot_kind: PlotKind,
}

#[derive(Clone, Copy, ValueEnum)]
enum AccelArg {
    Engn,
    Hygcn,
}

impl From<AccelArg> for Accelerator {
    fn from(a: AccelArg) -> Self {
        match a {
            AccelArg::Engn => Accelerator::Engn,
            AccelArg::Hygcn => Accelerator::Hygcn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKind {
    StackedBar,
    Line,
}

/// Loaded configuration plus where and how to write results.
struct Run {
    cfg: RunConfig,
    format: Format,
    output: Option<PathBuf>,
}

impl Common {
    fn load(&self, accel: Option<AccelArg>) -> Result<Run, ModelError> {
        let env_path = std::env::var_os(CONFIG_ENV)
            .filter(|p| !p.is_empty())
            .map(PathBuf::from);
        let path = self.config.clone().or(env_path);
        let overrides = self
            .set
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Override>, _>>()?;
        let mut cfg = load_config(path.as_deref(), &overrides)?;
        if let Some(a) = accel {
            cfg.accelerator = Some(a.into());
        }
        Ok(Run {
            format: self
                .format
                .map(Format::from)
                .or(cfg.output.format)
                .unwrap_or(Format::Table),
            output: self.output.clone().or_else(|| cfg.output.path.clone()),
            cfg,
        })
    }
}

impl Run {
    fn write(&self, text: &str) -> Result<(), ModelError> {
        match &self.output {
            Some(path) => write_atomic(path, text.as_bytes()),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| ModelError::Io(format!("stdout: {e}")))
            }
        }
    }

    fn accelerators(&self) -> Vec<Accelerator> {
        match self.cfg.accelerator {
            Some(a) => vec![a],
            None => vec![Accelerator::Engn, Accelerator::Hygcn],
        }
    }

    fn evaluate(&self, accelerator: Accelerator) -> Result<MovementBreakdown, ModelError> {
        match accelerator {
            Accelerator::Engn => engn::evaluate(&self.cfg.tile, &self.cfg.engn),
            Accelerator::Hygcn => hygcn::evaluate(&self.cfg.tile, &self.cfg.hygcn),
        }
    }
}

fn sweep_spec(args: &SweepArgs, cfg: &RunConfig) -> Result<SweepSpec, ModelError> {
    let from_file = cfg.sweep.as_ref();
    let parameter: Param = match (&args.param, from_file) {
        (Some(p), _) => p.parse()?,
        (None, Some(s)) => s.parameter,
        (None, None) => return Err(ModelError::Config("sweep needs --param".into())),
    };
    let values: SweepValues = match (&args.values, &args.range, from_file) {
        (Some(v), _, _) | (None, Some(v), _) => v.parse()?,
        (None, None, Some(s)) => s.values.clone(),
        (None, None, None) => return Err(ModelError::Config("sweep needs --values or --range".into())),
    };
    let mut links: Vec<Link> = if args.links.is_empty() {
        from_file.map(|s| s.links.clone()).unwrap_or_default()
    } else {
        args.links.iter().map(|l| l.parse()).collect::<Result<_, _>>()?
    };
    // Tile fields the config left unset keep following K.
    if parameter == Param::K {
        for link in &cfg.tile_links {
            if !links.iter().any(|l| l.target == link.target) {
                links.push(*link);
            }
        }
    }
    Ok(SweepSpec {
        parameter,
        values,
        links,
    })
}

fn write_plot(path: &Path, svg: &str) -> Result<(), ModelError> {
    write_atomic(path, svg.as_bytes())
}

fn validate_random(run: &Run, count: u64, seed: u64) -> Vec<(String, Discrepancy)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let accels = run.accelerators();
    let mut found = Vec::new();
    for i in 0..count {
        let tile = random_tile(&mut rng);
        let e = random_engn(&mut rng);
        let h = random_hygcn(&mut rng, &tile);
        for &a in &accels {
            let result = match a {
                Accelerator::Engn => engn::evaluate(&tile, &e),
                Accelerator::Hygcn => hygcn::evaluate(&tile, &h),
            };
            let case = format!("{a}#{i}");
            match result {
                Ok(b) => found.extend(check_breakdown(&b).into_iter().map(|d| (case.clone(), d))),
                Err(err) => found.push((
                    case,
                    Discrepancy {
                        level: "evaluate".into(),
                        issues: vec![err.to_string()],
                    },
                )),
            }
        }
    }
    found
}

fn run(cli: Cli) -> Result<(), ModelError> {
    match cli.command {
        Command::Evaluate { common, accel } => {
            let run = common.load(accel)?;
            let b = run.evaluate(run.cfg.require_accelerator()?)?;
            run.write(&emit::render_breakdown(&b, run.format))
        }
        Command::Sweep(args) => {
            let run = args.common.load(args.accel)?;
            let accelerator = run.cfg.require_accelerator()?;
            let spec = sweep_spec(&args, &run.cfg)?;
            let series = run_sweep(&spec, &run.cfg.tile, &run.cfg.hardware(accelerator))?;
            if let Some(path) = &args.plot {
                let svg = match args.plot_kind {
                    PlotKind::StackedBar => plot::stacked_bar(&series),
                    PlotKind::Line => plot::line(&series),
                };
                write_plot(path, &svg)?;
            }
            run.write(&emit::render_series(&series, run.format))
        }
        Command::Compare { common } => {
            let run = common.load(None)?;
            let c = compare(&run.cfg.tile, &run.cfg.engn, &run.cfg.hygcn)?;
            run.write(&emit::render_comparison(&c, run.format))
        }
        Command::Validate {
            common,
            accel,
            random,
            seed,
        } => {
            let run = common.load(accel)?;
            let (checked, found) = match random {
                Some(n) => (n as usize * run.accelerators().len(), validate_random(&run, n, seed)),
                None => {
                    let mut found = Vec::new();
                    for a in run.accelerators() {
                        let b = run.evaluate(a)?;
                        found.extend(check_breakdown(&b).into_iter().map(|d| (a.to_string(), d)));
                    }
                    (run.accelerators().len(), found)
                }
            };
            run.write(&emit::render_discrepancies(checked, &found, run.format))?;
            if found.is_empty() {
                Ok(())
            } else {
                Err(ModelError::ModelViolation(format!(
                    "{} discrepancies between closed forms and the step simulator",
                    found.len()
                )))
            }
        }
        Command::Energy {
            common,
            accel,
            w_l1,
            w_l2,
            w_cache,
        } => {
            let mut run = common.load(accel)?;
            let w = &mut run.cfg.energy;
            w.w_l1 = w_l1.unwrap_or(w.w_l1);
            w.w_l2 = w_l2.unwrap_or(w.w_l2);
            w.w_cache = w_cache.unwrap_or(w.w_cache);
            w.validate()?;
            let breakdowns = run
                .accelerators()
                .into_iter()
                .map(|a| run.evaluate(a))
                .collect::<Result<Vec<_>, _>>()?;
            run.write(&emit::render_energy(&breakdowns, &run.cfg.energy, run.format))
        }
        Command::Config { common } => {
            let run = common.load(None)?;
            run.write(&run.cfg.to_toml())
        }
    }
}

fn error_kind(e: &ModelError) -> &'static str {
    match e {
        ModelError::DivisionByZero | ModelError::EmptyCaps | ModelError::CapBelowOne(_) => "model",
        ModelError::InvalidParameter { .. } => "invalid-parameter",
        ModelError::UnknownParameter(_) => "unknown-parameter",
        ModelError::NotApplicable { .. } => "not-applicable",
        ModelError::ModelViolation(_) => "model-violation",
        ModelError::Overflow(_) => "overflow",
        ModelError::Config(_) => "config",
        ModelError::Io(_) => "io",
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let msg = text.split("Usage:").next().unwrap_or(&text);
            let msg = msg.trim().trim_start_matches("error:");
            eprintln!("gnnflow: error[usage]: {}", one_line(msg));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gnnflow: error[{}]: {}", error_kind(&e), one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}
