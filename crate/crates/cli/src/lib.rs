//! Command line front end for `levyband-core`: JSON model and strategy files,
//! CSV curves for plotting, and multi-threaded Monte Carlo.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use levyband_core::{
    assemble, d_function, horizon, multi_band_recursion, BandStrategy, BarrierInfluence, GerberShiu, Penalty,
    RiskModel, ScaleBasis, SimConfig,
};

pub mod formats;
pub mod parallel;
pub mod report;
pub mod table1;

use formats::{write_csv, ModelDoc, OptimizeReport, SimResultDoc, StrategyDoc};
use report::{Recorder, STDOUT};

pub const AZCUE_MULER: &str = include_str!("../data/azcue_muler.json");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
    #[error("{}: {source}", source.name())]
    Core {
        #[from]
        source: levyband_core::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } => 2,
            CliError::Write { .. } | CliError::Core { .. } => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "levyband", version, about = "Optimal dividend bands for Cramér–Lundberg models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CSV of x, W, W', W'', Z, Z1.
    Scale(ScaleArgs),
    /// CSV of x, F_w, F_w', V_w.
    GerberShiu(GerberShiuArgs),
    /// Optimal bands as JSON, plus G#/D curves as CSV.
    Optimize(OptimizeArgs),
    /// CSV of x, v, v' for a strategy (the optimal one by default).
    Value(ValueArgs),
    /// Monte Carlo estimate of a strategy's value as JSON.
    Simulate(SimulateArgs),
    /// The four linear-penalty cases of the Azcue–Muler model.
    Table1(Table1Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PenaltyKind {
    Zero,
    Affine,
    Exp,
}

#[derive(Debug, Args)]
struct PenaltyArgs {
    #[arg(long, value_enum, default_value = "zero")]
    penalty: PenaltyKind,
    /// Slope (affine) or scale (exp).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
    /// Intercept of the affine penalty.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c0: f64,
    /// Exponent of the exp penalty.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    v: f64,
}

impl PenaltyArgs {
    fn penalty(&self) -> Penalty {
        match self.penalty {
            PenaltyKind::Zero => Penalty::Zero,
            PenaltyKind::Affine => Penalty::Affine { c: self.c, c0: self.c0 },
            PenaltyKind::Exp => Penalty::Exponential { c: self.c, v: self.v },
        }
    }
}

/// `lo:hi:step`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

const MAX_GRID: f64 = 1e7;

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err("expected lo:hi:step".into());
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let g = Grid {
            lo: num(lo)?,
            hi: num(hi)?,
            step: num(step)?,
        };
        if !(g.lo.is_finite() && g.hi.is_finite() && g.step.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if !(g.step > 0.0 && g.hi >= g.lo) {
            return Err("need step > 0 and hi >= lo".into());
        }
        if (g.hi - g.lo) / g.step > MAX_GRID {
            return Err(format!("more than {MAX_GRID} grid points"));
        }
        Ok(g)
    }
}

#[derive(Debug, Args)]
struct ScaleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    grid: Grid,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GerberShiuArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    penalty: PenaltyArgs,
    #[arg(long)]
    grid: Grid,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    penalty: PenaltyArgs,
    /// Fixed cost per dividend payment.
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    /// Stop with an error after this many bands (at most 16).
    #[arg(long)]
    max_bands: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write x, G#, D for the first band to this CSV (D only when K = 0).
    #[arg(long)]
    curves: Option<PathBuf>,
    /// Grid for --curves; defaults to 400 steps over the search horizon.
    #[arg(long, requires = "curves")]
    grid: Option<Grid>,
}

#[derive(Debug, Args)]
struct ValueArgs {
    #[arg(long)]
    model: PathBuf,
    /// JSON strategy; the optimal strategy is computed when absent.
    #[arg(long)]
    strategy: Option<PathBuf>,
    #[command(flatten)]
    penalty: PenaltyArgs,
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    #[arg(long)]
    grid: Grid,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    /// JSON strategy (an optimize report works too).
    #[arg(long, required_unless_present = "ruin_transform")]
    strategy: Option<PathBuf>,
    /// Estimate E_x[exp(-q T)] at the first passage below 0, with no dividends.
    #[arg(long, conflicts_with = "strategy")]
    ruin_transform: bool,
    #[command(flatten)]
    penalty: PenaltyArgs,
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    #[arg(long)]
    x0: f64,
    #[arg(long, default_value_t = 100_000)]
    paths: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// A path stops once exp(-q t) falls below this.
    #[arg(long, default_value_t = 1e-12)]
    discount_floor: f64,
    #[arg(long, default_value_t = parallel::default_threads())]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Table1Args {
    /// Model file; the built-in Azcue–Muler model when absent.
    #[arg(long)]
    model: Option<PathBuf>,
}

fn read_input(rec: &mut Recorder, path: &Path) -> CliResult<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    rec.input(&bytes);
    Ok(bytes)
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, bytes: &[u8]) -> CliResult<T> {
    serde_json::from_slice(bytes).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_model(rec: &mut Recorder, path: &Path) -> CliResult<RiskModel> {
    let doc: ModelDoc = parse(path, &read_input(rec, path)?)?;
    Ok(doc.to_model()?)
}

fn load_strategy(rec: &mut Recorder, path: &Path) -> CliResult<BandStrategy> {
    let doc: StrategyDoc = parse(path, &read_input(rec, path)?)?;
    Ok(doc.to_strategy()?)
}

/// Sends `body` to `path`, or to `stdout` when there is none.
fn emit(
    rec: &mut Recorder,
    stdout: &mut dyn Write,
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult<()> {
    let name = path.map_or(STDOUT.to_string(), |p| p.display().to_string());
    let wrap = |source| CliError::Write {
        path: name.clone(),
        source,
    };
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(wrap)?);
            body(&mut w).and_then(|_| w.flush()).map_err(wrap)?;
        }
        None => body(stdout).map_err(wrap)?,
    }
    rec.output(&name);
    Ok(())
}

fn emit_json<T: serde::Serialize>(
    rec: &mut Recorder,
    stdout: &mut dyn Write,
    path: Option<&Path>,
    value: &T,
) -> CliResult<()> {
    emit(rec, stdout, path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn cmd_scale(a: &ScaleArgs, rec: &mut Recorder, stdout: &mut dyn Write) -> CliResult<()> {
    let b = ScaleBasis::new(&load_model(rec, &a.model)?)?;
    let rows: Vec<Vec<f64>> = a
        .grid
        .points()
        .into_iter()
        .map(|x| vec![x, b.w_q(x, 0), b.w_q(x, 1), b.w_q(x, 2), b.z_q(x, 0), b.z_1(x, 0)])
        .collect();
    emit(rec, stdout, a.out.as_deref(), |w| {
        write_csv(w, &["x", "W", "W'", "W''", "Z", "Z1"], &rows)
    })
}

fn cmd_gerber_shiu(a: &GerberShiuArgs, rec: &mut Recorder, stdout: &mut dyn Write) -> CliResult<()> {
    let b = ScaleBasis::new(&load_model(rec, &a.model)?)?;
    let gs = GerberShiu::new(&b, a.penalty.penalty())?;
    let rows: Vec<Vec<f64>> = a
        .grid
        .points()
        .into_iter()
        .map(|x| vec![x, gs.f_w(x, 0), gs.f_w(x, 1), gs.v_penalty(x)])
        .collect();
    emit(rec, stdout, a.out.as_deref(), |w| {
        write_csv(w, &["x", "F_w", "F_w'", "V_w"], &rows)
    })
}

fn cmd_optimize(a: &OptimizeArgs, rec: &mut Recorder, stdout: &mut dyn Write) -> CliResult<()> {
    let b = ScaleBasis::new(&load_model(rec, &a.model)?)?;
    let gs = GerberShiu::new(&b, a.penalty.penalty())?;
    let (levels, _) = multi_band_recursion(&gs, a.k, a.max_bands)?;
    emit_json(rec, stdout, a.out.as_deref(), &OptimizeReport::new(&levels))?;
    if let Some(path) = &a.curves {
        let bi = BarrierInfluence::new(&gs, a.k);
        let grid = a.grid.unwrap_or(Grid {
            lo: 0.0,
            hi: horizon(&b),
            step: horizon(&b) / 400.0,
        });
        let mut rows = Vec::new();
        for x in grid.points() {
            let mut row = vec![x, bi.g_sharp(x)];
            if a.k == 0.0 {
                row.push(d_function(&bi, x)?);
            }
            rows.push(row);
        }
        let header: &[&str] = if a.k == 0.0 { &["x", "G#", "D"] } else { &["x", "G#"] };
        emit(rec, stdout, Some(path), |w| write_csv(w, header, &rows))?;
    }
    Ok(())
}

fn cmd_value(a: &ValueArgs, rec: &mut Recorder, stdout: &mut dyn Write) -> CliResult<()> {
    let b = ScaleBasis::new(&load_model(rec, &a.model)?)?;
    let gs = GerberShiu::new(&b, a.penalty.penalty())?;
    let v = match &a.strategy {
        Some(path) => assemble(&gs, &load_strategy(rec, path)?, a.k)?,
        None => multi_band_recursion(&gs, a.k, None)?.1,
    };
    let rows: Vec<Vec<f64>> = a
        .grid
        .points()
        .into_iter()
        .map(|x| vec![x, v.evaluate(x), v.derivative(x)])
        .collect();
    emit(rec, stdout, a.out.as_deref(), |w| write_csv(w, &["x", "v", "v'"], &rows))
}

fn cmd_simulate(a: &SimulateArgs, rec: &mut Recorder, stdout: &mut dyn Write) -> CliResult<()> {
    let model = load_model(rec, &a.model)?;
    let mut cfg = SimConfig::new(a.paths, a.seed, a.x0);
    cfg.discount_floor = a.discount_floor;
    cfg.k = a.k;
    let result = match &a.strategy {
        Some(path) => {
            let strategy = load_strategy(rec, path)?;
            parallel::simulate(&model, &strategy, &a.penalty.penalty(), &cfg, a.threads)?
        }
        None => parallel::simulate_ruin_transform(&model, &cfg, a.threads)?,
    };
    emit_json(rec, stdout, a.out.as_deref(), &SimResultDoc::from(result))
}

fn cmd_table1(a: &Table1Args, rec: &mut Recorder, stdout: &mut dyn Write) -> CliResult<()> {
    let model = match &a.model {
        Some(path) => load_model(rec, path)?,
        None => {
            rec.input(AZCUE_MULER.as_bytes());
            let doc: ModelDoc = parse(Path::new("azcue_muler.json"), AZCUE_MULER.as_bytes())?;
            doc.to_model()?
        }
    };
    let rows = table1::rows(&model)?;
    emit(rec, stdout, None, |w| table1::print(w, &rows))
}

/// Runs the tool on `args` (program name first) and returns the exit code:
/// 0 on success, 2 on flag and input-file errors, 1 on computation errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let name = match &cli.command {
        Command::Scale(_) => "scale",
        Command::GerberShiu(_) => "gerber-shiu",
        Command::Optimize(_) => "optimize",
        Command::Value(_) => "value",
        Command::Simulate(_) => "simulate",
        Command::Table1(_) => "table1",
    };
    let mut rec = Recorder::new(name);
    let outcome = match &cli.command {
        Command::Scale(a) => cmd_scale(a, &mut rec, stdout),
        Command::GerberShiu(a) => cmd_gerber_shiu(a, &mut rec, stdout),
        Command::Optimize(a) => cmd_optimize(a, &mut rec, stdout),
        Command::Value(a) => cmd_value(a, &mut rec, stdout),
        Command::Simulate(a) => cmd_simulate(a, &mut rec, stdout),
        Command::Table1(a) => cmd_table1(a, &mut rec, stdout),
    };
    if let Err(e) = outcome {
        let _ = writeln!(stderr, "error: {e}");
        return e.exit_code();
    }
    // Keep standard output clean when it carries data.
    let report = rec.finish();
    let sink: &mut dyn Write = if report.uses_stdout() { stderr } else { stdout };
    let _ = report.print(sink);
    0
}
