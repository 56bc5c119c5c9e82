mod config;

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use discord_qkd::sweep::{format_number, write_csv, write_json};
use discord_qkd::threshold::{
    discord_threshold, transmission_threshold, DEFAULT_TOL, DEFAULT_T_BRACKET, DEFAULT_VD_BRACKET,
};
use discord_qkd::{
    gaussian_discord, gaussian_discord_in, generate_figure, ppt_min_eigenvalue, run_sweep,
    ChannelParams, Detection, Error, Figure, FigureOptions, LogBase, ProtocolConfig,
    Reconciliation, ResultRow, SourceState, Spacing, SweepParam, SweepSpec,
};

use config::Config;

const DEFAULT_VARIANCE: f64 = 40.0;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter { .. }
            | Error::UnsupportedState(_)
            | Error::UnknownFigure(_)
            | Error::DomainError { .. }
            | Error::DegenerateInput(_) => 2,
            Error::NonPhysicalState { .. } => 3,
            Error::NoSignChange { .. } => 5,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "discord-qkd",
    version,
    about = "Gaussian discord, PPT and CV-QKD key rates under an entangling-cloner attack"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one parameter point.
    Eval(PointArgs),
    /// Sweep one parameter over a grid.
    Sweep(SweepArgs),
    /// Write the data behind one of the preset figures.
    Figure(FigureArgs),
    /// Locate the sign change of the key rate.
    Threshold(ThresholdArgs),
    /// Gaussian discord of the source state.
    Discord(DiscordArgs),
    /// Smallest symplectic eigenvalue of the partially transposed source state.
    Ppt(StateArgs),
}

#[derive(Args, Clone)]
struct StateArgs {
    /// key = value file with defaults for any long flag
    #[arg(long)]
    config: Option<PathBuf>,
    /// discord or epr
    #[arg(long)]
    state: Option<StateKind>,
    /// Input variance V_D of the discord state
    #[arg(long, conflicts_with = "ve")]
    vd: Option<f64>,
    /// Quadrature variance V_E of the EPR state
    #[arg(long)]
    ve: Option<f64>,
}

#[derive(Args, Clone)]
struct PointArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Channel transmission
    #[arg(long)]
    t: Option<f64>,
    /// Variance of Eve's EPR pair (1 = no excess noise)
    #[arg(long)]
    w: Option<f64>,
    /// hom, het or all
    #[arg(long)]
    det: Option<Choice<Detection>>,
    /// dr, rr or all
    #[arg(long)]
    rec: Option<Choice<Reconciliation>>,
    /// csv or json
    #[arg(long)]
    format: Option<Format>,
    /// Output file (written atomically); stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report negative key rates as 0
    #[arg(long)]
    clamp_negative: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Swept parameter: vd, ve, t or w
    #[arg(long)]
    sweep: Option<SweepParam>,
    /// lo:hi
    #[arg(long)]
    range: Option<Range>,
    #[arg(long)]
    steps: Option<usize>,
    /// linear or log
    #[arg(long)]
    spacing: Option<Spacing>,
}

#[derive(Args)]
struct FigureArgs {
    /// fig2, fig3a, fig3b, fig4a, fig4b, fig5a, fig5b, fig5c or fig5d
    id: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the pinned W = 1
    #[arg(long)]
    w: Option<f64>,
    /// Points per curve
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    clamp_negative: bool,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    point: PointArgs,
    /// t or discord
    #[arg(long)]
    sweep: Option<ThresholdParam>,
    /// Bracket lo:hi in T, or in V_D for a discord threshold
    #[arg(long)]
    range: Option<Range>,
    /// Bisection tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct DiscordArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Natural logarithm instead of bits
    #[arg(long)]
    nats: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StateKind {
    Discord,
    Epr,
}

impl StateKind {
    fn name(self) -> &'static str {
        match self {
            StateKind::Discord => "discord",
            StateKind::Epr => "epr",
        }
    }
}

impl FromStr for StateKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "discord" => Ok(StateKind::Discord),
            "epr" => Ok(StateKind::Epr),
            other => Err(format!("unknown state `{other}` (expected discord or epr)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Choice<T> {
    One(T),
    All,
}

impl<T: FromStr<Err = String>> FromStr for Choice<T> {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            Ok(Choice::All)
        } else {
            s.parse().map(Choice::One)
        }
    }
}

impl<T: Copy> Choice<T> {
    fn expand(self, all: &[T]) -> Vec<T> {
        match self {
            Choice::One(x) => vec![x],
            Choice::All => all.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Range(f64, f64);

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("range `{s}` must look like lo:hi"))?;
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("range `{s}`: {e}"))
        };
        Ok(Range(num(lo)?, num(hi)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ThresholdParam {
    Transmission,
    Discord,
}

impl FromStr for ThresholdParam {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "t" => Ok(ThresholdParam::Transmission),
            "discord" | "vd" | "v_d" => Ok(ThresholdParam::Discord),
            other => Err(format!("threshold sweeps t or discord, not `{other}`")),
        }
    }
}

impl fmt::Display for ThresholdParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdParam::Transmission => "T",
            ThresholdParam::Discord => "discord",
        })
    }
}

/// Resolves the source from flags and config. A variance flag on the command
/// line shadows both variance keys of the config file.
fn resolve_source(
    args: &StateArgs,
    cfg: &Config,
    implied: Option<StateKind>,
) -> Result<SourceState, CliError> {
    let state = cfg.pick(args.state, "state")?;
    let (vd, ve) = if args.vd.is_some() || args.ve.is_some() {
        (args.vd, args.ve)
    } else {
        (cfg.get::<f64>("vd")?, cfg.get::<f64>("ve")?)
    };
    if let (Some(s), Some(i)) = (state, implied) {
        if s != i {
            return Err(CliError::usage(format!("this sweep needs --state {}", i.name())));
        }
    }
    let kind = match (state.or(implied), vd, ve) {
        (_, Some(_), Some(_)) => return Err(CliError::usage("--vd and --ve are mutually exclusive")),
        (Some(StateKind::Epr), Some(_), None) => {
            return Err(CliError::usage("--vd belongs to the discord state, use --ve with --state epr"))
        }
        (Some(StateKind::Discord), None, Some(_)) => {
            return Err(CliError::usage("--ve belongs to the EPR state, use --vd with --state discord"))
        }
        (Some(k), _, _) => k,
        (None, _, Some(_)) => StateKind::Epr,
        (None, _, None) => StateKind::Discord,
    };
    Ok(match kind {
        StateKind::Discord => SourceState::discord(vd.unwrap_or(DEFAULT_VARIANCE))?,
        StateKind::Epr => SourceState::epr(ve.unwrap_or(DEFAULT_VARIANCE))?,
    })
}

struct Point {
    source: SourceState,
    t: Option<f64>,
    w: f64,
    detections: Vec<Detection>,
    reconciliations: Vec<Reconciliation>,
    format: Format,
    out: Option<PathBuf>,
    clamp: bool,
}

impl Point {
    fn resolve(args: &PointArgs, cfg: &Config, implied: Option<StateKind>) -> Result<Self, CliError> {
        let det = cfg.pick(args.det, "det")?.unwrap_or(Choice::All);
        let rec = cfg.pick(args.rec, "rec")?.unwrap_or(Choice::All);
        Ok(Point {
            source: resolve_source(&args.state, cfg, implied)?,
            t: cfg.pick(args.t, "t")?,
            w: cfg.pick(args.w, "w")?.unwrap_or(1.0),
            detections: det.expand(&Detection::ALL),
            reconciliations: rec.expand(&Reconciliation::ALL),
            format: cfg.pick(args.format, "format")?.unwrap_or(Format::Csv),
            out: cfg.pick(args.out.clone(), "out")?,
            clamp: args.clamp_negative || cfg.get::<bool>("clamp-negative")?.unwrap_or(false),
        })
    }

    fn protocols(&self) -> Vec<(Detection, Reconciliation)> {
        self.detections
            .iter()
            .flat_map(|&d| self.reconciliations.iter().map(move |&r| (d, r)))
            .collect()
    }

    fn single_protocol(&self) -> Result<(Detection, Reconciliation), CliError> {
        match self.protocols()[..] {
            [p] => Ok(p),
            _ => Err(CliError::usage("this command needs a single --det and --rec")),
        }
    }

    fn transmission(&self) -> Result<f64, CliError> {
        self.t.ok_or_else(|| CliError::usage("missing --t"))
    }

    fn config(&self, t: f64, (d, r): (Detection, Reconciliation)) -> Result<ProtocolConfig, CliError> {
        Ok(ProtocolConfig::new(d, r, self.source, ChannelParams::new(t, self.w)?))
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so an aborted run leaves no partial output.
fn emit<F>(out: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let io_err = |what: &str, e: &dyn fmt::Display| CliError::io(format!("{what}: {e}"));
    match out {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|e| io_err("writing stdout", &e))
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(&dir)
                .map_err(|e| io_err(&format!("creating a temporary file in {}", dir.display()), &e))?;
            write(tmp.as_file_mut()).map_err(|e| io_err(&format!("writing {}", path.display()), &e))?;
            tmp.as_file_mut()
                .sync_all()
                .map_err(|e| io_err(&format!("writing {}", path.display()), &e))?;
            tmp.persist(path)
                .map_err(|e| io_err(&format!("renaming into {}", path.display()), &e))?;
            Ok(())
        }
    }
}

fn emit_rows(point: &Point, rows: Vec<ResultRow>) -> Result<(), CliError> {
    let rows: Vec<ResultRow> = if point.clamp {
        rows.into_iter().map(ResultRow::clamp_negative).collect()
    } else {
        rows
    };
    emit(point.out.as_deref(), |w| match point.format {
        Format::Csv => write_csv(&rows, w),
        Format::Json => write_json(&rows, w),
    })
}

fn cmd_eval(args: &PointArgs) -> Result<(), CliError> {
    let cfg = Config::load(args.state.config.as_deref())?;
    let point = Point::resolve(args, &cfg, None)?;
    let t = point.transmission()?;
    let rows = point
        .protocols()
        .into_iter()
        .map(|p| Ok(ResultRow::evaluate(&point.config(t, p)?)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    emit_rows(&point, rows)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = Config::load(args.point.state.config.as_deref())?;
    let param = cfg
        .pick(args.sweep, "sweep")?
        .ok_or_else(|| CliError::usage("missing --sweep"))?;
    let implied = match param {
        SweepParam::InputVariance => Some(StateKind::Discord),
        SweepParam::EprVariance => Some(StateKind::Epr),
        _ => None,
    };
    let point = Point::resolve(&args.point, &cfg, implied)?;
    let Range(lo, hi) = cfg
        .pick(args.range, "range")?
        .ok_or_else(|| CliError::usage("missing --range lo:hi"))?;
    let steps = cfg.pick(args.steps, "steps")?.unwrap_or(101);
    let spacing = cfg.pick(args.spacing, "spacing")?.unwrap_or_default();
    // the swept value replaces T, so T is only required when something else is swept
    let t = match param {
        SweepParam::Transmission => lo,
        _ => point.transmission()?,
    };
    let protocols = point.protocols();
    let base = point.config(t, protocols[0])?;
    let spec = SweepSpec::new(param, (lo, hi), steps, base, protocols)?.with_spacing(spacing)?;
    let rows = run_sweep(&spec)?;
    emit_rows(&point, rows)
}

fn cmd_figure(args: &FigureArgs) -> Result<(), CliError> {
    let figure: Figure = args.id.parse()?;
    let defaults = FigureOptions::default();
    let options = FigureOptions {
        cloner_variance: args.w.unwrap_or(defaults.cloner_variance),
        points: args.steps.unwrap_or(defaults.points),
    };
    let mut table = generate_figure(figure, &options)?;
    if args.clamp_negative {
        for (i, name) in table.columns.clone().iter().enumerate() {
            if name.ends_with(".key_rate") {
                for row in &mut table.rows {
                    row[i] = row[i].map(|k| k.max(0.0));
                }
            }
        }
    }
    emit(args.out.as_deref(), |w| table.write_csv(w))
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<(), CliError> {
    let cfg = Config::load(args.point.state.config.as_deref())?;
    let param = cfg
        .pick(args.sweep, "sweep")?
        .ok_or_else(|| CliError::usage("missing --sweep (t or discord)"))?;
    let implied = (param == ThresholdParam::Discord).then_some(StateKind::Discord);
    let point = Point::resolve(&args.point, &cfg, implied)?;
    let protocol = point.single_protocol()?;
    let tol = cfg.pick(args.tol, "tol")?.unwrap_or(DEFAULT_TOL);
    let range = cfg.pick(args.range, "range")?;

    let (t, variance, threshold, discord) = match param {
        ThresholdParam::Transmission => {
            let (lo, hi) = range.map(|Range(a, b)| (a, b)).unwrap_or(DEFAULT_T_BRACKET);
            let config = point.config(point.t.unwrap_or(hi), protocol)?;
            let t = transmission_threshold(&config, lo, hi, tol)?;
            let discord = gaussian_discord(&point.source.covariance())?;
            (t, point.source.variance(), t, discord)
        }
        ThresholdParam::Discord => {
            let (lo, hi) = range.map(|Range(a, b)| (a, b)).unwrap_or(DEFAULT_VD_BRACKET);
            let t = point.transmission()?;
            let th = discord_threshold(&point.config(t, protocol)?, lo, hi, tol)?;
            (t, th.input_variance, th.discord, th.discord)
        }
    };
    emit(point.out.as_deref(), |w| match point.format {
        Format::Csv => {
            writeln!(w, "parameter,threshold,T,variance,discord")?;
            writeln!(
                w,
                "{param},{},{},{},{}",
                format_number(threshold),
                format_number(t),
                format_number(variance),
                format_number(discord)
            )
        }
        Format::Json => {
            let value = serde_json::json!({
                "parameter": param.to_string(),
                "threshold": threshold,
                "T": t,
                "variance": variance,
                "discord": discord,
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&value)?)
        }
    })
}

fn cmd_discord(args: &DiscordArgs) -> Result<(), CliError> {
    let cfg = Config::load(args.state.config.as_deref())?;
    let source = resolve_source(&args.state, &cfg, None)?;
    let base = if args.nats { LogBase::Nats } else { LogBase::Bits };
    let d = gaussian_discord_in(&source.covariance(), base)?;
    println!("{}", format_number(d));
    Ok(())
}

fn cmd_ppt(args: &StateArgs) -> Result<(), CliError> {
    let cfg = Config::load(args.config.as_deref())?;
    let source = resolve_source(args, &cfg, None)?;
    println!("{}", format_number(ppt_min_eigenvalue(&source.covariance())?));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Discord(a) => cmd_discord(a),
        Command::Ppt(a) => cmd_ppt(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
