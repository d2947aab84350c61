//! The `bifract` command line.
//!
//! Exit codes: 0 ok, 1 a verification assertion failed, 2 invalid input,
//! 3 non-contractive input, 4 raster window too small, 5 dimension formula
//! hypotheses violated. Flags may also be set through `BIFRACT_*`
//! environment variables; explicit flags win.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::biaffine::build_biaffine;
use crate::dimension::{closed_form_dimension, dimension_study, StudyConfig, DEFAULT_FIT_MIN_R, DEFAULT_OVERSAMPLE};
use crate::error::{Error, Result};
use crate::ifs::{
    build_maps, chaos_game, chord_bitmap, graph_frame, hutchinson_iterate, Bitmap, Frame, PlaneMap,
    DEFAULT_BURN_IN,
};
use crate::io::{self as fio, Input};
use crate::operator::OperatorContext;
use crate::problem::InterpolationProblem;
use crate::sampled::Lattice;
use crate::verify::{run_suite, Suite, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "bifract", version, about = "Bilinear fractal interpolation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the interpolant on a sample lattice and write `x,f` rows.
    Interpolate(InterpolateArgs),
    /// Render the attractor (the graph of the interpolant).
    Render(RenderArgs),
    /// Closed-form and empirical box-counting dimension.
    Dimension(DimensionArgs),
    /// Run invariant suites and log one JSON line per assertion.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Problem CSV (`x,y,s`) or chain CSV (`x,ylow,yhigh`).
    #[arg(long = "in", env = "BIFRACT_IN")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct InterpolateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output CSV; stdout when omitted.
    #[arg(long, env = "BIFRACT_OUT")]
    pub out: Option<PathBuf>,
    /// Lattice depth: `2^depth · N + 1` samples for uniform knots.
    #[arg(long, default_value_t = 10, env = "BIFRACT_DEPTH")]
    pub depth: u32,
    /// Stop once the a-priori error bound is below this.
    #[arg(long, default_value_t = 1e-10, env = "BIFRACT_TOL")]
    pub tol: f64,
    /// Also write the samples as an SVG polyline.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderMode {
    Chaos,
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ImageFormat {
    Pgm,
    Svg,
    /// Point cloud `x,y` (chaos mode only).
    Csv,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, env = "BIFRACT_OUT")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = RenderMode::Chaos, env = "BIFRACT_MODE")]
    pub mode: RenderMode,
    /// Output format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<ImageFormat>,
    #[arg(long, default_value_t = 1_000_000, env = "BIFRACT_POINTS")]
    pub points: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN, env = "BIFRACT_BURN_IN")]
    pub burn_in: usize,
    #[arg(long, default_value_t = 7, env = "BIFRACT_SEED")]
    pub seed: u64,
    /// Hutchinson rounds in deterministic mode.
    #[arg(long, default_value_t = 12, env = "BIFRACT_K")]
    pub k: usize,
    #[arg(long, default_value_t = 1024, env = "BIFRACT_WIDTH")]
    pub width: usize,
    #[arg(long, default_value_t = 768, env = "BIFRACT_HEIGHT")]
    pub height: usize,
    /// Lower edge of the window (default: fitted to the graph).
    #[arg(long, allow_negative_numbers = true, env = "BIFRACT_YMIN")]
    pub ymin: Option<f64>,
    #[arg(long, allow_negative_numbers = true, env = "BIFRACT_YMAX")]
    pub ymax: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Report the closed form; refusal of its hypotheses is an error.
    #[arg(long)]
    pub closed_form: bool,
    /// Count boxes and fit the slope.
    #[arg(long)]
    pub empirical: bool,
    #[arg(long, default_value_t = 4, env = "BIFRACT_RMIN")]
    pub rmin: u32,
    #[arg(long, default_value_t = 10, env = "BIFRACT_RMAX")]
    pub rmax: u32,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLE, env = "BIFRACT_OVERSAMPLE")]
    pub oversample: u32,
    /// Resolutions below this are excluded from the fit.
    #[arg(long, default_value_t = DEFAULT_FIT_MIN_R, env = "BIFRACT_FIT_MIN_R")]
    pub fit_min_r: u32,
    /// Report CSV `r,N_r,slope_partial`.
    #[arg(long, env = "BIFRACT_REPORT")]
    pub report: Option<PathBuf>,
    /// Log-log SVG plot.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Per-column counts `r,k,N_rk`.
    #[arg(long)]
    pub dump_columns: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Metric,
    Contraction,
    Fixedpoint,
    Vertices,
    Recursion,
    Cylinder,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Problem or chain CSV; a built-in three-map example when omitted.
    #[arg(long = "in", env = "BIFRACT_IN")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 100_000, env = "BIFRACT_TRIALS")]
    pub trials: usize,
    #[arg(long, default_value_t = 1, env = "BIFRACT_SEED")]
    pub seed: u64,
    /// Largest resolution (recursion) or word length (cylinder).
    #[arg(long, default_value_t = 5, env = "BIFRACT_R")]
    pub r: u32,
    /// Strip half-height for the sheared-metric audit.
    #[arg(long, env = "BIFRACT_ETA")]
    pub eta: Option<f64>,
    /// Metric weight `β` for the sheared-metric audit.
    #[arg(long, env = "BIFRACT_BETA")]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 6, env = "BIFRACT_DEPTH")]
    pub depth: u32,
    #[arg(long, default_value_t = 1e-12, env = "BIFRACT_TOL")]
    pub tol: f64,
    /// JSON-lines log file; stdout when omitted.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(v) if v.only_scaling() => 3,
        Error::ScalingNotContractive { .. } | Error::NotContractive { .. } => 3,
        Error::StripTooSmall { .. } => 4,
        Error::HypothesisViolated(_) => 5,
        _ => 2,
    }
}

/// Parses arguments, runs the subcommand and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Interpolate(a) => interpolate(&a).map(|_| 0),
        Command::Render(a) => render(&a).map(|_| 0),
        Command::Dimension(a) => dimension(&a).map(|_| 0),
        Command::Verify(a) => verify(&a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// The interpolation lattice: `2^depth · N + 1` uniform points when the
/// knots are uniform, otherwise the image lattice of comparable size.
pub fn interpolation_lattice(problem: &InterpolationProblem, depth: u32) -> Result<Lattice> {
    if problem.has_uniform_knots() {
        let m = 1usize
            .checked_shl(depth)
            .filter(|_| depth < 28)
            .ok_or(Error::DepthTooLarge { columns: u64::MAX })?;
        Lattice::uniform(problem, m, 1)
    } else {
        let n = problem.n_maps() as f64;
        let levels = ((depth as f64 + n.log2()) / n.log2()).ceil() as u32;
        Lattice::refined(problem, levels.saturating_sub(1))
    }
}

fn interpolate(a: &InterpolateArgs) -> Result<()> {
    let problem = fio::read_input(&a.input.input)?.problem();
    let ctx = OperatorContext::new(problem)?;
    let lattice = interpolation_lattice(ctx.problem(), a.depth)?;
    let fp = ctx.fixed_point(&lattice, a.tol)?;
    let residual = ctx.rb_apply(&fp.function, &lattice)?.sup_distance(&fp.function);
    let summary = format!(
        "iterations={}\nresidual={}\nerror_bound={}\ncontraction_factor={}\noperator_norm_bound={}\nsamples={}",
        fp.iterations,
        fio::fmt17(residual),
        fio::fmt17(fp.error_bound),
        fio::fmt17(ctx.contraction_factor()),
        fio::fmt17(ctx.operator_norm_bound()),
        lattice.len()
    );
    match &a.out {
        Some(path) => {
            fio::write_samples(&fp.function, create(path)?)?;
            println!("{summary}");
        }
        None => {
            fio::write_samples(&fp.function, io::stdout().lock())?;
            eprintln!("{summary}");
        }
    }
    if let Some(path) = &a.svg {
        fio::write_graph_svg(&fp.function, create(path)?)?;
    }
    Ok(())
}

fn infer_format(a: &RenderArgs) -> ImageFormat {
    a.format.unwrap_or_else(|| {
        match a.out.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("svg") => ImageFormat::Svg,
            Some("csv") => ImageFormat::Csv,
            _ => ImageFormat::Pgm,
        }
    })
}

fn render_with<M: PlaneMap>(
    a: &RenderArgs,
    maps: &[M],
    start: (f64, f64),
    frame: Frame,
    initial: impl FnOnce() -> Bitmap,
) -> Result<()> {
    let format = infer_format(a);
    let bitmap = match a.mode {
        RenderMode::Chaos => {
            let pts = chaos_game(maps, start, a.points, a.burn_in, a.seed);
            if format == ImageFormat::Csv {
                return fio::write_points(&pts, create(&a.out)?);
            }
            let (bm, dropped) = Bitmap::from_points(frame, &pts);
            if dropped > 0 {
                eprintln!("warning: {dropped} points fell outside the window");
            }
            bm
        }
        RenderMode::Deterministic => {
            if format == ImageFormat::Csv {
                return Err(Error::InvalidArgument(
                    "csv output is a chaos-game point cloud; use --mode chaos".into(),
                ));
            }
            hutchinson_iterate(maps, &initial(), a.k)?
        }
    };
    let out = create(&a.out)?;
    match format {
        ImageFormat::Svg => fio::write_bitmap_svg(&bitmap, out)?,
        _ => fio::write_pgm(&bitmap, out)?,
    }
    println!(
        "pixels={} window=[{}, {}]x[{}, {}]",
        bitmap.count(),
        frame.x_min,
        frame.x_max,
        frame.y_min,
        frame.y_max
    );
    Ok(())
}

fn render(a: &RenderArgs) -> Result<()> {
    match fio::read_input(&a.input.input)? {
        Input::Chain(chain) => {
            let y = (a.ymin.unwrap_or(0.0), a.ymax.unwrap_or(1.0));
            let frame = Frame::new((0.0, 1.0), y, a.width, a.height)?;
            let maps = build_biaffine(&chain);
            render_with(a, &maps, (0.0, chain.lower()[0]), frame, || Bitmap::full(frame))
        }
        Input::Problem(problem) => {
            OperatorContext::new(problem.clone())?;
            let maps = build_maps(&problem)?;
            let fitted = graph_frame(&problem, a.width, a.height)?;
            let y = (a.ymin.unwrap_or(fitted.y_min), a.ymax.unwrap_or(fitted.y_max));
            let frame = Frame::new(problem.domain(), y, a.width, a.height)?;
            let start = (problem.knots()[0], problem.values()[0]);
            render_with(a, &maps.maps, start, frame, || chord_bitmap(&problem, frame))
        }
    }
}

fn dimension(a: &DimensionArgs) -> Result<()> {
    let problem = fio::read_input(&a.input.input)?.problem();
    let (closed, empirical) = match (a.closed_form, a.empirical) {
        (false, false) => (true, true),
        flags => flags,
    };
    let strict = a.closed_form;
    println!("gamma={}", fio::fmt17(crate::dimension::gamma(&problem)));
    if closed {
        match closed_form_dimension(&problem) {
            Ok(cf) if cf.gamma_le_one => println!("degenerate: gamma<=1, dimension=1"),
            Ok(cf) if cf.collinear => println!("degenerate: collinear, dimension=1"),
            Ok(cf) => println!("closed_form={}", fio::fmt17(cf.dimension)),
            Err(Error::HypothesisViolated(why)) if !strict => {
                println!("closed_form withheld: {why}")
            }
            Err(e) => return Err(e),
        }
    }
    if empirical {
        let cfg = StudyConfig {
            r_min: a.rmin,
            r_max: a.rmax,
            oversample: a.oversample,
            fit_min_r: a.fit_min_r,
        };
        let report = dimension_study(&problem, &cfg)?;
        println!(
            "slope={} ci95=[{}, {}] points={}",
            fio::fmt17(report.fit.slope),
            fio::fmt17(report.fit.ci_low),
            fio::fmt17(report.fit.ci_high),
            report.fit.points
        );
        if let Some(path) = &a.report {
            fio::write_report_csv(&report, create(path)?)?;
        }
        if let Some(path) = &a.plot {
            fio::write_loglog_svg(&report, create(path)?)?;
        }
        if let Some(path) = &a.dump_columns {
            fio::write_columns_csv(&report, create(path)?)?;
        }
    }
    Ok(())
}

/// Built-in input for `verify` without `--in`.
pub fn default_problem() -> InterpolationProblem {
    InterpolationProblem::uniform(vec![0.0, 0.8, 0.3, 0.0], vec![0.5, 0.7, 0.6, 0.5])
        .expect("valid built-in problem")
}

fn verify(a: &VerifyArgs) -> Result<u8> {
    let input = match &a.input {
        Some(path) => fio::read_input(path)?,
        None => Input::Problem(default_problem()),
    };
    let cfg = VerifyConfig {
        trials: a.trials,
        seed: a.seed,
        r: a.r,
        eta: a.eta,
        beta: a.beta,
        depth: a.depth,
        tol: a.tol,
    };
    let suites: Vec<Suite> = match a.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Metric => vec![Suite::Metric],
        SuiteArg::Contraction => vec![Suite::Contraction],
        SuiteArg::Fixedpoint => vec![Suite::Fixedpoint],
        SuiteArg::Vertices => vec![Suite::Vertices],
        SuiteArg::Recursion => vec![Suite::Recursion],
        SuiteArg::Cylinder => vec![Suite::Cylinder],
    };
    let mut log: Box<dyn Write> = match &a.log {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let (mut passed, mut failed) = (0, 0);
    for suite in suites {
        for check in run_suite(suite, &input, &cfg)? {
            writeln!(log, "{}", serde_json::to_string(&check)?)?;
            if check.pass {
                passed += 1;
            } else {
                failed += 1;
                eprintln!("FAIL {}/{}: {}", check.suite, check.check, check.detail);
            }
        }
    }
    log.flush()?;
    eprintln!("{passed} passed, {failed} failed");
    Ok(if failed == 0 { 0 } else { 1 })
}
