use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crossvol::bounds::bound_report;
use crossvol::classify::{classify_with_tol, DEFAULT_CLASSIFY_REL_TOL};
use crossvol::cross::{
    cross_approximate_with, skeleton_error, CrossOptions, Pivot, PivotStrategy, Termination,
    DEFAULT_BREAKDOWN_TOL,
};
use crossvol::funcross::{
    function_cross_with_tol, Grid, TestFunction, DEFAULT_FUNCTION_BREAKDOWN_TOL, DEFAULT_GRID_SIZE,
};
use crossvol::gallery::{generate, GallerySpec};
use crossvol::maxvol::{check_principal_optimality, VolumeResult};
use crossvol::tightness::{parse_range, sweep};
use crossvol::verify::run_suite;
use crossvol::{Error, Matrix};

#[derive(Parser)]
#[command(
    name = "crossvol",
    version,
    about = "Cross approximation and maximum-volume experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report symmetry, semidefiniteness and diagonal dominance.
    Classify {
        #[command(flatten)]
        source: Source,
        /// Relative tolerance, scaled by the largest entry.
        #[arg(long, default_value_t = DEFAULT_CLASSIFY_REL_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Exhaustive maximum-volume search over all and over principal submatrices.
    Maxvol {
        #[command(flatten)]
        source: Source,
        /// Submatrix size.
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Run m steps of cross approximation.
    Cross {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "full")]
        strategy: PivotStrategy,
        /// Breakdown tolerance relative to the largest entry.
        #[arg(long, default_value_t = DEFAULT_BREAKDOWN_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the achieved skeleton error with every applicable bound.
    Bounds {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Write a test matrix in the text matrix format.
    Gallery {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Kahan angle in radians.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Cross approximation of a bivariate function on a Chebyshev grid.
    Funcross {
        /// One of product, gauss, runge2d, expxy.
        #[arg(long = "function")]
        function: String,
        /// Shift for runge2d.
        #[arg(long, default_value_t = 4.0)]
        c: f64,
        #[arg(long)]
        m: usize,
        /// Points per axis.
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_FUNCTION_BREAKDOWN_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Sweep a gallery family over sizes and fit log-log slopes.
    Tightness {
        #[arg(long)]
        family: String,
        /// `start:step:end` or a single size.
        #[arg(long)]
        n: String,
        #[command(flatten)]
        out: Output,
    },
    /// Run a verification battery.
    Verify {
        /// theorems2, bounds3, funcross or tightness.
        suite: String,
        /// Time budget in seconds.
        #[arg(long, default_value_t = 600)]
        budget: u64,
    },
}

#[derive(Args)]
struct Source {
    /// Matrix file in the text matrix format.
    input: Option<PathBuf>,
    /// Generate the matrix from a gallery family instead of reading a file.
    #[arg(long, conflicts_with = "input")]
    gallery: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args)]
struct Output {
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Overrides the format inferred from the output extension.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Checks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Parse(_) | Error::Usage(_)) => 2,
            Failure::Core(Error::Capability(_)) => 3,
            Failure::Core(Error::Numerical { .. }) => 4,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
            Failure::Checks(n) => format!("{n} check(s) failed"),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads().and_then(|()| run(cli.command)) {
        eprintln!("crossvol: {}", f.message());
        return ExitCode::from(f.exit_code());
    }
    ExitCode::SUCCESS
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("CROSSVOL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::Usage(format!(
            "CROSSVOL_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Usage(format!("cannot configure thread pool: {e}")))?;
    Ok(())
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Classify { source, tol, out } => {
            let a = load(&source)?;
            let class = classify_with_tol(&a, tol * a.max_norm())?;
            let csv = [
                ("is_symmetric", class.is_symmetric),
                ("is_spsd", class.is_spsd),
                ("is_dd", class.is_dd),
                ("is_strictly_dd", class.is_strictly_dd),
                ("is_doubly_dd", class.is_doubly_dd),
            ]
            .iter()
            .fold(String::from("property,value\n"), |mut s, (k, v)| {
                let _ = writeln!(s, "{k},{v}");
                s
            });
            emit(&out, &class, csv)
        }
        Command::Maxvol { source, m, out } => {
            let a = load(&source)?;
            let check = check_principal_optimality(&a, m)?;
            let report = MaxvolOut {
                m,
                principal_optimal: check.holds,
                overall: WitnessOut::from(&check.overall),
                principal: WitnessOut::from(&check.principal),
            };
            let mut csv = String::from("search,rows,cols,volume,is_principal\n");
            for (label, w) in [
                ("overall", &report.overall),
                ("principal", &report.principal),
            ] {
                let _ = writeln!(
                    csv,
                    "{label},{},{},{},{}",
                    join(&w.rows),
                    join(&w.cols),
                    w.volume,
                    w.is_principal
                );
            }
            emit(&out, &report, csv)
        }
        Command::Cross {
            source,
            m,
            strategy,
            tol,
            out,
        } => {
            let a = load(&source)?;
            let res =
                cross_approximate_with(&a, m, strategy, &CrossOptions { breakdown_tol: tol })?;
            let report = CrossOut {
                strategy: res.strategy,
                requested: res.requested,
                steps_completed: res.steps_completed,
                termination: res.termination,
                pivots: res.pivots.iter().map(PivotOut::from).collect(),
                lookahead: res.lookahead.as_ref().map(PivotOut::from),
                skeleton_error: skeleton_error(&a, &res)?,
            };
            let mut csv = String::from("step,row,col,value\n");
            for (k, p) in report.pivots.iter().enumerate() {
                let _ = writeln!(csv, "{},{},{},{}", k + 1, p.row, p.col, p.value);
            }
            emit(&out, &report, csv)
        }
        Command::Bounds { source, m, out } => {
            let a = load(&source)?;
            let report = bound_report(&a, m)?;
            let mut csv = String::from("bound,value,ratio\n");
            for (kind, value) in &report.bounds {
                let _ = writeln!(csv, "{},{},{}", kind.name(), value, report.ratios[kind]);
            }
            emit(&out, &report, csv)
        }
        Command::Gallery {
            name,
            n,
            seed,
            theta,
            output,
        } => {
            let a = generate(&GallerySpec::from_name(&name, n, seed, theta)?)?;
            write_out(output.as_deref(), &a.to_text())
        }
        Command::Funcross {
            function,
            c,
            m,
            grid,
            tol,
            out,
        } => {
            let f = TestFunction::from_name(&function, c)?;
            let grid = Grid::chebyshev(grid)?;
            let res = function_cross_with_tol(&f, m, &grid, tol)?;
            let report = FuncrossOut {
                function: f.name(),
                c: matches!(f, TestFunction::Runge2d { .. }).then_some(c),
                grid_size: grid.xs.len(),
                requested: m,
                steps_completed: res.steps_completed(),
                termination: res.termination,
                points: res
                    .points
                    .iter()
                    .zip(&res.point_indices)
                    .zip(&res.pivot_values)
                    .map(|((&(x, y), &(i, j)), &value)| PointOut {
                        x_index: i + 1,
                        y_index: j + 1,
                        x,
                        y,
                        value,
                    })
                    .collect(),
                error_max: res.error_max,
            };
            let mut csv = String::from("x,y,residual\n");
            for (i, x) in grid.xs.iter().enumerate() {
                for (j, y) in grid.ys.iter().enumerate() {
                    let _ = writeln!(csv, "{x},{y},{}", res.residual_grid[(i, j)]);
                }
            }
            emit(&out, &report, csv)
        }
        Command::Tightness { family, n, out } => {
            let sizes = parse_range(&n)?;
            let s = sweep(&family, &sizes)?;
            let mut csv = String::from(
                "n,norm_l_inv,norm_u_inv,norm_d_inv,r_m,last_pivot,interchanges,slope_l_inv,slope_u_inv,slope_r_m\n",
            );
            for r in &s.rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.n,
                    r.norm_l_inv,
                    r.norm_u_inv,
                    r.norm_d_inv,
                    r.r_m,
                    r.last_pivot,
                    r.interchanges_performed,
                    s.slope_l_inv,
                    s.slope_u_inv,
                    s.slope_r_m
                );
            }
            emit(&out, &s, csv)
        }
        Command::Verify { suite, budget } => {
            let checks = run_suite(&suite, Duration::from_secs(budget))?;
            for c in &checks {
                println!(
                    "{} {suite}/{}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                failed => Err(Failure::Checks(failed)),
            }
        }
    }
}

fn load(source: &Source) -> CliResult<Matrix> {
    match (&source.input, &source.gallery) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(path.clone(), e))?;
            Ok(Matrix::parse(&text)?)
        }
        (None, Some(name)) => {
            let n = source
                .n
                .ok_or_else(|| Error::Usage("--gallery needs --n".into()))?;
            Ok(generate(&GallerySpec::from_name(
                name,
                n,
                source.seed,
                source.theta,
            )?)?)
        }
        _ => Err(Error::Usage("give either a matrix file or --gallery NAME".into()).into()),
    }
}

fn resolve_format(out: &Output) -> Format {
    out.format.unwrap_or_else(|| {
        match out
            .output
            .as_deref()
            .and_then(Path::extension)
            .and_then(|e| e.to_str())
        {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    })
}

fn emit<T: Serialize>(out: &Output, value: &T, csv: String) -> CliResult<()> {
    let text = match resolve_format(out) {
        Format::Csv => csv,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    write_out(out.output.as_deref(), &text)
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(p.to_path_buf(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn join(idx: &[usize]) -> String {
    idx.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

// Human-facing records below carry 1-based indices.

#[derive(Serialize)]
struct WitnessOut {
    rows: Vec<usize>,
    cols: Vec<usize>,
    volume: f64,
    is_principal: bool,
}

impl From<&VolumeResult> for WitnessOut {
    fn from(v: &VolumeResult) -> Self {
        WitnessOut {
            rows: v.row_set.iter().map(|i| i + 1).collect(),
            cols: v.col_set.iter().map(|j| j + 1).collect(),
            volume: v.volume,
            is_principal: v.is_principal,
        }
    }
}

#[derive(Serialize)]
struct MaxvolOut {
    m: usize,
    principal_optimal: bool,
    overall: WitnessOut,
    principal: WitnessOut,
}

#[derive(Serialize)]
struct PivotOut {
    row: usize,
    col: usize,
    value: f64,
}

impl From<&Pivot> for PivotOut {
    fn from(p: &Pivot) -> Self {
        PivotOut {
            row: p.row + 1,
            col: p.col + 1,
            value: p.value,
        }
    }
}

#[derive(Serialize)]
struct CrossOut {
    strategy: PivotStrategy,
    requested: usize,
    steps_completed: usize,
    termination: Termination,
    pivots: Vec<PivotOut>,
    lookahead: Option<PivotOut>,
    skeleton_error: f64,
}

#[derive(Serialize)]
struct PointOut {
    x_index: usize,
    y_index: usize,
    x: f64,
    y: f64,
    value: f64,
}

#[derive(Serialize)]
struct FuncrossOut {
    function: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    grid_size: usize,
    requested: usize,
    steps_completed: usize,
    termination: Termination,
    points: Vec<PointOut>,
    error_max: f64,
}
