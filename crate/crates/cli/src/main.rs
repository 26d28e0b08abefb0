//! Command-line front end: instance generators, algorithm runs, evaluation,
//! benchmarks and matching plots.
//!
//! Exit codes: 0 success, 1 usage, 2 bad data, 3 infeasible run.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use lowdisc::approx::{eps_error, vc_bootstrap_approximate, DEFAULT_C_APX};
use lowdisc::bench::{disc_vs_random, to_csv, tradeoff};
use lowdisc::discrepancy::ColoringReport;
use lowdisc::geometry::{
    build_ball_testset, build_halfspace_testset, gen_points, grid_instance, grid_side, halfspace_to_ball, read_points_csv,
    read_ranges_json, write_points_csv, write_ranges_json, Distribution, GeometricRange, GeometricSystem, PointSet,
};
use lowdisc::matching::MatchingReport;
use lowdisc::presample::{low_disc_color_presampled, matching_presampled, PresampleConfig};
use lowdisc::{
    approximate, build_matching, crossing_number, discrepancy, low_disc_color, params_from_dual_shatter,
    AssumptionParams, Coloring, ExplicitSystem, SetSystem,
};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Infeasible(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(s) | CliError::Data(s) | CliError::Infeasible(s) => s,
        }
    }
}

impl From<lowdisc::Error> for CliError {
    fn from(e: lowdisc::Error) -> Self {
        use lowdisc::Error as E;
        match e {
            E::InvalidParameter(_) | E::Precondition(_) | E::TooLarge { .. } => CliError::Usage(e.to_string()),
            E::InfeasibleSample { .. } | E::EmptyDistribution => CliError::Infeasible(e.to_string()),
            E::Degenerate(_) | E::DimensionMismatch { .. } | E::Data(_) => CliError::Data(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "lowdisc", version, about = "Low-crossing matchings and low-discrepancy colorings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate points, range families and set systems.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Perfect matching with low crossing number, as JSON.
    Match(RunArgs),
    /// Coloring derived from a low-crossing matching, as JSON.
    Color(RunArgs),
    /// Approximation of the ground set by repeated halving, as JSON.
    Approx(ApproxArgs),
    /// Matching over sampled candidate pairs, as JSON.
    PresampleMatch(PresampleArgs),
    /// Coloring from a presampled matching, as JSON.
    PresampleColor(PresampleArgs),
    /// Evaluate a stored artifact against a set system.
    Eval(EvalArgs),
    /// Seeded trial benchmarks, as CSV.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Render artifacts.
    #[command(subcommand)]
    Plot(PlotCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random points as CSV.
    Points {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "uniform-box")]
        dist: Distribution,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Range family over a point file, as JSON.
    Ranges {
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = RangeKind::Halfspace)]
        kind: RangeKind,
        /// Test-set parameter; defaults to ceil(n^{1/d}).
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Grid with axis thresholds, as a set system JSON.
    Grid {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Also write the grid points as CSV.
        #[arg(long)]
        points_out: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Set system JSON induced by ranges on points.
    System {
        points: PathBuf,
        ranges: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RangeKind {
    Halfspace,
    Ball,
}

#[derive(Args)]
struct ParamArgs {
    /// Assumption parameters `a,b,gamma`.
    #[arg(long, value_delimiter = ',', conflicts_with = "dual_shatter")]
    params: Option<Vec<f64>>,
    /// Dual shatter constants `c,d`.
    #[arg(long, value_delimiter = ',')]
    dual_shatter: Option<Vec<f64>>,
}

impl ParamArgs {
    fn resolve(&self, m: usize) -> CliResult<AssumptionParams> {
        match (&self.params, &self.dual_shatter) {
            (Some(p), _) => {
                let [a, b, gamma] = arity(p, "--params a,b,gamma")?;
                Ok(AssumptionParams::new(a, b, gamma)?)
            }
            (None, Some(cd)) => {
                let [c, d] = arity(cd, "--dual-shatter c,d")?;
                Ok(params_from_dual_shatter(c, d, m)?)
            }
            (None, None) => Err(CliError::Usage("one of --params or --dual-shatter is required".into())),
        }
    }
}

fn arity<const K: usize>(values: &[f64], what: &str) -> CliResult<[f64; K]> {
    values
        .try_into()
        .map_err(|_| CliError::Usage(format!("{what} takes {K} comma-separated values, got {}", values.len())))
}

#[derive(Args)]
struct RunArgs {
    system: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ApproxArgs {
    system: PathBuf,
    #[arg(long)]
    eps: f64,
    #[command(flatten)]
    params: ParamArgs,
    /// Halve a uniform presample sized for this VC dimension instead of the
    /// whole ground set.
    #[arg(long)]
    vc_dim: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_C_APX)]
    c_apx: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PresampleArgs {
    system: PathBuf,
    #[arg(long)]
    alpha: f64,
    /// Dual shatter constants `c,d`.
    #[arg(long, value_delimiter = ',', required = true)]
    dual_shatter: Vec<f64>,
    /// Failure probability per round; defaults to 1/|X|.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

impl PresampleArgs {
    fn config(&self) -> CliResult<PresampleConfig> {
        let [c, d] = arity(&self.dual_shatter, "--dual-shatter c,d")?;
        let mut cfg = PresampleConfig::new(c, d, self.alpha)?;
        cfg.delta = self.delta;
        cfg.multiplier = self.multiplier;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Crossing,
    Disc,
    Eps,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(value_enum)]
    measure: Measure,
    artifact: PathBuf,
    system: PathBuf,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Matching coloring against uniform random signs on half-space instances.
    DiscVsRandom {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "256,512,1024")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value = "uniform-box")]
        dist: Distribution,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Presampled colorings across sampling exponents.
    Tradeoff {
        #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25")]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value = "uniform-box")]
        dist: Distribution,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PlotCommand {
    /// SVG drawing of a matching over planar points.
    Matching {
        points: PathBuf,
        matching: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: lowdisc::Error) -> CliError {
    match CliError::from(e) {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn read_system(path: &Path) -> CliResult<ExplicitSystem> {
    ExplicitSystem::from_json(&read_text(path)?).map_err(|e| in_file(path, e))
}

fn read_points(path: &Path) -> CliResult<PointSet> {
    read_points_csv(open(path)?).map_err(|e| in_file(path, e))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { stdout.write_all(b"\n") })
                .map_err(|e| CliError::Data(format!("stdout: {e}")))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("reports serialize")
}

fn check_size(n_expected: usize, n_found: usize, what: &str) -> CliResult<()> {
    if n_expected == n_found {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "{what} covers {n_found} elements but the system has {n_expected}"
        )))
    }
}

fn gen(cmd: GenCommand) -> CliResult<()> {
    match cmd {
        GenCommand::Points {
            n,
            dim,
            dist,
            seed,
            out,
        } => {
            if dim == 0 {
                return Err(CliError::Usage("dimension must be positive".into()));
            }
            let points = gen_points(n, dim, dist, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut buf = Vec::new();
            write_points_csv(&points, &mut buf)?;
            emit(&out, &String::from_utf8(buf).expect("csv output is UTF-8"))
        }
        GenCommand::Ranges {
            points,
            kind,
            t,
            seed,
            out,
        } => {
            let pts = read_points(&points)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ranges: Vec<GeometricRange> = match kind {
                RangeKind::Halfspace => {
                    let t = t.unwrap_or_else(|| grid_side(pts.len().max(1), pts.dim()));
                    build_halfspace_testset(&pts, t, &mut rng)?
                        .into_iter()
                        .map(GeometricRange::HalfSpace)
                        .collect()
                }
                RangeKind::Ball => build_ball_testset(&pts, &mut rng)?
                    .halfspaces
                    .iter()
                    .filter_map(halfspace_to_ball)
                    .map(GeometricRange::Ball)
                    .collect(),
            };
            let mut buf = Vec::new();
            write_ranges_json(&ranges, &mut buf)?;
            emit(&out, &String::from_utf8(buf).expect("json output is UTF-8"))
        }
        GenCommand::Grid {
            n,
            dim,
            points_out,
            out,
        } => {
            let grid = grid_instance(n, dim)?;
            if let Some(path) = points_out {
                let mut buf = Vec::new();
                write_points_csv(grid.points(), &mut buf)?;
                emit(&Some(path), &String::from_utf8(buf).expect("csv output is UTF-8"))?;
            }
            emit(&out, &ExplicitSystem::from_system(&grid).to_json())
        }
        GenCommand::System { points, ranges, out } => {
            let pts = read_points(&points)?;
            let family = read_ranges_json(open(&ranges)?).map_err(|e| in_file(&ranges, e))?;
            let sys = GeometricSystem::new(pts, family).map_err(|e| in_file(&ranges, e))?;
            emit(&out, &ExplicitSystem::from_system(&sys).to_json())
        }
    }
}

fn eval(args: EvalArgs) -> CliResult<()> {
    let sys = read_system(&args.system)?;
    let n = sys.num_elements();
    let value = match args.measure {
        Measure::Crossing => {
            let report: MatchingReport = parse_json(&args.artifact)?;
            let matching = report.matching();
            matching.validate(n).map_err(|e| in_file(&args.artifact, e))?;
            crossing_number(&matching, &sys).to_string()
        }
        Measure::Disc => {
            #[derive(Deserialize)]
            struct Signs {
                signs: Vec<i8>,
            }
            let raw: Signs = parse_json(&args.artifact)?;
            let coloring = Coloring::new(raw.signs).map_err(|e| in_file(&args.artifact, e))?;
            check_size(n, coloring.len(), "coloring")?;
            discrepancy(&coloring, &sys).to_string()
        }
        Measure::Eps => {
            #[derive(Deserialize)]
            struct Subset {
                subset: Vec<usize>,
            }
            let raw: Subset = parse_json(&args.artifact)?;
            if raw.subset.is_empty() {
                return Err(CliError::Data(format!("{}: empty subset", args.artifact.display())));
            }
            if let Some(&x) = raw.subset.iter().find(|&&x| x >= n) {
                return Err(CliError::Data(format!(
                    "{}: element {x} exceeds n = {n}",
                    args.artifact.display()
                )));
            }
            eps_error(&raw.subset, &sys).to_string()
        }
    };
    emit(&None, &value)
}

fn bench(cmd: BenchCommand) -> CliResult<()> {
    match cmd {
        BenchCommand::DiscVsRandom {
            dims,
            n_grid,
            trials,
            dist,
            seed,
            out,
        } => {
            if trials < 2 {
                return Err(CliError::Usage("at least two trials are needed for a spread".into()));
            }
            let mut rows = Vec::new();
            for &n in &n_grid {
                for &dim in &dims {
                    rows.push(disc_vs_random(n, dim, dist, trials, seed)?.0);
                }
            }
            emit(&out, &to_csv(&rows)?)
        }
        BenchCommand::Tradeoff {
            alphas,
            n,
            dim,
            trials,
            dist,
            seed,
            out,
        } => {
            if trials < 2 {
                return Err(CliError::Usage("at least two trials are needed for a spread".into()));
            }
            let (rows, _) = tradeoff(&alphas, n, dim, dist, trials, seed)?;
            emit(&out, &to_csv(&rows)?)
        }
    }
}

/// SVG 1.1 drawing of `edges` over planar `points`, scaled into a square canvas.
fn matching_svg(points: &PointSet, edges: &[[usize; 2]]) -> String {
    const SIZE: f64 = 600.0;
    const PAD: f64 = 20.0;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points.iter() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * PAD) / span;
    let xy = |i: usize| {
        let p = points.point(i);
        (PAD + (p[0] - lo[0]) * scale, SIZE - PAD - (p[1] - lo[1]) * scale)
    };
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(svg, r#"<g stroke="steelblue" stroke-width="1.2">"#).unwrap();
    for &[u, v] in edges.iter().filter(|e| e[0] != e[1]) {
        let ((x1, y1), (x2, y2)) = (xy(u), xy(v));
        writeln!(svg, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#).unwrap();
    }
    writeln!(svg, "</g>").unwrap();
    writeln!(svg, r#"<g fill="black">"#).unwrap();
    for i in 0..points.len() {
        let (x, y) = xy(i);
        writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5"/>"#).unwrap();
    }
    writeln!(svg, "</g>").unwrap();
    for &[u, _] in edges.iter().filter(|e| e[0] == e[1]) {
        let (x, y) = xy(u);
        writeln!(
            svg,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="none" stroke="crimson" stroke-width="1.5"/>"#
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn plot(cmd: PlotCommand) -> CliResult<()> {
    match cmd {
        PlotCommand::Matching { points, matching, out } => {
            let pts = read_points(&points)?;
            if pts.dim() != 2 {
                return Err(CliError::Data(format!(
                    "plotting needs planar points, {} has dimension {}",
                    points.display(),
                    pts.dim()
                )));
            }
            let report: MatchingReport = parse_json(&matching)?;
            report
                .matching()
                .validate(pts.len())
                .map_err(|e| in_file(&matching, e))?;
            emit(&out, &matching_svg(&pts, &report.edges))
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(cmd) => gen(cmd),
        Command::Match(args) => {
            let sys = read_system(&args.system)?;
            let params = args.params.resolve(sys.num_ranges())?;
            let run = build_matching(&sys, &params, &mut ChaCha8Rng::seed_from_u64(args.seed))?;
            let kappa = crossing_number(&run.matching, &sys);
            emit(&args.out, &to_json(&run.matching.to_report(kappa, run.calls.incidence, args.seed)))
        }
        Command::Color(args) => {
            let sys = read_system(&args.system)?;
            let params = args.params.resolve(sys.num_ranges())?;
            let run = low_disc_color(&sys, &params, &mut ChaCha8Rng::seed_from_u64(args.seed))?;
            let report: ColoringReport = run.coloring.to_report(discrepancy(&run.coloring, &sys));
            emit(&args.out, &to_json(&report))
        }
        Command::Approx(args) => {
            let sys = read_system(&args.system)?;
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let params = args.params.resolve(sys.num_ranges())?;
            let result = match args.vc_dim {
                Some(d_vc) => vc_bootstrap_approximate(&sys, &params, args.eps, d_vc, args.c_apx, &mut rng)?,
                None => approximate(&sys, &params, args.eps, &mut rng)?,
            };
            emit(&args.out, &to_json(&result))
        }
        Command::PresampleMatch(args) => {
            let sys = read_system(&args.system)?;
            let run = matching_presampled(&sys, &args.config()?, &mut ChaCha8Rng::seed_from_u64(args.seed))?;
            let kappa = crossing_number(&run.matching, &sys);
            emit(&args.out, &to_json(&run.matching.to_report(kappa, run.calls.incidence, args.seed)))
        }
        Command::PresampleColor(args) => {
            let sys = read_system(&args.system)?;
            let run = low_disc_color_presampled(&sys, &args.config()?, &mut ChaCha8Rng::seed_from_u64(args.seed))?;
            emit(&args.out, &to_json(&run.coloring.to_report(discrepancy(&run.coloring, &sys))))
        }
        Command::Eval(args) => eval(args),
        Command::Bench(cmd) => bench(cmd),
        Command::Plot(cmd) => plot(cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        use lowdisc::Error as E;
        let code = |e: E| CliError::from(e).code();
        assert_eq!(code(E::InvalidParameter("x".into())), 1);
        assert_eq!(code(E::TooLarge { size: 3, limit: 2 }), 1);
        assert_eq!(code(E::Data("x".into())), 2);
        assert_eq!(code(E::DimensionMismatch { expected: 2, found: 3 }), 2);
        assert_eq!(code(E::InfeasibleSample { drawn: 1, requested: 2 }), 3);
        assert_eq!(code(E::EmptyDistribution), 3);
    }

    #[test]
    fn svg_marks_loops() {
        let pts = PointSet::new(2, vec![0.0, 0.0, 1.0, 1.0, 0.5, 0.0]).unwrap();
        let svg = matching_svg(&pts, &[[0, 1], [2, 2]]);
        assert_eq!(svg.matches("<line").count(), 1);
        assert_eq!(svg.matches("crimson").count(), 1);
    }
}
