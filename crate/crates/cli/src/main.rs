//! `corisk` command-line front end.
//!
//! Exit status: 0 success, 1 usage error, 2 numerical or solver failure,
//! 3 insufficient or invalid data.

mod table;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corisk::copula::{
    fit_beta_copula, Comonotone, Copula, Countermonotone, GumbelParam, Independence,
    PseudoObservations,
};
use corisk::dataio::{
    self, load_panel_path, network_grid, paired_losses, rolling_estimate, system_loss_index,
    weekly_aggregate_dated, GridMeasure, RollingConfig,
};
use corisk::measures::{solve_omega, CoRiskEstimates, RiskLevels};
use corisk::simlab::{
    run_bias_experiment, run_outlier_sweep, BiasExperimentConfig, OutlierSweepConfig, Profile,
};
use corisk::{ErrorKind, Result as CoreResult};

use table::{Cell, Table};

/// Significant digits of every printed float.
const DIGITS: usize = 7;

#[derive(Parser, Debug)]
#[command(
    name = "corisk",
    version,
    about = "Copula-based CoVaR, CoES and MES estimation"
)]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Worker threads (0 = all available cores)
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,

    /// Random seed for simulations
    #[arg(long, env = "CORISK_SEED", global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the omega quantile of a copula
    Omega(OmegaArgs),
    /// Estimate CoVaR, CoES and their deltas from paired losses
    Estimate(EstimateArgs),
    /// Estimate MES (the beta = 0 case) from paired losses
    Mes(InputArgs),
    /// Monte-Carlo experiments
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Rolling-window estimates of one Y against a set of X entities
    Rolling(RollingArgs),
    /// Estimates for every ordered pair of a roster
    Network(NetworkArgs),
    /// Market-value weighted system loss index
    Index(IndexArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct LevelArgs {
    /// Distress level of X
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// Risk level of Y
    #[arg(long, default_value_t = 0.95)]
    beta: f64,
}

impl LevelArgs {
    fn levels(&self) -> CoreResult<RiskLevels> {
        RiskLevels::new(self.alpha, self.beta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CopulaKind {
    Gumbel,
    Empirical,
    Independence,
    Comonotone,
    Countermonotone,
}

#[derive(Args, Debug)]
struct OmegaArgs {
    #[arg(long, value_enum)]
    copula: CopulaKind,
    /// Gumbel parameter (>= 1)
    #[arg(long, conflicts_with = "tau")]
    theta: Option<f64>,
    /// Kendall's tau, converted to the Gumbel parameter
    #[arg(long)]
    tau: Option<f64>,
    /// CSV of pseudo-observations (two columns u, v in (0, 1), header row)
    #[arg(long)]
    pobs: Option<PathBuf>,
    #[command(flatten)]
    levels: LevelArgs,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// CSV of paired losses: two columns x, y with a header row
    #[arg(long, conflicts_with = "panel", required_unless_present = "panel")]
    input: Option<PathBuf>,
    /// Returns panel (date, entity, ret, mv)
    #[arg(long, requires_all = ["x", "y"])]
    panel: Option<PathBuf>,
    /// Conditioning entity in the panel
    #[arg(long)]
    x: Option<String>,
    /// Target entity in the panel
    #[arg(long)]
    y: Option<String>,
    /// Field delimiter of input files
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Accept fewer than 2000 paired observations (with a warning)
    #[arg(long)]
    allow_small: bool,
    /// Distress level of X
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Risk level of Y
    #[arg(long, default_value_t = 0.95)]
    beta: f64,
    /// Report MES instead (beta = 0)
    #[arg(long)]
    mes: bool,
}

#[derive(Subcommand, Debug)]
enum SimulateCommand {
    /// Bias, variance and MSE of the estimators across sample sizes
    Bias(BiasArgs),
    /// Effect of a single outlier (l, l) on the estimates
    Outlier(OutlierArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Desk,
    Full,
}

#[derive(Args, Debug)]
struct BiasArgs {
    /// desk: 500 replications, full: 10000
    #[arg(long, value_enum, default_value_t = ProfileArg::Desk)]
    profile: ProfileArg,
    /// Override the profile's replication count
    #[arg(long)]
    replications: Option<usize>,
    /// Comma-separated sample sizes
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Also write per-replication estimates to this CSV file
    #[arg(long)]
    raw: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OutlierArgs {
    /// Size of the base sample
    #[arg(long, default_value_t = 5000)]
    base_n: usize,
    /// Grid step in quantile space
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// First grid quantile
    #[arg(long, default_value_t = 0.94)]
    q_lo: f64,
    /// Last grid quantile
    #[arg(long, default_value_t = 0.999999)]
    q_hi: f64,
}

#[derive(Args, Debug)]
struct RollingArgs {
    #[arg(long)]
    panel: PathBuf,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Target entity
    #[arg(long)]
    y: String,
    /// Comma-separated X entities (default: every other entity)
    #[arg(long, value_delimiter = ',')]
    x: Option<Vec<String>>,
    #[arg(long, default_value_t = dataio::MIN_SAMPLE_FLOOR)]
    window: usize,
    /// First date to report (YYYY-MM-DD)
    #[arg(long)]
    start: Option<String>,
    /// Last date to report (YYYY-MM-DD)
    #[arg(long)]
    end: Option<String>,
    /// Also emit per-pair rows
    #[arg(long)]
    per_pair: bool,
    /// Accept windows shorter than 2000 observations (with a warning)
    #[arg(long)]
    allow_small: bool,
    #[command(flatten)]
    levels: LevelArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Omega,
    Dcov,
    Dcoes,
    Ratio,
    Xi,
}

impl From<MeasureArg> for GridMeasure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Omega => GridMeasure::Omega,
            MeasureArg::Dcov => GridMeasure::Dcov,
            MeasureArg::Dcoes => GridMeasure::Dcoes,
            MeasureArg::Ratio => GridMeasure::Ratio,
            MeasureArg::Xi => GridMeasure::Xi,
        }
    }
}

#[derive(Args, Debug)]
struct NetworkArgs {
    #[arg(long)]
    panel: PathBuf,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Comma-separated entities (default: all, sorted)
    #[arg(long, value_delimiter = ',')]
    roster: Option<Vec<String>>,
    /// Minimum overlapping observations per pair
    #[arg(long, default_value_t = dataio::MIN_SAMPLE_FLOOR)]
    min_obs: usize,
    /// Print one matrix (X rows, Y columns) instead of the long table
    #[arg(long, value_enum)]
    matrix: Option<MeasureArg>,
    /// Write every matrix and report.csv into this directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write pairs without estimates to this CSV file
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    levels: LevelArgs,
}

#[derive(Args, Debug)]
struct IndexArgs {
    #[arg(long)]
    panel: PathBuf,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Comma-separated entities left out of the index
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,
    /// Compound into 5-day weeks before reporting
    #[arg(long)]
    weekly: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(corisk::Error),
}

impl From<corisk::Error> for CliError {
    fn from(e: corisk::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Core(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Numeric => 2,
                ErrorKind::Data => 3,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let table = match &cli.command {
        Command::Omega(a) => cmd_omega(a)?,
        Command::Estimate(a) => {
            if a.mes {
                cmd_mes(&a.input)?
            } else {
                cmd_estimate(a)?
            }
        }
        Command::Mes(a) => cmd_mes(a)?,
        Command::Simulate(SimulateCommand::Bias(a)) => cmd_bias(cli, a)?,
        Command::Simulate(SimulateCommand::Outlier(a)) => cmd_outlier(cli, a)?,
        Command::Rolling(a) => cmd_rolling(cli, a)?,
        Command::Network(a) => match cmd_network(cli, a)? {
            Some(t) => t,
            None => return Ok(()),
        },
        Command::Index(a) => cmd_index(a)?,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.format {
        Format::Csv => table.write_csv(&mut out, DIGITS)?,
        Format::Json => table.write_json(&mut out, DIGITS)?,
    }
    out.flush()?;
    Ok(())
}

fn delimiter(c: char) -> Result<u8> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| CliError::Usage(format!("delimiter {c:?} must be a single ASCII character")))
}

fn cmd_omega(a: &OmegaArgs) -> Result<Table> {
    let levels = a.levels.levels()?;
    let model: Box<dyn Copula> = match a.copula {
        CopulaKind::Independence => Box::new(Independence),
        CopulaKind::Comonotone => Box::new(Comonotone),
        CopulaKind::Countermonotone => Box::new(Countermonotone),
        CopulaKind::Gumbel => {
            let theta = match (a.theta, a.tau) {
                (Some(t), _) => GumbelParam::new(t)?,
                (None, Some(tau)) => GumbelParam::from_kendall_tau(tau)?,
                (None, None) => {
                    return Err(CliError::Usage(
                        "--copula gumbel needs --theta or --tau".into(),
                    ))
                }
            };
            Box::new(theta)
        }
        CopulaKind::Empirical => {
            let path = a
                .pobs
                .as_ref()
                .ok_or_else(|| CliError::Usage("--copula empirical needs --pobs FILE".into()))?;
            let (u, v) = read_two_columns(path, b',')?;
            Box::new(fit_beta_copula(&PseudoObservations::from_uniform(u, v)?))
        }
    };
    let sol = solve_omega(levels, model.as_ref())?;
    let mut t = Table::new(["omega", "residual", "bracket_lo", "bracket_hi"]);
    t.push(vec![
        Cell::Num(sol.omega),
        Cell::Num(sol.residual),
        Cell::Num(sol.bracket[0]),
        Cell::Num(sol.bracket[1]),
    ]);
    Ok(t)
}

/// First two columns of a headed CSV file as numbers.
fn read_two_columns(path: &Path, delim: u8) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delim)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let parse = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::Core(corisk::Error::InsufficientData(format!(
                        "{}: line {line}: expected two numeric columns",
                        path.display()
                    )))
                })
        };
        a.push(parse(0)?);
        b.push(parse(1)?);
    }
    Ok((a, b))
}

fn read_pairs(a: &InputArgs) -> Result<(Vec<f64>, Vec<f64>)> {
    let delim = delimiter(a.delimiter)?;
    if let Some(path) = &a.input {
        return read_two_columns(path, delim);
    }
    let (Some(panel), Some(x), Some(y)) = (&a.panel, &a.x, &a.y) else {
        return Err(CliError::Usage(
            "give --input FILE or --panel FILE --x X --y Y".into(),
        ));
    };
    if x == y {
        return Err(CliError::Usage("--x and --y must differ".into()));
    }
    let panel = load_panel_path(panel, delim)?;
    let p = paired_losses(&panel, x, y)?;
    Ok((p.x, p.y))
}

fn estimates_table(n: usize, e: &CoRiskEstimates) -> Table {
    let mut t = Table::new([
        "n", "omega", "covar", "coes", "dcov", "dcoes", "mes", "ratio", "xi",
    ]);
    t.push(vec![
        Cell::Int(n as i64),
        Cell::Num(e.omega),
        Cell::Num(e.covar),
        Cell::Num(e.coes),
        Cell::Num(e.dcov),
        Cell::Num(e.dcoes),
        Cell::opt(e.mes),
        Cell::opt(e.ratio),
        Cell::opt(e.xi_hat),
    ]);
    t
}

fn cmd_estimate(a: &EstimateArgs) -> Result<Table> {
    let levels = RiskLevels::new(a.input.alpha, a.beta)?;
    let (xs, ys) = read_pairs(&a.input)?;
    let e = dataio::estimate_paired(&xs, &ys, levels, a.input.allow_small)?;
    Ok(estimates_table(xs.len(), &e))
}

fn cmd_mes(a: &InputArgs) -> Result<Table> {
    let levels = RiskLevels::mes(a.alpha)?;
    let (xs, ys) = read_pairs(a)?;
    let e = dataio::estimate_mes(&xs, &ys, levels.alpha(), a.allow_small)?;
    let mut t = Table::new(["n", "alpha", "omega", "mes"]);
    t.push(vec![
        Cell::Int(xs.len() as i64),
        Cell::Num(levels.alpha()),
        Cell::Num(e.0),
        Cell::Num(e.1),
    ]);
    Ok(t)
}

fn require_seed(cli: &Cli) -> Result<u64> {
    cli.seed
        .ok_or_else(|| CliError::Usage("simulations need --seed or CORISK_SEED".into()))
}

fn cmd_bias(cli: &Cli, a: &BiasArgs) -> Result<Table> {
    let profile = match a.profile {
        ProfileArg::Desk => Profile::Desk,
        ProfileArg::Full => Profile::Full,
    };
    let mut cfg = BiasExperimentConfig::new(profile, require_seed(cli)?);
    if let Some(m) = a.replications {
        cfg.replications = m;
    }
    if let Some(sizes) = &a.sizes {
        cfg.sizes = sizes.clone();
    }
    cfg.jobs = cli.jobs;
    let out = run_bias_experiment(&cfg)?;
    for f in &out.failures {
        eprintln!(
            "replication {} n={} failed: {}",
            f.replication, f.n, f.message
        );
    }
    if let Some(path) = &a.raw {
        let mut raw = Table::new(["replication", "n", "omega", "dcov", "dcoes", "xi"]);
        for r in &out.raw {
            raw.push(vec![
                Cell::Int(r.replication as i64),
                Cell::Int(r.n as i64),
                Cell::Num(r.omega),
                Cell::Num(r.dcov),
                Cell::Num(r.dcoes),
                Cell::opt(r.xi),
            ]);
        }
        raw.write_csv(File::create(path)?, DIGITS)?;
    }
    let mut t = Table::new([
        "estimand", "n", "truth", "count", "mean", "bias", "variance", "mse",
    ]);
    for r in &out.summary.rows {
        t.push(vec![
            Cell::Str(r.estimand.name().into()),
            Cell::Int(r.n as i64),
            Cell::Num(r.truth),
            Cell::Int(r.stats.count as i64),
            Cell::Num(r.stats.mean),
            Cell::Num(r.stats.bias),
            Cell::Num(r.stats.variance),
            Cell::Num(r.stats.mse),
        ]);
    }
    Ok(t)
}

fn cmd_outlier(cli: &Cli, a: &OutlierArgs) -> Result<Table> {
    let mut cfg = OutlierSweepConfig::new(require_seed(cli)?);
    cfg.base_n = a.base_n;
    cfg.step = a.step;
    cfg.q_lo = a.q_lo;
    cfg.q_hi = a.q_hi;
    cfg.jobs = cli.jobs;
    let out = run_outlier_sweep(&cfg)?;
    let mut t = Table::new(["l", "ddcov", "ddcoes", "omega", "xi"]);
    for r in &out.rows {
        t.push(vec![
            Cell::Num(r.l),
            Cell::Num(r.ddcov),
            Cell::Num(r.ddcoes),
            Cell::Num(r.omega),
            Cell::opt(r.xi),
        ]);
    }
    Ok(t)
}

fn parse_date(s: &Option<String>, flag: &str) -> Result<Option<dataio::NaiveDate>> {
    s.as_deref()
        .map(|d| {
            dataio::NaiveDate::parse_from_str(d, "%Y-%m-%d")
                .map_err(|e| CliError::Usage(format!("{flag} {d:?}: {e}")))
        })
        .transpose()
}

fn cmd_rolling(cli: &Cli, a: &RollingArgs) -> Result<Table> {
    let panel = load_panel_path(&a.panel, delimiter(a.delimiter)?)?;
    let xs = match &a.x {
        Some(xs) => xs.clone(),
        None => panel
            .entities()
            .into_iter()
            .filter(|e| *e != a.y)
            .map(String::from)
            .collect(),
    };
    let mut cfg = RollingConfig::new(a.y.clone(), xs);
    cfg.window = a.window;
    cfg.levels = a.levels.levels()?;
    cfg.start = parse_date(&a.start, "--start")?;
    cfg.end = parse_date(&a.end, "--end")?;
    cfg.allow_small = a.allow_small;
    cfg.keep_pairs = a.per_pair;
    cfg.jobs = cli.jobs;
    let rows = rolling_estimate(&cfg, &panel)?;

    let mut t = Table::new([
        "date", "x", "used", "dropped", "omega", "covar", "coes", "dcov", "dcoes", "mes", "ratio",
        "xi",
    ]);
    let push = |t: &mut Table, date: String, x: &str, counts: [Cell; 2], e: &CoRiskEstimates| {
        let [used, dropped] = counts;
        t.push(vec![
            Cell::Str(date),
            Cell::Str(x.into()),
            used,
            dropped,
            Cell::Num(e.omega),
            Cell::Num(e.covar),
            Cell::Num(e.coes),
            Cell::Num(e.dcov),
            Cell::Num(e.dcoes),
            Cell::opt(e.mes),
            Cell::opt(e.ratio),
            Cell::opt(e.xi_hat),
        ]);
    };
    for r in &rows {
        let counts = [Cell::Int(r.used as i64), Cell::Int(r.dropped as i64)];
        push(&mut t, r.date.to_string(), "mean", counts, &r.average);
        for (x, e) in &r.pairs {
            if let Some(e) = e {
                push(&mut t, r.date.to_string(), x, [Cell::Empty, Cell::Empty], e);
            }
        }
    }
    Ok(t)
}

/// Prints the long table (or one matrix) unless `--out-dir` is given, in
/// which case every matrix is written there and nothing is printed.
fn cmd_network(cli: &Cli, a: &NetworkArgs) -> Result<Option<Table>> {
    let panel = load_panel_path(&a.panel, delimiter(a.delimiter)?)?;
    let roster = match &a.roster {
        Some(r) => r.clone(),
        None => panel.entities().into_iter().map(String::from).collect(),
    };
    let grid = network_grid(&panel, a.levels.levels()?, &roster, a.min_obs, cli.jobs)?;

    let failed = grid.cells.len() - grid.succeeded();
    if failed > 0 {
        eprintln!("{failed} of {} pairs have no estimate", grid.cells.len());
    }
    if let Some(path) = &a.report {
        grid.write_report(File::create(path)?)?;
    }
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir)?;
        for m in GridMeasure::ALL {
            grid.write_matrix(
                m,
                File::create(dir.join(format!("{}.csv", m.name())))?,
                DIGITS,
            )?;
        }
        grid.write_report(File::create(dir.join("report.csv"))?)?;
    }
    if grid.succeeded() == 0 {
        return Err(CliError::Core(corisk::Error::InsufficientData(
            "no pair of the roster could be estimated".into(),
        )));
    }
    if a.out_dir.is_some() {
        return Ok(None);
    }

    if let Some(m) = a.matrix {
        let m = GridMeasure::from(m);
        let mut header = vec!["x".to_string()];
        header.extend(grid.roster.iter().cloned());
        let mut t = Table::new(header);
        for x in &grid.roster {
            let mut row = vec![Cell::Str(x.clone())];
            for y in &grid.roster {
                let v = grid
                    .cell(x, y)
                    .and_then(|c| c.estimates.as_ref())
                    .and_then(|e| m.get(e));
                row.push(Cell::opt(v));
            }
            t.push(row);
        }
        return Ok(Some(t));
    }

    let mut t = Table::new([
        "x", "y", "n_obs", "status", "omega", "covar", "coes", "dcov", "dcoes", "mes", "ratio",
        "xi",
    ]);
    for c in &grid.cells {
        let mut row = vec![
            Cell::Str(c.x.clone()),
            Cell::Str(c.y.clone()),
            Cell::Int(c.n_obs as i64),
        ];
        match &c.estimates {
            Some(e) => row.extend([
                Cell::Str("ok".into()),
                Cell::Num(e.omega),
                Cell::Num(e.covar),
                Cell::Num(e.coes),
                Cell::Num(e.dcov),
                Cell::Num(e.dcoes),
                Cell::opt(e.mes),
                Cell::opt(e.ratio),
                Cell::opt(e.xi_hat),
            ]),
            None => {
                row.push(Cell::Str(c.note.clone().unwrap_or_default()));
                row.extend(std::iter::repeat_n(Cell::Empty, 8));
            }
        }
        t.push(row);
    }
    Ok(Some(t))
}

fn cmd_index(a: &IndexArgs) -> Result<Table> {
    let panel = load_panel_path(&a.panel, delimiter(a.delimiter)?)?;
    let exclude: BTreeSet<String> = a.exclude.iter().cloned().collect();
    let mut index = system_loss_index(&panel, &exclude)?;
    if a.weekly {
        // compound index returns, then report the weekly loss
        let returns: Vec<_> = index.iter().map(|(d, l)| (*d, -l)).collect();
        index = weekly_aggregate_dated(&returns)
            .into_iter()
            .map(|(d, r)| (d, -r))
            .collect();
    }
    let mut t = Table::new(["date", "loss"]);
    for (d, l) in index {
        t.push(vec![Cell::Str(d.to_string()), Cell::Num(l)]);
    }
    Ok(t)
}
