//! Command-line front end: config-file I/O, reports and CSV tables.
//!
//! Exit status: 0 success, 1 check failed or runtime error, 2 bad input,
//! 3 singular pair, 4 `--releq` on a non-central file, 5 projection mode does
//! not match the curvature sign.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::catalog::{family_mass, lambda_closed_form, ngon_family, FamilyParams};
use crate::ccstat::{analyze, fit_lambda, necessary_sums, Tolerances};
use crate::dynamics::{
    integrate_sampled, relative_equilibrium_velocities, Configuration, PhaseState, Trajectory,
};
use crate::error::Error;
use crate::manifold::{poincare_ball, stereographic, AmbientVector, Sign};
use crate::solver::{
    canonical_gauge_with, dedup_classes, solve_batch, special_curve, SolveOptions, FINGERPRINT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;
pub const EXIT_NOT_CC: i32 = 4;
pub const EXIT_MODE: i32 = 5;

/// On-disk configuration. Positions and velocities are `[x, y, z, w]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub sigma: i64,
    pub masses: Vec<f64>,
    pub positions: Vec<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocities: Option<Vec<[f64; 4]>>,
}

impl ConfigFile {
    pub fn from_configuration(config: &Configuration) -> Self {
        ConfigFile {
            sigma: config.sign().as_i8() as i64,
            masses: config.masses().to_vec(),
            positions: config.positions().iter().map(|q| q.to_array()).collect(),
            velocities: None,
        }
    }

    pub fn from_state(state: &PhaseState) -> Self {
        ConfigFile {
            velocities: Some(state.velocities.iter().map(|v| v.to_array()).collect()),
            ..Self::from_configuration(&state.config)
        }
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|f| Failure::parse(format!("{}: {}", path.display(), f.message)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn save(&self, path: &Path) -> Result<(), Failure> {
        write_file(path, &self.to_json())
    }

    pub fn sign(&self) -> Result<Sign, Failure> {
        Sign::from_i64(self.sigma)
            .ok_or_else(|| Failure::parse(format!("sigma must be 1 or -1 (got {})", self.sigma)))
    }

    pub fn configuration(&self) -> Result<Configuration, Failure> {
        let positions = self
            .positions
            .iter()
            .map(|&a| AmbientVector::from_array(a))
            .collect();
        Configuration::new(self.sign()?, self.masses.clone(), positions).map_err(Failure::from)
    }

    /// The file's velocities, or `None` if it has none.
    pub fn phase_state(&self) -> Result<Option<PhaseState>, Failure> {
        let config = self.configuration()?;
        let Some(v) = &self.velocities else {
            return Ok(None);
        };
        let v = v.iter().map(|&a| AmbientVector::from_array(a)).collect();
        PhaseState::new(config, v).map(Some).map_err(Failure::from)
    }
}

/// A message plus the exit status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularPair(_) => EXIT_SINGULAR,
            Error::InvalidConfig(_) | Error::InvalidArgument(_) => EXIT_PARSE,
            _ => EXIT_FAIL,
        };
        Failure::new(code, e.to_string())
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_FAIL, format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_FAIL, format!("{}: {e}", dir.display())))
}

/// Table to `out` if given, else standard output.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "curved-cc",
    version,
    about = "Central configurations of the curved N-body problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check whether a configuration file is central.
    Verify(VerifyArgs),
    /// Tabulate the two-axis-body polygon family on S^3.
    Family(FamilyArgs),
    /// Search for central configurations from random starts.
    Solve(SolveArgs),
    /// Integrate the equations of motion.
    Integrate(IntegrateArgs),
    /// Project positions to R^3 (stereographic for S^3, Poincare ball for H^3).
    Project(ProjectArgs),
}

#[derive(Debug, Clone, Args)]
struct TolArgs {
    /// |lambda| threshold for special configurations.
    #[arg(long, default_value_t = 1e-9)]
    lambda_tol: f64,
    /// Singular-value threshold for the dimension class.
    #[arg(long, default_value_t = 1e-8)]
    rank_tol: f64,
    /// Phase tolerance for the common-phase test.
    #[arg(long, default_value_t = 1e-8)]
    coplanar_tol: f64,
}

impl TolArgs {
    fn tolerances(&self, cc_tol: f64) -> Tolerances {
        Tolerances {
            lambda_tol: self.lambda_tol,
            cc_tol,
            rank_tol: self.rank_tol,
            coplanar_tol: self.coplanar_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum LambdaArg {
    Fit,
    Value(f64),
}

fn parse_lambda(s: &str) -> Result<LambdaArg, String> {
    if s == "fit" {
        return Ok(LambdaArg::Fit);
    }
    s.parse()
        .map(LambdaArg::Value)
        .map_err(|_| format!("expected a number or `fit`, got `{s}`"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Releq {
    None,
    Spin(f64),
}

fn parse_releq(s: &str) -> Result<Releq, String> {
    if s == "none" {
        return Ok(Releq::None);
    }
    s.parse()
        .map(Releq::Spin)
        .map_err(|_| format!("expected a spin value or `none`, got `{s}`"))
}

#[derive(Debug, Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Multiplier to test, or `fit` for the least-squares value.
    #[arg(long, default_value = "fit", value_parser = parse_lambda)]
    lambda: LambdaArg,
    /// Pass threshold on the largest per-body residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    tols: TolArgs,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Bodies on the ring.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Tabulate a K x K grid over c in [-0.9, -0.1], theta in (0, pi/2) and
    /// its mirror (-c, pi - theta).
    #[arg(long, value_name = "K")]
    grid: Option<usize>,
    /// Emit the zero set of lambda instead: roots theta*(c) for `--c`, or for
    /// the `--grid` c values (9 by default).
    #[arg(long)]
    special_curve: bool,
    /// Output directory for the table and config files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    sigma: i64,
    #[arg(long, value_delimiter = ',', required = true)]
    masses: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Output directory for the summary and one config file per class.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Hold lambda at 0 (special configurations only).
    #[arg(long)]
    special: bool,
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    residual_tol: f64,
    #[command(flatten)]
    tols: TolArgs,
}

#[derive(Debug, Args)]
struct IntegrateArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    /// Start on the relative equilibrium with spin `s`; the file must be
    /// central. `none` uses the file's velocities.
    #[arg(long, default_value = "none", value_parser = parse_releq)]
    releq: Releq,
    /// Residual threshold for the `--releq` centrality check.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Keep every K-th step.
    #[arg(long, default_value_t = 1, value_name = "K")]
    every: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Stereographic,
    Poincare,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Run with the process arguments; returns the exit status.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Family(a) => cmd_family(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Integrate(a) => cmd_integrate(&a),
        Command::Project(a) => cmd_project(&a),
    };
    let _ = std::io::stdout().flush();
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// `key: value` report; the bool is whether the residual passed.
fn verify_report(
    config: &Configuration,
    lambda: LambdaArg,
    tol: f64,
    tols: &Tolerances,
) -> Result<(String, bool), Failure> {
    let lambda = match lambda {
        LambdaArg::Fit => None,
        LambdaArg::Value(l) => Some(l),
    };
    let report = analyze(config, lambda, tols)?;
    let sums = necessary_sums(config)?;
    let mut s = String::new();
    let _ = writeln!(s, "sigma: {}", config.sign().as_i8());
    let _ = writeln!(s, "bodies: {}", config.len());
    let _ = writeln!(s, "lambda: {}", num(report.lambda));
    let _ = writeln!(s, "residual_inf: {}", num(report.residual_inf));
    for (i, r) in report.residual_per_body.iter().enumerate() {
        let _ = writeln!(s, "residual[{i}]: {}", num(*r));
    }
    let _ = writeln!(s, "special: {}", report.is_special);
    let dim = report.dim_class.map_or("degenerate", |d| d.label());
    let _ = writeln!(s, "dim: {dim}");
    match report.common_phi {
        Some(phi) => {
            let _ = writeln!(s, "common_phi: {}", num(phi));
        }
        None => {
            let _ = writeln!(s, "common_phi: none");
        }
    }
    for (i, v) in sums.values.iter().enumerate() {
        if sums.defined_mask[i] {
            let _ = writeln!(s, "necessary_sum[{i}]: {}", num(*v));
        } else {
            let _ = writeln!(s, "necessary_sum[{i}]: undefined");
        }
    }
    let pass = report.residual_inf < tol;
    let _ = writeln!(s, "central: {pass}");
    Ok((s, pass))
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32, Failure> {
    let config = ConfigFile::load(&a.file)?.configuration()?;
    let (text, pass) = verify_report(&config, a.lambda, a.tol, &a.tols.tolerances(a.tol))?;
    print!("{text}");
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}

/// `(c, theta)` points of the K x K family grid, then the mirror rectangle.
pub fn family_grid(k: usize) -> Vec<(f64, f64)> {
    let cs: Vec<f64> = if k == 1 {
        vec![-0.5]
    } else {
        (0..k)
            .map(|i| -0.9 + 0.8 * i as f64 / (k - 1) as f64)
            .collect()
    };
    let thetas: Vec<f64> = (1..=k)
        .map(|j| j as f64 * std::f64::consts::FRAC_PI_2 / (k + 1) as f64)
        .collect();
    let lower: Vec<(f64, f64)> = cs
        .iter()
        .flat_map(|&c| thetas.iter().map(move |&t| (c, t)))
        .collect();
    let mirror = lower.iter().map(|&(c, t)| (-c, std::f64::consts::PI - t));
    lower.iter().copied().chain(mirror).collect()
}

fn family_row(p: &FamilyParams) -> (String, Option<Configuration>) {
    let head = format!("{},{},{}", num(p.c), num(p.theta), p.n);
    if !p.region_valid() {
        return (format!("{head},,,,,,,region_invalid"), None);
    }
    let built = if p.n == 3 {
        crate::catalog::family_q(p)
    } else {
        ngon_family(p.n, p.c, p.theta)
    };
    let config = match built {
        Ok(c) => c,
        Err(Error::NoMassSolution { .. }) => {
            return (format!("{head},,,,,,,no_mass_solution"), None)
        }
        Err(e) => return (format!("{head},,,,,,,error: {e}"), None),
    };
    let m = config.masses()[0];
    let (l1, l2, l) = if p.n == 3 {
        match lambda_closed_form(p) {
            Ok(fl) => (num(fl.lambda1), num(fl.lambda2), num(fl.lambda)),
            Err(_) => (String::new(), String::new(), String::new()),
        }
    } else {
        (String::new(), String::new(), String::new())
    };
    let fit = fit_lambda(&config).map(|f| f.lambda);
    let residual = fit
        .clone()
        .and_then(|l| crate::ccstat::cc_residual(&config, l).map(|r| r.residual_inf));
    match (fit, residual) {
        (Ok(f), Ok(r)) => (
            format!("{head},{},{l1},{l2},{l},{},{},ok", num(m), num(f), num(r)),
            Some(config),
        ),
        (Err(e), _) | (_, Err(e)) => (format!("{head},{},,,,,,error: {e}", num(m)), None),
    }
}

fn cmd_family(a: &FamilyArgs) -> Result<i32, Failure> {
    if a.n < 3 {
        return Err(Failure::parse(format!(
            "--n must be at least 3 (got {})",
            a.n
        )));
    }
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
    }
    if a.special_curve {
        return family_special_curve(a);
    }
    let points = match (a.grid, a.c, a.theta) {
        (Some(k), None, None) if k >= 1 => family_grid(k),
        (None, Some(c), Some(t)) => vec![(c, t)],
        _ => {
            return Err(Failure::parse(
                "give either --c and --theta, or --grid K (K >= 1)",
            ))
        }
    };
    let mut table = String::from("c,theta,n,m,lambda1,lambda2,lambda,lambda_fit,residual,status\n");
    for (k, &(c, theta)) in points.iter().enumerate() {
        let p = FamilyParams::with_n(c, theta, a.n);
        let (row, config) = family_row(&p);
        table.push_str(&row);
        table.push('\n');
        if let (Some(dir), Some(config)) = (&a.out, config) {
            ConfigFile::from_configuration(&config).save(&dir.join(format!("family_{k}.json")))?;
        }
    }
    emit(
        a.out.as_ref().map(|d| d.join("family.csv")).as_deref(),
        &table,
    )?;
    Ok(EXIT_OK)
}

fn family_special_curve(a: &FamilyArgs) -> Result<i32, Failure> {
    if a.n != 3 {
        return Err(Failure::parse(
            "--special-curve is defined for the triangle family (--n 3)",
        ));
    }
    let cs: Vec<f64> = match (a.c, a.grid) {
        (Some(c), None) => vec![c],
        (None, k) => {
            let k = k.unwrap_or(9).max(1);
            if k == 1 {
                vec![-0.5]
            } else {
                (0..k)
                    .map(|i| -0.9 + 0.8 * i as f64 / (k - 1) as f64)
                    .collect()
            }
        }
        (Some(_), Some(_)) => return Err(Failure::parse("--c and --grid are exclusive")),
    };
    let mut table = String::from("c,theta_star,branch,lambda,max_force,m,status\n");
    let mut idx = 0;
    for entry in special_curve(&cs) {
        let c = num(entry.c);
        match &entry.roots {
            Ok(roots) => {
                for r in roots {
                    let m = family_mass(entry.c, r.theta).map(num).unwrap_or_default();
                    let _ = writeln!(
                        table,
                        "{c},{},{},{},{},{m},ok",
                        num(r.theta),
                        r.branch.label(),
                        num(r.lambda),
                        num(r.max_force)
                    );
                    if let Some(dir) = &a.out {
                        let config =
                            crate::catalog::family_q(&FamilyParams::new(entry.c, r.theta))?;
                        ConfigFile::from_configuration(&config)
                            .save(&dir.join(format!("special_{idx}.json")))?;
                        idx += 1;
                    }
                }
            }
            Err(Error::NoSignChange { .. }) => {
                let _ = writeln!(table, "{c},,,,,,no_sign_change");
            }
            Err(Error::RegionInvalid { .. }) => {
                let _ = writeln!(table, "{c},,,,,,region_invalid");
            }
            Err(e) => {
                let _ = writeln!(table, "{c},,,,,,error: {e}");
            }
        }
    }
    emit(
        a.out
            .as_ref()
            .map(|d| d.join("special_curve.csv"))
            .as_deref(),
        &table,
    )?;
    Ok(EXIT_OK)
}

fn cmd_solve(a: &SolveArgs) -> Result<i32, Failure> {
    let sign = Sign::from_i64(a.sigma)
        .ok_or_else(|| Failure::parse(format!("--sigma must be 1 or -1 (got {})", a.sigma)))?;
    if a.masses.len() < 2 || a.masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Failure::parse(
            "--masses needs at least two positive values",
        ));
    }
    if a.trials == 0 {
        return Err(Failure::parse("--trials must be positive"));
    }
    let opts = SolveOptions {
        max_iter: a.max_iter,
        residual_tol: a.residual_tol,
        seed: a.seed,
        fixed_lambda: a.special.then_some(0.0),
        tolerances: a.tols.tolerances(a.residual_tol),
        ..SolveOptions::default()
    };
    opts.validate()?;
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
    }

    let results = solve_batch(sign, &a.masses, a.trials, &opts);
    let errors = results.iter().filter(|r| r.is_err()).count();
    let outcomes: Vec<_> = results.into_iter().filter_map(|r| r.ok()).collect();
    let converged = outcomes.iter().filter(|o| o.converged).count();
    let classes = dedup_classes(outcomes.iter(), FINGERPRINT_TOL);

    let mut table = String::from("class,lambda,dim,residual,multiplicity,coplanar,common_phi\n");
    for (k, class) in classes.iter().enumerate() {
        let config =
            canonical_gauge_with(&class.representative.config, opts.tolerances.coplanar_tol)
                .unwrap_or_else(|_| class.representative.config.clone());
        let report = analyze(&config, opts.fixed_lambda, &opts.tolerances)?;
        let dim = report.dim_class.map_or("degenerate", |d| d.label());
        let (coplanar, phi) = match report.common_phi {
            Some(p) => ("yes", num(p)),
            None => ("no", String::new()),
        };
        let _ = writeln!(
            table,
            "{k},{},{dim},{},{},{coplanar},{phi}",
            num(report.lambda),
            num(report.residual_inf),
            class.multiplicity
        );
        if let Some(dir) = &a.out {
            ConfigFile::from_configuration(&config).save(&dir.join(format!("class_{k}.json")))?;
        }
    }
    println!("trials: {}", a.trials);
    println!("converged: {converged}");
    println!("not_converged: {}", outcomes.len() - converged);
    println!("failed: {errors}");
    println!("classes: {}", classes.len());
    match &a.out {
        Some(dir) => write_file(&dir.join("summary.csv"), &table)?,
        None => {
            println!();
            print!("{table}");
        }
    }
    Ok(EXIT_OK)
}

/// Largest pairwise-distance change of each sample against the first.
fn drift_column(traj: &Trajectory) -> Vec<f64> {
    let d0 = traj
        .states
        .first()
        .and_then(|s| s.config.pairwise_distances().ok())
        .unwrap_or_default();
    traj.states
        .iter()
        .map(|s| match s.config.pairwise_distances() {
            Ok(d) => d
                .iter()
                .zip(&d0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
            Err(_) => f64::NAN,
        })
        .collect()
}

fn trajectory_table(traj: &Trajectory, n: usize) -> String {
    let mut s = String::from("t");
    for i in 0..n {
        for axis in ["x", "y", "z", "w"] {
            let _ = write!(s, ",{axis}{i}");
        }
    }
    s.push_str(",E,J_xy,J_zw,drift\n");
    let drift = drift_column(traj);
    for (k, state) in traj.states.iter().enumerate() {
        s.push_str(&num(traj.times[k]));
        for q in state.config.positions() {
            for c in q.to_array() {
                s.push(',');
                s.push_str(&num(c));
            }
        }
        let _ = writeln!(
            s,
            ",{},{},{},{}",
            num(traj.energy[k]),
            num(traj.momentum_xy[k]),
            num(traj.momentum_zw[k]),
            num(drift[k])
        );
    }
    if let Some(abort) = &traj.abort {
        let pair = abort
            .pair
            .map_or_else(|| "unknown".to_string(), |p| format!("{}-{}", p.0, p.1));
        let _ = writeln!(s, "abort,{},singular pair {pair}", num(abort.time));
    }
    s
}

fn cmd_integrate(a: &IntegrateArgs) -> Result<i32, Failure> {
    let file = ConfigFile::load(&a.file)?;
    let state = match a.releq {
        Releq::Spin(spin) => {
            let config = file.configuration()?;
            let (report, pass) =
                verify_report(&config, LambdaArg::Fit, a.tol, &Tolerances::default())?;
            if !pass {
                eprint!("{report}");
                return Err(Failure::new(
                    EXIT_NOT_CC,
                    "--releq needs a central configuration; the file does not verify",
                ));
            }
            let lambda = fit_lambda(&config)?.lambda;
            let v = relative_equilibrium_velocities(&config, lambda, spin)?;
            PhaseState::new(config, v)?
        }
        Releq::None => file.phase_state()?.ok_or_else(|| {
            Failure::parse("file has no velocities; add them or pass --releq <s>")
        })?,
    };
    let traj = integrate_sampled(&state, a.dt, a.t_end, a.every)?;
    let table = trajectory_table(&traj, state.config.len());
    emit(a.out.as_deref(), &table)?;

    let (jxy, jzw) = traj.max_momentum_error();
    let summary = format!(
        "samples: {}\nmax_distance_drift: {}\nmax_energy_error: {}\nmax_jxy_error: {}\nmax_jzw_error: {}\naborted: {}\n",
        traj.states.len(),
        num(traj.max_distance_drift()),
        num(traj.max_energy_error()),
        num(jxy),
        num(jzw),
        traj.abort.is_some()
    );
    if a.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(EXIT_OK)
}

fn cmd_project(a: &ProjectArgs) -> Result<i32, Failure> {
    let config = ConfigFile::load(&a.file)?.configuration()?;
    let expected = match a.mode {
        Mode::Stereographic => Sign::Spherical,
        Mode::Poincare => Sign::Hyperbolic,
    };
    if config.sign() != expected {
        return Err(Failure::new(
            EXIT_MODE,
            format!(
                "{:?} projection needs sigma = {}, file has {}",
                a.mode,
                expected.as_i8(),
                config.sign().as_i8()
            ),
        ));
    }
    let mut table = String::from("index,mass,X,Y,Z,inside\n");
    for (i, (&m, &q)) in config.masses().iter().zip(config.positions()).enumerate() {
        let p = match a.mode {
            Mode::Stereographic => stereographic(q),
            Mode::Poincare => Ok(poincare_ball(q)),
        };
        match p {
            Ok(p) => {
                let inside = p.iter().map(|c| c * c).sum::<f64>() < 1.0;
                let _ = writeln!(
                    table,
                    "{i},{},{},{},{},{inside}",
                    num(m),
                    num(p[0]),
                    num(p[1]),
                    num(p[2])
                );
            }
            Err(_) => {
                let _ = writeln!(table, "{i},{},,,,pole", num(m));
            }
        }
    }
    emit(a.out.as_deref(), &table)?;
    Ok(EXIT_OK)
}
