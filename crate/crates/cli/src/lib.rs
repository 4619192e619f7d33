//! Command-line front end. [`run`] takes the argument list and two output
//! streams and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | usage, parse or validation error |
//! | 2 | infeasible invariant |
//! | 3 | solver did not converge |

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::Matrix3;
use polysphere::angles::{self, FeasibilityStatus};
use polysphere::capacity;
use polysphere::cycles::{find_pi_cycles, PiCycleSearch};
use polysphere::lobachevsky::lobachevsky;
use polysphere::solver::{self, SolveOptions, SolveReport, SolveStatus};
use polysphere::trig::{self, BoundaryType, TriangleAngles, CLASSIFY_EPS};
use polysphere::{parse_mesh, EdgeFunction, MeshFile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

/// Invariant values within this of π count as π when searching for cycles.
const PI_CYCLE_EPS: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "polysphere",
    version,
    about = "Spherical polyhedron metrics from edge invariants"
)]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Flags {
    /// Reduced-gradient tolerance for the solver.
    #[arg(
        long,
        global = true,
        value_name = "REAL",
        allow_negative_numbers = true
    )]
    tol: Option<f64>,
    /// Newton iteration cap.
    #[arg(long, global = true, value_name = "INT")]
    max_iters: Option<usize>,
    /// Start the solver from a random feasible point drawn with this seed
    /// instead of the feasibility witness.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    /// Emit `key=value` lines.
    #[arg(long, global = true)]
    machine: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mesh counts, validation and π-cycle warnings.
    Info { path: PathBuf },
    /// Decide whether the invariant table is realized by an angle structure.
    Feas { path: PathBuf },
    /// Solve for the metric with the file's invariant table.
    Solve { path: PathBuf },
    /// Recover the file's length table from its own invariant.
    Roundtrip { path: PathBuf },
    /// Trigonometry and capacity of a single triangle.
    Triangle {
        #[arg(long, num_args = 3, value_names = ["A", "B", "C"], allow_negative_numbers = true, required = true)]
        angles: Vec<f64>,
    },
    /// The Lobachevsky function.
    Lob {
        #[arg(allow_negative_numbers = true)]
        t: f64,
    },
}

/// Numbers with 12 significant digits, shortest form, locale-free.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    machine: bool,
}

impl Printer<'_> {
    fn field(&mut self, key: &str, value: impl std::fmt::Display) -> io::Result<()> {
        if self.machine {
            writeln!(self.out, "{key}={value}")
        } else {
            writeln!(self.out, "{key}: {value}")
        }
    }

    fn num(&mut self, key: &str, v: f64) -> io::Result<()> {
        self.field(key, fmt_num(v))
    }

    fn nums(&mut self, key: &str, vs: &[f64]) -> io::Result<()> {
        if self.machine {
            for (i, v) in vs.iter().enumerate() {
                writeln!(self.out, "{key}.{}={}", i + 1, fmt_num(*v))?;
            }
            Ok(())
        } else {
            let joined: Vec<String> = vs.iter().map(|v| fmt_num(*v)).collect();
            writeln!(self.out, "{key}: {}", joined.join(" "))
        }
    }

    /// One row per item; machine keys are `column.item`.
    fn table(&mut self, header: &[&str], rows: &[(String, Vec<f64>)]) -> io::Result<()> {
        if self.machine {
            for (name, values) in rows {
                for (col, v) in header[1..].iter().zip(values) {
                    writeln!(self.out, "{col}.{name}={}", fmt_num(*v))?;
                }
            }
            return Ok(());
        }
        let width = rows
            .iter()
            .map(|(n, _)| n.len())
            .chain([header[0].len()])
            .max()
            .unwrap_or(0);
        write!(self.out, "{:<width$}", header[0])?;
        for h in &header[1..] {
            write!(self.out, "  {h:>18}")?;
        }
        writeln!(self.out)?;
        for (name, values) in rows {
            write!(self.out, "{name:<width$}")?;
            for v in values {
                write!(self.out, "  {:>18}", fmt_num(*v))?;
            }
            writeln!(self.out)?;
        }
        Ok(())
    }
}

/// A failure carrying its exit code and message for the diagnostic stream.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<polysphere::Error> for Failure {
    fn from(e: polysphere::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(format!("output: {e}"))
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn solve_options(flags: &Flags) -> Result<SolveOptions, Failure> {
    let mut opts = SolveOptions::default();
    if let Some(tol) = flags.tol {
        opts.grad_tol = tol;
    }
    if let Some(n) = flags.max_iters {
        opts.max_iters = n;
    }
    opts.validate()?;
    Ok(opts)
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    // flags are checked before any file is read
    let opts = solve_options(&cli.flags)?;
    let mut p = Printer {
        out,
        machine: cli.flags.machine,
    };
    match &cli.command {
        Command::Info { path } => info(&mut p, err, &load(path)?),
        Command::Feas { path } => feas(&mut p, &load(path)?),
        Command::Solve { path } => solve(&mut p, err, &load(path)?, &opts, cli.flags.seed),
        Command::Roundtrip { path } => roundtrip(&mut p, &load(path)?, &opts),
        Command::Triangle { angles } => triangle(&mut p, [angles[0], angles[1], angles[2]]),
        Command::Lob { t } => {
            if !t.is_finite() {
                return Err(Failure::usage(format!("argument {t} is not finite")));
            }
            p.num("lambda", lobachevsky(*t))?;
            Ok(EXIT_OK)
        }
    }
}

fn load(path: &Path) -> Result<MeshFile, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let file = parse_mesh(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let report = file.mesh.validate();
    if !report.is_ok() {
        return Err(Failure::usage(format!("{}: {report}", path.display())));
    }
    Ok(file)
}

fn require_invariant(file: &MeshFile) -> Result<&EdgeFunction, Failure> {
    file.invariant
        .as_ref()
        .ok_or_else(|| Failure::usage("the mesh file has no invariant table"))
}

fn warn_pi_cycles(
    err: &mut dyn Write,
    file: &MeshFile,
    d: &EdgeFunction,
) -> Result<usize, Failure> {
    let search = find_pi_cycles(&file.mesh, d, PI_CYCLE_EPS)?;
    match &search {
        PiCycleSearch::NotChecked => writeln!(
            err,
            "warning: mesh too large for the π-cycle search; not checked"
        )?,
        PiCycleSearch::Truncated(_) => writeln!(
            err,
            "warning: π-cycle search stopped early; list is incomplete"
        )?,
        PiCycleSearch::Checked(_) => {}
    }
    for c in search.cycles() {
        writeln!(
            err,
            "warning: invariant is π along the cycle {}",
            c.describe()
        )?;
    }
    Ok(search.cycles().len())
}

fn info(p: &mut Printer, err: &mut dyn Write, file: &MeshFile) -> Result<i32, Failure> {
    let m = &file.mesh;
    if let Some(name) = m.name() {
        p.field("surface", name)?;
    }
    p.field("faces", m.num_faces())?;
    p.field("edges", m.num_edges())?;
    p.field("corners", m.num_corners())?;
    p.field("valid", "true")?;
    p.field("invariant", file.invariant.is_some())?;
    p.field("length", file.length.is_some())?;
    if let Some(d) = &file.invariant {
        let n = warn_pi_cycles(err, file, d)?;
        p.field("pi_cycles", n)?;
    }
    Ok(EXIT_OK)
}

fn feas(p: &mut Printer, file: &MeshFile) -> Result<i32, Failure> {
    let d = require_invariant(file)?;
    let r = angles::feasibility(&file.mesh, d)?;
    let feasible = r.status == FeasibilityStatus::Feasible;
    if p.machine {
        p.field("status", if feasible { "feasible" } else { "infeasible" })?;
    } else {
        writeln!(
            p.out,
            "{}",
            if feasible { "FEASIBLE" } else { "INFEASIBLE" }
        )?;
    }
    p.num("slack", r.slack)?;
    p.field("marginal", r.marginal)?;
    if let Some(cert) = &r.certificate {
        p.field("certificate", cert)?;
    }
    Ok(if feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn solve(
    p: &mut Printer,
    err: &mut dyn Write,
    file: &MeshFile,
    opts: &SolveOptions,
    seed: Option<u64>,
) -> Result<i32, Failure> {
    let d = require_invariant(file)?;
    let m = &file.mesh;
    warn_pi_cycles(err, file, d)?;
    let report = match seed {
        Some(seed) => {
            let feasible = angles::feasibility(m, d)?.is_feasible();
            if feasible {
                let start = solver::random_start(m, d, &mut ChaCha8Rng::seed_from_u64(seed))?;
                solver::minimize_capacity_from(m, d, start, opts)?
            } else {
                solver::minimize_capacity(m, d, opts)?
            }
        }
        None => solver::minimize_capacity(m, d, opts)?,
    };
    print_report(p, file, &report)?;
    Ok(status_code(&report))
}

fn status_code(r: &SolveReport) -> i32 {
    match r.status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::IterationLimit => EXIT_NO_CONVERGENCE,
    }
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Converged => "converged",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::IterationLimit => "iteration-limit",
    }
}

fn print_report(p: &mut Printer, file: &MeshFile, r: &SolveReport) -> Result<(), Failure> {
    let m = &file.mesh;
    p.field("status", status_name(r.status))?;
    if r.status == SolveStatus::Infeasible {
        if let Some(cert) = &r.feasibility.certificate {
            p.field("certificate", cert)?;
        }
        return Ok(());
    }
    p.field("iterations", r.iterations)?;
    p.num("objective", *r.objective_trace.last().unwrap_or(&f64::NAN))?;
    p.num("reduced_gradient", r.reduced_gradient)?;
    p.num("min_face_margin", r.min_face_margin)?;
    if let Some(metric) = &r.metric {
        p.num("max_residual", metric.max_residual())?;
        let rows: Vec<_> = (0..m.num_edges())
            .map(|e| {
                (
                    m.edge_name(e).to_string(),
                    vec![
                        metric.lengths[e],
                        metric.residuals[e],
                        metric.multipliers[e],
                    ],
                )
            })
            .collect();
        p.table(&["edge", "length", "residual", "multiplier"], &rows)?;
    }
    if let Some(x) = &r.x_final {
        let rows: Vec<_> = (0..m.num_corners())
            .map(|c| (m.corner_label(c), vec![x[c]]))
            .collect();
        p.table(&["corner", "angle"], &rows)?;
        if !m.vertices().is_empty() {
            let rows: Vec<_> = m
                .vertices()
                .iter()
                .map(|v| (v.id.clone(), vec![v.corners.iter().map(|&c| x[c]).sum()]))
                .collect();
            p.table(&["vertex", "cone"], &rows)?;
        }
    }
    Ok(())
}

fn roundtrip(p: &mut Printer, file: &MeshFile, opts: &SolveOptions) -> Result<i32, Failure> {
    let l = file
        .length
        .as_ref()
        .ok_or_else(|| Failure::usage("the mesh file has no length table"))?;
    let r = solver::roundtrip(&file.mesh, l, opts)?;
    p.field("status", status_name(r.solve.status))?;
    p.field("iterations", r.solve.iterations)?;
    p.num("max_length_error", r.max_length_error)?;
    p.field("recovered", r.recovered())?;
    Ok(if r.recovered() {
        EXIT_OK
    } else if r.solve.status == SolveStatus::Infeasible {
        EXIT_INFEASIBLE
    } else {
        EXIT_NO_CONVERGENCE
    })
}

fn triangle(p: &mut Printer, a: [f64; 3]) -> Result<i32, Failure> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Failure::usage("angles must be finite"));
    }
    let x = TriangleAngles(a);
    let class = trig::classify(&x, CLASSIFY_EPS);
    p.field("class", class)?;
    p.nums("dual", &x.dual())?;
    if class == BoundaryType::Exterior {
        if let Ok(tilde) = capacity::capacity_theta_tilde(&x) {
            p.num("theta_tilde", tilde)?;
        }
        return Ok(EXIT_OK);
    }
    p.num("theta", capacity::capacity_theta(&x)?)?;
    p.num("theta_tilde", capacity::capacity_theta_tilde(&x)?)?;
    p.num("volume", capacity::capacity_v(&x))?;
    if class == BoundaryType::Interior {
        p.nums("length", &trig::angles_to_lengths(&x)?.0)?;
        p.nums("gradient", &capacity::grad_theta(&x)?)?;
        let h = capacity::hessian_theta(&x)?;
        let mut eig: Vec<f64> = Matrix3::from_fn(|i, j| h[i][j])
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        p.nums("hessian_eigenvalues", &eig)?;
    }
    Ok(EXIT_OK)
}
