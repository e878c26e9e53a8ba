//! `kinu`: zero tables, estimator comparisons and the exponential-well
//! spectrum on the command line.
//!
//! Exit codes: 0 on success, 2 for bad arguments (including values outside
//! a formula's domain), 3 when a solver fails, 1 when output cannot be
//! written.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kinu_core::besselk::{self, QuadratureConfig};
use kinu_core::estimators::{asymptotic_bracket, nu_asymp_w, wkb_energy};
use kinu_core::slprufer::{zeros_for, PhaseSolverConfig};
use kinu_core::table::{self, compare_grid, format_rel_err, format_value};
use kinu_core::{w0, Error, Method, PotentialParams, ZeroRecord};

#[derive(Parser)]
#[command(
    name = "kinu",
    version,
    about = "Zeros of K_{i nu}(z) in the order nu and the exponential-well spectrum"
)]
struct Cli {
    #[command(flatten)]
    tol: Tolerances,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Tolerances {
    /// Relative step tolerance of the phase integration (absolute: 1/100 of it).
    #[arg(long, global = true, default_value_t = 1e-12)]
    ode_tol: f64,
    /// Relative tolerance of the K_{i nu} quadrature.
    #[arg(long, global = true, default_value_t = 1e-12)]
    quad_tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Table of the first COUNT zeros with the chosen estimates.
    Zeros {
        #[arg(long)]
        z: f64,
        #[arg(long)]
        count: u32,
        /// Comma-separated list: exact, all, or method names
        /// (lambert_w, series_1, series_2, series_3, mk, cochran, bk, exact_wkb_v).
        #[arg(long, default_value = "exact,all")]
        methods: String,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative errors of every estimate on a log-spaced grid of n.
    Compare {
        #[arg(long)]
        z: f64,
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Levels of the well in units of hbar^2 / (2 m a^2), exact and semiclassical.
    Spectrum {
        /// Dimensionless depth u = 2 m a^2 U0 / hbar^2.
        #[arg(long, required_unless_present = "u0", conflicts_with_all = ["u0", "a", "m", "hbar"])]
        u: Option<f64>,
        #[arg(long)]
        levels: u32,
        /// Physical parameters; with these the dimensional energies are printed too.
        #[arg(long, requires_all = ["a", "m", "hbar"])]
        u0: Option<f64>,
        #[arg(long, requires = "u0")]
        a: Option<f64>,
        #[arg(long, requires = "u0")]
        m: Option<f64>,
        #[arg(long, requires = "u0")]
        hbar: Option<f64>,
        /// Also locate each level from the K_{i nu} quadrature.
        #[arg(long)]
        cross_check: bool,
        /// CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
    },
    /// Principal branch W_0(x).
    W {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
}

enum Failure {
    Core(Error),
    Usage(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Output(_) => 1,
                ref e if e.is_argument_error() => 2,
                _ => 3,
            };
            ExitCode::from(code)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let phase = PhaseSolverConfig {
        ode_rel_tol: cli.tol.ode_tol,
        ode_abs_tol: cli.tol.ode_tol * 1e-2,
        ..Default::default()
    };
    phase.validate()?;
    let quad = QuadratureConfig {
        rel_tol: cli.tol.quad_tol,
        ..Default::default()
    };
    quad.validate()?;

    match cli.command {
        Command::Zeros {
            z,
            count,
            methods,
            out,
        } => {
            if count == 0 {
                return Err(Failure::Usage("--count must be at least 1".into()));
            }
            let (exact, methods) = parse_methods(&methods)?;
            let ns: Vec<u32> = (1..=count).collect();
            let records = records(&ns, z, exact, &methods, &phase)?;
            write_table(out.as_deref(), &records, &methods)
        }
        Command::Compare { z, n_max, out } => {
            if n_max < 2 {
                return Err(Failure::Usage("--n-max must be at least 2".into()));
            }
            let records = records(&compare_grid(n_max), z, true, &Method::ALL, &phase)?;
            write_table(out.as_deref(), &records, &Method::ALL)
        }
        Command::Spectrum {
            u,
            levels,
            u0,
            a,
            m,
            hbar,
            cross_check,
            csv,
        } => {
            if levels == 0 {
                return Err(Failure::Usage("--levels must be at least 1".into()));
            }
            let (params, dimensional) = match (u, u0, a, m, hbar) {
                (Some(u), ..) => (PotentialParams::new(u, 1.0, 0.5, 1.0)?, false),
                (None, Some(u0), Some(a), Some(m), Some(hbar)) => {
                    (PotentialParams::new(u0, a, m, hbar)?, true)
                }
                _ => {
                    return Err(Failure::Usage(
                        "give either --u or all of --u0, --a, --m, --hbar".into(),
                    ))
                }
            };
            let rows = spectrum(&params, levels, cross_check, &phase, &quad)?;
            let mut header = vec!["n", "eps_exact", "eps_wkb", "rel_gap"];
            if dimensional {
                header.extend(["E_exact", "E_wkb"]);
            }
            if cross_check {
                header.push("besselk_rel_diff");
            }
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut c = vec![
                        r.level.to_string(),
                        format_value(r.eps_exact),
                        format_value(r.eps_wkb),
                        format_rel_err((r.eps_wkb / r.eps_exact - 1.0).abs()),
                    ];
                    if dimensional {
                        let unit = params.energy_unit();
                        c.push(format_value(r.eps_exact * unit));
                        c.push(format_value(r.eps_wkb * unit));
                    }
                    if let Some(d) = r.besselk_diff {
                        c.push(format_rel_err(d));
                    }
                    c
                })
                .collect();
            let stdout = io::stdout().lock();
            if csv {
                write_csv_rows(stdout, &header, &cells)
            } else {
                write_aligned(stdout, &header, &cells)
            }
        }
        Command::W { x } => {
            let w = w0(x, kinu_core::lambertw::DEFAULT_TOL)?;
            println!("{w}");
            Ok(())
        }
    }
}

/// Splits a `--methods` list into the exact-column flag and estimator
/// methods in table order.
fn parse_methods(list: &str) -> Result<(bool, Vec<Method>), Failure> {
    let mut exact = false;
    let mut methods = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.to_ascii_lowercase().as_str() {
            "exact" => exact = true,
            "all" => methods.extend(Method::ALL),
            name => methods.push(name.parse::<Method>()?),
        }
    }
    if !exact && methods.is_empty() {
        return Err(Failure::Usage("--methods selects no columns".into()));
    }
    Ok((exact, table::normalize_methods(&methods)))
}

fn records(
    ns: &[u32],
    z: f64,
    exact: bool,
    methods: &[Method],
    cfg: &PhaseSolverConfig,
) -> Result<Vec<ZeroRecord>, Failure> {
    let exact_nu: Vec<Option<f64>> = if exact {
        zeros_for(ns, z, cfg)?
            .into_iter()
            .map(|r| Some(r.nu))
            .collect()
    } else {
        vec![None; ns.len()]
    };
    ns.iter()
        .zip(exact_nu)
        .map(|(&n, nu)| Ok(ZeroRecord::compute(n, z, nu, methods)?))
        .collect()
}

/// Writes the table to stdout, or to `path` through a temporary file in
/// the same directory that is renamed into place once complete.
fn write_table(
    path: Option<&Path>,
    records: &[ZeroRecord],
    methods: &[Method],
) -> Result<(), Failure> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        table::write_csv(&mut out, records, methods)?;
        return Ok(out.flush()?);
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    table::write_csv(io::BufWriter::new(tmp.as_file_mut()), records, methods)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

struct Level {
    level: u32,
    eps_exact: f64,
    eps_wkb: f64,
    besselk_diff: Option<f64>,
}

fn spectrum(
    params: &PotentialParams,
    levels: u32,
    cross_check: bool,
    phase: &PhaseSolverConfig,
    quad: &QuadratureConfig,
) -> Result<Vec<Level>, Failure> {
    let z = params.z();
    let ns: Vec<u32> = (1..=levels).collect();
    let exact = zeros_for(&ns, z, phase)?;
    exact
        .iter()
        .map(|r| {
            let level = r.n - 1;
            let eps_wkb = wkb_energy(level, params)? / params.energy_unit();
            let besselk_diff = if cross_check {
                let guess = nu_asymp_w(r.n, z)?.value;
                let nu = besselk::refine_zero(guess, z, asymptotic_bracket(r.n, z)?, quad)?;
                Some((nu / r.nu - 1.0).abs())
            } else {
                None
            };
            Ok(Level {
                level,
                eps_exact: r.epsilon,
                eps_wkb,
                besselk_diff,
            })
        })
        .collect()
}

fn write_csv_rows(out: impl Write, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io_err = |e: csv::Error| Failure::Io(e.into());
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    Ok(w.flush()?)
}

fn write_aligned(
    mut out: impl Write,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), Failure> {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for r in rows {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
    }
    Ok(out.flush()?)
}
