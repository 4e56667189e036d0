use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use siqm::cli::{self, CommonArgs};

/// Shape-invariant quantum mechanics toolkit: superpotential catalog, SUSY
/// partner machinery, analytic spectra, and a finite-difference eigensolver
/// cross-check.
#[derive(Parser)]
#[command(name = "siqm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// Catalog entry name (see `siqm catalog list`).
    #[arg(long)]
    entry: Option<String>,
    /// Parameter assignment, repeatable: --param name=value. The additive
    /// parameter `a` and `hbar` may be set here too.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Planck constant (default 1).
    #[arg(long, allow_negative_numbers = true)]
    hbar: Option<f64>,
    /// Grid lower edge.
    #[arg(long, allow_negative_numbers = true)]
    xmin: Option<f64>,
    /// Grid upper edge.
    #[arg(long, allow_negative_numbers = true)]
    xmax: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    n: Option<usize>,
    /// Number of levels / wavefunctions.
    #[arg(long)]
    levels: Option<usize>,
    /// Tolerance override for oracle comparisons.
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; its values override flags (with a warning).
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_param(raw: &str) -> Result<(String, f64), String> {
    let (name, value) = raw
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{raw}`"))?;
    let v: f64 = value
        .parse()
        .map_err(|_| format!("bad numeric value in `{raw}`"))?;
    if name.is_empty() {
        return Err(format!("empty parameter name in `{raw}`"));
    }
    Ok((name.to_owned(), v))
}

impl From<&Common> for CommonArgs {
    fn from(c: &Common) -> CommonArgs {
        CommonArgs {
            entry: c.entry.clone(),
            params: c.params.clone(),
            hbar: c.hbar,
            xmin: c.xmin,
            xmax: c.xmax,
            n: c.n,
            levels: c.levels,
            tolerance: c.tol,
            out: c.out.clone(),
            config: c.config.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Browse or validate the superpotential catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Emit x,W,V_minus,V_plus as CSV over a grid.
    Potential {
        #[command(flatten)]
        common: Common,
    },
    /// Emit x,psi_0..psi_k as CSV (ladder-built bound states).
    Wavefunctions {
        #[command(flatten)]
        common: Common,
    },
    /// Analytic spectrum report (JSON); --oracle adds the eigensolver check.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Cross-check against the finite-difference eigensolver.
        #[arg(long)]
        oracle: bool,
    },
    /// Shape-invariance or series-equation checks (JSON report).
    Check {
        #[command(flatten)]
        common: Common,
        /// Verify the shape-invariance condition on a grid.
        #[arg(long)]
        si: bool,
        /// Verify the order-by-order series equations.
        #[arg(long)]
        series: bool,
        /// Highest series order to check (with --series).
        #[arg(long, default_value_t = 8)]
        orders: usize,
        /// Custom superpotential text (with --si).
        #[arg(long)]
        w_expr: Option<String>,
        /// Custom g(a) text (with --si).
        #[arg(long)]
        g_expr: Option<String>,
        /// Sample seed for the series check.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print all entries.
    List {
        /// Emit the machine-readable catalog document.
        #[arg(long)]
        json: bool,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the conventional shape-invariance PDE gate.
    Validate {
        /// Validate a single entry.
        #[arg(long, conflicts_with = "all")]
        name: Option<String>,
        /// Validate every conventional entry.
        #[arg(long)]
        all: bool,
        /// Random samples per entry.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Sample seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run() -> Result<i32, cli::CliError> {
    let parsed = Cli::parse();
    match parsed.command {
        Command::Catalog { action } => match action {
            CatalogAction::List { json, out } => cli::cmd_catalog_list(json, &out),
            CatalogAction::Validate {
                name,
                all,
                samples,
                seed,
                out,
            } => {
                if !all && name.is_none() {
                    return Err(cli::CliError {
                        code: cli::EXIT_USAGE,
                        message: "catalog validate needs --all or --name NAME".to_owned(),
                    });
                }
                cli::cmd_catalog_validate(name.as_deref(), samples, seed, &out)
            }
        },
        Command::Potential { common } => cli::cmd_potential(&(&common).into()),
        Command::Wavefunctions { common } => cli::cmd_wavefunctions(&(&common).into()),
        Command::Spectrum { common, oracle } => cli::cmd_spectrum(&(&common).into(), oracle),
        Command::Check {
            common,
            si,
            series,
            orders,
            w_expr,
            g_expr,
            seed,
        } => {
            let args: CommonArgs = (&common).into();
            match (si, series) {
                (true, false) => cli::cmd_check_si(&args, w_expr.as_deref(), g_expr.as_deref()),
                (false, true) => cli::cmd_check_series(&args, orders, seed),
                _ => Err(cli::CliError {
                    code: cli::EXIT_USAGE,
                    message: "check needs exactly one of --si or --series".to_owned(),
                }),
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code as u8)
        }
    }
}
