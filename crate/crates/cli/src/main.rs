use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hwroots::enumerate::{DEFAULT_CLUSTER_TOL, DEFAULT_EPSILON, DEFAULT_ORDER};
use hwroots::Complex64;
use hwroots_cli::{
    parse_complex, run, run_gmap, run_hw, Format, Input, Report, RunConfig, GRAMMAR,
};

/// Enumerate roots of f(z) = y with the hyper-Lambert (HW) map.
#[derive(Parser)]
#[command(name = "hwroots", version, after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate roots of f(z) = y, or of P(z)/Q(z) = y.
    Solve(SolveArgs),
    /// Evaluate one branch HW(params; y).
    Hw(HwArgs),
    /// Evaluate the forward map G(params; z) = z·F(z).
    Gmap(GmapArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
#[group(id = "input", required = true, multiple = false)]
struct InputArgs {
    /// f(z) as an expression in z
    #[arg(long, allow_hyphen_values = true)]
    expr: Option<String>,
    /// numerator and denominator polynomials
    #[arg(long, num_args = 2, value_names = ["P", "Q"], allow_hyphen_values = true)]
    rational: Option<Vec<String>>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// right-hand side, e.g. 2, 1/2 or 1+2i
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    /// number of roots; defaults to the degree for polynomial input
    #[arg(long)]
    count: Option<usize>,
    /// series truncation order
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// deflation target for steps after the first
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// expansion center
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    center: String,
    /// distance below which roots are merged into one with multiplicity
    #[arg(long, default_value_t = DEFAULT_CLUSTER_TOL)]
    cluster_tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args)]
struct HwArgs {
    /// functional parameter, outermost first; repeat for nested towers
    #[arg(long = "param", required = true, allow_hyphen_values = true)]
    params: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    center: String,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args)]
struct GmapArgs {
    #[arg(long = "param", required = true, allow_hyphen_values = true)]
    params: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

fn complex_arg(flag: &str, src: &str) -> Result<Complex64, Report> {
    parse_complex(src).map_err(|e| Report {
        exit_code: 1,
        stdout: String::new(),
        stderr: format!("error: --{flag} {e}\n\n{GRAMMAR}\n"),
    })
}

fn dispatch(cli: Cli) -> Result<Report, Report> {
    Ok(match cli.command {
        Command::Solve(a) => {
            let input = match (a.input.expr, a.input.rational) {
                (Some(e), None) => Input::Expr(e),
                (None, Some(pq)) => Input::Rational(pq[0].clone(), pq[1].clone()),
                _ => unreachable!("clap enforces exactly one input"),
            };
            let config = RunConfig {
                input,
                y: complex_arg("y", &a.y)?,
                count: a.count,
                order: a.order,
                epsilon: a.epsilon,
                center: complex_arg("center", &a.center)?,
                cluster_tol: a.cluster_tol,
                format: a.format.into(),
            };
            run(&config)
        }
        Command::Hw(a) => run_hw(
            &a.params,
            complex_arg("y", &a.y)?,
            a.order,
            complex_arg("center", &a.center)?,
            a.format.into(),
        ),
        Command::Gmap(a) => run_gmap(&a.params, complex_arg("z", &a.z)?, a.format.into()),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let report = dispatch(cli).unwrap_or_else(|r| r);
    print!("{}", report.stdout);
    eprint!("{}", report.stderr);
    ExitCode::from(report.exit_code as u8)
}
