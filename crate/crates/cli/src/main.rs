use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contour_eig::{problems, Method};
use contour_eig_cli::experiments::{run_experiment, Experiment, ExperimentOptions};
use contour_eig_cli::{run, write_report, CliError, Format, Overrides};

/// Contour-integral eigensolvers for differential operators.
#[derive(Parser)]
#[command(name = "contour-eig", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and print its eigenvalue table.
    Run(RunArgs),
    /// Regenerate the data of one experiment.
    Experiment(ExperimentArgs),
    /// List the built-in cases.
    Cases,
}

#[derive(Args)]
struct SolverFlags {
    /// Number of source functions.
    #[arg(long = "L")]
    l: Option<usize>,
    /// Number of moments.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Quadrature points.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Filter sweeps.
    #[arg(long)]
    ell: Option<usize>,
    /// Relative singular value cut-off.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Accuracy of each boundary value solve.
    #[arg(long = "tol-ode")]
    tol_ode: Option<f64>,
    /// Worker threads for the quadrature-point solves.
    #[arg(long, env = "CONTOUR_EIG_THREADS")]
    threads: Option<usize>,
}

impl SolverFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            l: self.l,
            m: self.m,
            n: self.n,
            ell: self.ell,
            delta: self.delta,
            seed: self.seed,
            tol_ode: self.tol_ode,
            threads: self.threads,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Built-in case name or problem JSON file.
    #[arg(value_name = "CASE", required_unless_present = "case")]
    case_arg: Option<String>,
    /// feast, ssrr, sshankel or sscaa.
    #[arg(value_name = "METHOD")]
    method_arg: Option<Method>,
    #[arg(long, conflicts_with = "case_arg")]
    case: Option<String>,
    #[arg(long, conflicts_with = "method_arg")]
    method: Option<Method>,
    /// Directory for the machine-readable report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    id: Experiment,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Restrict exp3 or exp4 to this case.
    #[arg(long)]
    case: Option<String>,
    #[command(flatten)]
    solver: SolverFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let case = args.case.or(args.case_arg).expect("clap requires a case");
            let method = args.method.or(args.method_arg).unwrap_or(Method::SsRr);
            let report = run(&case, method, &args.solver.overrides())?;
            println!("{report}");
            if let Some(dir) = args.out {
                for path in write_report(&report, &dir, args.format)? {
                    println!("wrote {}", path.display());
                }
            }
            Ok(())
        }
        Command::Experiment(args) => {
            let opts = ExperimentOptions { out: args.out, overrides: args.solver.overrides(), case: args.case };
            for path in run_experiment(args.id, &opts)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Cases => {
            for c in problems::builtin_cases() {
                let ct = c.contour(Method::SsRr).map_err(CliError::Solver)?;
                println!(
                    "{:<20} m = {:>2}  gamma = {}  rho = {}  alpha = {}",
                    c.name(),
                    c.m,
                    ct.center(),
                    ct.rho(),
                    ct.alpha()
                );
            }
            Ok(())
        }
    }
}
