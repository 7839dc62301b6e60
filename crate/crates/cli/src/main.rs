use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use quatfol_cli::{list_scenarios, run, Format, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

/// Evaluate the foliation criteria of a quaternion CR-submanifold of flat H^m.
#[derive(Debug, Parser)]
#[command(name = "quatfol", version)]
struct Args {
    /// Builtin scenario name or path to a scenario file.
    #[arg(long, required_unless_present = "list_scenarios")]
    scenario: Option<String>,
    /// Verdict tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Base finite-difference step.
    #[arg(long = "fd-step")]
    fd_step: Option<f64>,
    /// Grid points per chart axis.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Seed for the random quantifier samples.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// List the builtin scenarios and exit.
    #[arg(long)]
    list_scenarios: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if args.list_scenarios {
        print!("{}", list_scenarios());
        return ExitCode::SUCCESS;
    }
    let config = RunConfig {
        scenario: args.scenario.expect("required by clap"),
        tol: args.tol,
        fd_step: args.fd_step,
        samples: args.samples,
        format: match args.format {
            FormatArg::Text => Format::Text,
            FormatArg::Machine => Format::Machine,
        },
        seed: args.seed,
    };
    let outcome = run(&config);
    if outcome.report.is_some() {
        print!("{}", outcome.output);
    } else {
        eprint!("{}", outcome.output);
    }
    ExitCode::from(outcome.exit_code as u8)
}
