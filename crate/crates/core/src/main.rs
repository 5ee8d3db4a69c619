use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use noether_approx::cli::{self, Overrides};
use noether_approx::report::Format;
use noether_approx::Result;

#[derive(Parser)]
#[command(name = "noether-approx", version, about = "Approximate Noether symmetries of perturbed oscillator Lagrangians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Machine,
}

#[derive(Args)]
struct Common {
    /// Built-in case name or path to a case file
    case: String,
    #[arg(long)]
    basis_p: Option<u32>,
    #[arg(long)]
    basis_m: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    u_min: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    u_max: Option<i32>,
    #[arg(long)]
    deg_xi: Option<u32>,
    #[arg(long)]
    deg_eta: Option<u32>,
    #[arg(long)]
    deg_gauge: Option<u32>,
    /// Fix a parameter to an exact value, e.g. `--set kappa=5/4`
    #[arg(long, value_name = "NAME=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Print the order-k residual for a symbolic generator
    Conditions {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Solve the approximate Noether conditions through an order
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Integrate the equation of motion and report first-integral drift
    Verify {
        #[command(flatten)]
        common: Common,
        /// Write phi, u, up, I tables into this directory
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// List the built-in cases
    ListBuiltins,
}

impl Common {
    fn load(&self) -> Result<noether_approx::case::CaseFile> {
        let case = cli::load_case(&self.case)?;
        let overrides = Overrides {
            basis_p: self.basis_p,
            basis_m: self.basis_m,
            u_min: self.u_min,
            u_max: self.u_max,
            deg_xi: self.deg_xi,
            deg_eta: self.deg_eta,
            deg_gauge: self.deg_gauge,
            set: self.set.iter().map(|s| cli::parse_assignment(s)).collect::<Result<_>>()?,
        };
        overrides.apply(&case)
    }

    fn format(&self) -> Format {
        match self.format {
            OutputFormat::Text => Format::Text,
            OutputFormat::Machine => Format::Machine,
        }
    }
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Conditions { common, order } => {
            let case = common.load()?;
            Ok(cli::run_conditions(&case, order)?.render(common.format()))
        }
        Command::Solve { common, order } => {
            let case = common.load()?;
            let order = order.unwrap_or_else(|| case.default_order());
            Ok(cli::run_solve(&case, order)?.render(common.format()))
        }
        Command::Verify { common, export } => {
            let case = common.load()?;
            Ok(cli::run_verify(&case, export.as_deref())?.render(common.format()))
        }
        Command::ListBuiltins => {
            let mut out = String::new();
            for (name, _) in cli::BUILTINS {
                let case = cli::builtin(name).expect("builtin");
                out.push_str(&format!("{name:<20} {}\n", case.description));
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
