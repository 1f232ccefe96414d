//! `siac`: optimal SIAC kernel tables, construction, verification and filtering.

mod commands;
mod points;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "siac", version, about = "Optimal SIAC B-spline kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact symmetric-kernel coefficients over a common denominator.
    Table(TableArgs),
    /// Print the symmetric unit-spaced knot sequence as a JSON array.
    Knots(KnotsArgs),
    /// Build a kernel and write its JSON document.
    Coeffs(CoeffsArgs),
    /// Check polynomial reproduction of a stored kernel.
    Verify(VerifyArgs),
    /// Sample a stored kernel as CSV.
    KernelEval(KernelEvalArgs),
    /// Convolve a piecewise-polynomial field with a stored kernel.
    Filter(FilterArgs),
}

#[derive(Args)]
struct TableArgs {
    #[arg(short = 'd', long = "degree", value_parser = clap::value_parser!(u32).range(0..=8))]
    degree: u32,
    /// Solve the uniform closed form exactly as printed in the literature.
    #[arg(long, conflicts_with = "sign_corrected")]
    paper_verbatim: bool,
    /// Solve the divided-difference system (the default).
    #[arg(long)]
    sign_corrected: bool,
}

#[derive(Args)]
struct KnotsArgs {
    #[arg(short = 'd', long = "degree")]
    degree: usize,
    /// Write "p/q" strings instead of numbers.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(short = 'd', long = "degree")]
    degree: usize,
    /// Use the symmetric unit-spaced knots.
    #[arg(long, conflicts_with = "knots", required_unless_present = "knots")]
    uniform: bool,
    /// JSON array of 3d+2 strictly increasing knots: a file path or an inline array.
    #[arg(long, value_name = "FILE")]
    knots: Option<String>,
    /// Solve in exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    /// Output path; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    kernel: String,
    /// Highest monomial degree to report (default 2d).
    #[arg(long)]
    delta_max: Option<usize>,
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Sample interval (default: the kernel support).
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    range: Option<Vec<f64>>,
}

#[derive(Args)]
struct KernelEvalArgs {
    kernel: String,
    /// "a:b:n" for n equispaced samples, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    points: String,
}

#[derive(Args)]
struct FilterArgs {
    kernel: String,
    field: String,
    #[arg(long, allow_hyphen_values = true)]
    points: String,
    /// Kernel scale h (default: mean cell width).
    #[arg(long)]
    scale: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Table(a) => commands::table(a.degree as usize, a.paper_verbatim),
        Command::Knots(a) => commands::knots(a.degree, a.exact),
        Command::Coeffs(a) => {
            commands::coeffs(a.degree, a.knots.as_deref(), a.exact, a.out.as_deref())
        }
        Command::Verify(a) => {
            commands::verify(&a.kernel, a.delta_max, a.samples, a.range.as_deref())
        }
        Command::KernelEval(a) => commands::kernel_eval(&a.kernel, &a.points),
        Command::Filter(a) => commands::filter(&a.kernel, &a.field, &a.points, a.scale),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
