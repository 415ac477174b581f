use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jacobi_cli::{
    cmd_differentials, cmd_expand, cmd_formulas, cmd_hyper_demo, cmd_info, cmd_roundtrip, CliError, Format, Outcome,
};
use jacobi_core::ParameterRange;

/// Jacobi inversion on (n,s)-curves: series, formulas and numeric checks.
#[derive(Parser)]
#[command(name = "jacobi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// text, latex or json.
    #[arg(long, global = true)]
    format: Option<Format>,
}

#[derive(Args)]
struct Curve {
    n: u32,
    s: u32,
    /// Allow parameters on y^{n−1} and x^{s−1} as well.
    #[arg(long)]
    extended: bool,
}

impl Curve {
    fn range(&self) -> ParameterRange {
        if self.extended {
            ParameterRange::Extended
        } else {
            ParameterRange::Strict
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Genus, gaps, σ-weight and the first 2g monomials.
    Info { n: u32, s: u32 },
    /// Series of x, y and the first-kind integrals near infinity.
    Expand {
        #[command(flatten)]
        curve: Curve,
        /// Truncation order (default 2g+n+2, at least 2g+2).
        #[arg(long)]
        order: Option<i32>,
    },
    /// Numerators of the first- and second-kind differentials.
    Differentials {
        #[command(flatten)]
        curve: Curve,
        #[arg(long)]
        order: Option<i32>,
    },
    /// The inversion system R_{2g}, …, R_{2g+n−2}.
    Formulas {
        #[command(flatten)]
        curve: Curve,
        /// ⌊s/n⌋, checked against s.
        m: u32,
        #[arg(long)]
        order: Option<i32>,
        /// Compare against the bundled reference forms.
        #[arg(long)]
        check_golden: bool,
    },
    /// Construct-then-solve on random divisors of a numeric curve.
    Roundtrip {
        /// Curve description file (key = value lines).
        curve_file: PathBuf,
        /// Round-trip this divisor (JSON list of [re x, im x, re y, im y]) instead of random ones.
        #[arg(long)]
        divisor: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Periods, theta and ℘ on a random hyperelliptic curve of genus 1 or 2.
    HyperDemo {
        g: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let text_default = cli.format.unwrap_or(Format::Text);
    let reject_latex = |f: Format| {
        if f == Format::Latex {
            Err(CliError::Invalid("latex output is only available for formulas".into()))
        } else {
            Ok(f)
        }
    };
    match &cli.command {
        Command::Info { n, s } => cmd_info(*n, *s, reject_latex(text_default)?),
        Command::Expand { curve, order } => {
            cmd_expand(curve.n, curve.s, *order, curve.range(), reject_latex(text_default)?)
        }
        Command::Differentials { curve, order } => {
            cmd_differentials(curve.n, curve.s, *order, curve.range(), reject_latex(text_default)?)
        }
        Command::Formulas { curve, m, order, check_golden } => cmd_formulas(
            curve.n,
            curve.s,
            *m,
            *order,
            curve.range(),
            cli.format.unwrap_or(Format::Latex),
            *check_golden,
        ),
        Command::Roundtrip { curve_file, divisor, seed, count, tolerance } => {
            let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())));
            let text = read(curve_file)?;
            let divisor = divisor.as_ref().map(read).transpose()?;
            cmd_roundtrip(&text, divisor.as_deref(), *seed, *count, *tolerance)
        }
        Command::HyperDemo { g, seed, count, tolerance } => cmd_hyper_demo(*g, *seed, *count, *tolerance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("check failed");
        ExitCode::from(1)
    }
}
