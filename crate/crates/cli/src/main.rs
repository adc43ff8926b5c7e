use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Csv;

mod commands;
mod render;

/// Recession, lineality and coercivity analysis of convex functions.
#[derive(Parser, Debug)]
#[command(name = "convex-shape", version, about)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every random sample the command draws.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Threshold for the decomposition residual and the ray verdict.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shape report for one or more function documents.
    Analyze {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Split a max-affine function into a coercive part and a linear part.
    Decompose {
        path: PathBuf,
        /// Comma-separated certificate in the relative interior of the
        /// slope hull. Defaults to the slope barycenter.
        #[arg(long, allow_hyphen_values = true)]
        certificate: Option<Csv>,
    },
    /// Behaviour of `t ↦ f(x + t u)`.
    Ray {
        path: PathBuf,
        /// Comma-separated base point.
        #[arg(long, allow_hyphen_values = true)]
        x: Csv,
        /// Comma-separated direction.
        #[arg(long, allow_hyphen_values = true)]
        u: Csv,
    },
    /// Run one of the built-in reproductions.
    Demo { name: Demo },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Demo {
    LqCollapse,
    Ex7,
    PhiRecession,
}

pub struct Settings {
    pub json: bool,
    pub seed: u64,
    pub tolerance: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = Settings {
        json: cli.json,
        seed: cli.seed,
        tolerance: cli.tolerance,
    };
    if !(settings.tolerance.is_finite() && settings.tolerance > 0.0) {
        eprintln!("error: --tolerance must be a positive number");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Analyze { paths } => commands::analyze(&paths, &settings),
        Command::Decompose { path, certificate } => {
            commands::decompose(&path, certificate.as_ref().map(|c| c.0.as_slice()), &settings)
        }
        Command::Ray { path, x, u } => commands::ray(&path, &x.0, &u.0, &settings),
        Command::Demo { name } => match name {
            Demo::LqCollapse => commands::demo_lq(&settings),
            Demo::Ex7 => commands::demo_truncation(&settings),
            Demo::PhiRecession => commands::demo_phi_recession(&settings),
        },
    };
    match outcome {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
