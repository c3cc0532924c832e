//! `esspos` command-line entry point.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use esspos_cli::config::Settings;
use esspos_cli::{run, Command, Exit, Format, Options, RunError};

#[derive(Debug, Parser)]
#[command(name = "esspos", version)]
#[command(about = "Classify Toeplitz and diagonal operators as positive, essentially positive, or neither")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Symbol description, e.g. "radial{poly[1]}".
    #[arg(long, global = true, conflicts_with = "spec_file")]
    spec: Option<String>,

    /// File holding the symbol description; sample paths resolve relative to it.
    #[arg(long, global = true)]
    spec_file: Option<PathBuf>,

    /// Sign tolerance.
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Stored eigenvalues per sequence.
    #[arg(long, global = true)]
    terms: Option<usize>,

    /// `key = value` settings file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Full classification report (JSON).
    Classify,
    /// Berezin transform samples (CSV: t, value, tail_bound, quadrature_value).
    Berezin {
        /// Comma-separated evaluation points in [0, 1).
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Carleson criteria for the measure or its total variation (JSON).
    Carleson {
        /// Weight exponent α > -1.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
    },
    /// Eigenvalues with Cesàro means and difference coefficients (CSV: n, lambda, cesaro, a_n).
    Spectrum {
        #[arg(long, default_value_t = 256)]
        rows: usize,
    },
    /// Built-in demonstrations.
    Demo {
        #[arg(value_enum)]
        name: DemoName,

        #[arg(long, default_value_t = esspos_cli::run::DEMO_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoName {
    Lacunary,
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => write_atomic(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

fn prepare(cli: &Cli) -> Result<(Command, Option<String>, Options), RunError> {
    let c = &cli.common;
    let mut settings = Settings::default();
    if let Some(path) = &c.config {
        settings = settings.load(path).map_err(|e| RunError::Usage(e.to_string()))?;
    }
    if let Some(eps) = c.eps {
        settings.epsilon = eps;
    }
    if let Some(terms) = c.terms {
        settings.terms = terms;
    }
    let mut opts = Options {
        settings,
        format: c.format.map(|f| match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }),
        ..Options::default()
    };
    let spec = match (&c.spec, &c.spec_file) {
        (Some(s), _) => Some(s.clone()),
        (None, Some(path)) => {
            if let Some(dir) = path.parent() {
                opts.base_dir = dir.to_path_buf();
            }
            Some(
                std::fs::read_to_string(path)
                    .map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))?,
            )
        }
        (None, None) => None,
    };
    let command = match &cli.command {
        Cmd::Classify => Command::Classify,
        Cmd::Berezin { t } => {
            opts.t = t.clone();
            Command::Berezin
        }
        Cmd::Carleson { alpha } => {
            opts.alpha = *alpha;
            Command::Carleson
        }
        Cmd::Spectrum { rows } => {
            opts.rows = *rows;
            Command::Spectrum
        }
        Cmd::Demo { name: DemoName::Lacunary, seed } => {
            opts.seed = *seed;
            Command::Demo
        }
    };
    Ok((command, spec, opts))
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Classify => "classify",
        Cmd::Berezin { .. } => "berezin",
        Cmd::Carleson { .. } => "carleson",
        Cmd::Spectrum { .. } => "spectrum",
        Cmd::Demo { .. } => "demo",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.common.out.clone();
    let result = prepare(&cli).and_then(|(command, spec, opts)| run(command, spec.as_deref(), &opts));
    let (text, exit) = match result {
        Ok(o) => (o.text, o.exit),
        Err(e) => {
            eprintln!("esspos: {e}");
            (e.to_json(command_name(&cli.command)), e.exit())
        }
    };
    if let Err(msg) = emit(out.as_deref(), &text) {
        eprintln!("esspos: {msg}");
        return ExitCode::from(Exit::Failure as u8);
    }
    ExitCode::from(exit as u8)
}
