use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use vedil::io::{self, Certificate, Mode, RunOptions, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use vedil::Error;

#[derive(Parser)]
#[command(name = "vedil", version, about = "Dilations of positive semidefinite kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a problem file.
    Check {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Construct and verify the dilation described by a problem file.
    Dilate {
        problem: PathBuf,
        /// Write the certificate here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the reproducing-kernel realisation of the problem's kernel.
    Rk {
        problem: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-verify a certificate against its problem file.
    Verify {
        problem: PathBuf,
        certificate: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct Common {
    /// Tolerance; overrides the problem file.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// How positivity of the gramian is checked.
    #[arg(long, value_enum, default_value_t = ModeArg::Flattened)]
    mode: ModeArg,
    /// Leave the timestamp out of certificates.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Flattened,
    Elementary,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            tol: self.tol,
            seed: self.seed,
            mode: match self.mode {
                ModeArg::Flattened => Mode::Flattened,
                ModeArg::Elementary => Mode::Elementary,
            },
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n",
        Format::Text => io::render_text(v),
    }
}

fn emit(v: &Value, format: Format, out: Option<&Path>) -> Result<(), Error> {
    let s = render(v, format);
    match out {
        Some(p) => std::fs::write(p, s).map_err(|e| Error::Schema(format!("{}: {e}", p.display()))),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn stamp(mut cert: Certificate, common: &Common) -> Certificate {
    if !common.no_timestamp {
        cert.timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    cert
}

fn certificate_command(
    problem: &Path,
    out: Option<&Path>,
    common: &Common,
    run: fn(&[u8], &RunOptions) -> vedil::Result<Certificate>,
) -> Result<i32, Error> {
    let bytes = read(problem)?;
    let cert = stamp(run(&bytes, &common.options())?, common);
    let code = if cert.pass { EXIT_PASS } else { EXIT_FAIL };
    let v = serde_json::to_value(&cert).map_err(|e| Error::Schema(e.to_string()))?;
    emit(&v, common.format, out)?;
    Ok(code)
}

fn run(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Check { problem, common } => {
            let bytes = read(problem)?;
            let opts = common.options();
            let loaded = io::load(&io::parse_problem(&bytes)?, &opts)?;
            let rep = io::cmd_check(&loaded, &opts);
            let v = serde_json::to_value(&rep).map_err(|e| Error::Schema(e.to_string()))?;
            emit(&v, common.format, None)?;
            Ok(if rep.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Dilate { problem, out, common } => {
            certificate_command(problem, out.as_deref(), common, io::cmd_dilate)
        }
        Command::Rk { problem, out, common } => certificate_command(problem, out.as_deref(), common, io::cmd_rk),
        Command::Verify {
            problem,
            certificate,
            format,
        } => {
            let bytes = read(problem)?;
            let cert: Certificate = serde_json::from_slice(&read(certificate)?)
                .map_err(|e| Error::Schema(format!("certificate: {e}")))?;
            let rep = io::cmd_verify(&bytes, &cert)?;
            let v = serde_json::to_value(&rep).map_err(|e| Error::Schema(e.to_string()))?;
            emit(&v, *format, None)?;
            Ok(if rep.pass { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let v = io::error_json(&e);
            eprint!("{}", serde_json::to_string_pretty(&v).unwrap_or_default() + "\n");
            io::exit_code(&e)
        }
    };
    debug_assert!([EXIT_PASS, EXIT_FAIL, EXIT_INPUT].contains(&code));
    ExitCode::from(code as u8)
}
