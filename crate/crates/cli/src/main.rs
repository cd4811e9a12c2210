//! `ainfty`: batch front end for relation checks, bar/cobar constructions, contraction
//! certificates and unit strictification.
//!
//! Exit status is 0 when the check passes, 1 when the mathematics says no (with a witness in the
//! report) and 2 on unreadable or malformed input.

mod commands;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{Check, CmdError};
use report::{write_atomic, Ctx, RunReport, Timing, Verdict};

#[derive(Parser)]
#[command(name = "ainfty", version, about = "Exact A∞ relation checks, bar/cobar constructions and certificates")]
struct Cli {
    /// Write the machine-readable report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Print the report as JSON instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the A∞ relations of a structure.
    Validate {
        file: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Check the functor relations.
    FunctorCheck {
        file: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Check that a prenatural transformation is natural.
    NatCheck {
        file: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Truncated bar construction.
    Bar {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        check_d2: bool,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Cobar construction of the bar construction, as a dg category.
    Cobar {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The unit functor into coB(Bi(A)) and its contraction certificate.
    Eta {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        /// Write the certificate to this file.
        #[arg(long, num_args = 0..=1, default_missing_value = "eta-cert.json")]
        certify: Option<PathBuf>,
    },
    /// Strict-unit quotient with its rank identity and certificate.
    Quotient {
        file: PathBuf,
        #[arg(long)]
        retraction: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long, num_args = 0..=1, default_missing_value = "quotient-cert.json")]
        certify: Option<PathBuf>,
    },
    /// Contract a filtered complex onto its first level.
    Contract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        gr_homotopies: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Re-check every identity of a contraction certificate.
    Verify { file: PathBuf },
    /// Replace a unital functor by a homotopic strictly unital one.
    Strictify {
        #[arg(long)]
        functor: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        unit_homotopy: Option<PathBuf>,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        emit_chain: Option<PathBuf>,
    },
    /// Cohomology of every hom complex in a degree window.
    Cohomology {
        file: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// Strict, cohomological and homotopy units.
    Units {
        file: PathBuf,
        #[arg(long)]
        emit_witness: Option<PathBuf>,
    },
    /// Tensor product of two dg categories.
    Tensor {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Composite G∘F of two functors.
    Compose {
        #[arg(long)]
        inner: PathBuf,
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo = a.trim().parse().map_err(|_| format!("bad bound {a:?}"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad bound {b:?}"))?;
    if lo > hi {
        return Err("empty window".into());
    }
    Ok((lo, hi))
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::FunctorCheck { .. } => "functor-check",
            Command::NatCheck { .. } => "nat-check",
            Command::Bar { .. } => "bar",
            Command::Cobar { .. } => "cobar",
            Command::Eta { .. } => "eta",
            Command::Quotient { .. } => "quotient",
            Command::Contract { .. } => "contract",
            Command::Verify { .. } => "verify",
            Command::Strictify { .. } => "strictify",
            Command::Cohomology { .. } => "cohomology",
            Command::Units { .. } => "units",
            Command::Tensor { .. } => "tensor",
            Command::Compose { .. } => "compose",
        }
    }

    fn run(&self, ctx: &mut Ctx) -> commands::CmdResult {
        use commands as c;
        match self {
            Command::Validate { file, arity } => c::validate(ctx, file, *arity),
            Command::FunctorCheck { file, arity } => c::functor_check(ctx, file, *arity),
            Command::NatCheck { file, arity } => c::nat_check(ctx, file, *arity),
            Command::Bar { file, max_len, check_d2, emit } => c::bar_cmd(ctx, file, *max_len, *check_d2, emit.as_deref()),
            Command::Cobar { file, max_len, emit } => c::cobar_cmd(ctx, file, *max_len, emit.as_deref()),
            Command::Eta { file, max_len, certify } => c::eta_cmd(ctx, file, *max_len, certify.as_deref()),
            Command::Quotient { file, retraction, max_len, certify } => {
                c::quotient_cmd(ctx, file, retraction, *max_len, certify.as_deref())
            }
            Command::Contract { input, gr_homotopies, emit } => c::contract(ctx, input, gr_homotopies, emit.as_deref()),
            Command::Verify { file } => c::verify(ctx, file),
            Command::Strictify { functor, witness, unit_homotopy, arity, emit_chain } => {
                c::strictify(ctx, functor, witness.as_deref(), unit_homotopy.as_deref(), *arity, emit_chain.as_deref())
            }
            Command::Cohomology { file, window } => c::cohomology_cmd(ctx, file, *window),
            Command::Units { file, emit_witness } => c::units(ctx, file, emit_witness.as_deref()),
            Command::Tensor { left, right, emit } => c::tensor(ctx, left, right, emit.as_deref()),
            Command::Compose { inner, outer, emit } => c::compose(ctx, inner, outer, emit.as_deref()),
        }
    }
}

fn classify(r: commands::CmdResult) -> (Verdict, Option<String>, String) {
    match r {
        Ok(Check { pass: true, message, .. }) => (Verdict::Pass, None, message),
        Ok(Check { code, message, .. }) => (Verdict::Fail, code, message),
        Err(CmdError::Io(path, e)) => (Verdict::Error, Some("InputError".into()), format!("{}: {e}", path.display())),
        Err(CmdError::Core(e)) => {
            let v = if e.is_math_failure() { Verdict::Fail } else { Verdict::Error };
            (v, Some(e.code().into()), e.to_string())
        }
    }
}

fn write_artifacts(artifacts: &[(PathBuf, String)]) -> Result<(), String> {
    for (path, contents) in artifacts {
        write_atomic(path, contents).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = Ctx::default();
    let (mut verdict, mut code, mut message) = classify(cli.command.run(&mut ctx));
    let mut written = Vec::new();
    if verdict == Verdict::Pass {
        match write_artifacts(&ctx.artifacts) {
            Ok(()) => written = ctx.artifacts.iter().map(|(p, _)| p.display().to_string()).collect(),
            Err(e) => (verdict, code, message) = (Verdict::Error, Some("OutputError".into()), e),
        }
    }
    let report = RunReport {
        schema: report::SCHEMA,
        command: cli.command.name().into(),
        inputs: ctx.inputs,
        truncation: ctx.truncation,
        verdict,
        code: code.clone(),
        message: message.clone(),
        witnesses: ctx.witnesses,
        artifacts: written,
        timing: Timing { elapsed_ms: start.elapsed().as_millis() },
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if cli.json {
        print!("{text}");
    } else {
        for l in &ctx.lines {
            println!("{l}");
        }
        let tag = match verdict {
            Verdict::Pass => "PASS".to_string(),
            _ => format!("{} [{}]", if verdict == Verdict::Fail { "FAIL" } else { "ERROR" }, code.unwrap_or_default()),
        };
        println!("{tag}: {message}");
    }
    if let Some(path) = &cli.report {
        if let Err(e) = write_atomic(Path::new(path), &text) {
            eprintln!("cannot write report {}: {e}", path.display());
            return ExitCode::from(Verdict::Error.exit_code());
        }
    }
    ExitCode::from(verdict.exit_code())
}
