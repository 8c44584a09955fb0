//! `pqa`: batch driver for checking, normalizing, drawing and fuzzing programs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use pqa_core::circuit::{extract_diagram, render_ascii, render_dot};
use pqa_core::dynamics::{is_circuit_type, normalize_with, Terminal, TypedNeutralContext, DEFAULT_FUEL};
use pqa_core::encoding::{default_stdlib, load_stdlib};
use pqa_core::harness::{run_mutation_robustness, run_oracle_agreement, run_suite, GenConfig};
use pqa_core::statics::{check, System};
use pqa_core::syntax::{parse_program, parse_type, Color, Name, Program, Signature, SimpleType, Span, SpanTree, Type};

const STDLIB_ENV: &str = "PQA_STDLIB";

#[derive(Parser, Debug)]
#[command(name = "pqa", version, about = "Check, run and draw programs of the adjoint quantum calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Typecheck a program and print its type.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = SystemArg::Pqa)]
        system: SystemArg,
    },
    /// Typecheck, then reduce to a terminal form.
    Normalize {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        /// Print every step with the rule that fired.
        #[arg(long)]
        trace: bool,
        /// Skip the typecheck.
        #[arg(long = "unsafe")]
        unchecked: bool,
    },
    /// Normalize a circuit-typed program and draw it.
    Circuit {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        #[arg(long, value_enum, default_value_t = Emit::Ascii)]
        emit: Emit,
    },
    /// Run the property suite on generated programs.
    Fuzz {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compare against the split-enumerating checker on this many programs.
        #[arg(long, default_value_t = 0)]
        oracle: u64,
        /// Also run the stepper on this many mutated programs.
        #[arg(long, default_value_t = 0)]
        mutants: u64,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Where to write the JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct Input {
    file: PathBuf,
    /// Gate signature file; defaults to $PQA_STDLIB, then the bundled one.
    #[arg(long)]
    sig: Option<PathBuf>,
    /// Free circuit variables, e.g. `x1 : qubit, x2 : qubit`.
    #[arg(long, default_value = "")]
    psi: String,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SystemArg {
    Pqa,
    Pqx,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Emit {
    Ascii,
    Dot,
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Static(Diagnostic),
    #[error("{0}")]
    Fuel(Diagnostic),
}

impl Failure {
    fn status(&self) -> u8 {
        match self {
            Failure::Static(_) => 1,
            Failure::Fuel(_) => 2,
            Failure::Usage(_) => 3,
        }
    }
}

#[derive(Debug)]
struct Diagnostic {
    file: String,
    span: Option<Span>,
    code: &'static str,
    message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(f, "{}:{}:{}: error[{}]: {}", self.file, s.line, s.col, self.code, self.message),
            None => write!(f, "{}: error[{}]: {}", self.file, self.code, self.message),
        }
    }
}

fn diag(file: &Path, span: Option<Span>, code: &'static str, message: impl Into<String>) -> Diagnostic {
    Diagnostic { file: file.display().to_string(), span, code, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn signature(flag: Option<&Path>) -> Result<Signature, Failure> {
    let path = match flag {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os(STDLIB_ENV) {
            Some(p) => PathBuf::from(p),
            None => return Ok(default_stdlib()),
        },
    };
    let src = read(&path)?;
    load_stdlib(&src).map_err(|e| {
        let span = match &e {
            pqa_core::encoding::StdlibError::Parse(p) => Some(p.span),
            _ => None,
        };
        Failure::Static(diag(&path, span, "E0002", e.to_string()))
    })
}

fn parse_psi(src: &str) -> Result<TypedNeutralContext, Failure> {
    let mut psi = TypedNeutralContext::new();
    for item in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (x, t) = item
            .split_once(':')
            .ok_or_else(|| Failure::Usage(format!("--psi: expected `name : type`, got `{item}`")))?;
        let t = parse_type(t.trim()).map_err(|e| Failure::Usage(format!("--psi: {e}")))?;
        let s =
            SimpleType::new(t.clone()).ok_or_else(|| Failure::Usage(format!("--psi: `{t}` is not a simple type")))?;
        psi.push(Name::new(x.trim()), s);
    }
    Ok(psi)
}

struct Loaded {
    file: PathBuf,
    sig: Signature,
    psi: TypedNeutralContext,
    program: Program,
    spans: SpanTree,
}

fn load(input: &Input) -> Result<Loaded, Failure> {
    let sig = signature(input.sig.as_deref())?;
    let psi = parse_psi(&input.psi)?;
    let src = read(&input.file)?;
    let (program, spans) =
        parse_program(&src).map_err(|e| Failure::Static(diag(&input.file, Some(e.span), "E0001", e.message)))?;
    Ok(Loaded { file: input.file.clone(), sig, psi, program, spans })
}

fn typecheck(l: &Loaded, system: System) -> Result<Type, Failure> {
    let ctx = l.psi.ctp();
    match check(system, &l.sig, &ctx, &l.program, None).verdict {
        Ok(t) => Ok(t),
        Err(e) => Err(Failure::Static(diag(&l.file, Some(l.spans.locate(&e.path)), e.code(), e.kind.to_string()))),
    }
}

/// Runs to a terminal form, printing steps when `trace` is set.
fn run(l: &Loaded, p: &Program, fuel: u64, trace: bool) -> Result<Program, Failure> {
    let pi = l.psi.cneu();
    let mut n = 0u64;
    let (_, terminal) = normalize_with(&pi, p, fuel, |_, s| {
        n += 1;
        if trace {
            println!("STEP {n} {}: {}", s.rule.name(), s.program);
        }
    });
    match terminal {
        Terminal::Normal(v) => Ok(v),
        Terminal::FuelExhausted(p) => {
            println!("{p}");
            Err(Failure::Fuel(diag(&l.file, None, "E0202", format!("fuel exhausted after {n} steps"))))
        }
        Terminal::Stuck { program, reason } => {
            println!("{program}");
            Err(Failure::Static(diag(&l.file, None, "E0201", format!("stuck: {reason}"))))
        }
    }
}

fn cmd_check(input: &Input, system: SystemArg) -> Result<(), Failure> {
    let l = load(input)?;
    let system = match system {
        SystemArg::Pqa => System::Pqa,
        SystemArg::Pqx => System::Pqx,
    };
    let t = typecheck(&l, system)?;
    println!("TYPE: {t}");
    Ok(())
}

fn cmd_normalize(input: &Input, fuel: u64, trace: bool, unchecked: bool) -> Result<(), Failure> {
    let l = load(input)?;
    if !unchecked {
        typecheck(&l, System::Pqa)?;
    }
    let v = run(&l, &l.program, fuel, trace)?;
    println!("{v}");
    Ok(())
}

fn cmd_circuit(input: &Input, fuel: u64, emit: Emit) -> Result<(), Failure> {
    let l = load(input)?;
    let mut ty = typecheck(&l, System::Pqa)?;
    let mut v = run(&l, &l.program, fuel, false)?;
    // a boxed circuit is drawn by forcing it
    if let Type::Up(inner) = &ty {
        if inner.mode() == pqa_core::syntax::Mode::Q {
            ty = (**inner).clone();
            v = run(&l, &Program::force(v, Color::Circuit), fuel, false)?;
        }
    }
    if !is_circuit_type(&ty) {
        return Err(Failure::Static(diag(&l.file, None, "E0301", format!("`{ty}` is not a circuit type"))));
    }
    let d = extract_diagram(&l.sig, &l.psi, &v, &ty)
        .map_err(|e| Failure::Static(diag(&l.file, None, "E0302", e.to_string())))?;
    match emit {
        Emit::Ascii => print!("{}", render_ascii(&d)),
        Emit::Dot => print!("{}", render_dot(&d)),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_fuzz(
    count: u64,
    depth: u32,
    seed: u64,
    oracle: u64,
    mutants: u64,
    sig: Option<&Path>,
    report: Option<&Path>,
) -> Result<(), Failure> {
    let cfg = GenConfig { seed, max_depth: depth, gate_pool: signature(sig)?, ..GenConfig::default() };
    let usage = |e: pqa_core::harness::GenError| Failure::Usage(e.to_string());
    let mut r = run_suite(&cfg, count).map_err(usage)?;
    if oracle > 0 {
        r = r.merge(run_oracle_agreement(&cfg, oracle).map_err(usage)?);
    }
    if mutants > 0 {
        r = r.merge(run_mutation_robustness(&cfg, mutants).map_err(usage)?);
    }
    for (name, p) in &r.properties {
        println!("{name}: {}/{} passed", p.passed, p.attempted);
    }
    if let Some(path) = report {
        let json = serde_json::to_string_pretty(&r).expect("report serializes");
        std::fs::write(path, json + "\n")
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let failed = r.failures();
    if failed > 0 {
        let file = report.map_or_else(|| "fuzz".to_string(), |p| p.display().to_string());
        return Err(Failure::Static(Diagnostic {
            file,
            span: None,
            code: "E0401",
            message: format!("{failed} property failures"),
        }));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(status);
        }
    };
    let result = match &cli.command {
        Command::Check { input, system } => cmd_check(input, *system),
        Command::Normalize { input, fuel, trace, unchecked } => cmd_normalize(input, *fuel, *trace, *unchecked),
        Command::Circuit { input, fuel, emit } => cmd_circuit(input, *fuel, *emit),
        Command::Fuzz { count, depth, seed, oracle, mutants, sig, report } => {
            cmd_fuzz(*count, *depth, *seed, *oracle, *mutants, sig.as_deref(), report.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.status())
        }
    }
}
