//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::{AlgebraFlags, ColorHomLieAlgebra};
use crate::format::{self, FormatError};
use crate::report::VerificationReport;
use crate::scalar::Scalar;
use crate::tensor::{TensorElement, Word};
use crate::uea::{self, NormalForm, Strategy, UeaContext, UeaError, DEFAULT_ORACLE_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Leftmost,
    Rightmost,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Leftmost => Strategy::Leftmost,
            StrategyArg::Rightmost => Strategy::Rightmost,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "colorhom", version, about = "PBW normal forms for involutive color hom-Lie algebras")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the commutation factor and the algebra axioms
    Verify { spec: PathBuf },
    /// Print the normal form of an element
    Normalize {
        spec: PathBuf,
        element: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
        strategy: StrategyArg,
        /// Override μ (1 or -1)
        #[arg(long)]
        mu: Option<String>,
    },
    /// Multiply two classes in the enveloping algebra
    Multiply {
        spec: PathBuf,
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
        strategy: StrategyArg,
        #[arg(long)]
        mu: Option<String>,
    },
    /// Run the decomposition oracle and the rewriting checks
    PbwCheck {
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        /// μ used by the decomposition oracle (any nonzero rational)
        #[arg(long)]
        mu: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random words for the confluence check
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Emit a Z_2-graded definition with the super sign rule
    SuperPreset {
        /// Comma-separated basis names
        #[arg(long, value_delimiter = ',')]
        names: Vec<String>,
        /// Comma-separated parities (0 or 1)
        #[arg(long, value_delimiter = ',')]
        parities: Vec<u32>,
        /// Bracket entry `a b = c:k ...`; repeatable
        #[arg(long = "bracket")]
        brackets: Vec<String>,
        /// Twist entry `a = c:k ...`; repeatable
        #[arg(long = "alpha")]
        alpha: Vec<String>,
        #[arg(long)]
        involutive: bool,
        #[arg(long)]
        multiplicative: bool,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    format: OutputFormat,
}

/// Failure that ends a command with a given exit code.
struct Exit {
    code: i32,
    message: String,
    structured: Option<Value>,
}

impl Exit {
    fn parse(message: impl Into<String>) -> Exit {
        Exit {
            code: EXIT_PARSE,
            message: message.into(),
            structured: None,
        }
    }
}

impl From<UeaError> for Exit {
    fn from(e: UeaError) -> Exit {
        let code = match e {
            UeaError::StepBudget { .. } | UeaError::ResourceCap { .. } => EXIT_RESOURCE,
            UeaError::BadMu(_) | UeaError::MaxLenTooSmall { .. } | UeaError::LetterOutOfRange { .. } => EXIT_PARSE,
            _ => EXIT_VIOLATION,
        };
        Exit {
            code,
            message: e.to_string(),
            structured: None,
        }
    }
}

/// Runs the CLI on `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let mut io = Io {
        out,
        err,
        format: cli.format,
    };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => {
            match (io.format, e.structured) {
                (OutputFormat::Structured, Some(v)) => {
                    let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(&v).unwrap());
                }
                (OutputFormat::Structured, None) => {
                    let v = json!({ "error": e.message, "exit_code": e.code });
                    let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(&v).unwrap());
                }
                _ => {}
            }
            let _ = writeln!(io.err, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<i32, Exit> {
    match command {
        Command::Verify { spec } => cmd_verify(&spec, io),
        Command::Normalize {
            spec,
            element,
            strategy,
            mu,
        } => cmd_normalize(&spec, &element, strategy.into(), mu.as_deref(), io),
        Command::Multiply {
            spec,
            left,
            right,
            strategy,
            mu,
        } => cmd_multiply(&spec, &left, &right, strategy.into(), mu.as_deref(), io),
        Command::PbwCheck {
            spec,
            max_len,
            mu,
            seed,
            samples,
        } => cmd_pbw_check(&spec, max_len, mu.as_deref(), seed, samples, io),
        Command::SuperPreset {
            names,
            parities,
            brackets,
            alpha,
            involutive,
            multiplicative,
        } => {
            let flags = AlgebraFlags {
                involutive,
                multiplicative,
            };
            let a = format::super_preset(&names, &parities, &brackets, &alpha, flags)
                .map_err(|e| Exit::parse(e.to_string()))?;
            let text = format::print_algebra(&a);
            match io.format {
                OutputFormat::Text => write_out(io, &text),
                OutputFormat::Structured => emit_json(io, &json!({ "definition": text })),
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_out(io: &mut Io<'_>, s: &str) {
    let _ = io.out.write_all(s.as_bytes());
}

fn emit_json(io: &mut Io<'_>, v: &Value) {
    let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(v).unwrap());
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit::parse(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: FormatError) -> Exit {
    Exit::parse(format!("{}: {e}", path.display()))
}

fn load_algebra(path: &Path) -> Result<ColorHomLieAlgebra, Exit> {
    format::parse_algebra(&read(path)?).map_err(|e| located(path, e))
}

fn full_report(a: &ColorHomLieAlgebra) -> VerificationReport {
    let mut r = a.epsilon().verify();
    r.merge(a.verify());
    r
}

fn report_json(r: &VerificationReport) -> Value {
    json!({
        "passed": r.passed(),
        "violations": serde_json::to_value(&r.violations).unwrap(),
    })
}

/// Loads, verifies and builds the context; violations end the command.
fn load_context(spec: &Path, mu: Option<&str>) -> Result<UeaContext, Exit> {
    let a = load_algebra(spec)?;
    let report = full_report(&a);
    if !report.passed() {
        return Err(Exit {
            code: EXIT_VIOLATION,
            message: format!("definition fails verification:\n{report}"),
            structured: Some(report_json(&report)),
        });
    }
    let ctx = uea::build_alpha_stable_basis(&a)?;
    match mu {
        Some(m) => Ok(ctx.with_mu(parse_cli_scalar(m, &ctx)?)?),
        None => Ok(ctx),
    }
}

fn parse_cli_scalar(text: &str, ctx: &UeaContext) -> Result<Scalar, Exit> {
    let order = ctx.original().epsilon().group().exponent();
    Scalar::parse(text, order)
        .map_err(|e| Exit::parse(format!("bad scalar '{text}' at column {}: {}", e.column, e.message)))
}

fn load_element(path: &Path, ctx: &UeaContext) -> Result<TensorElement, Exit> {
    let a = ctx.original();
    let t = format::parse_element(&read(path)?, a.basis().names(), a.epsilon().group().exponent())
        .map_err(|e| located(path, e))?;
    if t.is_zero() && read(path)?.lines().all(|l| l.split('#').next().unwrap_or("").trim().is_empty()) {
        return Err(Exit::parse(format!("{}: no terms", path.display())));
    }
    Ok(ctx.from_original(&t))
}

fn basis_text(ctx: &UeaContext) -> String {
    let names = ctx.original().basis().names();
    let mut s = format!("mu: {}\nX:\n", ctx.mu());
    for (k, xn) in ctx.x_names().iter().enumerate() {
        s.push_str(&format!("  {xn} = {}\n", ctx.change_of_basis().column(k).display(names)));
    }
    s
}

fn basis_json(ctx: &UeaContext) -> Value {
    let names = ctx.original().basis().names();
    let basis: Vec<Value> = ctx
        .x_names()
        .iter()
        .enumerate()
        .map(|(k, xn)| json!({ "name": xn, "value": ctx.change_of_basis().column(k).display(names).to_string() }))
        .collect();
    json!(basis)
}

fn terms_json(t: &TensorElement, names: &[String]) -> Value {
    let terms: Vec<Value> = t
        .terms()
        .map(|(w, c)| {
            let word: Vec<&str> = w.letters().iter().map(|&l| names[l].as_str()).collect();
            json!({ "word": word, "coeff": c.to_string() })
        })
        .collect();
    json!(terms)
}

fn emit_normal_form(io: &mut Io<'_>, ctx: &UeaContext, nf: &NormalForm) {
    match io.format {
        OutputFormat::Text => {
            let mut s = basis_text(ctx);
            s.push_str("normal form:\n");
            if nf.is_zero() {
                s.push_str("0\n");
            } else {
                s.push_str(&format::print_element(nf.as_tensor(), ctx.x_names()));
            }
            write_out(io, &s);
        }
        OutputFormat::Structured => {
            let v = json!({
                "mu": ctx.mu().to_string(),
                "basis": basis_json(ctx),
                "normal_form": terms_json(nf.as_tensor(), ctx.x_names()),
            });
            emit_json(io, &v);
        }
    }
}

fn cmd_verify(spec: &Path, io: &mut Io<'_>) -> Result<i32, Exit> {
    let a = load_algebra(spec)?;
    let report = full_report(&a);
    match io.format {
        OutputFormat::Text => write_out(io, &report.to_string()),
        OutputFormat::Structured => emit_json(io, &report_json(&report)),
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_normalize(spec: &Path, element: &Path, strategy: Strategy, mu: Option<&str>, io: &mut Io<'_>) -> Result<i32, Exit> {
    let ctx = load_context(spec, mu)?;
    let t = load_element(element, &ctx)?;
    let nf = ctx.normal_form_with(&t, strategy)?;
    emit_normal_form(io, &ctx, &nf);
    Ok(EXIT_OK)
}

fn cmd_multiply(
    spec: &Path,
    left: &Path,
    right: &Path,
    strategy: Strategy,
    mu: Option<&str>,
    io: &mut Io<'_>,
) -> Result<i32, Exit> {
    let ctx = load_context(spec, mu)?;
    let u = ctx.normal_form_with(&load_element(left, &ctx)?, strategy)?;
    let v = ctx.normal_form_with(&load_element(right, &ctx)?, strategy)?;
    let product = ctx.odot(&ctx.lift(&u), &ctx.lift(&v));
    let nf = ctx.normal_form_with(&product, strategy)?;
    emit_normal_form(io, &ctx, &nf);
    Ok(EXIT_OK)
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn cmd_pbw_check(
    spec: &Path,
    max_len: usize,
    mu: Option<&str>,
    seed: u64,
    samples: usize,
    io: &mut Io<'_>,
) -> Result<i32, Exit> {
    let start = Instant::now();
    if max_len > DEFAULT_ORACLE_CAP {
        return Err(UeaError::ResourceCap {
            max_len,
            cap: DEFAULT_ORACLE_CAP,
        }
        .into());
    }
    let ctx = load_context(spec, None)?;
    let oracle_mu = match mu {
        Some(m) => parse_cli_scalar(m, &ctx)?,
        None => ctx.mu().clone(),
    };
    let oracle = ctx.decomposition_oracle_with(max_len, &oracle_mu, DEFAULT_ORACLE_CAP)?;
    let names = ctx.x_names();
    let mut checks = vec![Check {
        name: "decomposition",
        passed: oracle.passed(),
        detail: oracle.report.to_string(),
    }];

    let psi = ctx.psi_check()?;
    checks.push(Check {
        name: "psi",
        passed: psi.passed(),
        detail: psi.to_string(),
    });

    let gens = ctx.ideal_generators(max_len)?;
    let mut bad = VerificationReport::new();
    for g in &gens {
        let nf = ctx.normal_form(g)?;
        if !nf.is_zero() {
            bad.push("annihilation", g.display(names).to_string(), nf.display(names));
        }
    }
    checks.push(Check {
        name: "annihilation",
        passed: bad.passed(),
        detail: format!("{} generators; {bad}", gens.len()),
    });

    let mut bad = VerificationReport::new();
    let mut count = 0;
    for l in 1..=max_len {
        for w in ctx.pbw_words(l) {
            count += 1;
            let t = TensorElement::word(w.clone());
            let nf = ctx.normal_form(&ctx.theta(&t))?;
            if nf.as_tensor() != &t {
                bad.push("faithfulness", w.display(names).to_string(), nf.display(names));
            }
        }
    }
    checks.push(Check {
        name: "faithfulness",
        passed: bad.passed(),
        detail: format!("{count} words; {bad}"),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = VerificationReport::new();
    for _ in 0..samples {
        let len = rng.gen_range(1..=max_len + 1);
        let letters: Vec<usize> = (0..len).map(|_| rng.gen_range(0..ctx.dim())).collect();
        let t = TensorElement::word(Word::new(letters).expect("nonempty"));
        let left = ctx.straighten(&t, Strategy::Leftmost)?;
        let right = ctx.straighten(&t, Strategy::Rightmost)?;
        if left != right {
            bad.push("confluence", t.display(names).to_string(), left.as_tensor().sub(right.as_tensor()).display(names));
        }
    }
    checks.push(Check {
        name: "confluence",
        passed: bad.passed(),
        detail: format!("{samples} words, seed {seed}; {bad}"),
    });

    let passed = checks.iter().all(|c| c.passed);
    match io.format {
        OutputFormat::Text => {
            let mut s = basis_text(&ctx);
            s.push_str(&format!(
                "dim T: {}\nrank J: {}\n#W: {}\n#non-increasing words: {}\nrank [J | W]: {}\n",
                oracle.dim_t, oracle.rank_j, oracle.pbw_count, oracle.non_increasing_count, oracle.combined_rank
            ));
            for c in &checks {
                s.push_str(&format!("{}: {}\n", c.name, if c.passed { "pass" } else { "FAIL" }));
                if !c.passed {
                    for line in c.detail.lines().filter(|l| !l.is_empty()) {
                        s.push_str(&format!("  {line}\n"));
                    }
                }
            }
            write_out(io, &s);
        }
        OutputFormat::Structured => {
            let checks_json: Vec<Value> = checks
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect();
            let v = json!({
                "passed": passed,
                "mu": ctx.mu().to_string(),
                "oracle_mu": oracle.mu.to_string(),
                "basis": basis_json(&ctx),
                "max_len": max_len,
                "dim_t": oracle.dim_t,
                "rank_j": oracle.rank_j,
                "pbw_count": oracle.pbw_count,
                "non_increasing_count": oracle.non_increasing_count,
                "combined_rank": oracle.combined_rank,
                "checks": checks_json,
            });
            emit_json(io, &v);
        }
    }
    let _ = writeln!(io.err, "time: {:.3}s", start.elapsed().as_secs_f64());
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}
