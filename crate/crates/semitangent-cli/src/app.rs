use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use semitangent::em::{lambda, pushforward, weil_extend, Assignment, EmError, StructureAlgebra, Substitution, WeilKind};
use semitangent::lawcheck::{reports_json, run_matching, GeneratorConfig, LawError, Status};
use semitangent::module::FreeModule;
use semitangent::poly::Tagged;
use semitangent::semiring::{Scalar, Semiring};
use semitangent::sym::{derive, sym_rename, Polynomial};
use thiserror::Error;

use crate::expr::{format_derivative, format_polynomial, parse_polynomial, ParseError};

#[derive(Debug, Parser)]
#[command(
    name = "semitangent",
    version,
    about = "Differential structure of polynomial algebras over commutative semirings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run law suites and report the results
    Check(CheckArgs),
    /// Print the derivative of each expression
    Diff(ExprArgs),
    /// Split expressions over two copies of the variables into (value, tangent)
    Lambda(ExprArgs),
    /// Push a point and tangent vector through the map given by the expressions
    Tangent(TangentArgs),
    /// Build a Weil extension of an algebra file
    Weil(WeilArgs),
    /// Check the structure constants of an algebra file
    AlgebraValidate(ValidateArgs),
}

#[derive(Debug, Args)]
struct Scope {
    /// nat, int, bool, tropical or mod:<m>
    #[arg(long, default_value = "nat")]
    semiring: Semiring,
    #[arg(long, value_delimiter = ',', default_value = "x,y,z")]
    vars: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    scope: Scope,
    #[arg(long, default_value_t = 4)]
    max_degree: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Glob over law ids or suite names
    #[arg(long, default_value = "*")]
    suite: String,
    /// Random linear combinations per law, on top of the basis
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExprArgs {
    #[command(flatten)]
    scope: Scope,
    #[arg(required = true)]
    exprs: Vec<String>,
}

#[derive(Debug, Args)]
struct TangentArgs {
    #[command(flatten)]
    scope: Scope,
    /// Point as name=value pairs
    #[arg(long, value_delimiter = ',', required = true)]
    point: Vec<String>,
    /// Tangent vector as name=value pairs; missing names are zero
    #[arg(long, value_delimiter = ',')]
    tangent: Vec<String>,
    #[arg(required = true)]
    exprs: Vec<String>,
}

#[derive(Debug, Args)]
struct WeilArgs {
    #[arg(long, default_value = "T")]
    kind: WeilKind,
    /// Used for the unit algebra when no input is given
    #[arg(long, default_value = "nat")]
    semiring: Semiring,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    File(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::File(_) => 3,
        }
    }
}

impl From<LawError> for CliError {
    fn from(e: LawError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn algebra_error(path: &Path, e: EmError) -> CliError {
    match e {
        EmError::Invariant(_) => CliError::Invalid(format!("{}: {e}", path.display())),
        _ => CliError::File(format!("{}: {e}", path.display())),
    }
}

/// Parse `argv` (program name first), run the command and return the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Check(a) => check(a, out),
        Command::Diff(a) => diff(a, out),
        Command::Lambda(a) => lambda_cmd(a, out),
        Command::Tangent(a) => tangent(a, out),
        Command::Weil(a) => weil(a, out),
        Command::AlgebraValidate(a) => validate(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::File(format!("cannot write output: {e}")))
}

fn emit_to(path: Option<&Path>, out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::File(format!("{}: {e}", p.display()))),
        None => emit(out, text),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::File(format!("{}: {e}", path.display())))
}

fn check_vars(vars: &[String]) -> Result<(), CliError> {
    if vars.is_empty() {
        return Err(CliError::Usage("at least one variable is required".into()));
    }
    for (i, v) in vars.iter().enumerate() {
        let mut chars = v.chars();
        let ok = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_');
        if !ok {
            return Err(CliError::Usage(format!("`{v}` is not a variable name")));
        }
        if vars[..i].contains(v) {
            return Err(CliError::Usage(format!("variable `{v}` declared twice")));
        }
    }
    Ok(())
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    check_vars(&a.scope.vars)?;
    let config = GeneratorConfig {
        n_vars: a.scope.vars.len(),
        max_degree: a.max_degree,
        seed: a.seed,
        samples: a.samples,
        ..GeneratorConfig::new(a.scope.semiring)
    };
    config.validate()?;
    let reports = run_matching(&a.suite, &config)?;
    let text = match a.format {
        Format::Json => reports_json(&reports),
        Format::Text => {
            let mut s: String = reports.iter().map(|r| r.text_line() + "\n").collect();
            let count = |st: Status| reports.iter().filter(|r| r.status == st).count();
            s.push_str(&format!(
                "{} laws: {} passed, {} failed, {} skipped\n",
                reports.len(),
                count(Status::Pass),
                count(Status::Fail),
                count(Status::Skipped)
            ));
            s
        }
    };
    emit_to(a.output.as_deref(), out, &text)?;
    Ok(if reports.iter().any(|r| r.status == Status::Fail) { 1 } else { 0 })
}

fn diff(a: ExprArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    check_vars(&a.scope.vars)?;
    for e in &a.exprs {
        let p = parse_polynomial(e, &a.scope.vars, a.scope.semiring)?;
        emit(out, &format!("{}\n", format_derivative(&derive(&p), &a.scope.vars)))?;
    }
    Ok(0)
}

fn lambda_cmd(a: ExprArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    check_vars(&a.scope.vars)?;
    let n = a.scope.vars.len();
    let both: Vec<String> = a
        .scope
        .vars
        .iter()
        .cloned()
        .chain(a.scope.vars.iter().map(|v| format!("{v}'")))
        .collect();
    for e in &a.exprs {
        let p = parse_polynomial(e, &both, a.scope.semiring)?;
        let tagged = sym_rename(&p, |&i| Some(Tagged::new((i / n) as u8, i % n)));
        let (first, second) = lambda(&tagged);
        emit(
            out,
            &format!(
                "({}, {})\n",
                format_polynomial(&first, &a.scope.vars),
                format_polynomial(&second, &a.scope.vars)
            ),
        )?;
    }
    Ok(0)
}

fn assignment(sr: Semiring, vars: &[String], pairs: &[String], flag: &str) -> Result<Assignment, CliError> {
    let mut out = Assignment::new();
    for pair in pairs {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--{flag} expects name=value, got `{pair}`")))?;
        let name = name.trim();
        if !vars.iter().any(|v| v == name) {
            return Err(CliError::Usage(format!("--{flag} names undeclared variable `{name}`")));
        }
        let value = sr.parse_scalar(value).map_err(|e| CliError::Usage(e.to_string()))?;
        if out.insert(name.to_string(), value).is_some() {
            return Err(CliError::Usage(format!("--{flag} gives `{name}` twice")));
        }
    }
    Ok(out)
}

fn tangent(a: TangentArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let Scope { semiring: sr, vars } = &a.scope;
    check_vars(vars)?;
    let point = assignment(*sr, vars, &a.point, "point")?;
    if let Some(v) = vars.iter().find(|v| !point.contains_key(*v)) {
        return Err(CliError::Usage(format!("--point is missing `{v}`")));
    }
    let mut direction = assignment(*sr, vars, &a.tangent, "tangent")?;
    for v in vars {
        direction.entry(v.clone()).or_insert_with(|| sr.zero());
    }
    let target = FreeModule::new(*sr, vars.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    let labels: Vec<String> = (0..a.exprs.len()).map(|i| format!("f{i}")).collect();
    let source = FreeModule::new(*sr, labels.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    let polys = a
        .exprs
        .iter()
        .map(|e| parse_polynomial(e, vars, *sr))
        .collect::<Result<Vec<_>, _>>()?;
    let images = polys
        .iter()
        .map(|p| Polynomial::new(&target, p.clone()).map_err(|e| CliError::Usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let f = Substitution::new(&source, &target, images).map_err(|e| CliError::Usage(e.to_string()))?;
    let (values, tangents) = pushforward(&f, &point, &direction).map_err(|e| CliError::Usage(e.to_string()))?;
    for (label, p) in labels.iter().zip(&polys) {
        let show = |s: &Scalar| sr.format_scalar(s);
        emit(
            out,
            &format!(
                "{} -> ({}, {})\n",
                format_polynomial(p, vars),
                show(&values[label]),
                show(&tangents[label])
            ),
        )?;
    }
    Ok(0)
}

fn load_algebra(path: &Path) -> Result<StructureAlgebra, CliError> {
    StructureAlgebra::from_json(&read(path)?).map_err(|e| algebra_error(path, e))
}

fn weil(a: WeilArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let base = match &a.input {
        Some(p) => load_algebra(p)?,
        None => StructureAlgebra::unit_algebra(a.semiring),
    };
    emit_to(a.output.as_deref(), out, &weil_extend(&base, a.kind).to_json())?;
    Ok(0)
}

fn validate(a: ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let alg = load_algebra(&a.input)?;
    emit(out, &format!("ok: rank {} algebra over {}\n", alg.rank(), alg.semiring()))?;
    Ok(0)
}
