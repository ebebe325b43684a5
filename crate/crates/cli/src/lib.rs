//! The `nil` command-line tool.
//!
//! [`run`] is the whole program; `main` only wires it to the process.

mod commands;
pub mod spec;
pub mod syntax;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spec::{IdealText, Options, ProblemSpec};
use syntax::ParseError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

/// JSON schema of every `--format json` document.
pub const OUTPUT_SCHEMA: &str = include_str!("../schema/output.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "nil", version, about = "Multiplier ideals, adjoint ideals and thresholds of monomial ideals")]
struct Cli {
    /// Output format (check-adjunction defaults to json).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON problem file; flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Seed for the Monte Carlo oracle.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the numerical oracle.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit with status 4 when the oracle is inconclusive.
    #[arg(long, global = true)]
    strict: bool,
    /// Variable names in axis order, e.g. `x,y` (inferred when omitted).
    #[arg(long, global = true, value_delimiter = ',')]
    vars: Vec<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Default)]
struct Source {
    /// Monomial ideal, e.g. "x^2, y^3".
    #[arg(long)]
    ideal: Option<String>,
    /// Toric function, e.g. "min(2*x, 3*y)" or "power(5/2; 1)".
    #[arg(long)]
    function: Option<String>,
    /// Scale c > 0, as p/q.
    #[arg(long)]
    c: Option<String>,
}

#[derive(Args, Debug, Default)]
struct IdealScale {
    #[arg(long)]
    ideal: Option<String>,
    #[arg(long)]
    c: Option<String>,
}

#[derive(Args, Debug, Default)]
struct IdealScaleAxis {
    #[arg(long)]
    ideal: Option<String>,
    #[arg(long)]
    c: Option<String>,
    /// Hyperplane variable H = {axis = 0}.
    #[arg(long)]
    axis: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multiplier ideal of an ideal at scale c, or of a toric function.
    Mult(Source),
    /// Adjoint ideal along a coordinate hyperplane.
    Adj(IdealScaleAxis),
    /// Membership in the zero adjoint ideal of (k/2)·log Σ|z_i|^(2α_i).
    Adj0 {
        #[arg(long)]
        k: Option<String>,
        /// Comma-separated positive rationals.
        #[arg(long)]
        alpha: Option<String>,
        /// Comma-separated exponents of the test monomial.
        #[arg(long)]
        beta: Option<String>,
        /// Test monomial, alternative to --beta.
        #[arg(long)]
        monomial: Option<String>,
        #[arg(long)]
        axis: Option<String>,
    },
    /// Log canonical threshold.
    Lct {
        #[arg(long)]
        ideal: Option<String>,
    },
    /// Jumping numbers in (0, c_max].
    Jump {
        #[arg(long)]
        ideal: Option<String>,
        #[arg(long = "c-max")]
        c_max: Option<String>,
    },
    /// An ε with I((1+ε)c) = I(c).
    Openness(IdealScale),
    /// Valuative membership test with a certificate for non-members.
    Valuation {
        #[command(flatten)]
        source: Source,
        /// Test monomial, e.g. `x*y^2`.
        #[arg(long)]
        monomial: Option<String>,
        /// Comma-separated exponents, alternative to --monomial.
        #[arg(long)]
        beta: Option<String>,
    },
    /// Adjunction sequence check along a hyperplane.
    CheckAdjunction(IdealScaleAxis),
    /// Numerical integrability check.
    Oracle {
        #[command(flatten)]
        source: Source,
        /// orthant, adjoint, polydisk or radial.
        #[arg(long)]
        mode: Option<String>,
        /// Linear shift A, comma-separated rationals.
        #[arg(long)]
        shift: Option<String>,
        /// Exponents of the monomial weight |z^β|², comma-separated.
        #[arg(long)]
        beta: Option<String>,
        /// Monomial weight, alternative to --beta.
        #[arg(long)]
        monomial: Option<String>,
        /// Excess ε in the adjoint weight.
        #[arg(long)]
        epsilon: Option<String>,
        /// Hyperplane variable for the adjoint and Poincaré weights.
        #[arg(long)]
        axis: Option<String>,
        /// plain or poincare.
        #[arg(long)]
        weight: Option<String>,
        /// Box sizes, comma-separated.
        #[arg(long)]
        schedule: Option<String>,
        /// Quadrature nodes per axis.
        #[arg(long)]
        points: Option<usize>,
        /// Monte Carlo samples per box.
        #[arg(long)]
        samples: Option<u64>,
    },
}

impl Command {
    fn into_spec(self) -> ProblemSpec {
        let ideal = |s: Option<String>| s.map(IdealText::Joined);
        let mut spec = ProblemSpec::default();
        let name = match self {
            Command::Mult(s) => {
                spec.ideal = ideal(s.ideal);
                spec.toric_function = s.function;
                spec.c = s.c;
                "mult"
            }
            Command::Adj(a) => {
                spec.ideal = ideal(a.ideal);
                spec.c = a.c;
                spec.axis = a.axis;
                "adj"
            }
            Command::CheckAdjunction(a) => {
                spec.ideal = ideal(a.ideal);
                spec.c = a.c;
                spec.axis = a.axis;
                "check-adjunction"
            }
            Command::Adj0 {
                k,
                alpha,
                beta,
                monomial,
                axis,
            } => {
                spec.options = Options {
                    k,
                    alpha,
                    beta,
                    monomial,
                    ..Options::default()
                };
                spec.axis = axis;
                "adj0"
            }
            Command::Lct { ideal: i } => {
                spec.ideal = ideal(i);
                "lct"
            }
            Command::Jump { ideal: i, c_max } => {
                spec.ideal = ideal(i);
                spec.options.c_max = c_max;
                "jump"
            }
            Command::Openness(a) => {
                spec.ideal = ideal(a.ideal);
                spec.c = a.c;
                "openness"
            }
            Command::Valuation { source, monomial, beta } => {
                spec.ideal = ideal(source.ideal);
                spec.toric_function = source.function;
                spec.c = source.c;
                spec.options.monomial = monomial;
                spec.options.beta = beta;
                "valuation"
            }
            Command::Oracle {
                source,
                mode,
                shift,
                beta,
                monomial,
                epsilon,
                axis,
                weight,
                schedule,
                points,
                samples,
            } => {
                spec.ideal = ideal(source.ideal);
                spec.toric_function = source.function;
                spec.c = source.c;
                spec.axis = axis;
                spec.options = Options {
                    mode,
                    shift,
                    beta,
                    monomial,
                    epsilon,
                    weight,
                    schedule,
                    points,
                    samples,
                    ..Options::default()
                };
                "oracle"
            }
        };
        spec.command = Some(name.into());
        spec
    }
}

/// Failures, each mapped to an exit status.
#[derive(Debug)]
pub(crate) enum Failure {
    Input(String),
    Parse { field: &'static str, error: ParseError },
    Core(nil_core::Error),
}

impl From<nil_core::Error> for Failure {
    fn from(e: nil_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) | Failure::Parse { .. } => EXIT_INPUT,
            Failure::Core(nil_core::Error::Hypothesis(_)) => EXIT_HYPOTHESIS,
            Failure::Core(nil_core::Error::Certificate(_)) => EXIT_INTERNAL,
            Failure::Core(_) => EXIT_INPUT,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => m.clone(),
            Failure::Parse { field, error } => format!("in {field}: {error}"),
            Failure::Core(e) => e.to_string(),
        }
    }
}

/// A successful command: JSON payload plus the text rendering.
pub(crate) struct Outcome {
    pub result: Value,
    pub certificates: Value,
    pub text: Vec<(String, String)>,
    /// Oracle verdict was Inconclusive.
    pub inconclusive: bool,
}

/// Process-level settings outside the problem itself.
pub(crate) struct Settings {
    pub seed: Option<u64>,
}

fn style(label: &str, color: bool) -> String {
    if color {
        format!("\x1b[1m{label}\x1b[0m")
    } else {
        label.to_string()
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_styled(args, out, err, false)
}

/// As [`run`], with ANSI styling of text output when `color` is set.
pub fn run_styled<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let error_line = |err: &mut dyn Write, msg: &str| {
        let _ = writeln!(err, "{} {msg}", if color { "\x1b[31merror:\x1b[0m" } else { "error:" });
    };

    let file_spec = match &cli.input {
        None => ProblemSpec::default(),
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))
            .and_then(|s| serde_json::from_str::<ProblemSpec>(&s).map_err(|e| format!("invalid problem file {}: {e}", path.display())))
        {
            Ok(s) => s,
            Err(m) => {
                error_line(err, &m);
                return EXIT_INPUT;
            }
        },
    };
    let mut flags = cli.command.map(Command::into_spec).unwrap_or_default();
    flags.variables = cli.vars.clone();
    let spec = flags.merge(file_spec);
    let Some(command) = spec.command.clone() else {
        error_line(err, "no command given (use a subcommand or a \"command\" field in --input)");
        return EXIT_INPUT;
    };
    let format = cli.format.unwrap_or(if command == "check-adjunction" { Format::Json } else { Format::Text });
    let settings = Settings { seed: cli.seed };

    let execute = || commands::execute(&command, spec.clone(), &settings);
    let result = match cli.threads {
        None => execute(),
        Some(0) => Err(Failure::Input("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(execute),
            Err(e) => Err(Failure::Input(format!("cannot start {n} threads: {e}"))),
        },
    };

    match result {
        Err(f) => {
            error_line(err, &f.message());
            f.exit_code()
        }
        Ok((inputs, outcome)) => {
            match format {
                Format::Json => {
                    let doc = json!({
                        "command": command,
                        "inputs": serde_json::to_value(&inputs).unwrap(),
                        "result": outcome.result,
                        "certificates": outcome.certificates,
                        "version": env!("CARGO_PKG_VERSION"),
                    });
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap());
                }
                Format::Text => {
                    for (label, value) in &outcome.text {
                        if label.is_empty() {
                            let _ = writeln!(out, "{value}");
                        } else {
                            let _ = writeln!(out, "{}: {value}", style(label, color));
                        }
                    }
                }
            }
            if outcome.inconclusive && cli.strict {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            }
        }
    }
}
