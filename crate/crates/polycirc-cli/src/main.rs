//! `polycirc` — evaluate, differentiate, normalize, synthesize, verify, and
//! train polynomial circuits from the command line.
//!
//! Exit codes: `0` on success, `1` for domain errors (bad files, shape
//! mismatches, failed law checks), `2` for command-line usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polycirc::learn::{self, Dataset, Model, ParamInit, TrainConfig};
use polycirc::verify::{self, AxiomReport, GeneratorExtension};
use polycirc::{dsl, eval, json, polynormal, rdiff, synth};
use polycirc::{Circuit, Error, Result, Semiring};

#[derive(Parser)]
#[command(
    name = "polycirc",
    version,
    about = "Polynomial circuits over semirings: evaluate, differentiate, verify, train"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SemiringArg {
    /// Active semiring, e.g. `zmod:2`, `zp:5`, `sat:4`, `nat`, `bool`.
    #[arg(long, short)]
    semiring: String,
}

#[derive(Args)]
struct CircuitArg {
    /// Circuit file: DSL (`let f = ...` lines or a bare expression) or JSON.
    #[arg(long)]
    circuit: PathBuf,
    /// Definition to use when the file contains more than one.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct OutputArg {
    /// Write the result to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PrettyArg {
    /// Pretty-print emitted JSON.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct BudgetArg {
    /// Cap on enumerated input tuples; overrides the POLYCIRC_BUDGET
    /// environment variable (default 2^20).
    #[arg(long)]
    budget: Option<u64>,
}

/// Serialization for emitted circuits.
#[derive(ValueEnum, Clone, Copy, Default)]
enum Format {
    /// JSON interchange format.
    #[default]
    Json,
    /// The textual circuit language.
    Dsl,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a circuit on one input tuple.
    Eval {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        circuit: CircuitArg,
        /// Comma-separated input codes, e.g. `1,0,2`; empty for arity 0.
        #[arg(long, default_value = "")]
        input: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Tabulate a circuit over its whole (finite) input space as CSV.
    Table {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        circuit: CircuitArg,
        #[command(flatten)]
        budget: BudgetArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Emit the reverse derivative of a circuit.
    Rdiff {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        circuit: CircuitArg,
        /// Output serialization.
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Emit the forward derivative of a circuit.
    Forward {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        circuit: CircuitArg,
        /// Output serialization.
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Print the polynomial normal form of a circuit, one line per output.
    Normalize {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        circuit: CircuitArg,
        #[command(flatten)]
        budget: BudgetArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Synthesize a circuit from a complete function table.
    Synth {
        #[command(flatten)]
        semiring: SemiringArg,
        /// Function-table CSV with `x0..` and `y0..` columns, rows in
        /// input order.
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        budget: BudgetArg,
        /// Output serialization.
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Run law checks and print a JSON report; exits 1 if any check fails.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Train a model circuit by reverse-derivative ascent.
    Train {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        circuit: CircuitArg,
        /// Training-set CSV with `x0..` and `y0..` columns.
        #[arg(long)]
        data: PathBuf,
        /// Explicit initial parameters as comma-separated codes; their count
        /// fixes how many leading wires are parameters.
        #[arg(long, conflicts_with = "param_arity")]
        params: Option<String>,
        /// Number of leading parameter wires; initial values are drawn
        /// uniformly from the seed.
        #[arg(long)]
        param_arity: Option<usize>,
        /// Passes over the training set.
        #[arg(long, default_value_t = 1)]
        epochs: usize,
        /// Seed for the uniform parameter initialization.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Circuit file holding a custom error map (default: pointwise add).
        #[arg(long)]
        error_map: Option<PathBuf>,
        /// Definition name inside the error-map file.
        #[arg(long)]
        error_name: Option<String>,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        what: DemoCmd,
    },
    /// Parse a circuit file and report each definition's shape.
    Check {
        #[command(flatten)]
        semiring: SemiringArg,
        /// Circuit file to check.
        #[arg(long)]
        circuit: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check the reverse-derivative axioms for one circuit.
    Axioms {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        circuit: CircuitArg,
        /// Seed for sampled sweeps over large input spaces.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Check a candidate generator extension against its defining equations
    /// and the derivative axioms.
    Extension {
        #[command(flatten)]
        semiring: SemiringArg,
        /// Which built-in extension to check.
        #[arg(long, value_enum)]
        rule: Rule,
        /// Seed for sampled sweeps over large input spaces.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Check the semiring presentation equations.
    Presentation {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Check that reversal respects composition for a pair of circuits.
    Preservation {
        #[command(flatten)]
        semiring: SemiringArg,
        /// Circuit file holding both definitions.
        #[arg(long)]
        circuit: PathBuf,
        /// First circuit of the pair (`f` in `f ; g`).
        #[arg(long)]
        name: Option<String>,
        /// Second circuit of the pair (`g` in `f ; g`).
        #[arg(long)]
        with: Option<String>,
        /// Seed for sampled sweeps over large input spaces.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
}

/// The built-in generator extensions `verify extension` knows about.
#[derive(ValueEnum, Clone, Copy)]
enum Rule {
    /// Additive inverse, defined by `x + neg(x) = 0`.
    Negate,
    /// Equality comparator with a zero reverse derivative.
    Compare,
    /// A squaring gate with a deliberately wrong reverse derivative.
    BrokenSquare,
    /// A constant gate whose reverse derivative fails to vanish.
    LeakyZero,
}

#[derive(Subcommand)]
enum DemoCmd {
    /// Push the same output error through `add` chains over this carrier
    /// and report how the update wraps, saturates, or carries over.
    WrapAround {
        #[command(flatten)]
        semiring: SemiringArg,
        #[command(flatten)]
        pretty: PrettyArg,
        #[command(flatten)]
        output: OutputArg,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Eval {
            semiring,
            circuit,
            input,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let c = load_one(&desc, &circuit)?;
            let input = parse_codes(&desc, &input)?;
            let values = eval::eval(&desc, &c, &input)?;
            emit(&output, join_codes(&values))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Table {
            semiring,
            circuit,
            budget,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let c = load_one(&desc, &circuit)?;
            let t = eval::function_table_with_budget(&desc, &c, resolve_budget(budget)?)?;
            emit(&output, t.to_csv()?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Rdiff {
            semiring,
            circuit,
            format,
            pretty,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let c = load_one(&desc, &circuit)?;
            emit(&output, render_circuit(&rdiff::reverse(&c), format, pretty.pretty))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Forward {
            semiring,
            circuit,
            format,
            pretty,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let c = load_one(&desc, &circuit)?;
            emit(&output, render_circuit(&rdiff::forward(&c), format, pretty.pretty))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Normalize {
            semiring,
            circuit,
            budget,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let c = load_one(&desc, &circuit)?;
            let pm = polynormal::to_poly_with_budget(&desc, &c, resolve_budget(budget)?)?;
            emit(&output, pm.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Synth {
            semiring,
            table,
            budget,
            format,
            pretty,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let t = eval::FunctionTable::from_csv(&desc, &read_file(&table)?)?;
            let c = synth::synth_from_table_with_budget(&desc, &t, resolve_budget(budget)?)?;
            emit(&output, render_circuit(&c, format, pretty.pretty))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { what } => run_verify(what),
        Cmd::Train {
            semiring,
            circuit,
            data,
            params,
            param_arity,
            epochs,
            seed,
            error_map,
            error_name,
            pretty,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let c = load_one(&desc, &circuit)?;
            let data = Dataset::from_csv(&desc, &read_file(&data)?)?;
            let (init, param_arity) = match (params, param_arity) {
                (Some(p), _) => {
                    let codes = parse_codes(&desc, &p)?;
                    let n = codes.len();
                    (ParamInit::Explicit(codes), n)
                }
                (None, Some(n)) => (ParamInit::SeededUniform, n),
                (None, None) => {
                    return Err(Error::Invalid(
                        "training needs --params or --param-arity to split the model's wires"
                            .into(),
                    ))
                }
            };
            let model = Model::new(c, param_arity, data.input_arity)?;
            let error_map = match error_map {
                Some(path) => {
                    let defs = load_defs(&desc, &path)?;
                    pick(&defs, error_name.as_deref())?
                }
                None => learn::default_error_map(model.output_arity()),
            };
            let cfg = TrainConfig {
                epochs,
                seed,
                error_map,
                init,
            };
            let result = learn::train(&desc, &model, &data, &cfg)?;
            emit(&output, to_json(&result, pretty.pretty))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Demo { what } => match what {
            DemoCmd::WrapAround {
                semiring,
                pretty,
                output,
            } => {
                let desc = Semiring::parse(&semiring.semiring)?;
                let report = learn::wrap_around_demo(&desc);
                emit(&output, to_json(&report, pretty.pretty))?;
                Ok(ExitCode::SUCCESS)
            }
        },
        Cmd::Check { semiring, circuit } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let defs = load_defs(&desc, &circuit)?;
            let mut lines = String::new();
            for (name, c) in &defs {
                lines.push_str(&format!("{name} : {}\n", c.shape()));
            }
            emit(&OutputArg { output: None }, lines)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_verify(what: VerifyCmd) -> Result<ExitCode> {
    let (report, pretty, output) = match what {
        VerifyCmd::Axioms {
            semiring,
            circuit,
            seed,
            pretty,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let c = load_one(&desc, &circuit)?;
            let report = match seed {
                Some(s) => verify::check_rdc_axioms_seeded(&desc, &c, s)?,
                None => verify::check_rdc_axioms(&desc, &c)?,
            };
            (report, pretty, output)
        }
        VerifyCmd::Extension {
            semiring,
            rule,
            seed,
            pretty,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let ext: GeneratorExtension = match rule {
                Rule::Negate => verify::negate_extension(),
                Rule::Compare => verify::compare_extension(&desc)?,
                Rule::BrokenSquare => verify::broken_square_extension(),
                Rule::LeakyZero => verify::leaky_zero_extension(),
            };
            let report = match seed {
                Some(s) => verify::check_extension_seeded(&desc, &ext, s)?,
                None => verify::check_extension(&desc, &ext)?,
            };
            (report, pretty, output)
        }
        VerifyCmd::Presentation {
            semiring,
            pretty,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            (verify::check_presentation(&desc)?, pretty, output)
        }
        VerifyCmd::Preservation {
            semiring,
            circuit,
            name,
            with,
            seed,
            pretty,
            output,
        } => {
            let desc = Semiring::parse(&semiring.semiring)?;
            let defs = load_defs(&desc, &circuit)?;
            let (f, g) = match (name.as_deref(), with.as_deref()) {
                (Some(a), Some(b)) => (pick(&defs, Some(a))?, pick(&defs, Some(b))?),
                (None, None) if defs.len() == 2 => (defs[0].1.clone(), defs[1].1.clone()),
                _ => {
                    return Err(Error::Invalid(
                        "preservation needs two circuits: pass --name and --with, \
                         or a file with exactly two definitions"
                            .into(),
                    ))
                }
            };
            let report = match seed {
                Some(s) => verify::check_preservation_seeded(&desc, &f, &g, s)?,
                None => verify::check_preservation(&desc, &f, &g)?,
            };
            (report, pretty, output)
        }
    };
    emit(&output, report_json(&report, pretty.pretty))?;
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------------------
// File loading
// ---------------------------------------------------------------------------

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// Load every definition in a circuit file.  JSON program files start with a
/// `semiring` header, bare JSON circuits with any other key; anything else is
/// DSL text, taken as `let` definitions when it starts with one and as a
/// single anonymous expression otherwise.
fn load_defs(desc: &Semiring, path: &Path) -> Result<Vec<(String, Circuit)>> {
    let text = read_file(path)?;
    let t = text.trim_start();
    if let Some(rest) = t.strip_prefix('{') {
        if rest.trim_start().starts_with("\"semiring\"") {
            json::decode_program(desc, &text)
        } else {
            Ok(vec![("main".into(), json::decode_circuit(desc, &text)?)])
        }
    } else if t.starts_with("let ") || t.starts_with("let\t") {
        dsl::parse(desc, &text)
    } else {
        Ok(vec![("main".into(), dsl::parse_expr(desc, &text)?)])
    }
}

fn pick(defs: &[(String, Circuit)], name: Option<&str>) -> Result<Circuit> {
    match name {
        Some(n) => defs
            .iter()
            .find(|(k, _)| k == n)
            .map(|(_, c)| c.clone())
            .ok_or_else(|| Error::UnknownName(n.to_string())),
        None if defs.len() == 1 => Ok(defs[0].1.clone()),
        None => Err(Error::Invalid(format!(
            "the file defines {} circuits; choose one with --name",
            defs.len()
        ))),
    }
}

fn load_one(desc: &Semiring, arg: &CircuitArg) -> Result<Circuit> {
    let defs = load_defs(desc, &arg.circuit)?;
    pick(&defs, arg.name.as_deref())
}

// ---------------------------------------------------------------------------
// Values, budgets, output
// ---------------------------------------------------------------------------

fn parse_codes(desc: &Semiring, text: &str) -> Result<Vec<u64>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for piece in t.split(',') {
        let piece = piece.trim();
        let v: u64 = piece
            .parse()
            .map_err(|_| Error::Invalid(format!("`{piece}` is not a carrier code")))?;
        desc.check_value(v)?;
        out.push(v);
    }
    Ok(out)
}

fn join_codes(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn resolve_budget(arg: BudgetArg) -> Result<u64> {
    if let Some(b) = arg.budget {
        return Ok(b);
    }
    match std::env::var("POLYCIRC_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("POLYCIRC_BUDGET must be a number, got `{v}`"))),
        Err(_) => Ok(eval::DEFAULT_BUDGET),
    }
}

fn render_circuit(c: &Circuit, format: Format, pretty: bool) -> String {
    match format {
        Format::Json if pretty => json::encode_circuit_pretty(c),
        Format::Json => json::encode_circuit(c),
        Format::Dsl => dsl::render(c),
    }
}

fn to_json<T: serde::Serialize>(value: &T, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("reports serialize")
    } else {
        serde_json::to_string(value).expect("reports serialize")
    }
}

/// Render a law report with the checks keyed by law name, so callers can
/// index straight into `checks["additivity-of-change"].status`.
fn report_json(report: &AxiomReport, pretty: bool) -> String {
    let mut checks = serde_json::Map::new();
    for check in &report.checks {
        let mut v = serde_json::to_value(check).expect("reports serialize");
        if let serde_json::Value::Object(ref mut fields) = v {
            fields.remove("axiom");
        }
        checks.insert(check.axiom.clone(), v);
    }
    let root = serde_json::json!({
        "semiring": report.semiring,
        "subject": report.subject,
        "passed": report.passed,
        "checks": checks,
    });
    to_json(&root, pretty)
}

fn emit(arg: &OutputArg, mut text: String) -> Result<()> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &arg.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
