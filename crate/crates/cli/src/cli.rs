//! Argument parsing and dispatch, kept apart from `main` so it can be driven in-process.

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use spherecover_core::estimates::Formula;
use spherecover_core::extension::ExtendOptions;
use spherecover_core::thurston::{DecayParams, DEFAULT_UNIVERSE_CAP};

use crate::commands::{self, EstimateArgs, ExtendArgs, SearchOptions, VerdictArgs};
use crate::document::{parse, Document};
use crate::num::{parse_range, parse_rational};
use crate::report::{Report, Severity, Status};

pub const SCHEMA: &str = include_str!("../schema/document.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "spherecover",
    version,
    about = "Combinatorial checks for branched self-coverings of the marked sphere"
)]
pub struct Cli {
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Downgrade unknown document keys from errors to warnings.
    #[arg(long, global = true)]
    pub lenient: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct DocArg {
    /// Document path, or `-` for standard input.
    #[arg(long, short, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Same as --input.
    #[arg(value_name = "FILE", conflicts_with = "input")]
    pub file: Option<PathBuf>,
}

impl DocArg {
    fn path(&self) -> Option<&Path> {
        self.input.as_deref().or(self.file.as_deref())
    }
}

#[derive(Debug, Args)]
pub struct PieceArgs {
    /// Periodic piece to extend; optional when the document has only one.
    #[arg(long)]
    pub piece: Option<String>,
    /// Multiplier modulus recorded for z-cycles on which every degree is 1.
    #[arg(long, default_value = "1/2")]
    pub multiplier_default: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every structural check on a document.
    Validate(DocArg),
    /// Orbifold signature, Euler characteristic and type.
    Orbifold(DocArg),
    /// Thurston matrix and spectral comparison for one multicurve.
    Thurston {
        #[command(flatten)]
        doc: DocArg,
        /// A named multicurve of the document, or comma-separated curve ids.
        #[arg(long)]
        multicurve: String,
    },
    /// Enumerate stable multicurves with leading eigenvalue at least 1.
    Search {
        #[command(flatten)]
        doc: DocArg,
        #[arg(long, default_value_t = DEFAULT_UNIVERSE_CAP)]
        universe_cap: usize,
        /// Length floor for curves that do not decay.
        #[arg(long, default_value_t = 0.1)]
        floor: f64,
        /// Trailing samples examined by the decay diagnostic.
        #[arg(long, default_value_t = 8)]
        window: usize,
        /// Per-step ratio below which a curve counts as decaying.
        #[arg(long, default_value_t = 0.95)]
        ratio: f64,
    },
    /// Thick/thin decomposition, carriers and the piece map.
    Decompose(DocArg),
    /// Cap the boundary of a periodic piece and describe the result.
    Extend {
        #[command(flatten)]
        doc: DocArg,
        #[command(flatten)]
        piece: PieceArgs,
    },
    /// Realizability verdict for the extension of a periodic piece.
    Verdict {
        #[command(flatten)]
        doc: DocArg,
        #[command(flatten)]
        piece: PieceArgs,
        #[arg(long, default_value_t = DEFAULT_UNIVERSE_CAP)]
        universe_cap: usize,
    },
    /// Evaluate one of the geometric bounds.
    Estimates(EstimateCli),
    /// Print the JSON schema of the document format.
    Schema,
}

#[derive(Debug, Args)]
pub struct EstimateCli {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(Formula::ALL.map(Formula::name)))]
    pub formula: String,
    /// Curve length (collar).
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<String>,
    /// Point in (0, 1) (zeta, poincare).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Modulus K (thin-cut).
    #[arg(long = "K", allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Modulus K1 (r0, samebig-c, thin-cut).
    #[arg(long = "K1", allow_hyphen_values = true)]
    pub k1: Option<String>,
    /// |z| (separation).
    #[arg(long = "abs-z", allow_hyphen_values = true)]
    pub abs_z: Option<String>,
    /// Length l_E (capped-length, zj-floor).
    #[arg(long = "l-e", allow_hyphen_values = true)]
    pub l_e: Option<String>,
    /// Cap constant c > 1 (capped-length).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Epsilon in (0, 1) (zj-floor).
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    /// Significant digits in the output.
    #[arg(long, default_value_t = 30)]
    pub precision: usize,
    /// Tabulate over one parameter: PARAM=start:stop:step (stop inclusive).
    #[arg(long)]
    pub sweep: Option<String>,
}

/// What a run printed and how it ended.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stderr: text,
                    code: 2,
                    ..Outcome::default()
                }
            } else {
                Outcome {
                    stdout: text,
                    ..Outcome::default()
                }
            };
        }
    };
    execute(&cli, stdin)
}

fn read_input(path: &Path, stdin: &mut dyn Read) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn finish(report: &Report, format: Format) -> Outcome {
    Outcome {
        stdout: match format {
            Format::Text => report.to_text(),
            Format::Json => report.to_json(),
        },
        stderr: String::new(),
        code: report.status.exit_code(),
    }
}

fn extend_options(piece: &PieceArgs, r: &mut Report) -> ExtendOptions {
    match parse_rational(&piece.multiplier_default) {
        Ok(m) => ExtendOptions { default_multiplier: m },
        Err(e) => {
            r.error("parameter", format!("--multiplier-default: {e}"));
            ExtendOptions::default()
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate(_) => "validate",
        Command::Orbifold(_) => "orbifold",
        Command::Thurston { .. } => "thurston",
        Command::Search { .. } => "search",
        Command::Decompose(_) => "decompose",
        Command::Extend { .. } => "extend",
        Command::Verdict { .. } => "verdict",
        Command::Estimates(_) => "estimates",
        Command::Schema => "schema",
    }
}

fn doc_path(c: &Command) -> Option<&Path> {
    match c {
        Command::Validate(d) | Command::Orbifold(d) | Command::Decompose(d) => d.path(),
        Command::Thurston { doc, .. }
        | Command::Search { doc, .. }
        | Command::Extend { doc, .. }
        | Command::Verdict { doc, .. } => doc.path(),
        Command::Estimates(_) | Command::Schema => None,
    }
}

pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let name = command_name(&cli.command);
    let format = if cli.json { Format::Json } else { Format::Text };
    match &cli.command {
        Command::Schema => {
            return Outcome {
                stdout: SCHEMA.to_string(),
                ..Outcome::default()
            }
        }
        Command::Estimates(e) => return estimates(e, format),
        _ => {}
    }

    let Some(path) = doc_path(&cli.command) else {
        return Outcome {
            stderr: format!("error: `{name}` needs a document: pass --input FILE (or - for standard input)\n"),
            code: 2,
            ..Outcome::default()
        };
    };
    let text = match read_input(path, stdin) {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                stderr: format!("error: cannot read {}: {e}\n", path.display()),
                code: 2,
                ..Outcome::default()
            }
        }
    };
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    let parsed = match parse(&text, cli.lenient) {
        Ok(p) => p,
        Err(errors) => {
            let mut r = Report::new(name, stem);
            for e in &errors {
                r.input_error(e, Severity::Error);
            }
            return finish(&r, format);
        }
    };
    let doc: &Document = &parsed.document;
    let mut r = Report::new(name, doc.name.clone().or(stem));
    for w in &parsed.warnings {
        r.input_error(w, Severity::Warning);
    }

    match &cli.command {
        Command::Validate(_) => commands::validate(doc, &mut r),
        Command::Orbifold(_) => commands::orbifold(doc, &mut r),
        Command::Thurston { multicurve, .. } => commands::thurston(doc, multicurve, &mut r),
        Command::Search {
            universe_cap,
            floor,
            window,
            ratio,
            ..
        } => {
            let decay = DecayParams {
                floor: *floor,
                window: *window,
                ratio_threshold: *ratio,
            };
            commands::search(
                doc,
                &SearchOptions {
                    universe_cap: *universe_cap,
                    decay,
                },
                &mut r,
            )
        }
        Command::Decompose(_) => commands::decompose(doc, &mut r),
        Command::Extend { piece, .. } => {
            let options = extend_options(piece, &mut r);
            if r.status != Status::Invalid {
                let args = ExtendArgs {
                    piece: piece.piece.as_deref(),
                    options,
                };
                commands::extend_piece(doc, &args, &mut r);
            }
        }
        Command::Verdict {
            piece, universe_cap, ..
        } => {
            let options = extend_options(piece, &mut r);
            if r.status != Status::Invalid {
                let args = VerdictArgs {
                    piece: piece.piece.as_deref(),
                    options,
                    universe_cap: *universe_cap,
                };
                commands::verdict(doc, &args, &mut r);
            }
        }
        Command::Estimates(_) | Command::Schema => unreachable!("handled above"),
    }
    finish(&r, format)
}

fn estimates(e: &EstimateCli, format: Format) -> Outcome {
    let mut r = Report::new("estimates", None);
    let formula: Formula = e.formula.parse().expect("clap restricts the formula names");
    let mut params = Vec::new();
    let given = [
        ("l", &e.l),
        ("x", &e.x),
        ("K", &e.k),
        ("K1", &e.k1),
        ("abs-z", &e.abs_z),
        ("l-e", &e.l_e),
        ("c", &e.c),
        ("epsilon", &e.epsilon),
    ];
    for (name, value) in given {
        if let Some(v) = value {
            match parse_rational(v) {
                Ok(q) => params.push((name.to_string(), q)),
                Err(msg) => r.error("parameter", format!("--{name}: {msg}")),
            }
        }
    }
    let sweep = e.sweep.as_ref().and_then(|s| match s.split_once('=') {
        Some((name, range)) => match parse_range(range) {
            Ok(grid) => Some((name.to_string(), grid)),
            Err(msg) => {
                r.error("parameter", format!("--sweep: {msg}"));
                None
            }
        },
        None => {
            r.error("parameter", "--sweep expects PARAM=start:stop:step");
            None
        }
    });
    if r.status == Status::Invalid {
        return finish(&r, format);
    }
    let args = EstimateArgs {
        formula,
        params,
        precision: e.precision,
        sweep,
    };
    let rows = commands::estimates(&args, &mut r);
    if format == Format::Text && !rows.is_empty() && r.status == Status::Ok {
        let mut out = String::new();
        for row in rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        return Outcome {
            stdout: out,
            ..Outcome::default()
        };
    }
    finish(&r, format)
}
