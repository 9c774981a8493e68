//! Command line front end for the coordinate kernel.
//!
//! Six subcommands: `act` applies a mapping word to a coordinate vector,
//! `count` counts the components of an integral multicurve, `dilatation`
//! estimates the growth rate of a word, `scan` sweeps all short recipe
//! words, `verify-relations` runs the randomized relation suites, and
//! `presets` lists the built-in surfaces.
//!
//! All input and output is JSON with rationals carried as strings, so round
//! trips stay exact. Output is deterministic: the same inputs and seeds
//! produce the same bytes. Exit codes: 0 success, 1 invalid input, 2
//! runtime failure, 3 a relation suite found a counterexample.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dtcoords::coords::{validate_integral, CoordsJson, DTCoords, EntryJson, Scope};
use dtcoords::dsl::parse_word;
use dtcoords::moves::apply_word;
use dtcoords::multicurve::count_components;
use dtcoords::pa::{estimate_dilatation, parse_tolerance, preset_recipe, spectrum_scan};
use dtcoords::relations::{verify_relations, SuiteKind};
use dtcoords::surface::{preset, GluingDescription, PantsDecomposition, PRESET_NAMES};

#[derive(Parser)]
#[command(name = "dtcoords", version, about = "Exact mapping class group actions on measured foliations", max_term_width = 80)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a mapping word to a coordinate vector
    Act(ActArgs),
    /// Count connected components of an integral multicurve
    Count(CountArgs),
    /// Estimate the growth rate of a mapping word under iteration
    Dilatation(DilatationArgs),
    /// Estimate growth rates of every short word over a preset's twist recipe
    Scan(ScanArgs),
    /// Run randomized checks of the relations the action must satisfy
    VerifyRelations(VerifyArgs),
    /// List the built-in surfaces and their gluing data
    Presets(PresetsArgs),
}

#[derive(Args)]
struct SurfaceArg {
    /// Preset name, inline gluing JSON, or path to a gluing JSON file
    #[arg(long)]
    surface: String,
}

#[derive(Args)]
struct OutArg {
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ActArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Coordinate vector: inline JSON or a path to a JSON file
    #[arg(long)]
    coords: String,
    /// Mapping word, e.g. "T+0 M1@0 T-0 M1@0" (empty for the identity)
    #[arg(long, default_value = "")]
    word: String,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Coordinate vector: inline JSON or a path to a JSON file
    #[arg(long)]
    coords: String,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct DilatationArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Mapping word to iterate; must return to its starting decomposition
    #[arg(long)]
    word: String,
    /// Seed vector (inline JSON or path); a random one is drawn if absent
    #[arg(long)]
    coords: Option<String>,
    /// RNG seed for the drawn seed vector
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Measure bound for the drawn seed vector
    #[arg(long, default_value_t = 8)]
    bound: u32,
    /// Iteration budget
    #[arg(long, default_value_t = 200)]
    max_iter: u32,
    /// Convergence tolerance, an exact rational ("1e-9", "1/1000", ...)
    #[arg(long, default_value = "1e-9")]
    tol: String,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Longest word to try, counted in twist letters
    #[arg(long, default_value_t = 4)]
    max_len: u32,
    /// RNG seed for the drawn seed vector
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Measure bound for the drawn seed vector
    #[arg(long, default_value_t = 8)]
    bound: u32,
    /// Iteration budget per word
    #[arg(long, default_value_t = 200)]
    max_iter: u32,
    /// Convergence tolerance, an exact rational
    #[arg(long, default_value = "1e-9")]
    tol: String,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    surface: SurfaceArg,
    /// Suite to run (repeatable); all four when absent
    #[arg(long)]
    suite: Vec<String>,
    /// Random cases per site and scope
    #[arg(long, default_value_t = 16)]
    samples: usize,
    /// Measure bound for sampled multicurves
    #[arg(long, default_value_t = 8)]
    bound: u32,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct PresetsArgs {
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Kernel(#[from] dtcoords::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// (error kind for the JSON report, process exit code)
    fn classify(&self) -> (&'static str, u8) {
        match self {
            CliError::Kernel(e) => match e {
                dtcoords::Error::Hypothesis { .. } => ("hypothesis", 1),
                dtcoords::Error::Gluing(_) => ("gluing", 1),
                dtcoords::Error::Coords(_) => ("coords", 1),
                dtcoords::Error::Scope(_) => ("scope", 1),
                dtcoords::Error::Stale { .. } => ("stale", 1),
                dtcoords::Error::Move(_) => ("move", 1),
                dtcoords::Error::Word(_) => ("word", 1),
                dtcoords::Error::Parse { .. } => ("parse", 1),
                dtcoords::Error::Dilatation(_) => ("dilatation", 1),
                dtcoords::Error::Internal(_) => ("internal", 2),
            },
            CliError::Io { .. } => ("io", 2),
            CliError::Json(_) => ("json", 1),
            CliError::Usage(_) => ("usage", 1),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            report(&CliError::Usage(e.to_string()));
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            report(&e);
            ExitCode::from(e.classify().1)
        }
    }
}

fn report(e: &CliError) {
    let (kind, _) = e.classify();
    let body = serde_json::json!({"error": {"kind": kind, "message": e.to_string()}});
    eprintln!("{body}");
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Act(args) => act(args),
        Command::Count(args) => count(args),
        Command::Dilatation(args) => dilatation(args),
        Command::Scan(args) => scan(args),
        Command::VerifyRelations(args) => verify(args),
        Command::Presets(args) => presets_cmd(args),
    }
}

fn act(args: ActArgs) -> Result<u8, CliError> {
    let (pd, _) = load_surface(&args.surface.surface)?;
    let coords = load_coords(&pd, &args.coords)?;
    let word = parse_word(&pd, &args.word)?;
    let (result, _) = apply_word(&word, &coords)?;
    let result = result.normalize()?;
    emit(&args.out, &to_line(&result.to_json())?)
}

fn count(args: CountArgs) -> Result<u8, CliError> {
    let (pd, _) = load_surface(&args.surface.surface)?;
    let coords = load_coords(&pd, &args.coords)?;
    let mc = validate_integral(&pd, &coords)?;
    let n = count_components(&pd, &mc)?;
    emit(&args.out, &to_line(&serde_json::json!({ "components": n }))?)
}

fn dilatation(args: DilatationArgs) -> Result<u8, CliError> {
    let (pd, _) = load_surface(&args.surface.surface)?;
    let word = parse_word(&pd, &args.word)?;
    let seed_vec = match &args.coords {
        Some(text) => load_coords(&pd, text)?,
        None => draw_seed(&pd, args.bound, args.seed),
    };
    let tol = parse_tolerance(&args.tol)?;
    let est = estimate_dilatation(&word, &seed_vec, args.max_iter, &tol)?;
    emit(&args.out, &to_line(&est)?)
}

fn scan(args: ScanArgs) -> Result<u8, CliError> {
    let (pd, preset_name) = load_surface(&args.surface.surface)?;
    let name = preset_name.ok_or_else(|| {
        CliError::Usage(format!(
            "scan needs a preset surface with a built-in twist recipe (one of: {})",
            PRESET_NAMES.join(", ")
        ))
    })?;
    let recipe = preset_recipe(&pd, &name)?;
    let seed_vec = draw_seed(&pd, args.bound, args.seed);
    let tol = parse_tolerance(&args.tol)?;
    let entries = spectrum_scan(&pd, &recipe, args.max_len, &seed_vec, args.max_iter, &tol)?;
    let mut lines = String::new();
    for e in &entries {
        lines.push_str(&serde_json::to_string(e)?);
        lines.push('\n');
    }
    emit_raw(&args.out, &lines)
}

fn verify(args: VerifyArgs) -> Result<u8, CliError> {
    let (pd, _) = load_surface(&args.surface.surface)?;
    let kinds: Vec<SuiteKind> = if args.suite.is_empty() {
        SuiteKind::ALL.to_vec()
    } else {
        args.suite
            .iter()
            .map(|s| s.parse())
            .collect::<dtcoords::Result<_>>()?
    };
    let outcomes = verify_relations(&pd, &kinds, args.samples, args.bound, args.seed)?;
    let passed = outcomes.iter().all(|o| o.passed());
    let body = serde_json::json!({ "passed": passed, "suites": outcomes });
    emit(&args.out, &to_line(&body)?)?;
    Ok(if passed { 0 } else { 3 })
}

fn presets_cmd(args: PresetsArgs) -> Result<u8, CliError> {
    let mut list = Vec::new();
    for name in PRESET_NAMES {
        let pd = preset(name)?;
        list.push(serde_json::json!({
            "name": name,
            "interior_curves": pd.interior_curve_count(),
            "curves": pd.curve_count(),
            "gluing": pd.description(),
        }));
    }
    emit(&args.out, &to_line(&list)?)
}

/// A preset name, inline JSON, or a path; returns the preset name when one
/// was used, so commands that need a built-in recipe can tell.
fn load_surface(text: &str) -> Result<(PantsDecomposition, Option<String>), CliError> {
    if PRESET_NAMES.contains(&text) {
        return Ok((preset(text)?, Some(text.to_string())));
    }
    let raw = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        fs::read_to_string(text).map_err(|e| {
            CliError::Usage(format!(
                "cannot read surface file '{text}' ({e}); not one of the presets: {}",
                PRESET_NAMES.join(", ")
            ))
        })?
    };
    let desc: GluingDescription = serde_json::from_str(&raw)?;
    Ok((PantsDecomposition::from_description(&desc)?, None))
}

/// Inline JSON or a path; accepts either a full coordinate object with a
/// scope or a bare entry array, whose scope is inferred from its length.
fn load_coords(pd: &PantsDecomposition, text: &str) -> Result<DTCoords, CliError> {
    let start = text.trim_start();
    let raw = if start.starts_with('{') || start.starts_with('[') {
        text.to_string()
    } else {
        fs::read_to_string(text)
            .map_err(|e| CliError::Usage(format!("cannot read coordinates file '{text}' ({e})")))?
    };
    let value: serde_json::Value = serde_json::from_str(&raw)?;
    let json: CoordsJson = if value.is_array() {
        let entries: Vec<EntryJson> = serde_json::from_value(value)?;
        let scope = infer_scope(pd, entries.len())?;
        CoordsJson { scope, entries }
    } else {
        serde_json::from_value(value)?
    };
    Ok(DTCoords::from_json(pd, &json)?)
}

fn infer_scope(pd: &PantsDecomposition, entries: usize) -> Result<Scope, CliError> {
    if entries == pd.interior_curve_count() {
        Ok(Scope::MF0)
    } else if entries == pd.curve_count() {
        Ok(Scope::MF)
    } else {
        Err(CliError::Usage(format!(
            "a bare entry array must cover the {} interior curves or all {} curves; got {}",
            pd.interior_curve_count(),
            pd.curve_count(),
            entries
        )))
    }
}

/// Deterministic nonzero seed vector for iteration commands.
fn draw_seed(pd: &PantsDecomposition, bound: u32, seed: u64) -> DTCoords {
    let mut s = seed;
    loop {
        let mc = dtcoords::coords::sample(pd, Scope::MF0, bound.max(1), s);
        if !mc.coords().is_zero() {
            return mc.into_coords();
        }
        s = s.wrapping_add(1);
    }
}

fn to_line<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut line = serde_json::to_string(value)?;
    line.push('\n');
    Ok(line)
}

fn emit(out: &OutArg, line: &str) -> Result<u8, CliError> {
    emit_raw(out, line)
}

fn emit_raw(out: &OutArg, text: &str) -> Result<u8, CliError> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            context: format!("cannot write '{}'", path.display()),
            source,
        })?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                context: "cannot write to stdout".into(),
                source,
            })?;
        }
    }
    Ok(0)
}
