//! Command-line front end for the contident pipeline.
//!
//! Exit codes: 0 success (or verdict Identical), 1 verdict Different,
//! 2 verdict Undefined, 3 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use contident::analog::{distance, feature_vector};
use contident::disambig::{resolve, resolve_undefined, GrammarRules, Lexicon};
use contident::format::{builtin_registry, FormatRegistry};
use contident::identity::{
    canonicalize, identical, parse_canonical, verify_migration, ChainArtifact, ChainPayload,
    Verdict,
};
use contident::interpret::{digital_interpret, recognize};
use contident::projection::{
    corrupt, parse_rect, physical_project, write_carrier, DigitalObject, InformationCarrier,
    PhysicalProjectionMethod, SensoryImpression,
};
use contident::raster::Scale;

#[derive(Parser)]
#[command(
    name = "contident",
    about = "Render, recognize, canonicalize and compare information objects",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered formats, or validate one for glyph collisions.
    Formats(FormatsArgs),
    /// Interpret a digital object and write its canonical form.
    Extract(ExtractArgs),
    /// Interpret a digital object and write it onto a carrier.
    Render(RenderArgs),
    /// Project a carrier and recognize the canonical structure on it.
    Recognize(RecognizeArgs),
    /// Compare two canonical files; exit code reports the verdict.
    Compare(CompareArgs),
    /// Resolve ambiguous or undefined readings against a lexicon.
    Resolve(ResolveArgs),
    /// Verify a migration chain manifest end to end.
    VerifyChain(VerifyChainArgs),
    /// Euclidean feature distance between two PGM impressions.
    Distance(DistanceArgs),
}

#[derive(Args)]
struct FormatsArgs {
    /// Validate this format instead of listing all formats.
    #[arg(long)]
    validate: Option<String>,
    /// Resolution for collision checks, in pixels per em.
    #[arg(long)]
    resolution: Option<u32>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    format: String,
    /// Input digital object.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output canonical file.
    #[arg(long)]
    out: PathBuf,
    /// Type tag of the input; inferred from the file extension if omitted
    /// (.html -> text/html, otherwise text/plain;charset=ascii).
    #[arg(long)]
    type_tag: Option<String>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    format: String,
    /// Default font for occurrences that do not request one.
    #[arg(long)]
    font: String,
    #[arg(long = "in")]
    input: PathBuf,
    /// Output carrier file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    type_tag: Option<String>,
    /// Page width in carrier pixels.
    #[arg(long, default_value_t = 600)]
    width: u32,
    /// Corrupt a region of the written carrier, as X,Y+WxH.
    #[arg(long)]
    corrupt: Option<String>,
    /// Also write the scanned page as a PGM image.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

#[derive(Args)]
struct RecognizeArgs {
    #[arg(long)]
    format: String,
    /// Input carrier file, or a PGM impression.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Projection scale as N or N/D output pixels per carrier pixel.
    #[arg(long, default_value = "1")]
    scale: String,
    /// Read through corrupted regions (infrared-style scan).
    #[arg(long)]
    reveal_corrupted: bool,
}

#[derive(Args)]
struct CompareArgs {
    left: PathBuf,
    right: PathBuf,
}

#[derive(Args)]
struct ResolveArgs {
    /// Input canonical file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    grammar: Option<PathBuf>,
    /// Also complete undefined occurrences with unique lexicon matches.
    #[arg(long)]
    complete_undefined: bool,
}

#[derive(Args)]
struct VerifyChainArgs {
    #[arg(long)]
    format: String,
    /// Manifest: one artifact per line, kind<TAB>path<TAB>typeTagOrMethod.
    /// Kinds: digital (typeTag) and carrier (method, e.g. scan:1 or
    /// scan:2/5,reveal). Paths are relative to the manifest.
    manifest: PathBuf,
}

#[derive(Args)]
struct DistanceArgs {
    left: PathBuf,
    right: PathBuf,
    /// Feature grid as RxC.
    #[arg(long, default_value = "3x3")]
    grid: String,
    /// Append both feature vectors to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Errors that map to exit code 3.
struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError(e.to_string())
    }
}

type CliResult = Result<u8, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(3);
        }
    };
    let reg = builtin_registry();
    let result = match cli.command {
        Command::Formats(a) => cmd_formats(&reg, a),
        Command::Extract(a) => cmd_extract(&reg, a),
        Command::Render(a) => cmd_render(&reg, a),
        Command::Recognize(a) => cmd_recognize(&reg, a),
        Command::Compare(a) => cmd_compare(a),
        Command::Resolve(a) => cmd_resolve(&reg, a),
        Command::VerifyChain(a) => cmd_verify_chain(&reg, a),
        Command::Distance(a) => cmd_distance(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn cmd_formats(reg: &FormatRegistry, a: FormatsArgs) -> CliResult {
    match a.validate {
        None => {
            for (id, f) in &reg.formats {
                let fonts: Vec<&str> = f.fonts.iter().map(|s| s.as_str()).collect();
                println!("{id}\t{:?}\tfonts: {}", f.structure_model, fonts.join(","));
            }
            Ok(0)
        }
        Some(id) => {
            let report = reg.validate_format(&id, a.resolution)?;
            for (t, s1, s2) in &report.disjointness_violations {
                println!("disjointness: type {t} in both {s1} and {s2}");
            }
            for (font, t1, t2) in &report.collisions {
                println!("collision: {t1} and {t2} indistinguishable in font {font}");
            }
            if report.is_clean() {
                println!("{id}: clean");
                Ok(0)
            } else {
                Ok(1)
            }
        }
    }
}

fn infer_type_tag(path: &Path, explicit: Option<String>) -> String {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("html") | Some("htm") => "text/html".to_string(),
        _ => "text/plain;charset=ascii".to_string(),
    })
}

fn read_object(input: &Path, type_tag: Option<String>) -> Result<DigitalObject, CliError> {
    let bytes = fs::read(input).map_err(|e| CliError(format!("{}: {e}", input.display())))?;
    Ok(DigitalObject::new(bytes, infer_type_tag(input, type_tag)))
}

fn cmd_extract(reg: &FormatRegistry, a: ExtractArgs) -> CliResult {
    let obj = read_object(&a.input, a.type_tag)?;
    let s = digital_interpret(&obj, reg, &a.format)?;
    let canon = canonicalize(&s);
    fs::write(&a.out, &canon.bytes)?;
    println!("{}  {}", canon.digest, a.out.display());
    Ok(0)
}

fn cmd_render(reg: &FormatRegistry, a: RenderArgs) -> CliResult {
    let obj = read_object(&a.input, a.type_tag)?;
    let s = digital_interpret(&obj, reg, &a.format)?;
    let mut carrier = write_carrier(&s, reg, &a.format, &a.font, a.width)?;
    if let Some(spec) = &a.corrupt {
        let rect = parse_rect(spec)
            .ok_or_else(|| CliError(format!("bad region {spec:?}, expected X,Y+WxH")))?;
        carrier = corrupt(&carrier, rect)?;
    }
    fs::write(&a.out, carrier.export())?;
    if let Some(pgm) = &a.pgm {
        let img = physical_project(&carrier, &PhysicalProjectionMethod::plain_scan(Scale::ONE));
        fs::write(pgm, img.to_pgm())?;
    }
    println!(
        "wrote {}x{} carrier with {} glyphs to {}",
        carrier.width,
        carrier.height,
        carrier.placements.len(),
        a.out.display()
    );
    Ok(0)
}

fn parse_scale(s: &str) -> Result<Scale, CliError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: u32 = num
        .parse()
        .map_err(|_| CliError(format!("bad scale {s:?}")))?;
    let den: u32 = den
        .parse()
        .map_err(|_| CliError(format!("bad scale {s:?}")))?;
    if num == 0 || den == 0 {
        return Err(CliError(format!("bad scale {s:?}")));
    }
    Ok(Scale::new(num, den))
}

fn cmd_recognize(reg: &FormatRegistry, a: RecognizeArgs) -> CliResult {
    let text = fs::read_to_string(&a.input)
        .map_err(|e| CliError(format!("{}: {e}", a.input.display())))?;
    let scale = parse_scale(&a.scale)?;
    let img = if text.starts_with("P2") {
        let mut img = SensoryImpression::from_pgm(&text)?;
        img.scale = scale;
        img
    } else {
        let carrier = InformationCarrier::import(&text)?;
        let method = PhysicalProjectionMethod {
            id: format!("scan-{scale}"),
            scale,
            reveals_corrupted: a.reveal_corrupted,
        };
        physical_project(&carrier, &method)
    };
    let s = recognize(&img, reg, &a.format)?;
    let canon = canonicalize(&s);
    fs::write(&a.out, &canon.bytes)?;
    println!("{}  {}  status {}", canon.digest, a.out.display(), s.status);
    Ok(0)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Identical => 0,
        Verdict::Different => 1,
        Verdict::Undefined => 2,
    }
}

fn read_canonical(path: &Path) -> Result<contident::structure::SymbolStructure, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    Ok(parse_canonical(&text)?)
}

fn cmd_compare(a: CompareArgs) -> CliResult {
    let left = read_canonical(&a.left)?;
    let right = read_canonical(&a.right)?;
    let verdict = identical(&left, &right)?;
    println!("{:?}", verdict.value);
    for (path, l, r) in &verdict.diff {
        println!("  {path}: {l} != {r}");
    }
    Ok(verdict_code(verdict.value))
}

fn cmd_resolve(reg: &FormatRegistry, a: ResolveArgs) -> CliResult {
    let mut s = read_canonical(&a.input)?;
    let lex_text = fs::read_to_string(&a.lexicon)
        .map_err(|e| CliError(format!("{}: {e}", a.lexicon.display())))?;
    let lexicon = Lexicon::parse("lexicon", &lex_text)?;
    if a.complete_undefined {
        s = resolve_undefined(&s, reg, &lexicon)?;
    }
    let grammar = match &a.grammar {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            Some(GrammarRules::parse("grammar", &text)?)
        }
        None => None,
    };
    let resolved = resolve(&s, reg, &lexicon, grammar.as_ref())?;
    let canon = canonicalize(&resolved);
    fs::write(&a.out, &canon.bytes)?;
    for note in &resolved.provenance {
        println!("note: {note}");
    }
    println!(
        "{}  {}  status {}",
        canon.digest,
        a.out.display(),
        resolved.status
    );
    Ok(0)
}

fn parse_method(spec: &str) -> Result<PhysicalProjectionMethod, CliError> {
    let (scan, rest) = match spec.split_once(':') {
        Some(pair) => pair,
        None => {
            return Err(CliError(format!(
                "bad method {spec:?}, expected scan:<scale>[,reveal]"
            )))
        }
    };
    if scan != "scan" {
        return Err(CliError(format!("unknown method kind {scan:?}")));
    }
    let (scale, reveal) = match rest.split_once(',') {
        Some((s, "reveal")) => (s, true),
        Some((_, other)) => return Err(CliError(format!("unknown method option {other:?}"))),
        None => (rest, false),
    };
    Ok(PhysicalProjectionMethod {
        id: spec.to_string(),
        scale: parse_scale(scale)?,
        reveals_corrupted: reveal,
    })
}

fn cmd_verify_chain(reg: &FormatRegistry, a: VerifyChainArgs) -> CliResult {
    let text = fs::read_to_string(&a.manifest)
        .map_err(|e| CliError(format!("{}: {e}", a.manifest.display())))?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let mut chain = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(CliError(format!(
                "manifest line {}: expected kind<TAB>path<TAB>typeTagOrMethod",
                idx + 1
            )));
        }
        let path = base.join(fields[1]);
        let payload = match fields[0] {
            "digital" => {
                let bytes =
                    fs::read(&path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
                ChainPayload::Digital(DigitalObject::new(bytes, fields[2]))
            }
            "carrier" => {
                let text = fs::read_to_string(&path)
                    .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
                ChainPayload::Carrier {
                    carrier: InformationCarrier::import(&text)?,
                    method: parse_method(fields[2])?,
                }
            }
            other => {
                return Err(CliError(format!(
                    "manifest line {}: unknown kind {other:?}",
                    idx + 1
                )))
            }
        };
        chain.push(ChainArtifact {
            id: fields[1].to_string(),
            payload,
        });
    }
    if chain.is_empty() {
        return Err(CliError("manifest lists no artifacts".into()));
    }
    let report = verify_migration(&chain, reg, &a.format)?;
    for (i, (id, digest)) in report.chain.iter().enumerate() {
        println!("step {i}: {id} {digest}");
    }
    match report.first_divergence {
        Some(step) => println!("{:?} at step {step}", report.verdict.value),
        None => println!("{:?}", report.verdict.value),
    }
    Ok(verdict_code(report.verdict.value))
}

fn cmd_distance(a: DistanceArgs) -> CliResult {
    let (rows, cols) = a
        .grid
        .split_once('x')
        .and_then(|(r, c)| Some((r.parse::<u32>().ok()?, c.parse::<u32>().ok()?)))
        .ok_or_else(|| CliError(format!("bad grid {:?}, expected RxC", a.grid)))?;
    let load = |path: &Path| -> Result<SensoryImpression, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
        Ok(SensoryImpression::from_pgm(&text)?)
    };
    let left = feature_vector(&load(&a.left)?, rows, cols);
    let right = feature_vector(&load(&a.right)?, rows, cols);
    let d = distance(&left, &right)?;
    if let Some(csv) = &a.csv {
        let mut out = String::new();
        out.push_str(&left.to_csv_line());
        out.push('\n');
        out.push_str(&right.to_csv_line());
        out.push('\n');
        fs::write(csv, out)?;
    }
    println!("{d:.9}");
    Ok(0)
}
