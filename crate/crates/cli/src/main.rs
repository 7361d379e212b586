//! `cattool`: check, evaluate, diagnose and monitor capability analysis
//! tables from the command line.
//!
//! Exit status is 0 when nothing was found, 1 when diagnostics or
//! violations were reported, and 2 on usage, input or parse errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cat_core::analysis::{check_refinement, coverage, validate, CoverageReport};
use cat_core::diagnose::{diagnose_with, explain, CatHierarchy, Verdict};
use cat_core::logic::evaluate;
use cat_core::model::{table_stats, CatDocument, Diagnostic, InputDecl, Severity, TableStats, Valuation, Value};
use cat_core::monitor::{derive_baseline_tests, read_trace, replay};
use cat_core::parser::{parse, parse_kind, render};
use cat_core::CatError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

const SCHEMA_VERSION: u32 = 1;
const DEFAULT_MAX_CASES: u64 = 1_000_000;

#[derive(Parser)]
#[command(name = "cattool", version, about = "Work with capability analysis tables (.cat files)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate documents, with a coverage summary for each.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate one snapshot against a document.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        context: Context,
        #[command(flatten)]
        snapshot: Snapshot,
        #[command(flatten)]
        out: Output,
    },
    /// Search the boundary-value grid for undefined responses.
    Coverage {
        file: PathBuf,
        #[command(flatten)]
        context: Context,
        /// Grid points to evaluate per behavior.
        #[arg(long, default_value_t = DEFAULT_MAX_CASES)]
        max_cases: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Check that a child document is a valid decomposition of its parent.
    Refine {
        parent: PathBuf,
        child: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Explain why an output was not produced under a snapshot.
    Diagnose {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// The output that was expected but not observed.
        #[arg(long)]
        violated: String,
        /// Level-0 document to start from, if several are given.
        #[arg(long)]
        root: Option<String>,
        /// Behavior to assume in a child document, `document=behavior`.
        #[arg(long = "child-behavior", value_name = "DOC=BEHAVIOR")]
        child_behavior: Vec<String>,
        #[command(flatten)]
        snapshot: Snapshot,
        #[command(flatten)]
        out: Output,
    },
    /// Replay a JSON Lines robot log against a table hierarchy.
    Monitor {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        root: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Derive one baseline test per sub-row.
    Tests {
        file: PathBuf,
        #[command(flatten)]
        context: Context,
        #[command(flatten)]
        out: Output,
    },
    /// Append a blank input column and rewrite the file.
    AddInput {
        file: PathBuf,
        #[arg(long)]
        name: String,
        /// Input kind as written in a declaration, e.g. `number domain [0, 5]`.
        #[arg(long = "type", value_name = "KIND")]
        kind: String,
        #[command(flatten)]
        out: Output,
    },
    /// Count behaviors, outputs, inputs and condition cells.
    Stats {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Context {
    /// Ancestor documents, needed when the file uses inherited inputs.
    #[arg(long = "parent", value_name = "FILE")]
    parents: Vec<PathBuf>,
}

#[derive(Args)]
struct Snapshot {
    /// Active behavior of the (root) document.
    #[arg(long)]
    behavior: String,
    /// Input value, `name=value`; vectors as `x,y,z`.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
}

/// Why a run stopped before producing its report.
enum Failure {
    Usage(String),
    Cat(CatError),
    Parse(Vec<String>),
}

impl From<CatError> for Failure {
    fn from(e: CatError) -> Self {
        Failure::Cat(e)
    }
}

/// A finished report: text, JSON body, and whether anything was found.
struct Report {
    text: String,
    json: Json,
    findings: bool,
}

struct Style {
    color: bool,
}

impl Style {
    fn severity(&self, s: Severity) -> String {
        let code = match s {
            Severity::Error => "31",
            Severity::Warning => "33",
            Severity::Info => "36",
        };
        self.paint(&s.to_string(), code)
    }

    fn paint(&self, text: &str, code: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

struct Loaded {
    file: String,
    source_warnings: Vec<Diagnostic>,
    document: CatDocument,
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn diagnostic_line(style: &Style, file: &str, d: &Diagnostic) -> String {
    let mut line = format!(
        "{file}:{}:{}: {}[{}]: {}",
        d.span.line,
        d.span.col,
        style.severity(d.severity),
        d.code,
        d.message
    );
    for (span, note) in &d.related {
        let _ = write!(line, "\n  {file}:{}:{}: note: {note}", span.line, span.col);
    }
    line
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let file = display(path);
    let source =
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {file}: {e}")))?;
    let result = parse(&source);
    let plain = Style { color: false };
    match result.document {
        Some(document) => Ok(Loaded { file, source_warnings: result.diagnostics, document }),
        None => Err(Failure::Parse(result.diagnostics.iter().map(|d| diagnostic_line(&plain, &file, d)).collect())),
    }
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<Loaded>, Failure> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for path in paths {
        match load(path) {
            Ok(l) => out.push(l),
            Err(Failure::Parse(lines)) => errors.extend(lines),
            Err(other) => return Err(other),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(Failure::Parse(errors))
    }
}

/// Loads `file` with its ancestors and returns the resolved document.
fn load_with_context(file: &Path, context: &Context) -> Result<(Loaded, CatDocument), Failure> {
    let main = load(file)?;
    if context.parents.is_empty() {
        let doc = main.document.clone();
        return Ok((main, doc));
    }
    let mut docs: Vec<CatDocument> = load_all(&context.parents)?.into_iter().map(|l| l.document).collect();
    docs.push(main.document.clone());
    let h = CatHierarchy::new(docs)?;
    let doc = h.document(main.document.name()).expect("just loaded").clone();
    Ok((main, doc))
}

fn pick_root(h: &CatHierarchy, root: Option<String>) -> Result<String, Failure> {
    if let Some(r) = root {
        return Ok(r);
    }
    match h.roots().as_slice() {
        [only] => Ok(only.name().to_string()),
        _ => Err(Failure::Usage("several level-0 documents given; choose one with --root".into())),
    }
}

fn split_pair<'a>(text: &'a str, flag: &str) -> Result<(&'a str, &'a str), Failure> {
    text.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| Failure::Usage(format!("--{flag} expects NAME=VALUE, got `{text}`")))
}

/// Builds a valuation, reading each value by the kind of the first
/// document that declares the input.
fn snapshot(docs: &[&CatDocument], s: &Snapshot) -> Result<Valuation, Failure> {
    let mut v = Valuation::new(s.behavior.clone());
    for pair in &s.set {
        let (name, text) = split_pair(pair, "set")?;
        let decl: &InputDecl = docs
            .iter()
            .find_map(|d| d.input(name))
            .ok_or_else(|| Failure::Usage(format!("no document declares an input `{name}`")))?;
        let value = decl.kind.parse_value(text).ok_or_else(|| {
            Failure::Cat(CatError::ValueKind {
                input: name.to_string(),
                value: text.to_string(),
                expected: decl.kind.name().to_string(),
            })
        })?;
        v.set(name, value);
    }
    Ok(v)
}

fn values_text(values: &BTreeMap<String, Value>) -> String {
    values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        "(none)".to_string()
    } else {
        items.join(", ")
    }
}

fn cmd_check(files: &[PathBuf], style: &Style) -> Result<Report, Failure> {
    let loaded = load_all(files)?;
    let mut per_file: Vec<Vec<Diagnostic>> = loaded.iter().map(|l| l.source_warnings.clone()).collect();

    // Only documents whose ancestors were all given can be resolved.
    let names: Vec<&str> = loaded.iter().map(|l| l.document.name()).collect();
    let complete = |l: &Loaded| {
        let mut at = &l.document;
        while let Some(link) = at.refines() {
            match loaded.iter().find(|o| o.document.name() == link.document) {
                Some(parent) => at = &parent.document,
                None => return false,
            }
        }
        true
    };
    let family: Vec<CatDocument> = loaded.iter().filter(|l| complete(l)).map(|l| l.document.clone()).collect();
    let hierarchy = match CatHierarchy::new(family) {
        Ok(h) => Some(h),
        // a child that does not resolve is reported by the refinement check
        Err(CatError::InvalidDocument(_)) => None,
        Err(e) => {
            for diags in &mut per_file {
                diags.push(Diagnostic::error(e.code(), e.to_string(), Default::default()));
            }
            None
        }
    };
    let parent_of = |doc: &CatDocument| -> Option<CatDocument> {
        let link = doc.refines()?;
        if let Some(p) = hierarchy.as_ref().and_then(|h| h.document(&link.document)) {
            return Some(p.clone());
        }
        loaded.iter().map(|l| &l.document).find(|d| d.name() == link.document && d.is_resolved()).cloned()
    };

    let mut text = String::new();
    let mut files_json = Vec::new();
    let (mut errors, mut warnings, mut infos) = (0, 0, 0);
    for (l, mut diags) in loaded.iter().zip(per_file) {
        diags.extend(validate(&l.document));
        let resolved = hierarchy.as_ref().and_then(|h| h.document(l.document.name()));
        if let Some(parent) = parent_of(&l.document) {
            match check_refinement(&parent, &l.document) {
                Ok(report) => diags.extend(report.violations),
                Err(e) => diags.push(Diagnostic::error(e.code(), e.to_string(), Default::default())),
            }
        }
        diags.sort_by_key(|d| (d.span.start, d.severity));
        for d in &diags {
            match d.severity {
                Severity::Error => errors += 1,
                Severity::Warning => warnings += 1,
                Severity::Info => infos += 1,
            }
            let _ = writeln!(text, "{}", diagnostic_line(style, &l.file, d));
        }
        let doc = resolved.unwrap_or(&l.document);
        let cov = match coverage(doc, DEFAULT_MAX_CASES) {
            Ok(r) => {
                let _ = writeln!(
                    text,
                    "{}: coverage {} grid points, {} undefined, {} nondeterministic{}",
                    l.file,
                    r.enumerated_count,
                    r.uncovered.len(),
                    r.nondeterministic.len(),
                    if r.truncated { " (truncated)" } else { "" }
                );
                json!({
                    "enumerated_count": r.enumerated_count,
                    "uncovered": r.uncovered.len(),
                    "nondeterministic": r.nondeterministic.len(),
                    "truncated": r.truncated,
                })
            }
            Err(e) => {
                let _ = writeln!(text, "{}: coverage skipped: {e}", l.file);
                json!({ "skipped": e.code(), "reason": e.to_string() })
            }
        };
        let records: Vec<_> = diags.iter().map(|d| d.record(&l.file)).collect();
        files_json.push(json!({ "file": l.file, "document": l.document.name(), "diagnostics": records, "coverage": cov }));
    }
    let _ = writeln!(
        text,
        "{} file{}: {errors} errors, {warnings} warnings, {infos} info",
        names.len(),
        if names.len() == 1 { "" } else { "s" }
    );
    Ok(Report {
        text,
        json: json!({ "files": files_json, "errors": errors, "warnings": warnings, "info": infos }),
        findings: errors > 0,
    })
}

fn cmd_eval(file: &Path, context: &Context, snap: &Snapshot) -> Result<Report, Failure> {
    let (_, doc) = load_with_context(file, context)?;
    let v = snapshot(&[&doc], snap)?;
    let outcome = evaluate(&doc, &v)?;
    let mut text = String::new();
    let _ = writeln!(text, "behavior: {}", outcome.active_behavior);
    let _ = writeln!(text, "expected outputs: {}", list(&outcome.expected_outputs));
    let _ = writeln!(text, "next behavior: {}", outcome.next_behavior);
    for t in &outcome.firing_transitions {
        let rule = doc.transition(*t).expect("firing rule exists");
        let line = doc.span(&cat_core::model::ElementId::Transition(*t)).line;
        let _ = writeln!(text, "transition (line {line}): -> {} when {}", rule.target.name(), rule.guard);
    }
    if outcome.nondeterministic_transition.is_some() {
        let _ = writeln!(text, "warning: firing transitions disagree on the next behavior");
    }
    let _ = writeln!(text, "undefined response: {}", if outcome.undefined_response { "yes" } else { "no" });
    let findings = outcome.undefined_response || outcome.nondeterministic_transition.is_some();
    Ok(Report { text, json: json!({ "document": doc.name(), "outcome": outcome }), findings })
}

fn coverage_text(doc: &CatDocument, r: &CoverageReport) -> String {
    let mut text = String::new();
    for c in &r.uncovered {
        let _ = writeln!(text, "undefined under {}: {}", c.behavior, values_text(&c.witness.values));
    }
    for c in &r.nondeterministic {
        let lines: Vec<String> = c
            .transitions
            .iter()
            .map(|t| doc.span(&cat_core::model::ElementId::Transition(*t)).line.to_string())
            .collect();
        let _ = writeln!(
            text,
            "nondeterministic under {}: rules on lines {} fire at {}",
            c.witness.active_behavior,
            lines.join(", "),
            values_text(&c.witness.values)
        );
    }
    let _ = writeln!(
        text,
        "{}: {} grid points, {} undefined, {} nondeterministic{}",
        doc.name(),
        r.enumerated_count,
        r.uncovered.len(),
        r.nondeterministic.len(),
        if r.truncated { " (truncated)" } else { "" }
    );
    text
}

fn cmd_coverage(file: &Path, context: &Context, max_cases: u64) -> Result<Report, Failure> {
    let (_, doc) = load_with_context(file, context)?;
    let r = coverage(&doc, max_cases)?;
    Ok(Report {
        text: coverage_text(&doc, &r),
        findings: !r.uncovered.is_empty() || !r.nondeterministic.is_empty(),
        json: json!({ "document": doc.name(), "report": r }),
    })
}

fn cmd_refine(parent: &Path, child: &Path, style: &Style) -> Result<Report, Failure> {
    let p = load(parent)?;
    let c = load(child)?;
    let report = check_refinement(&p.document, &c.document)?;
    let mut text = String::new();
    for d in &report.violations {
        let _ = writeln!(text, "{}", diagnostic_line(style, &c.file, d));
    }
    let _ = writeln!(text, "inherited inputs: {}", list(&report.inherited_inputs));
    let _ = writeln!(
        text,
        "{} refines {}: {}",
        c.document.name(),
        p.document.name(),
        if report.accepted() { "accepted" } else { "rejected" }
    );
    let records: Vec<_> = report.violations.iter().map(|d| d.record(&c.file)).collect();
    Ok(Report {
        text,
        findings: !report.accepted(),
        json: json!({
            "parent": p.document.name(),
            "child": c.document.name(),
            "accepted": report.accepted(),
            "inherited_inputs": report.inherited_inputs,
            "violations": records,
        }),
    })
}

fn cmd_diagnose(
    files: &[PathBuf],
    violated: &str,
    root: Option<String>,
    child_behavior: &[String],
    snap: &Snapshot,
    style: &Style,
) -> Result<Report, Failure> {
    let docs: Vec<CatDocument> = load_all(files)?.into_iter().map(|l| l.document).collect();
    let h = CatHierarchy::new(docs)?;
    let root = pick_root(&h, root)?;
    let mut behaviors = BTreeMap::new();
    for pair in child_behavior {
        let (doc, behavior) = split_pair(pair, "child-behavior")?;
        behaviors.insert(doc.to_string(), behavior.to_string());
    }
    let v = snapshot(&h.documents().collect::<Vec<_>>(), snap)?;
    let d = diagnose_with(&h, &root, violated, &v, &behaviors)?;
    let mut text = explain(&d);
    if style.color {
        let verdict = d.verdict.as_str();
        text = text.replacen(verdict, &style.paint(verdict, "1"), 1);
    }
    Ok(Report {
        text,
        findings: d.verdict != Verdict::ResolvedAtTop,
        json: json!({ "diagnosis": d }),
    })
}

fn cmd_monitor(files: &[PathBuf], log: &Path, root: Option<String>) -> Result<Report, Failure> {
    let docs: Vec<CatDocument> = load_all(files)?.into_iter().map(|l| l.document).collect();
    let h = CatHierarchy::new(docs)?;
    let root = pick_root(&h, root)?;
    let text_in = std::fs::read_to_string(log)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", display(log))))?;
    let trace = read_trace(&text_in)?;
    let events = replay(&h, &root, &trace)?;
    let mut text = String::new();
    for e in &events {
        let _ = writeln!(text, "t={} {} [{}]: {}", e.t, e.kind.as_str(), e.behavior, e.detail);
        if let Some(d) = &e.diagnosis {
            for line in explain(d).lines() {
                let _ = writeln!(text, "    {line}");
            }
        }
    }
    let _ = writeln!(text, "{} records, {} violations", trace.len(), events.len());
    Ok(Report {
        text,
        findings: !events.is_empty(),
        json: json!({ "root": root, "records": trace.len(), "events": events }),
    })
}

fn cmd_tests(file: &Path, context: &Context) -> Result<Report, Failure> {
    let (_, doc) = load_with_context(file, context)?;
    let tests = match derive_baseline_tests(&doc) {
        Ok(t) => t,
        Err(e @ CatError::UnsatisfiableSubrow { .. }) => {
            return Ok(Report {
                text: format!("error[{}]: {e}\n", e.code()),
                json: json!({ "document": doc.name(), "error": { "code": e.code(), "message": e.to_string() } }),
                findings: true,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let mut text = String::new();
    for t in &tests {
        let line = doc.span(&cat_core::model::ElementId::SubRow(t.subrow)).line;
        let _ = writeln!(text, "{} {} (line {line})", t.behavior, t.output);
        let _ = writeln!(text, "  given {}", values_text(&t.valuation.values));
        let _ = writeln!(text, "  expect {}", list(&t.expected_outputs));
        let _ = writeln!(text, "  forbid {}", list(&t.forbidden_outputs));
    }
    let _ = writeln!(text, "{} tests", tests.len());
    Ok(Report { text, findings: false, json: json!({ "document": doc.name(), "tests": tests }) })
}

fn cmd_add_input(file: &Path, name: &str, kind: &str) -> Result<Report, Failure> {
    let l = load(file)?;
    let kind = parse_kind(kind).map_err(|d| Failure::Usage(format!("bad --type: {}", d.message)))?;
    let updated = l.document.with_input(InputDecl::new(name, kind.clone()))?;
    std::fs::write(file, render(&updated)).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", l.file)))?;
    Ok(Report {
        text: format!("added input {name} : {kind} to {}\n", l.file),
        findings: false,
        json: json!({ "file": l.file, "input": name, "kind": kind.to_string() }),
    })
}

fn stats_json(s: &TableStats) -> Json {
    json!({ "behaviors": s.behaviors, "outputs": s.outputs, "inputs": s.inputs, "pairs": s.pairs })
}

fn cmd_stats(files: &[PathBuf]) -> Result<Report, Failure> {
    let loaded = load_all(files)?;
    let mut text = String::new();
    let _ = writeln!(text, "{:<24} {:>9} {:>7} {:>6} {:>5}", "document", "behaviors", "outputs", "inputs", "pairs");
    let mut rows = Vec::new();
    for l in &loaded {
        let s = table_stats(std::slice::from_ref(&l.document));
        let _ = writeln!(
            text,
            "{:<24} {:>9} {:>7} {:>6} {:>5}",
            l.document.name(),
            s.behaviors,
            s.outputs,
            s.inputs,
            s.pairs
        );
        rows.push(json!({ "file": l.file, "document": l.document.name(), "stats": stats_json(&s) }));
    }
    let docs: Vec<CatDocument> = loaded.iter().map(|l| l.document.clone()).collect();
    let total = table_stats(&docs);
    let _ = writeln!(
        text,
        "{:<24} {:>9} {:>7} {:>6} {:>5}",
        "total", total.behaviors, total.outputs, total.inputs, total.pairs
    );
    Ok(Report { text, findings: false, json: json!({ "documents": rows, "total": stats_json(&total) }) })
}

fn color_enabled(format: Format) -> Result<bool, Failure> {
    match std::env::var("CAT_COLOR").as_deref() {
        Ok("never") => Ok(false),
        Ok("auto") | Err(_) => Ok(format == Format::Text && std::io::stdout().is_terminal()),
        Ok(other) => Err(Failure::Usage(format!("CAT_COLOR must be `never` or `auto`, not `{other}`"))),
    }
}

fn run(command: Command) -> (Format, &'static str, Result<Report, Failure>) {
    let format = match &command {
        Command::Check { out, .. }
        | Command::Eval { out, .. }
        | Command::Coverage { out, .. }
        | Command::Refine { out, .. }
        | Command::Diagnose { out, .. }
        | Command::Monitor { out, .. }
        | Command::Tests { out, .. }
        | Command::AddInput { out, .. }
        | Command::Stats { out, .. } => out.format,
    };
    let style = match color_enabled(format) {
        Ok(color) => Style { color },
        Err(e) => return (format, "", Err(e)),
    };
    let (name, result) = match command {
        Command::Check { files, .. } => ("check", cmd_check(&files, &style)),
        Command::Eval { file, context, snapshot, .. } => ("eval", cmd_eval(&file, &context, &snapshot)),
        Command::Coverage { file, context, max_cases, .. } => ("coverage", cmd_coverage(&file, &context, max_cases)),
        Command::Refine { parent, child, .. } => ("refine", cmd_refine(&parent, &child, &style)),
        Command::Diagnose { files, violated, root, child_behavior, snapshot, .. } => {
            ("diagnose", cmd_diagnose(&files, &violated, root, &child_behavior, &snapshot, &style))
        }
        Command::Monitor { files, log, root, .. } => ("monitor", cmd_monitor(&files, &log, root)),
        Command::Tests { file, context, .. } => ("tests", cmd_tests(&file, &context)),
        Command::AddInput { file, name, kind, .. } => ("add-input", cmd_add_input(&file, &name, &kind)),
        Command::Stats { files, .. } => ("stats", cmd_stats(&files)),
    };
    (format, name, result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, name, result) = run(cli.command);
    match result {
        Ok(report) => {
            match format {
                Format::Text => print!("{}", report.text),
                Format::Json => {
                    let mut body = report.json;
                    if let Json::Object(map) = &mut body {
                        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
                        map.insert("command".into(), json!(name));
                    }
                    println!("{}", serde_json::to_string_pretty(&body).expect("reports serialize"));
                }
            }
            ExitCode::from(u8::from(report.findings))
        }
        Err(failure) => {
            let (code, lines) = match failure {
                Failure::Usage(m) => ("usage".to_string(), vec![m]),
                Failure::Cat(e) => (e.code().to_string(), vec![e.to_string()]),
                Failure::Parse(lines) => ("parse".to_string(), lines),
            };
            match format {
                Format::Text => {
                    for line in &lines {
                        if code == "parse" {
                            eprintln!("{line}");
                        } else {
                            eprintln!("error[{code}]: {line}");
                        }
                    }
                }
                Format::Json => {
                    let body = json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": name,
                        "error": { "code": code, "messages": lines },
                    });
                    eprintln!("{}", serde_json::to_string_pretty(&body).expect("errors serialize"));
                }
            }
            ExitCode::from(2)
        }
    }
}
