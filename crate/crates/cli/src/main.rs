use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anosurf::catalog::CatalogError;
use anosurf::classifier::ClassifyError;
use anosurf::slopes::slopes_up_to_height;
use anosurf::spine::qtype;
use anosurf::{Catalog, ClassificationResult, Classifier, Slope, Trace, TrainTrack, Verdict};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;

/// Writes a line to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "anosurf",
    version,
    about = "Anosov flows on Dehn surgeries of the figure-eight knot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Weight bound for train-track enumeration.
    #[arg(long, default_value_t = 20, global = true)]
    bound: u32,
    #[arg(long, value_enum, default_value_t = Traces::None, global = true)]
    traces: Traces,
    /// Catalog directory; the embedded catalog is used when absent.
    #[arg(long, env = "ANOSURF_CATALOG", global = true)]
    catalog: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify Anosov flows on M(r).
    Classify {
        #[arg(allow_hyphen_values = true)]
        slope: String,
    },
    /// Classify every reduced q/p with p, |q| at most MAX_HEIGHT.
    Sweep {
        #[arg(value_parser = clap::value_parser!(i64).range(1..))]
        max_height: i64,
    },
    /// Slopes carried by a Q-type track, a catalog entry's track, or a track file.
    Track { source: String },
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show { id: String },
    Check,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Traces {
    None,
    Digest,
    Full,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        Failure::new(5, e.to_string())
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        let code = match &e {
            ClassifyError::OutOfScope => 3,
            ClassifyError::Catalog(_) => 5,
            _ => 4,
        };
        Failure::new(code, e.to_string())
    }
}

type Out = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Classify { slope } => classify(cli, slope),
        Command::Sweep { max_height } => sweep(cli, *max_height),
        Command::Track { source } => track(cli, source),
        Command::Catalog(CatalogCmd::List) => catalog_list(cli),
        Command::Catalog(CatalogCmd::Show { id }) => catalog_show(cli, id),
        Command::Catalog(CatalogCmd::Check) => catalog_check(cli),
    }
}

fn load_catalog(cli: &Cli) -> Result<Catalog, Failure> {
    Ok(match &cli.catalog {
        Some(dir) => Catalog::load_dir(dir)?,
        None => Catalog::embedded()?,
    })
}

fn parse_slope(s: &str) -> Result<Slope, Failure> {
    s.parse()
        .map_err(|e| Failure::new(2, format!("cannot parse slope {s:?}: {e}")))
}

fn emit(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn envelope(kind: &str, body: Value) -> Value {
    let mut v = json!({"schema": format!("anosurf/{kind}"), "version": SCHEMA_VERSION});
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

fn trace_json(t: &Trace, mode: Traces) -> Value {
    match mode {
        Traces::Full => serde_json::to_value(t).expect("traces serialize"),
        _ => json!({"entry": t.entry, "digest": t.digest()}),
    }
}

fn result_json(res: &ClassificationResult, mode: Traces) -> Value {
    let mut v = json!({
        "slope": res.slope,
        "verdict": res.verdict.name(),
        "hyperbolic": res.hyperbolic,
        "taut_foliation": res.taut_foliation,
        "candidates": res.candidates,
    });
    let m = v.as_object_mut().expect("object literal");
    if let Verdict::UniqueAnosov { surgery, .. } = &res.verdict {
        m.insert("surgery".into(), json!(surgery));
    }
    if !res.metadata.is_empty() {
        m.insert("metadata".into(), json!(res.metadata));
    }
    if mode != Traces::None {
        let traces: Vec<Value> = match &res.verdict {
            Verdict::NoAnosov { traces } => traces.iter().map(|t| trace_json(t, mode)).collect(),
            Verdict::SuspensionAnosov { argument } | Verdict::UniqueAnosov { argument, .. } => {
                vec![trace_json(argument, mode)]
            }
        };
        m.insert("traces".into(), Value::Array(traces));
    }
    v
}

fn classify(cli: &Cli, s: &str) -> Out {
    let r = parse_slope(s)?;
    let c = Classifier::new(load_catalog(cli)?);
    let res = c.classify(&r)?;
    if cli.format == Format::Json {
        emit(&envelope("classify", result_json(&res, cli.traces)));
        return Ok(());
    }
    out!("slope          {}", res.slope);
    out!("verdict        {}", res.verdict.name());
    if let Verdict::UniqueAnosov { surgery, .. } = &res.verdict {
        out!("flow           {surgery}");
    }
    out!("hyperbolic     {}", res.hyperbolic);
    out!("taut foliation {}", res.taut_foliation);
    out!("candidates     {}", res.candidates.len());
    for m in &res.metadata {
        out!("note           {m}");
    }
    let traces: Vec<&Trace> = match &res.verdict {
        Verdict::NoAnosov { traces } => traces.iter().collect(),
        Verdict::SuspensionAnosov { argument } | Verdict::UniqueAnosov { argument, .. } => vec![argument],
    };
    match cli.traces {
        Traces::None => {}
        Traces::Digest => {
            out!();
            for t in traces {
                out!("{:<16} {}", t.entry.as_deref().unwrap_or("argument"), t.digest());
            }
        }
        Traces::Full => {
            for t in traces {
                out!();
                out!("{}", t.render().trim_end());
            }
        }
    }
    Ok(())
}

/// Terminal rules of all traces, counted.
fn sweep_digest(res: &ClassificationResult) -> String {
    match &res.verdict {
        Verdict::NoAnosov { traces } => {
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for t in traces {
                if let Some(s) = t.steps.last() {
                    *counts.entry(s.rule.as_str()).or_default() += 1;
                }
            }
            counts
                .iter()
                .map(|(r, n)| format!("{r} x{n}"))
                .collect::<Vec<_>>()
                .join(", ")
        }
        Verdict::SuspensionAnosov { argument } | Verdict::UniqueAnosov { argument, .. } => argument.digest(),
    }
}

fn sweep(cli: &Cli, h: i64) -> Out {
    let c = Classifier::new(load_catalog(cli)?);
    let mut slopes = slopes_up_to_height(h);
    slopes.sort_by_key(|s| (*s.p(), *s.q()));
    let mut rows = Vec::with_capacity(slopes.len());
    for r in &slopes {
        let res = c.classify(r)?;
        rows.push(json!({
            "slope": res.slope,
            "verdict": res.verdict.name(),
            "hyperbolic": res.hyperbolic,
            "candidates": res.candidates.len(),
            "digest": sweep_digest(&res),
        }));
    }
    if cli.format == Format::Json {
        emit(&envelope("sweep", json!({"max_height": h, "rows": rows})));
        return Ok(());
    }
    out!(
        "{:<8} {:<17} {:<10} {:<10} digest",
        "slope",
        "verdict",
        "hyperbolic",
        "candidates"
    );
    for row in &rows {
        out!(
            "{:<8} {:<17} {:<10} {:<10} {}",
            row["slope"].as_str().unwrap_or_default(),
            row["verdict"].as_str().unwrap_or_default(),
            row["hyperbolic"].to_string(),
            row["candidates"].to_string(),
            row["digest"].as_str().unwrap_or_default()
        );
    }
    Ok(())
}

fn resolve_track(cli: &Cli, source: &str) -> Result<(String, TrainTrack), Failure> {
    let bad = |e: &dyn std::fmt::Display| Failure::new(2, format!("{source}: {e}"));
    if let Some(q) = qtype(source) {
        return Ok((q.id.clone(), q.track().map_err(|e| bad(&e))?));
    }
    let path = PathBuf::from(source);
    if path.is_file() {
        let text = std::fs::read_to_string(&path).map_err(|e| bad(&e))?;
        let t: TrainTrack = serde_json::from_str(&text).map_err(|e| bad(&e))?;
        return Ok((source.to_string(), t));
    }
    let cat = load_catalog(cli)?;
    let e = cat
        .get(source)
        .ok_or_else(|| Failure::new(2, format!("unknown Q-type, entry or track file {source:?}")))?;
    let q = qtype(&e.family).ok_or_else(|| Failure::new(2, format!("{source}: unknown family {}", e.family)))?;
    Ok((format!("{} ({})", e.id, q.id), q.track().map_err(|e| bad(&e))?))
}

fn track(cli: &Cli, source: &str) -> Out {
    let (name, t) = resolve_track(cli, source)?;
    let report = t
        .carried_classes(cli.bound)
        .map_err(|e| Failure::new(2, format!("{source}: {e}")))?;
    let witnesses = report.witnesses();
    if cli.format == Format::Json {
        let slopes: Vec<Value> = witnesses
            .iter()
            .map(|(s, c)| json!({"slope": s, "weights": c.weights, "multiplicity": c.multiplicity}))
            .collect();
        emit(&envelope(
            "track",
            json!({
                "track": name,
                "bound": cli.bound,
                "branches": t.branches().iter().map(|b| b.name.clone()).collect::<Vec<_>>(),
                "slopes": slopes,
            }),
        ));
        return Ok(());
    }
    let branches: Vec<&str> = t.branches().iter().map(|b| b.name.as_str()).collect();
    out!("track    {name}");
    out!("bound    {}", cli.bound);
    out!("branches {}", branches.join(" "));
    out!("slopes   {}", witnesses.len());
    for (s, c) in &witnesses {
        let w: Vec<String> = c.weights.iter().map(u32::to_string).collect();
        out!("  {s:<8} [{}]", w.join(", "));
    }
    Ok(())
}

fn catalog_list(cli: &Cli) -> Out {
    let cat = load_catalog(cli)?;
    if let Some(w) = cat.count_warning() {
        eprintln!("warning: {w}");
    }
    if cli.format == Format::Json {
        let entries: Vec<Value> = cat
            .entries
            .iter()
            .map(|e| json!({"id": e.id, "family": e.family, "class": e.exclusion_class, "admissible": e.admissible}))
            .collect();
        emit(&envelope(
            "catalog-list",
            json!({"count": cat.entries.len(), "entries": entries}),
        ));
        return Ok(());
    }
    out!("{:<16} {:<7} {:<14} admissible", "id", "family", "class");
    for e in &cat.entries {
        out!(
            "{:<16} {:<7} {:<14} {}",
            e.id,
            e.family,
            e.exclusion_class.to_string(),
            e.admissible
        );
    }
    Ok(())
}

fn catalog_show(cli: &Cli, id: &str) -> Out {
    let cat = load_catalog(cli)?;
    let e = cat
        .get(id)
        .ok_or_else(|| Failure::new(2, format!("unknown catalog entry {id:?}")))?;
    if cli.format == Format::Json {
        let entry = serde_json::to_value(e).expect("entries serialize");
        emit(&envelope("catalog-show", json!({"entry": entry})));
        return Ok(());
    }
    let orientable = e.orientable.map_or("not recorded".to_string(), |o| o.to_string());
    out!("id          {}", e.id);
    out!("name        {}", e.name);
    out!("family      {}", e.family);
    out!("class       {}", e.exclusion_class);
    out!("admissible  {}", e.admissible);
    out!("slope law   {}", e.slope_law);
    out!("orientable  {orientable}");
    if let Some(p) = &e.parent {
        out!("parent      {p}");
    }
    if let Some(s) = &e.surface.base.surface {
        let kind = if s.orientable { "orientable" } else { "non-orientable" };
        out!("base        genus {} {kind}, {} punctures", s.genus, s.punctures);
    }
    if let Some(d) = &e.surface.base.description {
        out!("base note   {d}");
    }
    for s in &e.surface.sectors {
        let at: Vec<&str> = s.attachments.iter().map(|a| a.curve.as_str()).collect();
        let kind = serde_json::to_value(&s.kind).expect("sector kinds serialize");
        out!(
            "sector      {} {} on {}",
            s.id,
            kind["type"].as_str().unwrap_or("?"),
            at.join(", ")
        );
    }
    if let Some(comp) = &e.surface.complement {
        for c in comp {
            out!("complement  {}", c.topology);
        }
    }
    Ok(())
}

fn catalog_check(cli: &Cli) -> Out {
    let cat = load_catalog(cli)?;
    let report = cat.check(cli.bound)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if cli.format == Format::Json {
        let mut body = serde_json::to_value(&report).expect("reports serialize");
        body["passed"] = json!(report.passed());
        emit(&envelope("catalog-check", body));
    } else {
        out!("entries {} (manifest {})", report.count, report.manifest_count);
        for w in &report.warnings {
            out!("warning {w}");
        }
        for e in &report.entries {
            let status = if e.passed() { "pass" } else { "FAIL" };
            let failed: Vec<String> = e
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{}: {}", c.name, c.detail.as_deref().unwrap_or("failed")))
                .collect();
            out!("{}", format!("{:<16} {status} {}", e.id, failed.join("; ")).trim_end());
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::new(1, "catalog check failed"))
    }
}
