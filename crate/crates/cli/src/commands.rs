use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use justact::agents::{bundled_names, load_bundled, load_dir, run_scenario, RunOptions};
use justact::lang::{self, Fact, PolicyError};
use justact::model::AgentId;
use justact::runtime::{
    audit_all, infer_settings, read_jsonl, replay, write_jsonl, Engine, TraceEvent,
};

use crate::inspect::Inspector;

#[derive(Debug)]
pub enum Failure {
    /// Bad input: unreadable files, parse errors, unknown names.
    User(String),
    /// A trace that does not replay.
    Divergence(String),
    /// A strict run that attempted a prohibited enactment.
    Prohibited(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::User(_) => 1,
            Failure::Divergence(_) | Failure::Prohibited(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::User(m) | Failure::Divergence(m) | Failure::Prohibited(m) => f.write_str(m),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::User(e.to_string())
    }
}

type Result<T = ()> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::User(format!("{}: {e}", path.display())))
}

fn describe(path: &Path, error: &PolicyError) -> String {
    match error {
        PolicyError::Syntax(report) => format!("{}:{report}", path.display()),
        PolicyError::Unsafe(violations) => violations
            .iter()
            .map(|v| format!("{}: rule {}: {v}", path.display(), v.index + 1))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

pub fn eval(out: &mut dyn Write, file: &Path, bound: usize, query: Option<&str>) -> Result {
    let policy = lang::parse(&read(file)?).map_err(|e| Failure::User(describe(file, &e)))?;
    let query = query
        .map(|q| Fact::parse(q).map_err(|e| Failure::User(format!("query: {e}"))))
        .transpose()?;
    let den = lang::eval(&policy, bound);
    writeln!(out, "trues:")?;
    for fact in &den.trues {
        writeln!(out, "  {fact}")?;
    }
    writeln!(out, "unknowns:")?;
    for fact in &den.unknowns {
        writeln!(out, "  {fact}")?;
    }
    if den.bound_exceeded {
        writeln!(out, "step bound {bound} exceeded")?;
    }
    writeln!(out, "valid: {}", den.valid())?;
    if let Some(fact) = query {
        let value = if den.truth(&fact) {
            "true"
        } else if den.unknowns.contains(&fact) {
            "unknown"
        } else {
            "false"
        };
        writeln!(out, "{fact}: {value}")?;
    }
    Ok(())
}

pub fn check(out: &mut dyn Write, file: &Path) -> Result {
    let policy = lang::parse(&read(file)?).map_err(|e| Failure::User(describe(file, &e)))?;
    writeln!(out, "{}: ok, {} rules", file.display(), policy.len())?;
    Ok(())
}

pub fn run(
    out: &mut dyn Write,
    scenario: &str,
    trace: &Path,
    strict: bool,
    disabled: &[String],
) -> Result {
    let dir = Path::new(scenario);
    let spec = if dir.join("manifest.toml").is_file() {
        load_dir(dir)
    } else {
        load_bundled(scenario)
    }
    .map_err(|e| Failure::User(e.to_string()))?;
    let disabled = disabled
        .iter()
        .map(|a| a.parse::<AgentId>().map_err(Failure::User))
        .collect::<Result<Vec<_>>>()?;
    let options = RunOptions {
        disabled,
        strict,
        ..RunOptions::default()
    };
    let result = run_scenario(&spec, &options).map_err(|e| Failure::User(e.to_string()))?;
    let file =
        File::create(trace).map_err(|e| Failure::User(format!("{}: {e}", trace.display())))?;
    let mut writer = BufWriter::new(file);
    write_jsonl(&result.engine.trace, &mut writer)?;
    writer.flush()?;
    let s = &result.summary;
    writeln!(
        out,
        "{}: {} events, {} statements, {} enactments ({} permitted), {} access grants",
        spec.name, s.events, s.statements, s.enactments, s.permitted, s.grants
    )?;
    if options.disabled.is_empty() {
        for mismatch in s.mismatches(&spec.expect) {
            eprintln!("warning: {}: {mismatch}", spec.name);
        }
    }
    if strict && s.prohibited > 0 {
        return Err(Failure::Prohibited(format!(
            "{} prohibited enactment(s) refused",
            s.prohibited
        )));
    }
    Ok(())
}

/// Reads a trace and checks that it replays under the settings it implies.
pub fn load_trace(path: &Path) -> Result<(Vec<TraceEvent>, Engine)> {
    let file = File::open(path).map_err(|e| Failure::User(format!("{}: {e}", path.display())))?;
    let events = read_jsonl(BufReader::new(file))
        .map_err(|e| Failure::User(format!("{}: {e}", path.display())))?;
    let engine = replay(&events, &infer_settings(&events))
        .map_err(|e| Failure::Divergence(e.to_string()))?;
    Ok((events, engine))
}

pub fn audit(out: &mut dyn Write, trace: &Path, index: Option<usize>, json: bool) -> Result {
    let (events, _) = load_trace(trace)?;
    let reports = match index {
        Some(i) => {
            vec![justact::runtime::audit(&events, i).map_err(|e| Failure::User(e.to_string()))?]
        }
        None => audit_all(&events),
    };
    for report in reports {
        if json {
            writeln!(
                out,
                "{}",
                serde_json::to_string(&report).expect("reports serialise")
            )?;
        } else {
            writeln!(out, "{report}")?;
        }
    }
    Ok(())
}

pub fn inspect(out: &mut dyn Write, trace: &Path, dump: Option<usize>) -> Result {
    let (events, _) = load_trace(trace)?;
    let mut inspector = Inspector::new(events);
    match dump {
        Some(index) => {
            if !inspector.select(index) {
                return Err(Failure::User(format!("no event {index}")));
            }
            for row in inspector.rows() {
                writeln!(out, "{row}")?;
            }
            writeln!(out)?;
            for line in inspector.detail() {
                writeln!(out, "{line}")?;
            }
            Ok(())
        }
        None => crate::inspect::browse(inspector).map_err(Failure::from),
    }
}

pub fn scenarios(out: &mut dyn Write) -> Result {
    for name in bundled_names() {
        let spec = load_bundled(name).map_err(|e| Failure::User(e.to_string()))?;
        writeln!(out, "{name}  {}", spec.summary)?;
    }
    Ok(())
}
