use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::update::ControlRecord;
use crate::dataplane::AccessRecord;

/// One line of the trace file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub index: usize,
    #[serde(flatten)]
    pub entry: Entry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "plane", rename_all = "kebab-case")]
pub enum Entry {
    Control(ControlRecord),
    DataPlane(AccessRecord),
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: expected index {expected}, found {found}")]
    Index {
        line: usize,
        expected: usize,
        found: usize,
    },
}

pub fn write_jsonl(events: &[TraceEvent], mut out: impl Write) -> io::Result<()> {
    for event in events {
        serde_json::to_writer(&mut out, event)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Reads a trace, insisting on dense indices from 0. Blank lines are skipped.
pub fn read_jsonl(input: impl BufRead) -> Result<Vec<TraceEvent>, TraceError> {
    let mut events = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event: TraceEvent = serde_json::from_str(&line).map_err(|source| TraceError::Json {
            line: n + 1,
            source,
        })?;
        if event.index != events.len() {
            return Err(TraceError::Index {
                line: n + 1,
                expected: events.len(),
                found: event.index,
            });
        }
        events.push(event);
    }
    Ok(events)
}
