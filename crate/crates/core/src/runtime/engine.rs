use std::fmt;

use super::config::Settings;
use super::trace::{Entry, TraceEvent};
use super::update::{Outcome, Rejection, SystemState, Update};
use crate::dataplane::{request_access, AccessRecord, AccessRequest, AssetStore};
use crate::model::AgentId;

/// The single-threaded system: state, asset store and the trace so far.
#[derive(Clone, Debug, Default)]
pub struct Engine {
    pub state: SystemState,
    pub store: AssetStore,
    pub trace: Vec<TraceEvent>,
    pub settings: Settings,
}

impl Engine {
    pub fn new(settings: Settings) -> Self {
        Engine {
            settings,
            ..Engine::default()
        }
    }

    pub fn submit(&mut self, issuer: &AgentId, update: Update) -> &TraceEvent {
        let record = self.state.apply(issuer, update, &self.settings);
        self.push(Entry::Control(record))
    }

    pub fn access(&mut self, request: AccessRequest) -> &TraceEvent {
        let outcome = request_access(&mut self.store, &self.trace, &request, self.trace.len());
        self.push(Entry::DataPlane(AccessRecord { request, outcome }))
    }

    fn push(&mut self, entry: Entry) -> &TraceEvent {
        self.trace.push(TraceEvent {
            index: self.trace.len(),
            entry,
        });
        self.trace.last().unwrap()
    }

    /// Re-applies one recorded event and returns what it produces now.
    fn redo(&mut self, event: &TraceEvent) -> &TraceEvent {
        match &event.entry {
            Entry::Control(record) => self.submit(&record.issuer, record.update.clone()),
            Entry::DataPlane(record) => self.access(record.request.clone()),
        }
    }
}

/// Settings under which `events` can have been produced: the administrator
/// is whoever issued the first agreement, and strict mode shows up as a
/// refused prohibited enactment. A trace with neither replays identically
/// under the defaults.
pub fn infer_settings(events: &[TraceEvent]) -> Settings {
    let mut settings = Settings::default();
    let controls = events.iter().filter_map(|e| match &e.entry {
        Entry::Control(record) => Some(record),
        Entry::DataPlane(_) => None,
    });
    if let Some(record) = controls
        .clone()
        .find(|r| matches!(r.update, Update::Agree { .. }) && r.outcome.is_applied())
    {
        settings.administrator = record.issuer.clone();
    }
    settings.strict = controls
        .into_iter()
        .any(|r| r.outcome == Outcome::Rejected(Rejection::Prohibited));
    settings
}

#[derive(Debug, PartialEq, Eq)]
pub enum ReplayError {
    /// The event at `index` does not match what re-applying its input yields.
    Divergence {
        index: usize,
        recorded: Box<TraceEvent>,
        replayed: Box<TraceEvent>,
    },
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::Divergence {
                index,
                recorded,
                replayed,
            } => {
                let show = |e: &TraceEvent| serde_json::to_string(e).unwrap_or_default();
                write!(
                    f,
                    "replay diverges at event {index}\n  recorded: {}\n  replayed: {}",
                    show(recorded),
                    show(replayed)
                )
            }
        }
    }
}

impl std::error::Error for ReplayError {}

/// Folds every event's input through a fresh engine, checking that each
/// outcome, permission breakdown and effect list comes out identical.
pub fn replay(events: &[TraceEvent], settings: &Settings) -> Result<Engine, ReplayError> {
    replay_with(events, settings, |_, _| {})
}

/// [`replay`], calling `observe` after each event with the engine state.
pub fn replay_with(
    events: &[TraceEvent],
    settings: &Settings,
    mut observe: impl FnMut(&TraceEvent, &Engine),
) -> Result<Engine, ReplayError> {
    let mut engine = Engine::new(settings.clone());
    for (index, event) in events.iter().enumerate() {
        let replayed = engine.redo(event);
        if replayed != event || event.index != index {
            return Err(ReplayError::Divergence {
                index,
                recorded: Box::new(event.clone()),
                replayed: Box::new(replayed.clone()),
            });
        }
        observe(event, &engine);
    }
    Ok(engine)
}
