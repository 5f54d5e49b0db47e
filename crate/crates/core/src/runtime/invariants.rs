//! Properties every trace the engine produces must satisfy.

use std::collections::HashMap;

use super::config::{Config, Settings};
use super::engine::{replay_with, ReplayError};
use super::trace::{Entry, TraceEvent};
use super::update::{Outcome, Update};
use crate::model::{
    breakdown, effects_in, evaluate_payload, payload, reflect_actor, Action, Effect,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{property} fails at event {index}: {detail}")]
pub struct Violation {
    pub property: &'static str,
    pub index: usize,
    pub detail: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Violations(Vec<Violation>),
}

struct Enactment {
    index: usize,
    action: Action,
    permitted: bool,
    effects: Vec<Effect>,
}

/// Replays `events` and checks growth, accuracy, enacted-implies-sourced,
/// sourced preservation, prospection, effect recomputability and that
/// forgetting leaves the configuration alone.
pub fn check_trace(events: &[TraceEvent], settings: &Settings) -> Result<(), CheckError> {
    let mut violations = Vec::new();
    let mut fail = |property, index, detail: String| {
        violations.push(Violation {
            property,
            index,
            detail,
        })
    };
    let mut snapshots: Vec<(usize, Config)> = Vec::new();
    let mut enactments: Vec<Enactment> = Vec::new();
    let mut previous = Config::default();

    replay_with(events, settings, |event, engine| {
        let config = &engine.state.config;
        let index = event.index;
        if !previous.stated.iter().all(|m| config.stated.contains(m)) {
            fail(
                "growing (stated)",
                index,
                "a stated message disappeared".into(),
            );
        }
        if !previous.enacted.iter().all(|a| config.enacted.contains(a)) {
            fail(
                "growing (enacted)",
                index,
                "an enacted action disappeared".into(),
            );
        }
        if !engine.state.is_accurate() {
            fail("accuracy", index, "a view holds an unstated message".into());
        }
        if let Entry::Control(record) = &event.entry {
            match (&record.update, &record.outcome) {
                (Update::Enact { action }, Outcome::Applied) => {
                    let permission = record
                        .permission
                        .as_ref()
                        .expect("enactments carry permission");
                    if !permission.sourced {
                        fail(
                            "enacted implies sourced",
                            index,
                            format!("unsourced {:?}", permission.unsourced),
                        );
                    }
                    enactments.push(Enactment {
                        index,
                        action: action.clone(),
                        permitted: permission.permitted,
                        effects: record.effects.clone().unwrap_or_default(),
                    });
                }
                (Update::Forget { .. }, _) if *config != previous => {
                    fail(
                        "forget preserves configuration",
                        index,
                        "configuration changed".into(),
                    );
                }
                _ => {}
            }
        }
        if *config != previous {
            snapshots.push((index, config.clone()));
            previous = config.clone();
        }
    })?;

    let mut cache = HashMap::new();
    for e in &enactments {
        let den = cache
            .entry(e.index)
            .or_insert_with(|| evaluate_payload(&e.action));
        let recomputed = effects_in(den);
        if recomputed != e.effects {
            fail(
                "effect recomputability",
                e.index,
                format!("recorded {:?}, recomputed {:?}", e.effects, recomputed),
            );
        }
        let actor_message = reflect_actor(&e.action.actor);
        for (j, config) in snapshots.iter().filter(|(j, _)| *j >= e.index) {
            let unstated: Vec<_> = payload(&e.action)
                .into_iter()
                .filter(|m| *m != actor_message && !config.stated.contains(m))
                .collect();
            if !unstated.is_empty() {
                fail(
                    "sourced preservation",
                    *j,
                    format!("action from event {} lost its sources", e.index),
                );
            }
            if e.permitted && config.agreed.contains(&e.action.basis) {
                let later =
                    breakdown(den, config, &e.action).expect("configurations decide statedness");
                if !later.permitted {
                    fail(
                        "prospection",
                        *j,
                        format!("action from event {} no longer permitted", e.index),
                    );
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CheckError::Violations(violations))
    }
}
