use std::fmt;

use serde::Serialize;

use super::trace::{Entry, TraceEvent};
use super::update::{Outcome, Update};
use crate::model::{payload, AgentId, Effect, MessageId, PermissionBreakdown};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PayloadItem {
    pub id: MessageId,
    pub policy: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub index: usize,
    pub actor: AgentId,
    pub outcome: Outcome,
    pub payload: Vec<PayloadItem>,
    pub permission: PermissionBreakdown,
    pub effects: Vec<Effect>,
    /// Granted access events that cite this enactment.
    pub realised: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error("event {0} is not an enactment")]
    NotAnEnactment(usize),
}

pub fn audit(trace: &[TraceEvent], index: usize) -> Result<AuditReport, AuditError> {
    let not_enactment = AuditError::NotAnEnactment(index);
    let Some(TraceEvent {
        entry: Entry::Control(record),
        ..
    }) = trace.get(index)
    else {
        return Err(not_enactment);
    };
    let (Update::Enact { action }, Some(permission), Some(effects)) =
        (&record.update, &record.permission, &record.effects)
    else {
        return Err(not_enactment);
    };
    let realised = trace
        .iter()
        .filter_map(|e| match &e.entry {
            Entry::DataPlane(access)
                if access.request.action_ref == index && access.outcome.is_granted() =>
            {
                Some(e.index)
            }
            _ => None,
        })
        .collect();
    Ok(AuditReport {
        index,
        actor: action.actor.clone(),
        outcome: record.outcome.clone(),
        payload: payload(action)
            .into_iter()
            .map(|m| PayloadItem {
                id: m.id.clone(),
                policy: m.contents.to_string(),
            })
            .collect(),
        permission: permission.clone(),
        effects: effects.clone(),
        realised,
    })
}

/// Reports for every enactment in the trace, in order.
pub fn audit_all(trace: &[TraceEvent]) -> Vec<AuditReport> {
    (0..trace.len())
        .filter_map(|i| audit(trace, i).ok())
        .collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.permission;
        let verdict = if p.permitted {
            "permitted"
        } else {
            "prohibited"
        };
        let applied = match &self.outcome {
            Outcome::Applied => String::new(),
            Outcome::Rejected(r) => format!(" (rejected: {r})"),
        };
        writeln!(
            f,
            "#{} enactment by {}: {verdict}{applied}",
            self.index, self.actor
        )?;
        writeln!(f, "  payload:")?;
        for item in &self.payload {
            writeln!(f, "    [{}]", item.id)?;
            for line in item.policy.lines() {
                writeln!(f, "      {line}")?;
            }
        }
        write!(f, "  valid: {}", yes_no(p.valid_act))?;
        if p.bound_exceeded {
            write!(f, " (step bound exceeded)")?;
        }
        writeln!(f)?;
        for fact in &p.error_facts {
            writeln!(f, "    {fact}")?;
        }
        write!(f, "  sourced: {}", yes_no(p.sourced))?;
        if !p.unsourced.is_empty() {
            let ids: Vec<String> = p.unsourced.iter().map(ToString::to_string).collect();
            write!(f, " (not stated: {})", ids.join(", "))?;
        }
        writeln!(f)?;
        let agreed: Vec<String> = p.agreed.iter().map(ToString::to_string).collect();
        writeln!(
            f,
            "  based: {} (basis {}, agreed [{}])",
            yes_no(p.based),
            p.basis,
            agreed.join(", ")
        )?;
        writeln!(f, "  effects:")?;
        for effect in &self.effects {
            writeln!(f, "    {effect}")?;
        }
        if !self.realised.is_empty() {
            let events: Vec<String> = self.realised.iter().map(|i| format!("#{i}")).collect();
            writeln!(f, "  realised by: {}", events.join(", "))?;
        }
        Ok(())
    }
}
