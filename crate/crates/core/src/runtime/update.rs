use std::collections::BTreeMap;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use super::config::{Config, Settings};
use crate::model::{
    judge, payload, reflect_actor, Action, AgentId, Effect, Message, MessageId, PermissionBreakdown,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Update {
    State {
        message: Message,
    },
    Enact {
        action: Action,
    },
    Agree {
        messages: Vec<Message>,
    },
    Gossip {
        from: AgentId,
        to: AgentId,
        message: Message,
    },
    Forget {
        agent: AgentId,
        message: Message,
    },
}

impl Update {
    pub fn name(&self) -> &'static str {
        match self {
            Update::State { .. } => "state",
            Update::Enact { .. } => "enact",
            Update::Agree { .. } => "agree",
            Update::Gossip { .. } => "gossip",
            Update::Forget { .. } => "forget",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Rejection {
    #[error("issuer is not the author")]
    NotAuthor,
    #[error("issuer is not the actor")]
    NotActor,
    #[error("issuer is not the administrator")]
    NotAdministrator,
    #[error("issuer does not own the view being changed")]
    WrongIssuer,
    #[error("message already in the author's view")]
    AlreadyViewed,
    #[error("payload messages missing from the actor's view: {missing:?}")]
    PayloadNotViewed { missing: Vec<MessageId> },
    #[error("sender does not view the gossiped message")]
    BadGossip,
    #[error("message not in the agent's view")]
    NotViewed,
    #[error("enactment is prohibited (strict mode)")]
    Prohibited,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Applied,
    Rejected(Rejection),
}

impl Outcome {
    pub fn is_applied(&self) -> bool {
        matches!(self, Outcome::Applied)
    }
}

/// What applying one control update produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlRecord {
    pub issuer: AgentId,
    pub update: Update,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permission: Option<PermissionBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effects: Option<Vec<Effect>>,
}

/// The configuration plus each agent's view of the stated messages.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SystemState {
    pub config: Config,
    pub views: BTreeMap<AgentId, IndexSet<Message>>,
}

impl SystemState {
    pub fn initial() -> Self {
        SystemState::default()
    }

    pub fn view(&self, agent: &AgentId) -> impl Iterator<Item = &Message> {
        self.views.get(agent).into_iter().flatten()
    }

    pub fn views_message(&self, agent: &AgentId, message: &Message) -> bool {
        self.views.get(agent).is_some_and(|v| v.contains(message))
    }

    /// Every viewed message is stated.
    pub fn is_accurate(&self) -> bool {
        self.views
            .values()
            .flatten()
            .all(|m| self.config.stated.contains(m))
    }

    /// Applies `update` in place if its preconditions hold.
    pub fn apply(
        &mut self,
        issuer: &AgentId,
        update: Update,
        settings: &Settings,
    ) -> ControlRecord {
        let (outcome, permission, effects) = self.apply_inner(issuer, &update, settings);
        ControlRecord {
            issuer: issuer.clone(),
            update,
            outcome,
            permission,
            effects,
        }
    }

    fn apply_inner(
        &mut self,
        issuer: &AgentId,
        update: &Update,
        settings: &Settings,
    ) -> (Outcome, Option<PermissionBreakdown>, Option<Vec<Effect>>) {
        let reject = |r| (Outcome::Rejected(r), None, None);
        match update {
            Update::State { message } => {
                if issuer != message.author() {
                    return reject(Rejection::NotAuthor);
                }
                if self.views_message(issuer, message) {
                    return reject(Rejection::AlreadyViewed);
                }
                self.config.state(message.clone());
                self.views
                    .entry(issuer.clone())
                    .or_default()
                    .insert(message.clone());
            }
            Update::Enact { action } => {
                if *issuer != action.actor {
                    return reject(Rejection::NotActor);
                }
                let actor_message = reflect_actor(&action.actor);
                let missing: Vec<MessageId> = payload(action)
                    .into_iter()
                    .filter(|m| *m != actor_message && !self.views_message(issuer, m))
                    .map(|m| m.id)
                    .collect();
                if !missing.is_empty() {
                    return reject(Rejection::PayloadNotViewed { missing });
                }
                let mut next = self.config.clone();
                next.enact(action.clone());
                let (breakdown, effects) =
                    judge(&next, action).expect("configurations decide statedness");
                if settings.strict && !breakdown.permitted {
                    return (
                        Outcome::Rejected(Rejection::Prohibited),
                        Some(breakdown),
                        Some(effects),
                    );
                }
                self.config = next;
                return (Outcome::Applied, Some(breakdown), Some(effects));
            }
            Update::Agree { messages } => {
                if *issuer != settings.administrator {
                    return reject(Rejection::NotAdministrator);
                }
                self.config.agree(messages.clone());
            }
            Update::Gossip { from, to, message } => {
                if issuer != from {
                    return reject(Rejection::WrongIssuer);
                }
                if !self.views_message(from, message) {
                    return reject(Rejection::BadGossip);
                }
                self.views
                    .entry(to.clone())
                    .or_default()
                    .insert(message.clone());
            }
            Update::Forget { agent, message } => {
                if issuer != agent {
                    return reject(Rejection::WrongIssuer);
                }
                let removed = self
                    .views
                    .get_mut(agent)
                    .is_some_and(|view| view.shift_remove(message));
                if !removed {
                    return reject(Rejection::NotViewed);
                }
            }
        }
        (Outcome::Applied, None, None)
    }
}

/// Pure form of [`SystemState::apply`].
pub fn apply_update(
    state: &SystemState,
    issuer: &AgentId,
    update: Update,
    settings: &Settings,
) -> (SystemState, ControlRecord) {
    let mut next = state.clone();
    let record = next.apply(issuer, update, settings);
    (next, record)
}
