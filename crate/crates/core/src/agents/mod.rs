//! Scripted agents and the bundled case-study scenarios.

mod bundled;
mod manifest;
mod scheduler;

use std::collections::{HashMap, HashSet};

use indexmap::IndexSet;

use crate::dataplane::{Access, AssetStore};
use crate::lang::{self, Denotation, Fact, DEFAULT_STEP_BOUND};
use crate::model::{extract, Action, AgentId, Message, MessageId};
use crate::runtime::Update;

pub use bundled::{bundled_names, library_file, load_bundled};
pub use manifest::{load, load_dir, DirSource, LoadError, Source};
pub use scheduler::{run_scenario, RunError, RunOptions, RunResult, RunSummary};

/// Conditions that must all hold for a reaction to fire. All empty means
/// "as soon as the reaction is armed".
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trigger {
    /// Facts true in the extraction of the agent's own view.
    pub truths: Vec<Fact>,
    /// The current agreements, by id.
    pub agreement: Option<Vec<MessageId>>,
    /// Variables present in the asset store.
    pub assets: Vec<Fact>,
    /// Agents with at least one enacted action in the configuration.
    pub enacted_by: Vec<AgentId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipients {
    All,
    Only(Vec<AgentId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisSelector {
    /// First entry of the agreements when the reaction fires.
    Current,
    Named(MessageId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtraSelector {
    Ids(Vec<MessageId>),
    AllViewedExcept(Vec<MessageId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reaction {
    /// State a message, then gossip it.
    State {
        message: Message,
        to: Recipients,
    },
    Enact {
        basis: BasisSelector,
        extra: ExtraSelector,
    },
    Gossip {
        ids: Vec<MessageId>,
        to: Recipients,
    },
    /// Access a variable under the effect of this agent's enactment `action`.
    Request {
        access: Access,
        variable: Fact,
        action: String,
    },
    Forget {
        ids: Vec<MessageId>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionRule {
    /// Unique within the agent's script.
    pub label: String,
    /// Labels that must have fired first.
    pub after: Vec<String>,
    pub trigger: Trigger,
    pub reaction: Reaction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentScript {
    pub agent: AgentId,
    pub reactions: Vec<ReactionRule>,
}

/// Everything an agent may look at during its turn.
pub struct Observation<'a> {
    pub view: Vec<&'a Message>,
    pub agreed: &'a [Message],
    pub enacted: &'a IndexSet<Action>,
    pub store: &'a AssetStore,
    /// All agents in the scenario, for `Recipients::All`.
    pub peers: &'a [AgentId],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Output {
    Update(Update),
    /// A data-plane request citing the enactment with the given label.
    Access {
        access: Access,
        variable: Fact,
        action: String,
    },
}

/// A script plus what it has done so far.
#[derive(Clone, Debug)]
pub struct AgentRunner {
    pub script: AgentScript,
    fired: Vec<bool>,
    fired_labels: HashSet<String>,
    /// Trace index of each applied enactment, by reaction label.
    enactments: HashMap<String, usize>,
}

impl AgentRunner {
    pub fn new(script: AgentScript) -> Self {
        let fired = vec![false; script.reactions.len()];
        AgentRunner {
            script,
            fired,
            fired_labels: HashSet::new(),
            enactments: HashMap::new(),
        }
    }

    pub fn agent(&self) -> &AgentId {
        &self.script.agent
    }

    pub fn record_enactment(&mut self, label: &str, index: usize) {
        self.enactments.insert(label.to_string(), index);
    }

    pub fn enactment(&self, label: &str) -> Option<usize> {
        self.enactments.get(label).copied()
    }

    pub fn all_fired(&self) -> bool {
        self.fired.iter().all(|&f| f)
    }

    pub fn pending(&self) -> impl Iterator<Item = &str> {
        self.script
            .reactions
            .iter()
            .zip(&self.fired)
            .filter(|(_, &f)| !f)
            .map(|(r, _)| r.label.as_str())
    }

    /// Fires every reaction that is armed and whose trigger holds, in script
    /// order, returning `(label, outputs)` per fired reaction. Each reaction
    /// fires at most once.
    pub fn step(&mut self, obs: &Observation<'_>) -> Vec<(String, Vec<Output>)> {
        let mut truths: Option<Denotation> = None;
        let mut out = Vec::new();
        for i in 0..self.script.reactions.len() {
            if self.fired[i] {
                continue;
            }
            let rule = &self.script.reactions[i];
            if !rule.after.iter().all(|l| self.fired_labels.contains(l))
                || !self.holds(&rule.trigger, obs, &mut truths)
            {
                continue;
            }
            let Some(outputs) = self.react(&rule.reaction, obs) else {
                continue;
            };
            let label = rule.label.clone();
            self.fired[i] = true;
            self.fired_labels.insert(label.clone());
            out.push((label, outputs));
        }
        out
    }

    fn holds(
        &self,
        trigger: &Trigger,
        obs: &Observation<'_>,
        truths: &mut Option<Denotation>,
    ) -> bool {
        if let Some(ids) = &trigger.agreement {
            if obs.agreed.len() != ids.len()
                || obs.agreed.iter().zip(ids).any(|(m, id)| m.id != *id)
            {
                return false;
            }
        }
        if !trigger
            .enacted_by
            .iter()
            .all(|a| obs.enacted.iter().any(|x| x.actor == *a))
        {
            return false;
        }
        if !trigger.assets.iter().all(|v| obs.store.contains(v)) {
            return false;
        }
        if trigger.truths.is_empty() {
            return true;
        }
        let den = truths.get_or_insert_with(|| {
            let view: Vec<Message> = obs.view.iter().map(|&m| m.clone()).collect();
            lang::eval(&extract(&view), DEFAULT_STEP_BOUND)
        });
        trigger.truths.iter().all(|f| den.truth(f))
    }

    fn find<'a>(&self, obs: &Observation<'a>, id: &MessageId) -> Option<&'a Message> {
        obs.view.iter().copied().find(|m| m.id == *id)
    }

    fn recipients<'a>(&'a self, to: &'a Recipients, obs: &'a Observation<'_>) -> Vec<&'a AgentId> {
        match to {
            Recipients::All => obs.peers.iter().filter(|p| *p != self.agent()).collect(),
            Recipients::Only(list) => list.iter().filter(|p| *p != self.agent()).collect(),
        }
    }

    /// The outputs of a reaction, or `None` if it cannot fire yet (a named
    /// message is not in view, or a cited enactment has not happened).
    fn react(&self, reaction: &Reaction, obs: &Observation<'_>) -> Option<Vec<Output>> {
        let me = self.agent().clone();
        let gossip = |message: &Message, to: &Recipients| -> Vec<Output> {
            self.recipients(to, obs)
                .into_iter()
                .map(|peer| {
                    Output::Update(Update::Gossip {
                        from: me.clone(),
                        to: peer.clone(),
                        message: message.clone(),
                    })
                })
                .collect()
        };
        match reaction {
            Reaction::State { message, to } => {
                let mut out = vec![Output::Update(Update::State {
                    message: message.clone(),
                })];
                out.extend(gossip(message, to));
                Some(out)
            }
            Reaction::Enact { basis, extra } => {
                let basis = match basis {
                    BasisSelector::Current => obs
                        .view
                        .iter()
                        .copied()
                        .find(|m| Some(*m) == obs.agreed.first())?,
                    BasisSelector::Named(id) => self.find(obs, id)?,
                };
                let extra: Vec<Message> = match extra {
                    ExtraSelector::Ids(ids) => ids
                        .iter()
                        .map(|id| self.find(obs, id).cloned())
                        .collect::<Option<_>>()?,
                    ExtraSelector::AllViewedExcept(ids) => obs
                        .view
                        .iter()
                        .filter(|m| **m != basis && !ids.contains(&m.id))
                        .map(|&m| m.clone())
                        .collect(),
                };
                let action = Action {
                    actor: me,
                    basis: basis.clone(),
                    extra,
                };
                Some(vec![Output::Update(Update::Enact { action })])
            }
            Reaction::Gossip { ids, to } => {
                let messages: Vec<&Message> = ids
                    .iter()
                    .map(|id| self.find(obs, id))
                    .collect::<Option<_>>()?;
                Some(messages.into_iter().flat_map(|m| gossip(m, to)).collect())
            }
            Reaction::Request {
                access,
                variable,
                action,
            } => {
                self.enactment(action)?;
                Some(vec![Output::Access {
                    access: *access,
                    variable: variable.clone(),
                    action: action.clone(),
                }])
            }
            Reaction::Forget { ids } => {
                let messages: Vec<&Message> = ids
                    .iter()
                    .map(|id| self.find(obs, id))
                    .collect::<Option<_>>()?;
                Some(
                    messages
                        .into_iter()
                        .map(|m| {
                            Output::Update(Update::Forget {
                                agent: me.clone(),
                                message: m.clone(),
                            })
                        })
                        .collect(),
                )
            }
        }
    }
}

/// A named set of scripts plus the administrator's agreement program.
#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub name: String,
    pub summary: String,
    pub administrator: AgentId,
    pub agents: Vec<AgentId>,
    pub scripts: Vec<AgentScript>,
    /// Successive agreement lists; the first is in force before anyone acts,
    /// each later one is applied once the agents go quiet.
    pub program: Vec<Vec<Message>>,
    pub expect: Expectations,
}

/// Counts a run of the scenario should produce. Unset fields are not checked.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub statements: Option<usize>,
    pub enactments: Option<usize>,
    pub permitted: Option<usize>,
    pub grants: Option<usize>,
    pub denials: Option<usize>,
}
