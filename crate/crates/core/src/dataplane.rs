//! Shared asset store. Access is granted only against an enacted effect.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::Fact;
use crate::model::{fact_text, AgentId, Effect, Verb};
use crate::runtime::{Entry, Outcome, TraceEvent, Update};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Access {
    Read,
    Write,
}

impl Access {
    pub fn verb(self) -> Verb {
        match self {
            Access::Read => Verb::Reads,
            Access::Write => Verb::Writes,
        }
    }
}

impl fmt::Display for Access {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Access::Read => "read",
            Access::Write => "write",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessRequest {
    pub agent: AgentId,
    pub access: Access,
    #[serde(with = "fact_text")]
    pub variable: Fact,
    /// Trace index of the enactment carrying the effect.
    pub action_ref: usize,
    /// Bytes to store, for writes.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_hex")]
    pub content: Option<Vec<u8>>,
}

impl AccessRequest {
    pub fn effect(&self) -> Effect {
        Effect {
            affector: self.agent.clone(),
            verb: self.access.verb(),
            variable: self.variable.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(rename_all = "kebab-case")]
pub enum Denial {
    #[error("referenced event is not an applied enactment")]
    NoSuchEnactment,
    #[error("the enacted action lacks this effect")]
    EffectNotOfAction,
    #[error("no such asset")]
    NoSuchAsset,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum AccessOutcome {
    Granted {
        #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_hex")]
        content: Option<Vec<u8>>,
    },
    Denied {
        reason: Denial,
    },
}

impl AccessOutcome {
    pub fn is_granted(&self) -> bool {
        matches!(self, AccessOutcome::Granted { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessRecord {
    pub request: AccessRequest,
    pub outcome: AccessOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Asset {
    pub content: Vec<u8>,
    pub writer: AgentId,
    /// Trace index of the granting access event.
    pub written_at: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssetStore {
    assets: BTreeMap<Fact, Asset>,
}

impl AssetStore {
    pub fn get(&self, variable: &Fact) -> Option<&Asset> {
        self.assets.get(variable)
    }

    pub fn contains(&self, variable: &Fact) -> bool {
        self.assets.contains_key(variable)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Fact, &Asset)> {
        self.assets.iter()
    }
}

/// Deterministic stand-in for real asset data.
pub fn placeholder(variable: &Fact) -> Vec<u8> {
    format!("contents of {variable}").into_bytes()
}

/// The effects of the applied enactment at `index`, if that is what it is.
pub fn enacted_effects(trace: &[TraceEvent], index: usize) -> Option<&[Effect]> {
    match &trace.get(index)?.entry {
        Entry::Control(record)
            if matches!(record.update, Update::Enact { .. })
                && record.outcome == Outcome::Applied =>
        {
            record.effects.as_deref()
        }
        _ => None,
    }
}

/// Decides a request against the trace so far; a granted write updates `store`.
/// `index` is where the resulting access event will sit in the trace.
pub fn request_access(
    store: &mut AssetStore,
    trace: &[TraceEvent],
    req: &AccessRequest,
    index: usize,
) -> AccessOutcome {
    let deny = |reason| AccessOutcome::Denied { reason };
    let Some(effects) = enacted_effects(trace, req.action_ref) else {
        return deny(Denial::NoSuchEnactment);
    };
    if !effects.contains(&req.effect()) {
        return deny(Denial::EffectNotOfAction);
    }
    match req.access {
        Access::Read => match store.get(&req.variable) {
            Some(asset) => AccessOutcome::Granted {
                content: Some(asset.content.clone()),
            },
            None => deny(Denial::NoSuchAsset),
        },
        Access::Write => {
            let content = req
                .content
                .clone()
                .unwrap_or_else(|| placeholder(&req.variable));
            store.assets.insert(
                req.variable.clone(),
                Asset {
                    content,
                    writer: req.agent.clone(),
                    written_at: index,
                },
            );
            AccessOutcome::Granted { content: None }
        }
    }
}

/// Granted access events with no matching enacted effect. Empty for any
/// trace the engine produced.
pub fn uncorroborated_grants(trace: &[TraceEvent]) -> Vec<usize> {
    trace
        .iter()
        .filter_map(|event| match &event.entry {
            Entry::DataPlane(record) if record.outcome.is_granted() => {
                let backed = enacted_effects(trace, record.request.action_ref)
                    .is_some_and(|effects| effects.contains(&record.request.effect()));
                (!backed || record.request.action_ref >= event.index).then_some(event.index)
            }
            _ => None,
        })
        .collect()
}

mod opt_hex {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &Option<Vec<u8>>, s: S) -> Result<S::Ok, S::Error> {
        match bytes {
            Some(bytes) => s.serialize_str(&hex::encode(bytes)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<u8>>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|text| hex::decode(text).map_err(serde::de::Error::custom))
            .transpose()
    }
}
