//! Messages, actions, effects and the permission decision.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lang::{self, Denotation, Fact, Policy, DEFAULT_STEP_BOUND};

/// An agent is named by a fact, in practice a single leaf such as `amy`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub Fact);

impl AgentId {
    pub fn new(name: &str) -> Self {
        AgentId(Fact::leaf(name))
    }

    pub fn fact(&self) -> &Fact {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for AgentId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fact::parse(s)
            .map(AgentId)
            .map_err(|e| format!("bad agent `{s}`: {e}"))
    }
}

/// Serde through `Display`/`FromStr`, so trace lines stay readable.
macro_rules! serde_as_text {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d)?
                    .parse()
                    .map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_as_text!(AgentId);
serde_as_text!(MessageId);

/// Serde for bare facts as rendered text.
pub mod fact_text {
    use super::*;

    pub fn serialize<S: Serializer>(fact: &Fact, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(fact)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fact, D::Error> {
        Fact::parse(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Display label such as `st-antonius 3`. Sequence number 0 is reserved for
/// the actor message an enactment generates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MessageId {
    pub author: AgentId,
    pub seq: u32,
}

impl MessageId {
    pub fn new(author: &str, seq: u32) -> Self {
        MessageId {
            author: AgentId::new(author),
            seq,
        }
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.author, self.seq)
    }
}

impl FromStr for MessageId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (author, seq) = s
            .trim()
            .rsplit_once(' ')
            .ok_or_else(|| format!("bad message id `{s}`"))?;
        let seq = seq
            .parse()
            .map_err(|_| format!("bad sequence number in `{s}`"))?;
        Ok(MessageId {
            author: author.parse()?,
            seq,
        })
    }
}

/// An authored policy. Identity is (author, contents); the id is a label.
#[derive(Clone, Debug)]
pub struct Message {
    pub id: MessageId,
    pub contents: Policy,
}

impl Message {
    pub fn new(id: MessageId, contents: Policy) -> Self {
        Message { id, contents }
    }

    pub fn parse(id: &str, text: &str) -> Result<Self, String> {
        let id: MessageId = id.parse()?;
        let contents = lang::parse(text).map_err(|e| format!("{id}: {e}"))?;
        Ok(Message { id, contents })
    }

    pub fn author(&self) -> &AgentId {
        &self.id.author
    }
}

impl PartialEq for Message {
    fn eq(&self, other: &Self) -> bool {
        self.id.author == other.id.author && self.contents == other.contents
    }
}

impl Eq for Message {}

impl Hash for Message {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.author.hash(state);
        self.contents.hash(state);
    }
}

#[derive(Serialize, Deserialize)]
struct MessageRepr {
    author: AgentId,
    seq: u32,
    policy: String,
}

impl Serialize for Message {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MessageRepr {
            author: self.id.author.clone(),
            seq: self.id.seq,
            policy: self.contents.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Message {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MessageRepr::deserialize(d)?;
        let contents = lang::parse(&repr.policy).map_err(serde::de::Error::custom)?;
        Ok(Message {
            id: MessageId {
                author: repr.author,
                seq: repr.seq,
            },
            contents,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub actor: AgentId,
    pub basis: Message,
    pub extra: Vec<Message>,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let extra: Vec<String> = self.extra.iter().map(|m| m.id.to_string()).collect();
        write!(
            f,
            "({}, {}, [{}])",
            self.actor,
            self.basis.id,
            extra.join(", ")
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Reads,
    Writes,
}

impl Verb {
    pub fn as_str(self) -> &'static str {
        match self {
            Verb::Reads => "reads",
            Verb::Writes => "writes",
        }
    }
}

/// `affector reads|writes variable`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Effect {
    pub affector: AgentId,
    pub verb: Verb,
    #[serde(with = "fact_text")]
    pub variable: Fact,
}

impl Effect {
    pub fn fact(&self) -> Fact {
        Fact::node([
            self.affector.0.clone(),
            Fact::leaf(self.verb.as_str()),
            self.variable.clone(),
        ])
    }

    /// Recognises exactly three children with `reads` or `writes` in the middle.
    pub fn from_fact(fact: &Fact) -> Option<Effect> {
        let [affector, verb, variable] = fact.children() else {
            return None;
        };
        let verb = match verb.as_leaf()? {
            "reads" => Verb::Reads,
            "writes" => Verb::Writes,
            _ => return None,
        };
        Some(Effect {
            affector: AgentId(affector.clone()),
            verb,
            variable: variable.clone(),
        })
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fact().fmt(f)
    }
}

/// `actor α.`, authored by α.
pub fn reflect_actor(actor: &AgentId) -> Message {
    let fact = Fact::node([Fact::leaf("actor"), actor.0.clone()]);
    Message {
        id: MessageId {
            author: actor.clone(),
            seq: 0,
        },
        contents: lang::fact_policy(&fact),
    }
}

/// `[basis, reflect_actor(actor)] ++ extra`.
pub fn payload(action: &Action) -> Vec<Message> {
    let mut out = Vec::with_capacity(action.extra.len() + 2);
    out.push(action.basis.clone());
    out.push(reflect_actor(&action.actor));
    out.extend(action.extra.iter().cloned());
    out
}

/// Every rule alongside its author-reflected copy. Repeated messages count once.
pub fn extract(messages: &[Message]) -> Policy {
    let mut seen: Vec<&Message> = Vec::new();
    let mut rules = Vec::new();
    for message in messages {
        if seen.contains(&message) {
            continue;
        }
        seen.push(message);
        for rule in message.contents.rules() {
            rules.push(rule.clone());
            rules.push(lang::reflect_author(rule, message.author().fact()));
        }
    }
    Policy::from_rules(rules).expect("reflection preserves safety")
}

pub fn evaluate_payload(action: &Action) -> Denotation {
    lang::eval(&extract(&payload(action)), DEFAULT_STEP_BOUND)
}

/// Effects in the evaluated payload, in fact order. Validity plays no part.
pub fn effects_in(den: &Denotation) -> Vec<Effect> {
    den.trues.iter().filter_map(Effect::from_fact).collect()
}

pub fn enum_effects_of(action: &Action) -> Vec<Effect> {
    effects_in(&evaluate_payload(action))
}

pub fn dec_valid_act(action: &Action) -> bool {
    evaluate_payload(action).valid()
}

/// What a permission decision needs from a configuration.
pub trait ConfigView {
    /// `None` if this view cannot tell.
    fn is_stated(&self, message: &Message) -> Option<bool>;
    fn agreed(&self) -> &[Message];
}

/// A configuration given by explicit lists.
#[derive(Clone, Debug, Default)]
pub struct StaticConfig {
    pub stated: Vec<Message>,
    pub agreed: Vec<Message>,
}

impl ConfigView for StaticConfig {
    fn is_stated(&self, message: &Message) -> Option<bool> {
        Some(self.stated.contains(message))
    }

    fn agreed(&self) -> &[Message] {
        &self.agreed
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("cannot tell whether {0} is stated")]
pub struct UnknownStatedness(pub MessageId);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermissionBreakdown {
    pub valid_act: bool,
    /// True facts headed by `error`, the diagnostics behind invalidity.
    #[serde(with = "fact_list")]
    pub error_facts: Vec<Fact>,
    pub bound_exceeded: bool,
    pub sourced: bool,
    pub unsourced: Vec<MessageId>,
    pub based: bool,
    pub basis: MessageId,
    pub agreed: Vec<MessageId>,
    pub permitted: bool,
}

mod fact_list {
    use super::*;

    pub fn serialize<S: Serializer>(facts: &[Fact], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(facts.iter().map(ToString::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Fact>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| Fact::parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Permission plus effects from a single evaluation of the payload.
pub fn judge(
    config: &dyn ConfigView,
    action: &Action,
) -> Result<(PermissionBreakdown, Vec<Effect>), UnknownStatedness> {
    let den = evaluate_payload(action);
    Ok((breakdown(&den, config, action)?, effects_in(&den)))
}

/// The permission decision given an already evaluated payload.
pub fn breakdown(
    den: &Denotation,
    config: &dyn ConfigView,
    action: &Action,
) -> Result<PermissionBreakdown, UnknownStatedness> {
    let actor_message = reflect_actor(&action.actor);
    let mut unsourced = Vec::new();
    for message in payload(action) {
        // The actor message is stated by the enactment itself.
        if message == actor_message {
            continue;
        }
        match config.is_stated(&message) {
            Some(true) => {}
            Some(false) => unsourced.push(message.id.clone()),
            None => return Err(UnknownStatedness(message.id.clone())),
        }
    }
    let based = config.agreed().contains(&action.basis);
    let valid_act = den.valid();
    let sourced = unsourced.is_empty();
    Ok(PermissionBreakdown {
        valid_act,
        error_facts: den.trues.iter().filter(|f| f.is_error()).cloned().collect(),
        bound_exceeded: den.bound_exceeded,
        sourced,
        unsourced,
        based,
        basis: action.basis.id.clone(),
        agreed: config.agreed().iter().map(|m| m.id.clone()).collect(),
        permitted: valid_act && sourced && based,
    })
}

pub fn dec_permitted(
    config: &dyn ConfigView,
    action: &Action,
) -> Result<PermissionBreakdown, UnknownStatedness> {
    judge(config, action).map(|(breakdown, _)| breakdown)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(id: &str, text: &str) -> Message {
        Message::parse(id, text).unwrap()
    }

    fn example_action() -> Action {
        Action {
            actor: AgentId::new("bob"),
            basis: msg("amy 1", "error if bob reads data1."),
            extra: vec![msg("bob 1", "bob reads data1.")],
        }
    }

    #[test]
    fn message_identity_ignores_sequence_numbers() {
        assert_eq!(msg("amy 1", "a."), msg("amy 7", "a."));
        assert_ne!(msg("amy 1", "a."), msg("bob 1", "a."));
        assert_ne!(msg("amy 1", "a."), msg("amy 1", "b."));
    }

    #[test]
    fn ids_round_trip() {
        let id: MessageId = "st-antonius 3".parse().unwrap();
        assert_eq!(id, MessageId::new("st-antonius", 3));
        assert_eq!(id.to_string(), "st-antonius 3");
        assert!("amy".parse::<MessageId>().is_err());
    }

    #[test]
    fn actor_reflection() {
        let m = reflect_actor(&AgentId::new("bob"));
        assert_eq!(m.contents.to_string(), "actor bob.");
        assert_eq!(m.author(), &AgentId::new("bob"));
        assert_ne!(m, reflect_actor(&AgentId::new("amy")));
        let den = lang::eval(&extract(&[m]), DEFAULT_STEP_BOUND);
        let truths: Vec<String> = den.trues.iter().map(ToString::to_string).collect();
        assert_eq!(truths, ["actor bob", "bob says (actor bob)"]);
    }

    #[test]
    fn payload_shape() {
        let action = example_action();
        let p = payload(&action);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0], action.basis);
        assert_eq!(p[1], reflect_actor(&action.actor));
        let bare = Action {
            extra: vec![],
            ..action
        };
        assert_eq!(payload(&bare).len(), 2);
    }

    #[test]
    fn example_action_is_invalid_but_effectful() {
        let action = example_action();
        assert!(!dec_valid_act(&action));
        assert_eq!(
            enum_effects_of(&action),
            [Effect {
                affector: AgentId::new("bob"),
                verb: Verb::Reads,
                variable: Fact::leaf("data1")
            }]
        );
    }

    #[test]
    fn effect_shape_is_exact() {
        assert!(Effect::from_fact(&Fact::parse("bob reads data1").unwrap()).is_some());
        assert!(Effect::from_fact(&Fact::parse("bob reads data1 twice").unwrap()).is_none());
        assert!(Effect::from_fact(&Fact::parse("bob deletes data1").unwrap()).is_none());
        assert!(Effect::from_fact(&Fact::parse("bob (reads) data1").unwrap()).is_none());
    }

    #[test]
    fn permission_criteria() {
        let action = example_action();
        let config = StaticConfig {
            stated: payload(&action),
            agreed: vec![action.basis.clone()],
        };
        let b = dec_permitted(&config, &action).unwrap();
        assert!(!b.valid_act && b.sourced && b.based && !b.permitted);
        assert_eq!(b.error_facts, [Fact::error()]);

        let fine = Action {
            extra: vec![],
            ..action.clone()
        };
        let b = dec_permitted(&config, &fine).unwrap();
        assert!(b.permitted);

        let unagreed = StaticConfig {
            stated: payload(&action),
            agreed: vec![],
        };
        let b = dec_permitted(&unagreed, &fine).unwrap();
        assert!(b.valid_act && b.sourced && !b.based && !b.permitted);

        let unstated = StaticConfig {
            stated: vec![],
            agreed: vec![action.basis.clone()],
        };
        let b = dec_permitted(&unstated, &fine).unwrap();
        assert!(!b.sourced);
        assert_eq!(b.unsourced, [MessageId::new("amy", 1)]);
    }

    struct Unsure(Vec<Message>);

    impl ConfigView for Unsure {
        fn is_stated(&self, _: &Message) -> Option<bool> {
            None
        }
        fn agreed(&self) -> &[Message] {
            &self.0
        }
    }

    #[test]
    fn undecidable_statedness_is_an_error() {
        let err = dec_permitted(&Unsure(vec![]), &example_action()).unwrap_err();
        assert_eq!(err, UnknownStatedness(MessageId::new("amy", 1)));
    }

    #[test]
    fn extraction_matches_handwritten_policy() {
        let extracted = extract(&[msg("amy 1", "error if bob reads data1.")]);
        assert_eq!(
            extracted.to_string(),
            "error if bob reads data1.\namy says error if bob reads data1."
        );
        assert!(extract(&[]).is_empty());
    }

    #[test]
    fn messages_serialise_as_text() {
        let m = msg("st-antonius 2", "authorise read of ((st-antonius patients-2024) patients) for (amy count-patients) by st-antonius.");
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains(r#""author":"st-antonius","seq":2"#), "{json}");
        let back: Message = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.id, m.id);
    }
}
