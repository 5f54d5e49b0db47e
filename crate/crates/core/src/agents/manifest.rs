//! Scenario manifests (TOML) and the Slick files they name.
//!
//! A message id such as `st-antonius 3` names the file `st-antonius_3.slick`,
//! looked up first next to the manifest and then in the shared `library`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{
    AgentScript, BasisSelector, Expectations, ExtraSelector, Reaction, ReactionRule, Recipients,
    ScenarioSpec, Trigger,
};
use crate::dataplane::Access;
use crate::lang::Fact;
use crate::model::{AgentId, Message, MessageId};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("no scenario named `{0}`")]
    NoScenario(String),
    #[error("no Slick file for message `{0}`")]
    NoMessage(String),
    #[error("{name}: {source}")]
    Toml {
        name: String,
        source: toml::de::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where manifests and Slick files come from.
pub trait Source {
    fn manifest(&self, scenario: &str) -> Result<String, LoadError>;
    fn slick(&self, scenario: &str, file: &str) -> Result<Option<String>, LoadError>;
}

/// Scenario directories under a common root, with `root/library` shared.
pub struct DirSource {
    pub root: PathBuf,
}

impl Source for DirSource {
    fn manifest(&self, scenario: &str) -> Result<String, LoadError> {
        let path = self.root.join(scenario).join("manifest.toml");
        if !path.is_file() {
            return Err(LoadError::NoScenario(scenario.to_string()));
        }
        Ok(std::fs::read_to_string(path)?)
    }

    fn slick(&self, scenario: &str, file: &str) -> Result<Option<String>, LoadError> {
        for dir in [self.root.join(scenario), self.root.join("library")] {
            let path = dir.join(file);
            if path.is_file() {
                return Ok(Some(std::fs::read_to_string(path)?));
            }
        }
        Ok(None)
    }
}

/// Loads the scenario whose manifest sits in `dir`.
pub fn load_dir(dir: &Path) -> Result<ScenarioSpec, LoadError> {
    let dir = dir.canonicalize()?;
    let name = dir
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| LoadError::Invalid("bad directory".into()))?;
    let root = dir.parent().unwrap_or(Path::new("/")).to_path_buf();
    load(&DirSource { root }, name)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    summary: String,
    #[serde(default)]
    administrator: Option<String>,
    /// Other scenarios whose agents and reactions are merged in first.
    #[serde(default)]
    include: Vec<String>,
    #[serde(default)]
    agents: Vec<String>,
    #[serde(default)]
    agreements: Vec<Vec<String>>,
    #[serde(default)]
    expect: Option<Expectations>,
    #[serde(default, rename = "reaction")]
    reactions: Vec<ReactionSpec>,
}

// `deny_unknown_fields` does not combine with `flatten`.
#[derive(Deserialize)]
struct ReactionSpec {
    agent: String,
    label: String,
    #[serde(default)]
    after: Vec<String>,
    #[serde(default)]
    when: WhenSpec,
    #[serde(flatten)]
    act: ActSpec,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct WhenSpec {
    #[serde(default)]
    truths: Vec<String>,
    #[serde(default)]
    agreement: Option<Vec<String>>,
    #[serde(default)]
    assets: Vec<String>,
    #[serde(default)]
    enacted_by: Vec<String>,
}

#[derive(Deserialize)]
#[serde(
    tag = "do",
    rename_all = "kebab-case",
    rename_all_fields = "kebab-case"
)]
enum ActSpec {
    State {
        message: String,
        #[serde(default)]
        to: Option<ToSpec>,
    },
    Enact {
        #[serde(default)]
        basis: Option<String>,
        #[serde(default)]
        extra: Vec<String>,
        #[serde(default)]
        all_viewed_except: Option<Vec<String>>,
    },
    Gossip {
        messages: Vec<String>,
        to: ToSpec,
    },
    Request {
        access: Access,
        variable: String,
        action: String,
    },
    Forget {
        messages: Vec<String>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ToSpec {
    Keyword(String),
    List(Vec<String>),
}

fn invalid(msg: impl Into<String>) -> LoadError {
    LoadError::Invalid(msg.into())
}

fn slick_file(id: &MessageId) -> String {
    format!("{}_{}.slick", id.author, id.seq)
}

fn agent(name: &str) -> Result<AgentId, LoadError> {
    name.parse().map_err(invalid)
}

fn fact(text: &str) -> Result<Fact, LoadError> {
    Fact::parse(text).map_err(|e| invalid(format!("bad fact `{text}`: {e}")))
}

fn id(text: &str) -> Result<MessageId, LoadError> {
    text.parse().map_err(invalid)
}

fn ids(texts: &[String]) -> Result<Vec<MessageId>, LoadError> {
    texts.iter().map(|t| id(t)).collect()
}

struct Loader<'a> {
    source: &'a dyn Source,
    scenario: String,
}

impl Loader<'_> {
    fn message(&self, text: &str) -> Result<Message, LoadError> {
        let id = id(text)?;
        let file = slick_file(&id);
        let body = self
            .source
            .slick(&self.scenario, &file)?
            .ok_or_else(|| LoadError::NoMessage(text.to_string()))?;
        Message::parse(text, &body).map_err(invalid)
    }

    fn recipients(&self, to: Option<ToSpec>) -> Result<Recipients, LoadError> {
        match to {
            None => Ok(Recipients::All),
            Some(ToSpec::Keyword(k)) if k == "all" => Ok(Recipients::All),
            Some(ToSpec::Keyword(k)) => Err(invalid(format!(
                "bad recipients `{k}`, expected \"all\" or a list"
            ))),
            Some(ToSpec::List(list)) => Ok(Recipients::Only(
                list.iter().map(|a| agent(a)).collect::<Result<_, _>>()?,
            )),
        }
    }

    fn reaction(&self, act: ActSpec) -> Result<Reaction, LoadError> {
        Ok(match act {
            ActSpec::State { message, to } => Reaction::State {
                message: self.message(&message)?,
                to: self.recipients(to)?,
            },
            ActSpec::Enact {
                basis,
                extra,
                all_viewed_except,
            } => {
                let basis = match basis.as_deref() {
                    None | Some("current") => BasisSelector::Current,
                    Some(named) => BasisSelector::Named(id(named)?),
                };
                let extra = match all_viewed_except {
                    Some(except) if extra.is_empty() => {
                        ExtraSelector::AllViewedExcept(ids(&except)?)
                    }
                    Some(_) => return Err(invalid("use either `extra` or `all-viewed-except`")),
                    None => ExtraSelector::Ids(ids(&extra)?),
                };
                Reaction::Enact { basis, extra }
            }
            ActSpec::Gossip { messages, to } => Reaction::Gossip {
                ids: ids(&messages)?,
                to: self.recipients(Some(to))?,
            },
            ActSpec::Request {
                access,
                variable,
                action,
            } => Reaction::Request {
                access,
                variable: fact(&variable)?,
                action,
            },
            ActSpec::Forget { messages } => Reaction::Forget {
                ids: ids(&messages)?,
            },
        })
    }
}

/// Loads `scenario` and everything it includes.
pub fn load(source: &dyn Source, scenario: &str) -> Result<ScenarioSpec, LoadError> {
    let mut spec = ScenarioSpec {
        name: scenario.to_string(),
        summary: String::new(),
        administrator: AgentId::new("consortium"),
        agents: vec![],
        scripts: vec![],
        program: vec![],
        expect: Expectations::default(),
    };
    merge(source, scenario, &mut spec, &mut vec![])?;
    for script in &spec.scripts {
        let mut seen = HashSet::new();
        for rule in &script.reactions {
            seen.insert(rule.label.as_str());
        }
        for rule in &script.reactions {
            for label in rule.after.iter().chain(match &rule.reaction {
                Reaction::Request { action, .. } => Some(action),
                _ => None,
            }) {
                if !seen.contains(label.as_str()) {
                    return Err(invalid(format!(
                        "{}: `{}` refers to unknown label `{label}`",
                        script.agent, rule.label
                    )));
                }
            }
        }
    }
    Ok(spec)
}

/// Merges a manifest into `spec`. The including manifest's own settings win;
/// a reaction whose label the agent already has is skipped.
fn merge(
    source: &dyn Source,
    scenario: &str,
    spec: &mut ScenarioSpec,
    stack: &mut Vec<String>,
) -> Result<(), LoadError> {
    if stack.iter().any(|s| s == scenario) {
        return Err(invalid(format!("include cycle through `{scenario}`")));
    }
    stack.push(scenario.to_string());
    let text = source.manifest(scenario)?;
    let manifest: Manifest = toml::from_str(&text).map_err(|source| LoadError::Toml {
        name: scenario.to_string(),
        source,
    })?;
    for inner in &manifest.include {
        merge(source, inner, spec, stack)?;
    }
    let loader = Loader {
        source,
        scenario: scenario.to_string(),
    };
    let is_top = stack.len() == 1;
    if is_top || spec.summary.is_empty() {
        spec.summary = manifest.summary.clone();
    }
    if let Some(admin) = &manifest.administrator {
        spec.administrator = agent(admin)?;
    }
    if !manifest.agreements.is_empty() {
        spec.program = manifest
            .agreements
            .iter()
            .map(|step| step.iter().map(|m| loader.message(m)).collect())
            .collect::<Result<_, _>>()?;
    }
    if is_top {
        spec.expect = manifest.expect.unwrap_or_default();
    }
    for name in &manifest.agents {
        let id = agent(name)?;
        if !spec.agents.contains(&id) {
            spec.agents.push(id.clone());
            spec.scripts.push(AgentScript {
                agent: id,
                reactions: vec![],
            });
        }
    }
    for r in manifest.reactions {
        let who = agent(&r.agent)?;
        let script = spec
            .scripts
            .iter_mut()
            .find(|s| s.agent == who)
            .ok_or_else(|| {
                invalid(format!(
                    "{scenario}: reaction `{}` for undeclared agent `{who}`",
                    r.label
                ))
            })?;
        if script.reactions.iter().any(|x| x.label == r.label) {
            continue;
        }
        let trigger = Trigger {
            truths: r
                .when
                .truths
                .iter()
                .map(|t| fact(t))
                .collect::<Result<_, _>>()?,
            agreement: r.when.agreement.as_deref().map(ids).transpose()?,
            assets: r
                .when
                .assets
                .iter()
                .map(|t| fact(t))
                .collect::<Result<_, _>>()?,
            enacted_by: r
                .when
                .enacted_by
                .iter()
                .map(|a| agent(a))
                .collect::<Result<_, _>>()?,
        };
        let reaction = loader.reaction(r.act)?;
        script.reactions.push(ReactionRule {
            label: r.label,
            after: r.after,
            trigger,
            reaction,
        });
    }
    stack.pop();
    Ok(())
}
