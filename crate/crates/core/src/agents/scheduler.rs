//! Round-robin execution of a scenario against a fresh engine.

use std::fmt;

use super::{AgentRunner, Expectations, Observation, Output, ScenarioSpec};
use crate::dataplane::{placeholder, Access, AccessRequest};
use crate::model::{AgentId, Message};
use crate::runtime::{Engine, Entry, Outcome, Settings, Update};

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Agents whose scripts never run. They still receive gossip.
    pub disabled: Vec<AgentId>,
    pub strict: bool,
    /// Rounds allowed before giving up.
    pub round_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            disabled: vec![],
            strict: false,
            round_cap: 1000,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("no quiescence after {rounds} rounds")]
    NonTermination { rounds: usize },
    #[error("unknown agent `{0}`")]
    UnknownAgent(AgentId),
}

/// Counts over a finished trace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub statements: usize,
    pub enactments: usize,
    pub permitted: usize,
    pub prohibited: usize,
    pub grants: usize,
    pub denials: usize,
    pub rejections: usize,
    pub events: usize,
    /// `(agent, label)` of reactions that never fired.
    pub pending: Vec<(AgentId, String)>,
}

impl RunSummary {
    pub fn from_trace(engine: &Engine) -> Self {
        let mut s = RunSummary {
            events: engine.trace.len(),
            ..RunSummary::default()
        };
        for event in &engine.trace {
            match &event.entry {
                Entry::Control(record) => {
                    let applied = record.outcome == Outcome::Applied;
                    match &record.update {
                        Update::State { .. } if applied => s.statements += 1,
                        Update::Enact { .. } => {
                            s.enactments += applied as usize;
                            match &record.permission {
                                Some(p) if p.permitted => s.permitted += applied as usize,
                                Some(_) => s.prohibited += 1,
                                None => {}
                            }
                        }
                        _ => {}
                    }
                    s.rejections += !applied as usize;
                }
                Entry::DataPlane(record) if record.outcome.is_granted() => s.grants += 1,
                Entry::DataPlane(_) => s.denials += 1,
            }
        }
        s
    }

    /// Mismatches against `expect`, one line each.
    pub fn mismatches(&self, expect: &Expectations) -> Vec<String> {
        let checks = [
            ("statements", expect.statements, self.statements),
            ("enactments", expect.enactments, self.enactments),
            ("permitted", expect.permitted, self.permitted),
            ("grants", expect.grants, self.grants),
            ("denials", expect.denials, self.denials),
        ];
        checks
            .into_iter()
            .filter_map(|(name, want, got)| match want {
                Some(want) if want != got => Some(format!("{name}: expected {want}, got {got}")),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "events      {}", self.events)?;
        writeln!(f, "statements  {}", self.statements)?;
        writeln!(
            f,
            "enactments  {} ({} permitted, {} prohibited)",
            self.enactments, self.permitted, self.prohibited
        )?;
        writeln!(
            f,
            "accesses    {} granted, {} denied",
            self.grants, self.denials
        )?;
        write!(f, "rejections  {}", self.rejections)?;
        for (agent, label) in &self.pending {
            write!(f, "\npending     {agent}: {label}")?;
        }
        Ok(())
    }
}

pub struct RunResult {
    pub engine: Engine,
    pub summary: RunSummary,
}

/// Runs `spec` until every agent is quiet and the agreement program is used up.
pub fn run_scenario(spec: &ScenarioSpec, options: &RunOptions) -> Result<RunResult, RunError> {
    for agent in &options.disabled {
        if !spec.agents.contains(agent) {
            return Err(RunError::UnknownAgent(agent.clone()));
        }
    }
    let settings = Settings {
        administrator: spec.administrator.clone(),
        strict: options.strict,
    };
    let mut engine = Engine::new(settings);
    let mut runners: Vec<AgentRunner> = spec
        .scripts
        .iter()
        .filter(|s| !options.disabled.contains(&s.agent))
        .map(|s| AgentRunner::new(s.clone()))
        .collect();

    let mut program = spec.program.iter();
    if let Some(first) = program.next() {
        agree(&mut engine, spec, first);
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > options.round_cap {
            return Err(RunError::NonTermination {
                rounds: options.round_cap,
            });
        }
        let mut active = false;
        for runner in &mut runners {
            let fired = {
                let view: Vec<&Message> = engine.state.view(runner.agent()).collect();
                let obs = Observation {
                    view,
                    agreed: &engine.state.config.agreed,
                    enacted: &engine.state.config.enacted,
                    store: &engine.store,
                    peers: &spec.agents,
                };
                runner.step(&obs)
            };
            for (label, outputs) in fired {
                active = true;
                for output in outputs {
                    perform(&mut engine, runner, &label, output);
                }
            }
        }
        if !active {
            match program.next() {
                Some(step) => agree(&mut engine, spec, step),
                None => break,
            }
        }
    }
    let mut summary = RunSummary::from_trace(&engine);
    for runner in &runners {
        summary.pending.extend(
            runner
                .pending()
                .map(|l| (runner.agent().clone(), l.to_string())),
        );
    }
    Ok(RunResult { engine, summary })
}

fn perform(engine: &mut Engine, runner: &mut AgentRunner, label: &str, output: Output) {
    let me = runner.agent().clone();
    match output {
        Output::Update(update) => {
            let enact = matches!(update, Update::Enact { .. });
            let event = engine.submit(&me, update);
            let applied = matches!(&event.entry, Entry::Control(r) if r.outcome.is_applied());
            if enact && applied {
                let index = event.index;
                runner.record_enactment(label, index);
            }
        }
        Output::Access {
            access,
            variable,
            action,
        } => {
            let action_ref = runner
                .enactment(&action)
                .expect("requests wait for their enactment");
            let content = (access == Access::Write).then(|| placeholder(&variable));
            engine.access(AccessRequest {
                agent: me,
                access,
                variable,
                action_ref,
                content,
            });
        }
    }
}

/// The administrator states any agreement it has not stated yet, shares it
/// with every agent, then installs the list.
fn agree(engine: &mut Engine, spec: &ScenarioSpec, messages: &[Message]) {
    let admin = &spec.administrator;
    for message in messages {
        if message.author() == admin && !engine.state.views_message(admin, message) {
            engine.submit(
                admin,
                Update::State {
                    message: message.clone(),
                },
            );
        }
        for agent in &spec.agents {
            if agent != admin && !engine.state.views_message(agent, message) {
                engine.submit(
                    admin,
                    Update::Gossip {
                        from: admin.clone(),
                        to: agent.clone(),
                        message: message.clone(),
                    },
                );
            }
        }
    }
    engine.submit(
        admin,
        Update::Agree {
            messages: messages.to_vec(),
        },
    );
}
