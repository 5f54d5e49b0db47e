use indexmap::IndexSet;

use crate::model::{payload, Action, AgentId, ConfigView, Message};

/// Enacted actions, stated messages and the current agreements.
///
/// `stated` is kept closed under enacted payloads.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub enacted: IndexSet<Action>,
    pub stated: IndexSet<Message>,
    pub agreed: Vec<Message>,
}

impl Config {
    pub fn state(&mut self, message: Message) {
        self.stated.insert(message);
    }

    pub fn enact(&mut self, action: Action) {
        for message in payload(&action) {
            self.stated.insert(message);
        }
        self.enacted.insert(action);
    }

    pub fn agree(&mut self, messages: Vec<Message>) {
        self.agreed = messages;
    }
}

impl ConfigView for Config {
    fn is_stated(&self, message: &Message) -> Option<bool> {
        Some(self.stated.contains(message))
    }

    fn agreed(&self) -> &[Message] {
        &self.agreed
    }
}

/// Which agent may replace the agreements, and whether prohibited
/// enactments are refused outright.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub administrator: AgentId,
    pub strict: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            administrator: AgentId::new("consortium"),
            strict: false,
        }
    }
}
