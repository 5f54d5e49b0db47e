//! Hash-consed ground terms. Equal facts share one id.

use std::collections::HashMap;

use crate::term::Fact;

pub(crate) type Id = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Term {
    Leaf(Box<str>),
    Node(Box<[Id]>),
}

#[derive(Default)]
pub(crate) struct Arena {
    terms: Vec<Term>,
    ids: HashMap<Term, Id>,
}

impl Arena {
    pub fn intern(&mut self, term: Term) -> Id {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = Id::try_from(self.terms.len()).expect("term arena overflow");
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }

    pub fn lookup(&self, term: &Term) -> Option<Id> {
        self.ids.get(term).copied()
    }

    pub fn get(&self, id: Id) -> &Term {
        &self.terms[id as usize]
    }

    /// Children of a node, or `None` for a leaf.
    pub fn children(&self, id: Id) -> Option<&[Id]> {
        match self.get(id) {
            Term::Node(children) => Some(children),
            Term::Leaf(_) => None,
        }
    }

    pub fn intern_fact(&mut self, fact: &Fact) -> Id {
        let term = match fact {
            Fact::Leaf(text) => Term::Leaf(text.as_str().into()),
            Fact::Node(children) => {
                Term::Node(children.iter().map(|c| self.intern_fact(c)).collect())
            }
        };
        self.intern(term)
    }

    pub fn to_fact(&self, id: Id) -> Fact {
        match self.get(id) {
            Term::Leaf(text) => Fact::Leaf(text.to_string()),
            Term::Node(children) => Fact::Node(children.iter().map(|&c| self.to_fact(c)).collect()),
        }
    }
}
