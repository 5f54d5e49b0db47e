//! The only module that touches the policy language.
//!
//! Everything above it sees policies through parse, eval, validity,
//! composition and the author reflection below.

pub use slick::{Atom, Denotation, Fact, Policy, PolicyError, Rule, DEFAULT_STEP_BOUND};

pub fn parse(text: &str) -> Result<Policy, PolicyError> {
    slick::parse_policy(text)
}

pub fn eval(policy: &Policy, step_bound: usize) -> Denotation {
    slick::eval(policy, step_bound)
}

pub fn valid(policy: &Policy, step_bound: usize) -> bool {
    eval(policy, step_bound).valid()
}

pub fn compose(p1: &Policy, p2: &Policy) -> Policy {
    slick::compose(p1, p2)
}

/// Pushes the head under `author says`, leaving the body alone.
pub fn reflect_author(rule: &Rule, author: &Fact) -> Rule {
    Rule {
        head: Atom::node([Atom::from(author), Atom::lit("says"), rule.head.clone()]),
        body: rule.body.clone(),
    }
}

/// A single unconditional rule.
pub fn fact_policy(fact: &Fact) -> Policy {
    Policy::from_rules(vec![Rule {
        head: Atom::from(fact),
        body: vec![],
    }])
    .expect("ground rules are safe")
}
