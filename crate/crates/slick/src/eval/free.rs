//! Checks that mention variables no positive atom binds.
//!
//! Such a variable is existentially quantified over all facts. Positive
//! `same` lists are unified, each negative `diff` list picks one pair to
//! unify, and every variable still free afterwards is read as a fresh fact
//! that is equal only to itself and true nowhere. Every other check prefers
//! distinct values, so this choice is the most permissive one.

use super::arena::{Arena, Id, Term};
use super::compile::{Check, Pat};
use crate::rule::Sign;

#[derive(Clone, Debug, PartialEq, Eq)]
enum U {
    Ground(Id),
    Free(usize),
    Node(Vec<U>),
}

struct Unifier<'a> {
    arena: &'a mut Arena,
    bindings: Vec<Option<U>>,
}

fn lift(pat: &Pat, subst: &[Option<Id>]) -> U {
    match pat {
        Pat::Const(id) => U::Ground(*id),
        Pat::Var(slot) => subst[*slot].map_or(U::Free(*slot), U::Ground),
        Pat::Node(children) => U::Node(children.iter().map(|c| lift(c, subst)).collect()),
    }
}

impl Unifier<'_> {
    fn walk(&self, u: &U) -> U {
        match u {
            U::Free(slot) => match &self.bindings[*slot] {
                Some(target) => self.walk(target),
                None => u.clone(),
            },
            _ => u.clone(),
        }
    }

    /// Fully substitutes and collapses variable-free nodes to ground ids.
    fn resolve(&mut self, u: &U) -> U {
        match self.walk(u) {
            U::Node(children) => {
                let children: Vec<U> = children.iter().map(|c| self.resolve(c)).collect();
                let ids: Option<Box<[Id]>> = children
                    .iter()
                    .map(|c| {
                        if let U::Ground(id) = c {
                            Some(*id)
                        } else {
                            None
                        }
                    })
                    .collect();
                match ids {
                    Some(ids) => U::Ground(self.arena.intern(Term::Node(ids))),
                    None => U::Node(children),
                }
            }
            other => other,
        }
    }

    fn occurs(&self, slot: usize, u: &U) -> bool {
        match self.walk(u) {
            U::Free(s) => s == slot,
            U::Ground(_) => false,
            U::Node(children) => children.iter().any(|c| self.occurs(slot, c)),
        }
    }

    fn unify(&mut self, a: &U, b: &U) -> bool {
        let (a, b) = (self.walk(a), self.walk(b));
        match (&a, &b) {
            (U::Free(x), U::Free(y)) if x == y => true,
            (U::Free(x), other) | (other, U::Free(x)) => {
                if self.occurs(*x, other) {
                    return false;
                }
                self.bindings[*x] = Some(other.clone());
                true
            }
            (U::Ground(x), U::Ground(y)) => x == y,
            (U::Ground(x), U::Node(ys)) | (U::Node(ys), U::Ground(x)) => {
                match self.arena.children(*x) {
                    Some(kids) if kids.len() == ys.len() => {
                        let kids: Vec<U> = kids.iter().map(|&k| U::Ground(k)).collect();
                        kids.iter().zip(ys).all(|(k, y)| self.unify(k, y))
                    }
                    _ => false,
                }
            }
            (U::Node(xs), U::Node(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
        }
    }
}

/// Decides whether some assignment of the unbound variables satisfies every
/// check in `checks`. `holds(id)` reports whether a ground fact is in the
/// interpretation negative conditions are read against.
pub(crate) fn satisfiable(
    checks: &[&Check],
    subst: &[Option<Id>],
    arena: &mut Arena,
    holds: &dyn Fn(Id) -> bool,
) -> bool {
    let mut unifier = Unifier {
        arena,
        bindings: vec![None; subst.len()],
    };
    for check in checks {
        if let Check::Same(Sign::Pos, pats) = check {
            let first = lift(&pats[0], subst);
            if !pats[1..]
                .iter()
                .all(|p| unifier.unify(&first, &lift(p, subst)))
            {
                return false;
            }
        }
    }
    let choices: Vec<Vec<U>> = checks
        .iter()
        .filter_map(|c| match c {
            Check::Diff(Sign::Neg, pats) => Some(pats.iter().map(|p| lift(p, subst)).collect()),
            _ => None,
        })
        .collect();
    branch(&mut unifier, &choices, checks, subst, holds)
}

fn branch(
    unifier: &mut Unifier<'_>,
    choices: &[Vec<U>],
    checks: &[&Check],
    subst: &[Option<Id>],
    holds: &dyn Fn(Id) -> bool,
) -> bool {
    let Some((terms, rest)) = choices.split_first() else {
        return finish(unifier, checks, subst, holds);
    };
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let saved = unifier.bindings.clone();
            if unifier.unify(&terms[i], &terms[j]) && branch(unifier, rest, checks, subst, holds) {
                return true;
            }
            unifier.bindings = saved;
        }
    }
    false
}

fn finish(
    unifier: &mut Unifier<'_>,
    checks: &[&Check],
    subst: &[Option<Id>],
    holds: &dyn Fn(Id) -> bool,
) -> bool {
    for check in checks {
        let ok = match check {
            Check::Same(Sign::Pos, _) | Check::Diff(Sign::Neg, _) => true,
            Check::NegTrue(pat) => match unifier.resolve(&lift(pat, subst)) {
                U::Ground(id) => !holds(id),
                _ => true,
            },
            Check::Same(Sign::Neg, pats) => {
                let terms: Vec<U> = pats
                    .iter()
                    .map(|p| unifier.resolve(&lift(p, subst)))
                    .collect();
                terms.iter().any(|t| *t != terms[0])
            }
            Check::Diff(Sign::Pos, pats) => {
                let terms: Vec<U> = pats
                    .iter()
                    .map(|p| unifier.resolve(&lift(p, subst)))
                    .collect();
                terms
                    .iter()
                    .enumerate()
                    .all(|(i, t)| terms[i + 1..].iter().all(|u| u != t))
            }
        };
        if !ok {
            return false;
        }
    }
    true
}
