//! Rules lowered to slot-indexed patterns with per-position join plans.

use std::collections::HashMap;

use super::arena::{Arena, Id, Term};
use crate::rule::{CondKind, Rule, Sign};
use crate::term::Atom;

#[derive(Clone, Debug)]
pub(crate) enum Pat {
    Const(Id),
    Var(usize),
    Node(Vec<Pat>),
}

impl Pat {
    fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Pat::Const(_) => {}
            Pat::Var(slot) => out.push(*slot),
            Pat::Node(children) => children.iter().for_each(|c| c.vars(out)),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Check {
    NegTrue(Pat),
    Same(Sign, Vec<Pat>),
    Diff(Sign, Vec<Pat>),
}

impl Check {
    fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        match self {
            Check::NegTrue(p) => p.vars(&mut out),
            Check::Same(_, ps) | Check::Diff(_, ps) => ps.iter().for_each(|p| p.vars(&mut out)),
        }
        out
    }
}

/// Join order for one choice of the delta atom.
#[derive(Clone, Debug, Default)]
pub(crate) struct Plan {
    /// Indices into `CompiledRule::pos`; `order[0]` is the delta atom.
    pub order: Vec<usize>,
    /// Checks runnable before any atom is matched.
    pub pre: Vec<usize>,
    /// `after[j]`: checks whose variables are all bound once `order[j]` matched.
    pub after: Vec<Vec<usize>>,
    /// Checks mentioning variables no positive atom binds.
    pub leftover: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledRule {
    pub head: Pat,
    pub pos: Vec<Pat>,
    pub checks: Vec<Check>,
    pub slots: usize,
    /// One plan per positive atom; a single plan with empty order if there are none.
    pub plans: Vec<Plan>,
}

struct Slots<'a>(HashMap<&'a str, usize>);

impl<'a> Slots<'a> {
    fn compile(&mut self, atom: &'a Atom, arena: &mut Arena) -> Pat {
        if let Some(fact) = atom.to_fact() {
            return Pat::Const(arena.intern_fact(&fact));
        }
        match atom {
            Atom::Var(name) => {
                let next = self.0.len();
                Pat::Var(*self.0.entry(name).or_insert(next))
            }
            Atom::Node(children) => {
                Pat::Node(children.iter().map(|c| self.compile(c, arena)).collect())
            }
            Atom::Lit(_) => unreachable!("literals are ground"),
        }
    }
}

pub(crate) fn compile(rule: &Rule, arena: &mut Arena) -> CompiledRule {
    let mut slots = Slots(HashMap::new());
    let mut pos = Vec::new();
    let mut checks = Vec::new();
    // Positive atoms first so their variables get the low slots.
    for cond in &rule.body {
        if let (Sign::Pos, CondKind::True(atom)) = (cond.sign, &cond.kind) {
            pos.push(slots.compile(atom, arena));
        }
    }
    for cond in &rule.body {
        let check = match (&cond.sign, &cond.kind) {
            (Sign::Pos, CondKind::True(_)) => continue,
            (Sign::Neg, CondKind::True(atom)) => Check::NegTrue(slots.compile(atom, arena)),
            (sign, CondKind::Same(atoms)) => Check::Same(
                *sign,
                atoms.iter().map(|a| slots.compile(a, arena)).collect(),
            ),
            (sign, CondKind::Diff(atoms)) => Check::Diff(
                *sign,
                atoms.iter().map(|a| slots.compile(a, arena)).collect(),
            ),
        };
        checks.push(check);
    }
    let head = slots.compile(&rule.head, arena);
    let slots = slots.0.len();
    let plans = if pos.is_empty() {
        vec![plan(&[], &pos, &checks)]
    } else {
        (0..pos.len())
            .map(|first| plan(&greedy_order(first, &pos), &pos, &checks))
            .collect()
    };
    CompiledRule {
        head,
        pos,
        checks,
        slots,
        plans,
    }
}

/// Starting from `first`, repeatedly picks the atom with the fewest unbound
/// variables (ties broken by body order).
fn greedy_order(first: usize, pos: &[Pat]) -> Vec<usize> {
    let var_sets: Vec<Vec<usize>> = pos
        .iter()
        .map(|p| {
            let mut v = Vec::new();
            p.vars(&mut v);
            v
        })
        .collect();
    let mut bound: Vec<usize> = var_sets[first].clone();
    let mut order = vec![first];
    while order.len() < pos.len() {
        let next = (0..pos.len())
            .filter(|i| !order.contains(i))
            .min_by_key(|&i| var_sets[i].iter().filter(|v| !bound.contains(v)).count())
            .unwrap();
        bound.extend(&var_sets[next]);
        order.push(next);
    }
    order
}

fn plan(order: &[usize], pos: &[Pat], checks: &[Check]) -> Plan {
    let mut bound = Vec::new();
    let mut placed = vec![false; checks.len()];
    let ready = |bound: &Vec<usize>, placed: &mut Vec<bool>| -> Vec<usize> {
        let mut out = Vec::new();
        for (i, check) in checks.iter().enumerate() {
            if !placed[i] && check.vars().iter().all(|v| bound.contains(v)) {
                placed[i] = true;
                out.push(i);
            }
        }
        out
    };
    let pre = ready(&bound, &mut placed);
    let mut after = Vec::new();
    for &atom in order {
        pos[atom].vars(&mut bound);
        after.push(ready(&bound, &mut placed));
    }
    let leftover = (0..checks.len()).filter(|&i| !placed[i]).collect();
    Plan {
        order: order.to_vec(),
        pre,
        after,
        leftover,
    }
}

/// Instantiates a pattern whose variables are all bound, interning as needed.
pub(crate) fn instantiate(pat: &Pat, subst: &[Option<Id>], arena: &mut Arena) -> Option<Id> {
    match pat {
        Pat::Const(id) => Some(*id),
        Pat::Var(slot) => subst[*slot],
        Pat::Node(children) => {
            let ids = children
                .iter()
                .map(|c| instantiate(c, subst, arena))
                .collect::<Option<Box<[Id]>>>()?;
            Some(arena.intern(Term::Node(ids)))
        }
    }
}

/// Like [`instantiate`] but without interning.
///
/// `Some(None)` means the pattern is ground but names a term the arena has
/// never seen (so it cannot be a known fact); `None` means a variable is unbound.
pub(crate) fn resolve(pat: &Pat, subst: &[Option<Id>], arena: &Arena) -> Option<Option<Id>> {
    match pat {
        Pat::Const(id) => Some(Some(*id)),
        Pat::Var(slot) => subst[*slot].map(Some),
        Pat::Node(children) => {
            let mut ids = Vec::with_capacity(children.len());
            let mut known = true;
            for child in children {
                match resolve(child, subst, arena)? {
                    Some(id) => ids.push(id),
                    None => known = false,
                }
            }
            Some(if known {
                arena.lookup(&Term::Node(ids.into()))
            } else {
                None
            })
        }
    }
}

/// Matches `pat` against fact `id`, binding variables and recording them in `trail`.
pub(crate) fn matches(
    pat: &Pat,
    id: Id,
    subst: &mut [Option<Id>],
    trail: &mut Vec<usize>,
    arena: &Arena,
) -> bool {
    match pat {
        Pat::Const(c) => *c == id,
        Pat::Var(slot) => match subst[*slot] {
            Some(bound) => bound == id,
            None => {
                subst[*slot] = Some(id);
                trail.push(*slot);
                true
            }
        },
        Pat::Node(children) => match arena.children(id) {
            Some(kids) if kids.len() == children.len() => children
                .iter()
                .zip(kids.iter())
                .all(|(p, &k)| matches(p, k, subst, trail, arena)),
            _ => false,
        },
    }
}
