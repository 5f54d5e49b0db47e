//! Well-founded semantics by the alternating fixpoint.
//!
//! `gamma(I)` is the least model of the policy where `not a` holds iff `a` is
//! not in `I`. Starting from `A = {}`, the evaluator alternates
//! `U = gamma(A)` and `A' = gamma(U)` until `A` stops growing. Then `A` holds the
//! true facts and `U \ A` the unknown ones. Each `gamma` runs semi-naively.

mod arena;
mod compile;
mod free;

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::rule::{Policy, Sign};
use crate::term::Fact;
use arena::{Arena, Id};
use compile::{instantiate, matches, resolve, Check, CompiledRule, Pat, Plan};

/// Inference steps allowed by default before a policy is trivialised.
pub const DEFAULT_STEP_BOUND: usize = 30_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Denotation {
    pub trues: BTreeSet<Fact>,
    pub unknowns: BTreeSet<Fact>,
    pub bound_exceeded: bool,
    /// Facts derived across every fixpoint phase.
    pub steps_used: usize,
}

impl Denotation {
    pub fn valid(&self) -> bool {
        !self.trues.contains(&Fact::error())
    }

    pub fn truth(&self, fact: &Fact) -> bool {
        self.trues.contains(fact)
    }

    fn trivial(steps_used: usize) -> Self {
        Denotation {
            trues: BTreeSet::from([Fact::error()]),
            unknowns: BTreeSet::new(),
            bound_exceeded: true,
            steps_used,
        }
    }
}

/// Evaluates `policy`, giving up after `step_bound` derivations.
pub fn eval(policy: &Policy, step_bound: usize) -> Denotation {
    let mut engine = Engine::new(policy, step_bound);
    match engine.alternate() {
        Ok((trues, unknowns)) => Denotation {
            trues: trues.iter().map(|&id| engine.arena.to_fact(id)).collect(),
            unknowns: unknowns
                .iter()
                .map(|&id| engine.arena.to_fact(id))
                .collect(),
            bound_exceeded: false,
            steps_used: engine.steps,
        },
        Err(BoundExceeded) => Denotation::trivial(engine.steps),
    }
}

pub fn eval_default(policy: &Policy) -> Denotation {
    eval(policy, DEFAULT_STEP_BOUND)
}

/// Whether `fact` is true in `policy` (unknown counts as not true).
pub fn truth(policy: &Policy, fact: &Fact) -> bool {
    eval_default(policy).truth(fact)
}

/// Whether `error` is not true in `policy`.
pub fn dec_valid(policy: &Policy) -> bool {
    eval_default(policy).valid()
}

#[derive(Debug)]
struct BoundExceeded;

/// Derived facts in insertion order, indexed for pattern lookup.
#[derive(Default)]
struct Store {
    facts: Vec<Id>,
    position: HashMap<Id, usize>,
    by_arity: HashMap<usize, Vec<usize>>,
    by_child: HashMap<(usize, usize, Id), Vec<usize>>,
}

impl Store {
    fn contains(&self, id: Id) -> bool {
        self.position.contains_key(&id)
    }

    fn insert(&mut self, id: Id, arena: &Arena) {
        let at = self.facts.len();
        self.facts.push(id);
        self.position.insert(id, at);
        if let Some(children) = arena.children(id) {
            self.by_arity.entry(children.len()).or_default().push(at);
            for (k, &child) in children.iter().enumerate() {
                self.by_child
                    .entry((children.len(), k, child))
                    .or_default()
                    .push(at);
            }
        }
    }

    /// Positions in `[lo, hi)` of facts that may match `pat`.
    fn candidates(
        &self,
        pat: &Pat,
        subst: &[Option<Id>],
        arena: &Arena,
        lo: usize,
        hi: usize,
    ) -> Candidates<'_> {
        if let Some(ground) = resolve(pat, subst, arena) {
            return match ground.and_then(|id| self.position.get(&id)) {
                Some(&at) if (lo..hi).contains(&at) => Candidates::One(at),
                _ => Candidates::Slice(&[]),
            };
        }
        let list: &[usize] = match pat {
            Pat::Node(children) => {
                let arity = children.len();
                let mut best = self.by_arity.get(&arity).map_or(&[][..], Vec::as_slice);
                for (k, child) in children.iter().enumerate() {
                    if let Some(ground) = resolve(child, subst, arena) {
                        let list = ground
                            .and_then(|id| self.by_child.get(&(arity, k, id)))
                            .map_or(&[][..], Vec::as_slice);
                        if list.len() < best.len() {
                            best = list;
                        }
                    }
                }
                best
            }
            _ => return Candidates::Range(lo, hi),
        };
        let start = list.partition_point(|&p| p < lo);
        let end = list.partition_point(|&p| p < hi);
        Candidates::Slice(&list[start..end])
    }
}

enum Candidates<'a> {
    One(usize),
    Range(usize, usize),
    Slice(&'a [usize]),
}

impl Candidates<'_> {
    fn positions(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            Candidates::One(at) => Box::new(std::iter::once(*at)),
            Candidates::Range(lo, hi) => Box::new(*lo..*hi),
            Candidates::Slice(list) => Box::new(list.iter().copied()),
        }
    }
}

struct Engine {
    arena: Arena,
    rules: Vec<CompiledRule>,
    steps: usize,
    bound: usize,
}

/// Everything a join over one rule and one plan needs.
struct Join<'a> {
    store: &'a Store,
    neg: &'a Store,
    rule: &'a CompiledRule,
    plan: &'a Plan,
    /// Ranges per positive atom index.
    ranges: Vec<(usize, usize)>,
}

impl Engine {
    fn new(policy: &Policy, bound: usize) -> Self {
        let mut arena = Arena::default();
        let rules = policy
            .rules()
            .iter()
            .map(|r| compile::compile(r, &mut arena))
            .collect();
        Engine {
            arena,
            rules,
            steps: 0,
            bound,
        }
    }

    fn alternate(&mut self) -> Result<(Vec<Id>, Vec<Id>), BoundExceeded> {
        let mut lower = Store::default();
        loop {
            let upper = self.gamma(&lower)?;
            let next = self.gamma(&upper)?;
            // next ⊆ upper; equality means upper is itself a fixpoint, with nothing unknown.
            if next.facts.len() == upper.facts.len() {
                return Ok((next.facts, Vec::new()));
            }
            if next.facts.len() == lower.facts.len() {
                let unknowns = upper
                    .facts
                    .iter()
                    .copied()
                    .filter(|&id| !lower.contains(id))
                    .collect();
                return Ok((lower.facts, unknowns));
            }
            lower = next;
        }
    }

    /// Least model with negation read against `neg`.
    fn gamma(&mut self, neg: &Store) -> Result<Store, BoundExceeded> {
        let mut store = Store::default();
        let mut sink = Sink::default();
        let rules = std::mem::take(&mut self.rules);
        let result = (|| {
            for rule in rules.iter().filter(|r| r.pos.is_empty()) {
                let join = Join {
                    store: &store,
                    neg,
                    rule,
                    plan: &rule.plans[0],
                    ranges: vec![],
                };
                self.run(&join, &mut sink)?;
            }
            let (mut lo, mut hi) = (0, self.absorb(&mut store, &mut sink));
            while lo < hi {
                for rule in rules.iter().filter(|r| !r.pos.is_empty()) {
                    for plan in &rule.plans {
                        let delta = plan.order[0];
                        let ranges = (0..rule.pos.len())
                            .map(|q| match q.cmp(&delta) {
                                std::cmp::Ordering::Less => (0, lo),
                                std::cmp::Ordering::Equal => (lo, hi),
                                std::cmp::Ordering::Greater => (0, hi),
                            })
                            .collect();
                        let join = Join {
                            store: &store,
                            neg,
                            rule,
                            plan,
                            ranges,
                        };
                        self.run(&join, &mut sink)?;
                    }
                }
                lo = hi;
                hi = self.absorb(&mut store, &mut sink);
            }
            Ok(())
        })();
        self.rules = rules;
        result.map(|()| store)
    }

    fn absorb(&self, store: &mut Store, sink: &mut Sink) -> usize {
        sink.seen.clear();
        for id in sink.pending.drain(..) {
            store.insert(id, &self.arena);
        }
        store.facts.len()
    }

    fn run(&mut self, join: &Join<'_>, sink: &mut Sink) -> Result<(), BoundExceeded> {
        let mut subst = vec![None; join.rule.slots];
        if !self.checks_hold(join, &join.plan.pre, &subst) {
            return Ok(());
        }
        self.extend(join, 0, &mut subst, sink)
    }

    fn extend(
        &mut self,
        join: &Join<'_>,
        step: usize,
        subst: &mut Vec<Option<Id>>,
        sink: &mut Sink,
    ) -> Result<(), BoundExceeded> {
        let Some(&atom) = join.plan.order.get(step) else {
            return self.fire(join, subst, sink);
        };
        let (lo, hi) = join.ranges[atom];
        let pat = &join.rule.pos[atom];
        let positions: Vec<usize> = join
            .store
            .candidates(pat, subst, &self.arena, lo, hi)
            .positions()
            .collect();
        let mut trail = Vec::new();
        for at in positions {
            let id = join.store.facts[at];
            if matches(pat, id, subst, &mut trail, &self.arena)
                && self.checks_hold(join, &join.plan.after[step], subst)
            {
                self.extend(join, step + 1, subst, sink)?;
            }
            for slot in trail.drain(..) {
                subst[slot] = None;
            }
        }
        Ok(())
    }

    fn fire(
        &mut self,
        join: &Join<'_>,
        subst: &[Option<Id>],
        sink: &mut Sink,
    ) -> Result<(), BoundExceeded> {
        if !join.plan.leftover.is_empty() {
            let checks: Vec<&Check> = join
                .plan
                .leftover
                .iter()
                .map(|&i| &join.rule.checks[i])
                .collect();
            let neg = join.neg;
            if !free::satisfiable(&checks, subst, &mut self.arena, &|id| neg.contains(id)) {
                return Ok(());
            }
        }
        let head = instantiate(&join.rule.head, subst, &mut self.arena)
            .expect("safe rules bind every head variable");
        if !join.store.contains(head) && sink.seen.insert(head) {
            self.steps += 1;
            if self.steps > self.bound {
                return Err(BoundExceeded);
            }
            sink.pending.push(head);
        }
        Ok(())
    }

    /// Runs checks whose variables are all bound.
    fn checks_hold(&mut self, join: &Join<'_>, which: &[usize], subst: &[Option<Id>]) -> bool {
        which.iter().all(|&i| match &join.rule.checks[i] {
            Check::NegTrue(pat) => match resolve(pat, subst, &self.arena).expect("bound") {
                Some(id) => !join.neg.contains(id),
                None => true,
            },
            Check::Same(sign, pats) => {
                let ids = self.ground_all(pats, subst);
                let all_same = ids.iter().all(|&id| id == ids[0]);
                all_same == (*sign == Sign::Pos)
            }
            Check::Diff(sign, pats) => {
                let ids = self.ground_all(pats, subst);
                let distinct = ids
                    .iter()
                    .enumerate()
                    .all(|(i, id)| !ids[i + 1..].contains(id));
                distinct == (*sign == Sign::Pos)
            }
        })
    }

    fn ground_all(&mut self, pats: &[Pat], subst: &[Option<Id>]) -> Vec<Id> {
        pats.iter()
            .map(|p| instantiate(p, subst, &mut self.arena).expect("bound"))
            .collect()
    }
}

/// Facts derived in the current round, not yet visible to joins.
#[derive(Default)]
struct Sink {
    pending: Vec<Id>,
    seen: HashSet<Id>,
}

#[cfg(test)]
mod tests;
