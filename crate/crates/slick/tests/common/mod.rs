//! Random program generators and a brute-force oracle for stratified programs.
//!
//! The oracle shares no code with the evaluator: it grounds every rule over
//! the three constants and saturates one predicate stratum at a time.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;

pub const CONSTS: [&str; 3] = ["a", "b", "c"];
pub const VARS: [&str; 3] = ["X", "Y", "Z"];
pub const PREDS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub enum T {
    Var(usize),
    Const(usize),
}

#[derive(Clone, Debug)]
pub struct Lit {
    pub pred: usize,
    pub args: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct StratRule {
    pub head: Lit,
    pub pos: Vec<Lit>,
    pub neg: Vec<Lit>,
    /// Pairs that must differ.
    pub diff: Vec<(T, T)>,
}

/// Predicate `p<i>` sits in stratum `i`: it may use `p<j>` positively for
/// `j <= i` and negatively for `j < i`.
#[derive(Clone, Debug)]
pub struct Program {
    pub arity: [usize; PREDS],
    pub facts: Vec<(usize, Vec<usize>)>,
    pub rules: Vec<StratRule>,
}

fn render_t(t: &T) -> &'static str {
    match t {
        T::Var(v) => VARS[*v],
        T::Const(c) => CONSTS[*c],
    }
}

fn render_lit(lit: &Lit) -> String {
    let mut out = format!("p{}", lit.pred);
    for arg in &lit.args {
        out.push(' ');
        out.push_str(render_t(arg));
    }
    out
}

fn render_ground(pred: usize, args: &[usize]) -> String {
    let mut out = format!("p{pred}");
    for &a in args {
        out.push(' ');
        out.push_str(CONSTS[a]);
    }
    out
}

impl Program {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (pred, args) in &self.facts {
            out.push_str(&render_ground(*pred, args));
            out.push_str(".\n");
        }
        for rule in &self.rules {
            out.push_str(&render_lit(&rule.head));
            let mut conds: Vec<String> = rule.pos.iter().map(render_lit).collect();
            conds.extend(rule.neg.iter().map(|l| format!("not {}", render_lit(l))));
            conds.extend(
                rule.diff
                    .iter()
                    .map(|(x, y)| format!("diff {{ {} {} }}", render_t(x), render_t(y))),
            );
            if !conds.is_empty() {
                out.push_str(" if ");
                out.push_str(&conds.join(" and "));
            }
            out.push_str(".\n");
        }
        out
    }

    /// Every true fact, rendered like `Fact`'s `Display`.
    pub fn oracle(&self) -> BTreeSet<String> {
        let mut truths: BTreeSet<(usize, Vec<usize>)> = self.facts.iter().cloned().collect();
        for stratum in 0..PREDS {
            loop {
                let mut added = false;
                for rule in self.rules.iter().filter(|r| r.head.pred == stratum) {
                    for env in envs() {
                        let ground = |lit: &Lit| -> (usize, Vec<usize>) {
                            let args = lit.args.iter().map(|t| value(t, &env)).collect();
                            (lit.pred, args)
                        };
                        let body = rule.pos.iter().all(|l| truths.contains(&ground(l)))
                            && rule.neg.iter().all(|l| !truths.contains(&ground(l)))
                            && rule
                                .diff
                                .iter()
                                .all(|(x, y)| value(x, &env) != value(y, &env));
                        if body && truths.insert(ground(&rule.head)) {
                            added = true;
                        }
                    }
                }
                if !added {
                    break;
                }
            }
        }
        truths
            .iter()
            .map(|(p, args)| render_ground(*p, args))
            .collect()
    }
}

fn value(t: &T, env: &[usize; 3]) -> usize {
    match t {
        T::Var(v) => env[*v],
        T::Const(c) => *c,
    }
}

fn envs() -> impl Iterator<Item = [usize; 3]> {
    (0..27).map(|n| [n % 3, n / 3 % 3, n / 9])
}

fn term() -> impl Strategy<Value = T> {
    prop_oneof![3 => (0..VARS.len()).prop_map(T::Var), 1 => (0..CONSTS.len()).prop_map(T::Const)]
}

fn lit(
    arity: [usize; PREDS],
    preds: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Lit> {
    preds.prop_flat_map(move |pred| {
        prop::collection::vec(term(), arity[pred]).prop_map(move |args| Lit { pred, args })
    })
}

fn rule(arity: [usize; PREDS]) -> impl Strategy<Value = StratRule> {
    (0..PREDS).prop_flat_map(move |stratum| {
        let neg = if stratum == 0 {
            Just(Vec::new()).boxed()
        } else {
            prop::collection::vec(lit(arity, 0..=stratum - 1), 0..=2).boxed()
        };
        (
            lit(arity, stratum..=stratum),
            prop::collection::vec(lit(arity, 0..=stratum), 1..=3),
            neg,
            prop::collection::vec((term(), term()), 0..=1),
        )
            .prop_map(|(head, pos, neg, diff)| {
                let mut rule = StratRule {
                    head,
                    pos,
                    neg,
                    diff,
                };
                make_safe(&mut rule);
                rule
            })
    })
}

/// Replaces variables that no positive atom binds with the constant `a`.
fn make_safe(rule: &mut StratRule) {
    let bound: Vec<usize> = rule
        .pos
        .iter()
        .flat_map(|l| &l.args)
        .filter_map(|t| if let T::Var(v) = t { Some(*v) } else { None })
        .collect();
    let fix = |t: &mut T| {
        if let T::Var(v) = t {
            if !bound.contains(v) {
                *t = T::Const(0);
            }
        }
    };
    rule.head.args.iter_mut().for_each(fix);
    rule.neg
        .iter_mut()
        .flat_map(|l| l.args.iter_mut())
        .for_each(fix);
    for (x, y) in &mut rule.diff {
        fix(x);
        fix(y);
    }
}

/// At most five predicates, eight ground facts and six rules.
pub fn stratified_program() -> impl Strategy<Value = Program> {
    prop::array::uniform5(0usize..=2).prop_flat_map(|arity| {
        let fact = (0..PREDS).prop_flat_map(move |pred| {
            prop::collection::vec(0..CONSTS.len(), arity[pred]).prop_map(move |args| (pred, args))
        });
        (
            prop::collection::vec(fact, 0..=8),
            prop::collection::vec(rule(arity), 0..=6),
        )
            .prop_map(move |(facts, rules)| Program {
                arity,
                facts,
                rules,
            })
    })
}

/// Arbitrary (possibly non-stratified) safe policies with nesting, negation
/// and constraints, as text.
pub fn general_policy() -> impl Strategy<Value = String> {
    use slick::{Atom, Cond, CondKind, Policy, Rule, Sign};

    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "says", "reads", "st-antonius", "x1"])
            .prop_map(Atom::lit),
        prop::sample::select(vec!["X", "Y", "Agent"]).prop_map(Atom::var),
    ];
    let atom = leaf.prop_recursive(3, 12, 3, |inner| {
        prop::collection::vec(inner, 0..=3).prop_map(Atom::Node)
    });
    let cond = (
        any::<bool>(),
        0u8..4,
        prop::collection::vec(atom.clone(), 2..=3),
    )
        .prop_map(|(neg, kind, atoms)| {
            let sign = if neg { Sign::Neg } else { Sign::Pos };
            let kind = match kind {
                0 => CondKind::Same(atoms),
                1 => CondKind::Diff(atoms),
                _ => CondKind::True(atoms.into_iter().next().unwrap()),
            };
            Cond { sign, kind }
        });
    let rule = (atom, prop::collection::vec(cond, 0..=3)).prop_map(|(head, mut body)| {
        // Bind every head variable positively so the rule is safe.
        for var in head.vars() {
            if !body.iter().any(|c| c.binds(var)) {
                body.push(Cond::pos(Atom::node([Atom::lit("bind"), Atom::var(var)])));
            }
        }
        Rule { head, body }
    });
    prop::collection::vec(rule, 0..=6)
        .prop_map(|rules| Policy::from_rules(rules).unwrap().to_string())
}
