//! Rules, policies and the safety check.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{Atom, Nested};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CondKind {
    True(Atom),
    /// Two or more atoms that must all be equal.
    Same(Vec<Atom>),
    /// Two or more atoms that must be pairwise distinct.
    Diff(Vec<Atom>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cond {
    pub sign: Sign,
    pub kind: CondKind,
}

impl Cond {
    pub fn pos(atom: Atom) -> Self {
        Cond {
            sign: Sign::Pos,
            kind: CondKind::True(atom),
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Cond {
            sign: Sign::Neg,
            kind: CondKind::True(atom),
        }
    }

    /// Only positive truth conditions bind variables.
    pub fn binds(&self, var: &str) -> bool {
        matches!((&self.sign, &self.kind), (Sign::Pos, CondKind::True(a)) if a.has_var(var))
    }

    pub fn atoms(&self) -> &[Atom] {
        match &self.kind {
            CondKind::True(atom) => std::slice::from_ref(atom),
            CondKind::Same(atoms) | CondKind::Diff(atoms) => atoms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Cond>,
}

/// Witness that a rule passed [`dec_safe`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SafeProof(());

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unsafe rule `{rule}`: head variable(s) {} not bound by a positive condition", vars.join(", "))]
pub struct SafetyViolation {
    /// Position of the rule in the expanded rule list.
    pub index: usize,
    pub rule: String,
    pub vars: Vec<String>,
}

/// Decides safety: every head variable occurs in some positive truth condition.
pub fn dec_safe(rule: &Rule) -> Result<SafeProof, SafetyViolation> {
    let mut unbound: Vec<String> = Vec::new();
    for var in rule.head.vars() {
        if !rule.body.iter().any(|c| c.binds(var)) && !unbound.iter().any(|u| u == var) {
            unbound.push(var.to_string());
        }
    }
    if unbound.is_empty() {
        Ok(SafeProof(()))
    } else {
        Err(SafetyViolation {
            index: 0,
            rule: rule.to_string(),
            vars: unbound,
        })
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Neg {
            f.write_str("not ")?;
        }
        let (keyword, atoms) = match &self.kind {
            CondKind::True(atom) => return write!(f, "{atom}"),
            CondKind::Same(atoms) => ("same", atoms),
            CondKind::Diff(atoms) => ("diff", atoms),
        };
        write!(f, "{keyword} {{")?;
        for atom in atoms {
            write!(f, " {}", Nested(atom))?;
        }
        f.write_str(" }")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, cond) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " if " } else { " and " })?;
            write!(f, "{cond}")?;
        }
        f.write_str(".")
    }
}

/// An ordered list of safe rules.
///
/// Construct through [`crate::parse_policy`] or [`Policy::from_rules`] so that
/// safety is checked.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Policy {
    rules: Vec<Rule>,
}

impl Policy {
    pub fn empty() -> Self {
        Policy::default()
    }

    pub fn from_rules(rules: Vec<Rule>) -> Result<Self, Vec<SafetyViolation>> {
        let violations: Vec<_> = rules
            .iter()
            .enumerate()
            .filter_map(|(index, rule)| {
                dec_safe(rule).err().map(|v| SafetyViolation { index, ..v })
            })
            .collect();
        if violations.is_empty() {
            Ok(Policy { rules })
        } else {
            Err(violations)
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Applies a safety-preserving transformation to every rule.
    pub fn map_rules(&self, f: impl FnMut(&Rule) -> Rule) -> Policy {
        Policy {
            rules: self.rules.iter().map(f).collect(),
        }
    }
}

/// Concatenation; safe rules stay safe.
pub fn compose(p1: &Policy, p2: &Policy) -> Policy {
    Policy {
        rules: p1.rules.iter().chain(&p2.rules).cloned().collect(),
    }
}

impl FromIterator<Policy> for Policy {
    fn from_iter<I: IntoIterator<Item = Policy>>(iter: I) -> Self {
        Policy {
            rules: iter.into_iter().flat_map(|p| p.rules).collect(),
        }
    }
}

/// One rule per line.
impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, rule) in self.rules.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{rule}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_rules;

    fn rule(text: &str) -> Rule {
        let mut rules = parse_rules(text).unwrap();
        assert_eq!(rules.len(), 1);
        rules.pop().unwrap()
    }

    #[test]
    fn safe_when_head_var_is_positively_bound() {
        assert!(dec_safe(&rule("amy knows Person if Person knows amy.")).is_ok());
        assert!(dec_safe(&rule("error if Anyone reads Data.")).is_ok());
    }

    #[test]
    fn negative_and_constraint_conditions_do_not_bind() {
        let v = dec_safe(&rule("p X if not q X.")).unwrap_err();
        assert_eq!(v.vars, ["X"]);
        let v = dec_safe(&rule("p X if same { X y }.")).unwrap_err();
        assert_eq!(v.vars, ["X"]);
        let v = dec_safe(&rule("p X Y X.")).unwrap_err();
        assert_eq!(v.vars, ["X", "Y"]);
    }

    #[test]
    fn from_rules_reports_indices() {
        let rules = parse_rules("a. p X. b. q Y if r.").unwrap();
        let errs = Policy::from_rules(rules).unwrap_err();
        assert_eq!(errs.iter().map(|e| e.index).collect::<Vec<_>>(), [1, 3]);
    }

    #[test]
    fn renders_conditions() {
        let r = rule("error if Sayer says (W V X) and diff { consortium Sayer } and not diff { V writes reads }.");
        assert_eq!(
            r.to_string(),
            "error if Sayer says (W V X) and diff { consortium Sayer } and not diff { V writes reads }."
        );
    }
}
