//! Facts and atoms: rosetrees over string literals (and variables).

use std::fmt;

use serde::{Deserialize, Serialize};

/// Tokens that can never appear as a literal.
pub const KEYWORDS: [&str; 5] = ["if", "and", "not", "same", "diff"];

/// Returns whether `text` may be used as a leaf literal or variable name.
pub fn is_identifier(text: &str) -> bool {
    !text.is_empty()
        && !KEYWORDS.contains(&text)
        && !text.contains("//")
        && !text
            .chars()
            .any(|c| c.is_whitespace() || "(){}.".contains(c))
}

/// Identifiers starting with an ASCII uppercase letter are variables.
pub fn is_variable_name(text: &str) -> bool {
    text.starts_with(|c: char| c.is_ascii_uppercase())
}

/// A ground rosetree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Fact {
    Leaf(String),
    Node(Vec<Fact>),
}

impl Fact {
    pub fn leaf(text: impl Into<String>) -> Self {
        Fact::Leaf(text.into())
    }

    pub fn node(children: impl IntoIterator<Item = Fact>) -> Self {
        Fact::Node(children.into_iter().collect())
    }

    /// The fact `error`, whose truth makes a policy invalid.
    pub fn error() -> Self {
        Fact::leaf("error")
    }

    pub fn as_leaf(&self) -> Option<&str> {
        match self {
            Fact::Leaf(text) => Some(text),
            Fact::Node(_) => None,
        }
    }

    pub fn children(&self) -> &[Fact] {
        match self {
            Fact::Leaf(_) => &[],
            Fact::Node(children) => children,
        }
    }

    /// Either `error` itself or a node whose first child is `error`.
    pub fn is_error(&self) -> bool {
        match self {
            Fact::Leaf(text) => text == "error",
            Fact::Node(children) => children.first().and_then(Fact::as_leaf) == Some("error"),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Fact::Leaf(_) => 1,
            Fact::Node(children) => 1 + children.iter().map(Fact::depth).max().unwrap_or(0),
        }
    }

    /// Parses a single ground atom, e.g. `bob says (bob reads data1)`.
    pub fn parse(text: &str) -> Result<Self, crate::ParseReport> {
        let atom = crate::parse::parse_atom(text)?;
        atom.to_fact().ok_or_else(|| crate::ParseReport {
            line: 1,
            column: 1,
            message: format!("`{text}` contains variables"),
        })
    }
}

impl From<&Fact> for Atom {
    fn from(fact: &Fact) -> Self {
        match fact {
            Fact::Leaf(text) => Atom::Lit(text.clone()),
            Fact::Node(children) => Atom::Node(children.iter().map(Atom::from).collect()),
        }
    }
}

/// A rosetree whose leaves are literals or variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    Lit(String),
    Var(String),
    Node(Vec<Atom>),
}

impl Atom {
    pub fn lit(text: impl Into<String>) -> Self {
        Atom::Lit(text.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Atom::Var(name.into())
    }

    pub fn node(children: impl IntoIterator<Item = Atom>) -> Self {
        Atom::Node(children.into_iter().collect())
    }

    pub fn has_var(&self, name: &str) -> bool {
        match self {
            Atom::Var(v) => v == name,
            Atom::Lit(_) => false,
            Atom::Node(children) => children.iter().any(|c| c.has_var(name)),
        }
    }

    /// Pushes every variable name (with repetition) onto `out`, left to right.
    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Atom::Var(v) => out.push(v),
            Atom::Lit(_) => {}
            Atom::Node(children) => children.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.dedup();
        out
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Atom::Var(_) => false,
            Atom::Lit(_) => true,
            Atom::Node(children) => children.iter().all(Atom::is_ground),
        }
    }

    /// Converts a variable-free atom into the fact it denotes.
    pub fn to_fact(&self) -> Option<Fact> {
        match self {
            Atom::Var(_) => None,
            Atom::Lit(text) => Some(Fact::Leaf(text.clone())),
            Atom::Node(children) => children
                .iter()
                .map(Atom::to_fact)
                .collect::<Option<_>>()
                .map(Fact::Node),
        }
    }
}

/// Shared rendering for facts and atoms.
///
/// At the top level a node of two or more children is written without
/// parentheses; nested nodes, and nodes of fewer than two children, are
/// parenthesised so that the text parses back to the same tree.
trait Tree {
    fn leaf_text(&self) -> Option<&str>;
    fn branches(&self) -> &[Self]
    where
        Self: Sized;

    fn write_top(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    where
        Self: Sized,
    {
        match self.leaf_text() {
            Some(text) => f.write_str(text),
            None if self.branches().len() >= 2 => write_seq(self.branches(), f),
            None => self.write_nested(f),
        }
    }

    fn write_nested(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result
    where
        Self: Sized,
    {
        match self.leaf_text() {
            Some(text) => f.write_str(text),
            None => {
                f.write_str("(")?;
                write_seq(self.branches(), f)?;
                f.write_str(")")
            }
        }
    }
}

fn write_seq<T: Tree>(items: &[T], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        item.write_nested(f)?;
    }
    Ok(())
}

impl Tree for Fact {
    fn leaf_text(&self) -> Option<&str> {
        self.as_leaf()
    }
    fn branches(&self) -> &[Self] {
        self.children()
    }
}

impl Tree for Atom {
    fn leaf_text(&self) -> Option<&str> {
        match self {
            Atom::Lit(text) | Atom::Var(text) => Some(text),
            Atom::Node(_) => None,
        }
    }
    fn branches(&self) -> &[Self] {
        match self {
            Atom::Node(children) => children,
            _ => &[],
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_top(f)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_top(f)
    }
}

/// Renders `atom` as a term inside a larger sequence (e.g. a `same { }` list).
pub(crate) struct Nested<'a>(pub &'a Atom);

impl fmt::Display for Nested<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write_nested(f)
    }
}
