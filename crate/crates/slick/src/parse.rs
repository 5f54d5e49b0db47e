//! Concrete syntax: a small lexer and a recursive-descent parser.
//!
//! ```text
//! rule  := heads ('if' cond ('and' cond)*)? '.'
//! heads := seq ('and' seq)*
//! cond  := 'not'? ('same' '{' term* '}' | 'diff' '{' term* '}' | seq)
//! seq   := term+            // one term is itself, more form a node
//! term  := IDENT | '(' term* ')'
//! ```

use std::fmt;

use crate::rule::{Cond, CondKind, Policy, Rule, SafetyViolation, Sign};
use crate::term::{is_variable_name, Atom, KEYWORDS};

/// Where and why parsing failed.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseReport {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("syntax error at {0}")]
    Syntax(#[from] ParseReport),
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Unsafe(Vec<SafetyViolation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    OpenBrace,
    CloseBrace,
    Dot,
    Word(&'a str),
    Eof,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Open => f.write_str("`(`"),
            Tok::Close => f.write_str("`)`"),
            Tok::OpenBrace => f.write_str("`{`"),
            Tok::CloseBrace => f.write_str("`}`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Spanned<'a> {
    tok: Tok<'a>,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Vec<Spanned<'_>> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = match line.find("//") {
            Some(at) => &line[..at],
            None => line,
        };
        let mut chars = line.char_indices().peekable();
        while let Some(&(start, c)) = chars.peek() {
            let column = line[..start].chars().count() + 1;
            let single = match c {
                '(' => Some(Tok::Open),
                ')' => Some(Tok::Close),
                '{' => Some(Tok::OpenBrace),
                '}' => Some(Tok::CloseBrace),
                '.' => Some(Tok::Dot),
                _ => None,
            };
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if let Some(tok) = single {
                chars.next();
                out.push(Spanned {
                    tok,
                    line: line_no + 1,
                    column,
                });
                continue;
            }
            let mut end = start;
            while let Some(&(at, c)) = chars.peek() {
                if c.is_whitespace() || "(){}.".contains(c) {
                    break;
                }
                end = at + c.len_utf8();
                chars.next();
            }
            out.push(Spanned {
                tok: Tok::Word(&line[start..end]),
                line: line_no + 1,
                column,
            });
        }
    }
    let (line, column) = (
        text.lines().count().max(1),
        text.lines().last().map_or(0, |l| l.chars().count()) + 1,
    );
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    out
}

struct Parser<'a> {
    toks: Vec<Spanned<'a>>,
    pos: usize,
}

type Result<T> = std::result::Result<T, ParseReport>;

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            toks: lex(text),
            pos: 0,
        }
    }

    fn peek(&self) -> &Tok<'a> {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok<'a> {
        let tok = self.toks[self.pos].tok.clone();
        if tok != Tok::Eof {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> ParseReport {
        let at = &self.toks[self.pos];
        ParseReport {
            line: at.line,
            column: at.column,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseReport {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn at_keyword(&self, keyword: &str) -> bool {
        *self.peek() == Tok::Word(keyword)
    }

    fn eat_keyword(&mut self, keyword: &str) -> bool {
        let hit = self.at_keyword(keyword);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect(&mut self, tok: Tok<'static>) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn starts_term(&self) -> bool {
        match self.peek() {
            Tok::Open => true,
            Tok::Word(w) => !KEYWORDS.contains(w),
            _ => false,
        }
    }

    fn term(&mut self) -> Result<Atom> {
        match self.bump() {
            Tok::Word(w) if !KEYWORDS.contains(&w) => Ok(if is_variable_name(w) {
                Atom::var(w)
            } else {
                Atom::lit(w)
            }),
            Tok::Open => {
                let mut children = Vec::new();
                while self.starts_term() {
                    children.push(self.term()?);
                }
                self.expect(Tok::Close)?;
                Ok(Atom::Node(children))
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a term"))
            }
        }
    }

    fn seq(&mut self) -> Result<Atom> {
        if !self.starts_term() {
            return Err(self.unexpected("a term"));
        }
        let mut terms = vec![self.term()?];
        while self.starts_term() {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Atom::Node(terms)
        })
    }

    fn constraint(&mut self, keyword: &str) -> Result<Vec<Atom>> {
        self.expect(Tok::OpenBrace)?;
        let mut atoms = Vec::new();
        while self.starts_term() {
            atoms.push(self.term()?);
        }
        if atoms.len() < 2 {
            return Err(self.error(format!("`{keyword}` needs at least two terms")));
        }
        self.expect(Tok::CloseBrace)?;
        Ok(atoms)
    }

    fn cond(&mut self) -> Result<Cond> {
        let sign = if self.eat_keyword("not") {
            Sign::Neg
        } else {
            Sign::Pos
        };
        let kind = if self.eat_keyword("same") {
            CondKind::Same(self.constraint("same")?)
        } else if self.eat_keyword("diff") {
            CondKind::Diff(self.constraint("diff")?)
        } else {
            CondKind::True(self.seq()?)
        };
        Ok(Cond { sign, kind })
    }

    fn rule(&mut self, out: &mut Vec<Rule>) -> Result<()> {
        let mut heads = vec![self.seq()?];
        while self.eat_keyword("and") {
            heads.push(self.seq()?);
        }
        let mut body = Vec::new();
        if self.eat_keyword("if") {
            body.push(self.cond()?);
            while self.eat_keyword("and") {
                body.push(self.cond()?);
            }
        }
        if *self.peek() != Tok::Dot {
            return Err(self.unexpected("`.`, `and` or `if`"));
        }
        self.bump();
        out.extend(heads.into_iter().map(|head| Rule {
            head,
            body: body.clone(),
        }));
        Ok(())
    }
}

/// Parses rules without checking safety. Conjunctive heads are expanded.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>> {
    let mut parser = Parser::new(text);
    let mut rules = Vec::new();
    while *parser.peek() != Tok::Eof {
        parser.rule(&mut rules)?;
    }
    Ok(rules)
}

/// Parses and safety-checks a policy.
pub fn parse_policy(text: &str) -> std::result::Result<Policy, PolicyError> {
    Policy::from_rules(parse_rules(text)?).map_err(PolicyError::Unsafe)
}

/// Parses a single atom, without a trailing `.`.
pub fn parse_atom(text: &str) -> Result<Atom> {
    let mut parser = Parser::new(text);
    let atom = parser.seq()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected("end of input"));
    }
    Ok(atom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Fact;

    fn lit(s: &str) -> Atom {
        Atom::lit(s)
    }

    #[test]
    fn negated_fact_rule() {
        let rules = parse_rules("sun if not clouds.").unwrap();
        assert_eq!(
            rules,
            [Rule {
                head: lit("sun"),
                body: vec![Cond::neg(lit("clouds"))]
            }]
        );
    }

    #[test]
    fn conjunctive_heads_share_body() {
        let rules = parse_rules("a and b if x and y.").unwrap();
        let body = vec![Cond::pos(lit("x")), Cond::pos(lit("y"))];
        assert_eq!(
            rules,
            [
                Rule {
                    head: lit("a"),
                    body: body.clone()
                },
                Rule {
                    head: lit("b"),
                    body
                }
            ]
        );
    }

    #[test]
    fn nesting_and_variables() {
        let rules = parse_rules("Worker reads Variable if Task has input Variable.").unwrap();
        assert_eq!(
            rules[0].head,
            Atom::node([Atom::var("Worker"), lit("reads"), Atom::var("Variable")])
        );
        let atom = parse_atom("(amy count-patients) has input ((surf utils) entry-count)").unwrap();
        let fact = atom.to_fact().unwrap();
        assert_eq!(fact.children().len(), 4);
        assert_eq!(
            fact.children()[3].children()[0],
            Fact::node([Fact::leaf("surf"), Fact::leaf("utils")])
        );
    }

    #[test]
    fn comments_and_constraints() {
        let text = "// heading\nerror if actor X and actor Y and diff { X Y }. // trailing\n";
        let rules = parse_rules(text).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(
            rules[0].body[2].kind,
            CondKind::Diff(vec![Atom::var("X"), Atom::var("Y")])
        );
    }

    #[test]
    fn reports_positions() {
        let err = parse_rules("a.\nb if .").unwrap_err();
        assert_eq!((err.line, err.column), (2, 6));
        let err = parse_rules("a b").unwrap_err();
        assert!(err.message.contains("`.`"), "{err}");
        let err = parse_rules("error if same { X }.").unwrap_err();
        assert!(err.message.contains("two terms"));
        let err = parse_rules("(a b.").unwrap_err();
        assert!(err.message.contains("`)`"), "{err}");
    }

    #[test]
    fn unsafe_policy_is_rejected() {
        match parse_policy("p X.") {
            Err(PolicyError::Unsafe(v)) => assert_eq!(v[0].vars, ["X"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_and_unit_nodes() {
        let rules = parse_rules("(). (x). ((a b)).").unwrap();
        let rendered: Vec<_> = rules.iter().map(ToString::to_string).collect();
        assert_eq!(rendered, ["().", "(x).", "((a b))."]);
    }
}
