//! Slick: a small logic-programming language with negation, evaluated under
//! the well-founded semantics with a bound on inference steps.
//!
//! ```
//! let policy = slick::parse_policy("sun if not clouds.").unwrap();
//! let den = slick::eval_default(&policy);
//! assert!(den.truth(&slick::Fact::leaf("sun")));
//! ```

mod eval;
mod parse;
mod rule;
mod term;

pub use eval::{dec_valid, eval, eval_default, truth, Denotation, DEFAULT_STEP_BOUND};
pub use parse::{parse_atom, parse_policy, parse_rules, ParseReport, PolicyError};
pub use rule::{compose, dec_safe, Cond, CondKind, Policy, Rule, SafeProof, SafetyViolation, Sign};
pub use term::{is_identifier, is_variable_name, Atom, Fact, KEYWORDS};
