use super::*;
use crate::parse_policy;

fn den(text: &str) -> Denotation {
    eval_default(&parse_policy(text).unwrap())
}

fn facts(items: &[&str]) -> BTreeSet<Fact> {
    items.iter().map(|f| Fact::parse(f).unwrap()).collect()
}

#[test]
fn negation_as_failure() {
    assert_eq!(den("sun if not clouds.").trues, facts(&["sun"]));
    assert_eq!(den("sun if not clouds. clouds.").trues, facts(&["clouds"]));
}

#[test]
fn odd_loop_is_unknown() {
    let d = den("a. c if not c.");
    assert_eq!(d.trues, facts(&["a"]));
    assert_eq!(d.unknowns, facts(&["c"]));
    assert!(!d.bound_exceeded);
}

#[test]
fn even_loop_is_unknown() {
    let d = den("p if not q. q if not p. r if p. s if not r.");
    assert!(d.trues.is_empty());
    assert_eq!(d.unknowns, facts(&["p", "q", "r", "s"]));
}

#[test]
fn runaway_recursion_trivialises() {
    let d = den("f X if X. x.");
    assert!(d.bound_exceeded);
    assert_eq!(d.trues, facts(&["error"]));
    assert!(d.unknowns.is_empty());
    assert!(!d.valid());
    assert_eq!(d.steps_used, DEFAULT_STEP_BOUND + 1);
}

#[test]
fn small_bound_cuts_short() {
    let policy = parse_policy("a. b if a. c if b.").unwrap();
    // Two phases of three derivations each.
    assert!(eval(&policy, 5).bound_exceeded);
    let full = eval(&policy, 6);
    assert!(!full.bound_exceeded);
    assert_eq!(full.steps_used, 6);
    assert_eq!(full.trues, facts(&["a", "b", "c"]));
}

#[test]
fn truth_table() {
    let rows: [(&str, &[&str], bool); 5] = [
        ("error if bob reads data1.", &[], true),
        ("error if not bob reads data1.", &["error"], false),
        ("error and amy says error if bob reads data1.", &[], true),
        ("bob reads data1 and bob says (bob reads data1).", &["bob reads data1", "bob says (bob reads data1)"], true),
        (
            "bob reads data1 and bob says (bob reads data1). error and amy says error if bob reads data1.",
            &["error", "amy says error", "bob reads data1", "bob says (bob reads data1)"],
            false,
        ),
    ];
    for (text, trues, valid) in rows {
        let d = den(text);
        assert_eq!(d.trues, facts(trues), "{text}");
        assert_eq!(d.valid(), valid, "{text}");
    }
}

#[test]
fn variables_range_over_compound_facts() {
    let d = den("t (a b). t c. u X if t X.");
    assert!(d.truth(&Fact::parse("u (a b)").unwrap()));
    assert!(d.truth(&Fact::parse("u c").unwrap()));
}

#[test]
fn same_and_diff() {
    let d = den("n a. n b. n c. pair X Y if n X and n Y and diff { X Y }. self X if n X and n Y and same { X Y }.");
    assert_eq!(
        d.trues
            .iter()
            .filter(|f| f.children().first() == Some(&Fact::leaf("pair")))
            .count(),
        6
    );
    assert!(d.truth(&Fact::parse("self a").unwrap()));
}

#[test]
fn three_element_constraints() {
    // `not same` needs one differing pair, `diff` needs all pairs distinct.
    let d = den("n a. n b. t X Y Z if n X and n Y and n Z and not same { X Y Z }. d X Y Z if n X and n Y and n Z and diff { X Y Z }.");
    assert!(d.truth(&Fact::parse("t a a b").unwrap()));
    assert!(!d.truth(&Fact::parse("t a a a").unwrap()));
    assert!(!d
        .trues
        .iter()
        .any(|f| f.children().first() == Some(&Fact::leaf("d"))));
    let d = den("n a. n b. k X Y Z if n X and n Y and n Z and not diff { X Y Z }.");
    assert!(d.truth(&Fact::parse("k a b a").unwrap()));
    assert_eq!(d.trues.len(), 2 + 8);
}

#[test]
fn unbound_variables_are_existential() {
    // Some fact is not `q`, so the negative body holds.
    assert!(den("p if not q X. q a.").truth(&Fact::leaf("p")));
    // A fresh value differs from everything.
    assert!(den("p if diff { X a }.").truth(&Fact::leaf("p")));
    assert!(den("p if not same { X a }.").truth(&Fact::leaf("p")));
    // But can be chosen equal when that is needed.
    assert!(den("p if same { X a } and not q X.").truth(&Fact::leaf("p")));
    assert!(!den("p if same { X a } and not q X. q a.").truth(&Fact::leaf("p")));
    assert!(!den("p if same { X a } and same { X b }.").truth(&Fact::leaf("p")));
    assert!(den("p if not diff { X a b }.").truth(&Fact::leaf("p")));
    assert!(!den("p if not diff { a b }.").truth(&Fact::leaf("p")));
    // Occurs check: X cannot equal a term containing itself.
    assert!(!den("p if same { X (f X) }.").truth(&Fact::leaf("p")));
    assert!(den("r (f c). p if r Y and same { Y (f X) } and not q X.").truth(&Fact::leaf("p")));
    assert!(
        !den("r (f c). q c. p if r Y and same { Y (f X) } and not q X.").truth(&Fact::leaf("p"))
    );
}

#[test]
fn negation_on_derived_facts() {
    let d = den("edge a b. edge b c. reach X Y if edge X Y. reach X Z if reach X Y and edge Y Z. node a. node b. node c. unreach X Y if node X and node Y and not reach X Y.");
    assert!(d.truth(&Fact::parse("reach a c").unwrap()));
    assert!(d.truth(&Fact::parse("unreach c a").unwrap()));
    assert!(!d.truth(&Fact::parse("unreach a c").unwrap()));
    assert!(d.unknowns.is_empty());
}

#[test]
fn reserved_error_reason_is_not_error() {
    assert!(den("error bad.").valid());
    assert!(!den("error bad. error if error Reason.").valid());
}

#[test]
fn empty_policy() {
    let d = den("");
    assert!(d.trues.is_empty() && d.valid());
    assert!(!truth(&Policy::empty(), &Fact::leaf("x")));
}
