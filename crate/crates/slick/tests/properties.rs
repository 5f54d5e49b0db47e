mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use slick::{eval, eval_default, parse_policy, parse_rules, Fact, Policy};

use common::{general_policy, stratified_program};

fn rendered(set: &BTreeSet<Fact>) -> BTreeSet<String> {
    set.iter().map(ToString::to_string).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn stratified_programs_match_oracle(program in stratified_program()) {
        let text = program.to_text();
        let den = eval_default(&parse_policy(&text).unwrap());
        prop_assert!(!den.bound_exceeded);
        prop_assert_eq!(rendered(&den.trues), program.oracle(), "{}", text);
        prop_assert!(den.unknowns.is_empty());
    }

    #[test]
    fn render_then_parse_is_identity(text in general_policy()) {
        let first = parse_rules(&text).unwrap();
        let again = parse_rules(&Policy::from_rules(first.clone()).unwrap().to_string()).unwrap();
        prop_assert_eq!(first, again);
    }

    #[test]
    fn rule_order_is_irrelevant(text in general_policy(), seed in any::<u64>()) {
        let policy = parse_policy(&text).unwrap();
        let mut rules = policy.rules().to_vec();
        // Deterministic shuffle driven by the seed.
        let mut s = seed;
        for i in (1..rules.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            rules.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = eval(&policy, 5_000);
        let b = eval(&Policy::from_rules(rules).unwrap(), 5_000);
        prop_assert_eq!(a.trues, b.trues);
        prop_assert_eq!(a.unknowns, b.unknowns);
        prop_assert_eq!(a.bound_exceeded, b.bound_exceeded);
    }

    #[test]
    fn larger_bounds_change_nothing(text in general_policy(), extra in 1usize..1_000) {
        let policy = parse_policy(&text).unwrap();
        let base = eval(&policy, 2_000);
        if !base.bound_exceeded {
            prop_assert_eq!(&eval(&policy, 2_000 + extra), &base);
            prop_assert_eq!(&eval(&policy, base.steps_used.max(1)), &base);
        }
    }

    #[test]
    fn exceeding_the_bound_trivialises(program in stratified_program(), bound in 1usize..20) {
        let den = eval(&parse_policy(&program.to_text()).unwrap(), bound);
        if den.bound_exceeded {
            prop_assert_eq!(rendered(&den.trues), BTreeSet::from(["error".to_string()]));
            prop_assert!(den.unknowns.is_empty());
            prop_assert!(!den.valid());
        }
    }

    #[test]
    fn trues_and_unknowns_are_disjoint(text in general_policy()) {
        let den = eval(&parse_policy(&text).unwrap(), 5_000);
        prop_assert!(den.trues.is_disjoint(&den.unknowns));
    }
}

#[test]
fn adding_clouds_removes_sun() {
    let sun = Fact::leaf("sun");
    assert!(eval_default(&parse_policy("sun if not clouds.").unwrap()).truth(&sun));
    assert!(!eval_default(&parse_policy("sun if not clouds. clouds.").unwrap()).truth(&sun));
}
