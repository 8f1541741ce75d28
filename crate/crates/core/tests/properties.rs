//! Property tests over the seeded generators.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use scjc::checker::check_program;
use scjc::parser::{parse_action, parse_program};
use scjc::pretty;
use scjc::refine::{apply_law1, apply_law2, check_actions, recognize};
use scjc::sim::{Model, Sim};
use scjc::translate::translate_program;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_print_parse_roundtrip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = small_action(&mut r, &["a", "b", "c"], Some("x"), 3);
        let text = pretty::action(&a);
        prop_assert_eq!(parse_action(&text).unwrap(), a, "{}", text);
    }

    #[test]
    fn program_print_parse_roundtrip(seed in any::<u64>()) {
        let p = scj_program(&mut rng(seed));
        let text = pretty::program(&p);
        prop_assert_eq!(parse_program(&text).unwrap(), p, "{}", text);
    }

    #[test]
    fn translation_is_well_formed_and_invertible(seed in any::<u64>()) {
        let p = scj_program(&mut rng(seed));
        prop_assert!(check_program(&p).is_empty());
        let t = translate_program(&p).unwrap();
        let reparsed = parse_program(&t.text()).unwrap();
        prop_assert_eq!(&reparsed, &t.program());
        prop_assert!(check_program(&reparsed).is_empty());
        prop_assert_eq!(recognize(&reparsed).unwrap(), p);
    }

    #[test]
    fn traces_are_prefix_closed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = small_action(&mut r, &["a", "b", "c"], Some("x"), 3);
        let src = format!("{LAW_DECLS}\nprocess P = begin @ {} end", pretty::action(&with_vars(a)));
        let p = parse_program(&src).unwrap();
        let t = Sim::new(Model::new(&p, &BTreeMap::new()).unwrap(), "P").unwrap().traces(4);
        for tr in &t.traces {
            prop_assert!(t.traces.contains(&tr[..tr.len().saturating_sub(1)].to_vec()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn law1_result_is_equivalent(seed in any::<u64>()) {
        let c = law1_ok(&mut rng(seed));
        let new = apply_law1(&c.context, &c.filler, c.c1, c.c2, &BTreeSet::new()).unwrap();
        let old = scjc::ast::substitute(&c.context, &c.filler).unwrap();
        let decls = law_decls();
        let fwd = check_actions(&decls, &with_vars(old.clone()), &with_vars(new.clone()), 4, &BTreeMap::new()).unwrap();
        let back = check_actions(&decls, &with_vars(new), &with_vars(old), 4, &BTreeMap::new()).unwrap();
        prop_assert!(fwd.holds && back.holds, "{:?} {:?}", fwd.counterexample, back.counterexample);
    }

    #[test]
    fn law2_result_refines(seed in any::<u64>()) {
        let c = law2_ok(&mut rng(seed));
        let new = apply_law2(&c.target, c.b, &c.branch).unwrap();
        let res = check_actions(&law_decls(), &with_vars(c.target), &with_vars(new), 4, &BTreeMap::new()).unwrap();
        prop_assert!(res.holds, "{:?}", res.counterexample);
    }

    #[test]
    fn proviso_violations_are_rejected(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = law1_bad(&mut r);
        prop_assert!(apply_law1(&c.context, &c.filler, c.c1, c.c2, &BTreeSet::new()).is_err());
        let c = law2_bad(&mut r);
        prop_assert!(apply_law2(&c.target, c.b, &c.branch).is_err());
    }
}
