use dualshift::duality::{roundtrip_check, transform_program, TransformDirection};
use dualshift::gen::{entry_corpus, random_hierarchy, random_program, rng};
use dualshift::interp::evaluate;
use dualshift::lang::{canonicalize, parse, pretty, typecheck};
use dualshift::lens::{classify, coverage_matrix, detect_hierarchy, StructureClass};
use dualshift::refactor::{parse_plan, plan_text};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_hierarchies_round_trip(seed in any::<u64>()) {
        let p = random_hierarchy(&mut rng(seed));
        let r = roundtrip_check(&p).unwrap();
        prop_assert!(r.identical, "{}\n{}", pretty(&p), r.diff.unwrap_or_default());

        let fun = transform_program(&p, TransformDirection::ToVisitor).unwrap();
        let r = roundtrip_check(&fun).unwrap();
        prop_assert!(r.identical, "{}\n{}", pretty(&fun), r.diff.unwrap_or_default());
    }

    #[test]
    fn transforms_preserve_behavior_and_types(seed in any::<u64>()) {
        let p = random_hierarchy(&mut rng(seed));
        let fun = transform_program(&p, TransformDirection::ToVisitor).unwrap();
        prop_assert!(typecheck(&fun).is_empty());
        let h = detect_hierarchy(&fun).unwrap();
        prop_assert_eq!(classify(&coverage_matrix(&fun, &h)), StructureClass::FunctionOriented);
        let back = transform_program(&fun, TransformDirection::ToComposite).unwrap();
        for e in entry_corpus(&p, &detect_hierarchy(&p).unwrap(), seed, 8, 5) {
            let want = evaluate(&p, &e);
            prop_assert_eq!(&evaluate(&fun, &e), &want);
            prop_assert_eq!(&evaluate(&back, &e), &want);
        }
    }

    #[test]
    fn printed_programs_parse_back(seed in any::<u64>()) {
        let p = random_program(&mut rng(seed));
        let text = pretty(&p);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &canonicalize(&p));
        prop_assert_eq!(pretty(&back), text);
    }

    #[test]
    fn plans_survive_their_text_form(seed in any::<u64>()) {
        let p = random_hierarchy(&mut rng(seed));
        let plan = dualshift::duality::plan_to_visitor(&p).unwrap();
        let text = plan_text(&plan);
        let back = parse_plan(&text).unwrap();
        prop_assert_eq!(&back, &plan);
        let fun = transform_program(&p, TransformDirection::ToVisitor).unwrap();
        let inverse = dualshift::duality::plan_to_composite(&fun).unwrap();
        prop_assert_eq!(parse_plan(&plan_text(&inverse)).unwrap(), inverse);
    }
}
