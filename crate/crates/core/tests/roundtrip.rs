mod common;

use cat_core::parser::{parse, render};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn render_then_parse_is_identity(doc in common::document()) {
        let text = render(&doc);
        let parsed = parse(&text);
        prop_assert!(parsed.errors().next().is_none(), "{}\n{:?}", text, parsed.diagnostics);
        let again = parsed.document.unwrap();
        prop_assert_eq!(&again, &doc);
        prop_assert_eq!(render(&again), text);
    }

    #[test]
    fn resolved_documents_round_trip_too(doc in common::document().prop_map(common::resolved)) {
        let again = parse(&render(&doc)).document.unwrap();
        prop_assert_eq!(again, doc);
    }
}
