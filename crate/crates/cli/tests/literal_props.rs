use ldp_cli::literal::{parse_literal, Literal};
use ldp_cli::runner::fmt_num;
use proptest::prelude::*;

fn literal() -> impl Strategy<Value = Literal> {
    let leaf = prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()).prop_map(Literal::Num),
        any::<bool>().prop_map(Literal::Bool),
        "[a-z][a-z0-9_]{0,6}".prop_filter("not a bool", |w| w != "true" && w != "false").prop_map(Literal::Word),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Literal::List),
            ("[a-z]{1,6}", prop::collection::vec(inner, 0..4)).prop_map(|(n, a)| Literal::Call(n, a)),
        ]
    })
}

proptest! {
    #[test]
    fn display_round_trips(l in literal()) {
        prop_assert_eq!(parse_literal(&l.to_string()).unwrap(), l);
    }

    #[test]
    fn csv_numbers_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = fmt_num(v);
        prop_assert!(!s.contains(','));
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
    }
}
