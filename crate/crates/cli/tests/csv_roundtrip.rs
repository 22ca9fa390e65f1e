use piezodyn_cli::csv::{format_float, Table};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1e9..1e9f64,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
    ]
}

proptest! {
    #[test]
    fn floats_parse_back_exactly(v in finite()) {
        let text = format_float(v);
        let back: f64 = text.parse().unwrap();
        prop_assert_eq!(back, v, "{}", text);
        let digits: String = text.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
        prop_assert!(digits.trim_start_matches('0').len() <= 17, "{}", text);
    }

    #[test]
    fn tables_round_trip(rows in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.9, finite()), 4), 0..40)) {
        let mut table = Table::new("a,b,c,d");
        table.rows = rows;
        let text = table.render();
        prop_assert!(!text.contains('\r'));
        let back = Table::parse(&text).unwrap();
        prop_assert_eq!(back.header, table.header);
        prop_assert_eq!(back.rows, table.rows);
    }
}
