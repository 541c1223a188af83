use msl_cli::report::{Assertion, Check};
use proptest::prelude::*;

fn checks() -> impl Strategy<Value = Check> {
    prop_oneof![
        Just(Check::AtMost),
        Just(Check::Below),
        Just(Check::AtLeast),
        Just(Check::Above),
        Just(Check::AbsDeviation),
        Just(Check::RelDeviation),
    ]
}

proptest! {
    #[test]
    fn margin_sign_agrees_with_pass(check in checks(), measured in -1e6f64..1e6, target in 1e-3f64..1e3, bound in 1e-9f64..1e3) {
        let a = Assertion::evaluate("x", None, "0", check, measured, Some(target), bound);
        if a.pass {
            prop_assert!(a.margin >= 0.0);
        } else {
            prop_assert!(a.margin <= 0.0);
        }
    }

    #[test]
    fn serialization_round_trips(measured in -1e6f64..1e6, bound in 1e-9f64..1e3) {
        let a = Assertion::evaluate("x", Some("R=1".into()), "3.8", Check::AtMost, measured, None, bound);
        let text = serde_json::to_string(&a).unwrap();
        let back: Assertion = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(a, back);
    }
}
