//! Property suites: syntax round trips, coding round trips, the connective
//! homomorphism, and the diagonal law.

use num_bigint::BigUint;
use proptest::prelude::*;

use examiner_core::formula::{parse, parse_with_env, print, print_with_env, SymbolEnv};
use examiner_core::godel::{conj_code, decode, diag, encode, imp_code, neg_code};
use examiner_core::{Formula, Term};

fn arb_numeral() -> impl Strategy<Value = BigUint> {
    prop_oneof![
        (0u64..1000).prop_map(BigUint::from),
        any::<u64>().prop_map(BigUint::from),
        // Occasionally hundreds of digits.
        proptest::collection::vec(0u8..10, 30..120).prop_map(|digits| {
            digits
                .iter()
                .fold(BigUint::from(1u8), |acc, d| acc * 10u8 + *d)
        }),
    ]
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        2 => Just(Term::Var),
        3 => arb_numeral().prop_map(Term::Numeral),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::conj(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::imp(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::diag(a, b)),
        ]
    })
}

fn arb_agent() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("a".to_string()),
        Just("b".to_string()),
        Just("Art".to_string()),
        (1u32..6).prop_map(|k| k.to_string()),
    ]
}

fn arb_formula(allow_know: bool) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => (1u32..10).prop_map(Formula::DayAtom),
        1 => Just(Formula::Falsum),
        2 => (prop_oneof![Just("P"), Just("K")], arb_term())
            .prop_map(|(label, t)| Formula::code_pred(label, t)),
    ];
    leaf.prop_recursive(6, 48, 2, move |inner| {
        let know = (arb_agent(), inner.clone())
            .prop_map(|(agent, f)| Formula::know(agent, f));
        let base = prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::xor(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ];
        if allow_know {
            prop_oneof![6 => base, 1 => know].boxed()
        } else {
            base.boxed()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parse_print_round_trip(f in arb_formula(true)) {
        let text = print(&f);
        prop_assert_eq!(parse(&text).unwrap(), f);
    }

    #[test]
    fn encode_decode_round_trip(f in arb_formula(false)) {
        let code = encode(&f).unwrap();
        prop_assert_eq!(decode(&code).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn connective_homomorphism(a in arb_formula(false), b in arb_formula(false)) {
        let (ca, cb) = (encode(&a).unwrap(), encode(&b).unwrap());
        prop_assert_eq!(
            neg_code(&ca).unwrap(),
            encode(&Formula::not(a.clone())).unwrap()
        );
        prop_assert_eq!(
            conj_code(&ca, &cb).unwrap(),
            encode(&Formula::and(a.clone(), b.clone())).unwrap()
        );
        prop_assert_eq!(
            imp_code(&ca, &cb).unwrap(),
            encode(&Formula::implies(a, b)).unwrap()
        );
    }

    #[test]
    fn substitution_is_idempotent_once_closed(f in arb_formula(true), n in arb_numeral()) {
        let closed = f.substitute(&n);
        prop_assert_eq!(closed.substitute(&(n + 1u32)), closed.clone());
    }

    #[test]
    fn symbolic_numerals_round_trip(f in arb_formula(true)) {
        let mut env = SymbolEnv::new();
        env.bind("h", BigUint::from(424242u64));
        env.bind("q1", BigUint::parse_bytes(b"123456789012345678901234567890", 10).unwrap());
        let text = print_with_env(&f, &env);
        prop_assert_eq!(parse_with_env(&text, &env).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn diagonal_law(f in arb_formula(false), n in arb_numeral()) {
        let code = encode(&f).unwrap();
        prop_assert_eq!(
            diag(&code, &n).unwrap(),
            encode(&f.substitute(&n)).unwrap()
        );
    }
}
