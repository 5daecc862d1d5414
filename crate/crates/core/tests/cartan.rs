use proptest::prelude::*;

use qpi_core::{CartanDatum, QpiError};

fn raw(a: Vec<Vec<i64>>, parity: Vec<u8>, d: Vec<u32>) -> CartanDatum {
    CartanDatum { name: "t".to_string(), a, parity, d }
}

fn small_datum() -> impl Strategy<Value = CartanDatum> {
    (2usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(-4i64..=1, n), n),
            prop::collection::vec(0u8..=1, n),
            prop::collection::vec(1u32..=3, n),
        )
            .prop_map(move |(mut a, p, d)| {
                for (i, row) in a.iter_mut().enumerate() {
                    row[i] = 2;
                }
                raw(a, p, d)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn accepted_data_are_symmetrizable(x in small_datum()) {
        let n = x.rank();
        let report = x.validate();
        if report.is_valid() {
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(x.d(i) as i64 * x.a(i, j), x.d(j) as i64 * x.a(j, i));
                    if x.is_odd(i) {
                        prop_assert_eq!(x.a(i, j) % 2, 0);
                    }
                }
                prop_assert_eq!(x.parity[i] as u32 % 2, x.d[i] % 2);
            }
            prop_assert!(CartanDatum::new("t", x.a.clone(), x.parity.clone(), x.d.clone()).is_ok());
        } else {
            prop_assert!(!report.violated().is_empty());
            let err = CartanDatum::new("t", x.a.clone(), x.parity.clone(), x.d.clone()).unwrap_err();
            prop_assert!(matches!(err, QpiError::InvalidDatum(_)));
        }
    }

    #[test]
    fn json_round_trip(x in small_datum()) {
        let text = serde_json::to_string(&x).unwrap();
        let back: CartanDatum = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn every_condition_is_reported_by_label() {
    let cases: Vec<(CartanDatum, &str)> = vec![
        (raw(vec![vec![2, -2], vec![-1, 3]], vec![1, 0], vec![1, 2]), "(a)"),
        (raw(vec![vec![2, 2], vec![-1, 2]], vec![1, 0], vec![1, 2]), "(b)"),
        (raw(vec![vec![2, 0], vec![-1, 2]], vec![1, 0], vec![1, 2]), "(c)"),
        (raw(vec![vec![2, -1], vec![-1, 2]], vec![1, 0], vec![1, 1]), "(d)"),
        (raw(vec![vec![2, -2], vec![-1, 2]], vec![1, 0], vec![1, 1]), "(e)"),
        (raw(vec![vec![2, -2], vec![-1, 2]], vec![0, 0], vec![1, 2]), "(f)"),
        (raw(vec![vec![2, -1], vec![-1, 2]], vec![0, 0], vec![2, 2]), "odd index"),
        (raw(vec![vec![2, -1]], vec![1], vec![1]), "shape"),
    ];
    for (x, label) in cases {
        let r = x.validate();
        assert!(r.violated().contains(&label), "{label}: {:?}", r.violated());
    }
}

#[test]
fn validation_report_json() {
    let x = raw(vec![vec![2, -1], vec![-1, 2]], vec![1, 0], vec![1, 1]);
    let v = serde_json::to_value(x.validate()).unwrap();
    let entries = v.as_array().unwrap();
    assert!(entries.iter().all(|e| e.get("condition").is_some() && e.get("ok").is_some() && e.get("detail").is_some()));
    assert!(entries.iter().any(|e| e["condition"] == "(d)" && e["ok"] == false));
}

#[test]
fn json_input() {
    let d = CartanDatum::from_json(r#"{"A": [[2, -2], [-1, 2]], "parity": [1, 0], "d": [1, 2]}"#).unwrap();
    assert_eq!(d, CartanDatum::builtin("osp14").map(|b| CartanDatum { name: "custom".into(), ..b }).unwrap());
    assert!(matches!(CartanDatum::from_json("{"), Err(QpiError::Parse(_))));
    assert!(matches!(
        CartanDatum::from_json(r#"{"A": [[2, -1], [-1, 2]], "parity": [1, 0], "d": [1, 1]}"#),
        Err(QpiError::InvalidDatum(_))
    ));
}

#[test]
fn builtins_have_the_documented_shape() {
    let d = CartanDatum::builtin("osp14").unwrap();
    assert_eq!(d.a, vec![vec![2, -2], vec![-1, 2]]);
    assert_eq!((d.parity.clone(), d.d.clone()), (vec![1, 0], vec![1, 2]));
    let r = CartanDatum::builtin("rank2").unwrap();
    assert_eq!(r.a, vec![vec![2, -2], vec![-2, 2]]);
    assert_eq!(r.parity, vec![1, 1]);
    assert!(CartanDatum::builtin("sl3").is_err());
}
