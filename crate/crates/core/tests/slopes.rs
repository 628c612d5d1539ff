use anosurf::slopes::{self, slopes_up_to_height, SlopeError};
use anosurf::{AdmissibleSet, Slope};
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

fn s(x: &str) -> Slope {
    x.parse().unwrap()
}

#[test]
fn reduce_normalizes_sign_and_gcd() {
    assert_eq!(Slope::reduce(2, 4).unwrap(), s("2"));
    assert_eq!(Slope::reduce(-3, 6).unwrap(), s("-2"));
    assert_eq!(Slope::reduce(-4, 6).unwrap(), s("-3/2"));
    assert_eq!(Slope::reduce(0, -5).unwrap(), Slope::infinity());
    assert_eq!(Slope::reduce(0, 0), Err(SlopeError::ZeroClass));
}

#[test]
fn parse_and_display() {
    assert_eq!(s("9/2").to_string(), "9/2");
    assert_eq!(s("-14/4").to_string(), "-7/2");
    assert_eq!(s(" inf ").to_string(), "inf");
    assert_eq!(s("∞"), Slope::infinity());
    assert_eq!(s("3/1"), Slope::integer(3));
    for bad in ["0/0", "1/0", "x", "", "1/2/3", "--1"] {
        assert!(bad.parse::<Slope>().is_err(), "{bad}");
    }
}

#[test]
fn serde_uses_the_string_form() {
    let j = serde_json::to_string(&s("-7/3")).unwrap();
    assert_eq!(j, "\"-7/3\"");
    assert_eq!(serde_json::from_str::<Slope>(&j).unwrap(), s("-7/3"));
}

#[test]
fn intersection_examples() {
    assert_eq!(slopes::intersection_number(&s("9/2"), &s("4")), 1);
    assert_eq!(s("1/3").intersection_number(&Slope::infinity()), 3);
    assert_eq!(s("0").intersection_number(&Slope::infinity()), 1);
    assert_eq!(s("5").intersection_number(&s("5")), 0);
}

#[test]
fn admissible_examples() {
    let gt3 = AdmissibleSet::GreaterThan { bound: s("3") };
    assert!(gt3.contains(&s("7/2")) && !gt3.contains(&s("3")) && !gt3.contains(&Slope::infinity()));
    let b5 = AdmissibleSet::IntersectionWithAtLeast { anchor: s("4"), n: 2 };
    assert!(b5.contains(&s("0")) && !b5.contains(&s("9/2")) && !b5.contains(&s("4")));
    let b10 = AdmissibleSet::IntersectionWithMoreThan { anchor: s("4"), n: 1 };
    assert!(b10.contains(&s("11/2")) && !b10.contains(&s("7/2")) && !b10.contains(&s("5")));
    let p2 = AdmissibleSet::IntegerDenominatorAtLeast2;
    assert!(p2.contains(&s("1/2")) && !p2.contains(&s("7")) && !p2.contains(&Slope::infinity()));
    assert!(!AdmissibleSet::AllRationals.contains(&Slope::infinity()));
}

#[test]
fn admissible_serde_shape() {
    let a: AdmissibleSet = serde_json::from_str(r#"{"kind":"greater_than","bound":"3"}"#).unwrap();
    assert_eq!(a, AdmissibleSet::GreaterThan { bound: s("3") });
    let b: AdmissibleSet = serde_json::from_str(r#"{"kind":"integer_denominator_at_least2"}"#).unwrap();
    assert_eq!(b, AdmissibleSet::IntegerDenominatorAtLeast2);
}

#[test]
fn height_enumeration_matches_gcd_scan() {
    for h in 1..=12i64 {
        let mut want = 0;
        for p in 1..=h {
            for q in -h..=h {
                if p.gcd(&q) == 1 {
                    want += 1;
                }
            }
        }
        assert_eq!(slopes_up_to_height(h).len(), want);
    }
}

#[test]
fn generic_over_bigint() {
    let a = slopes::Slope::<BigInt>::reduce(BigInt::from(6), BigInt::from(-4)).unwrap();
    assert_eq!(a.to_string(), "-2/3");
    let b: slopes::Slope<BigInt> = "4".parse().unwrap();
    assert_eq!(a.intersection_number(&b), BigInt::from(14));
}

fn finite() -> impl Strategy<Value = Slope> {
    (1i64..200, -200i64..200).prop_filter_map("coprime", |(p, q)| Slope::reduce(p, q).ok())
}

fn any_set() -> impl Strategy<Value = AdmissibleSet> {
    prop_oneof![
        Just(AdmissibleSet::AllRationals),
        Just(AdmissibleSet::IntegerDenominatorAtLeast2),
        finite().prop_map(|slope| AdmissibleSet::Only { slope }),
        finite().prop_map(|bound| AdmissibleSet::GreaterThan { bound }),
        (finite(), 0i64..6).prop_map(|(anchor, n)| AdmissibleSet::IntersectionWithAtLeast { anchor, n }),
        (finite(), 0i64..6).prop_map(|(anchor, n)| AdmissibleSet::IntersectionWithMoreThan { anchor, n }),
    ]
}

proptest! {
    #[test]
    fn reduce_is_scale_invariant(p in -500i64..500, q in -500i64..500, k in 1i64..50) {
        prop_assume!(p != 0 || q != 0);
        prop_assert_eq!(Slope::reduce(p, q).unwrap(), Slope::reduce(k * p, k * q).unwrap());
        prop_assert_eq!(Slope::reduce(p, q).unwrap(), Slope::reduce(-p, -q).unwrap());
        let r = Slope::reduce(p, q).unwrap();
        prop_assert!(*r.p() >= 0);
        prop_assert_eq!(r.p().gcd(r.q()), 1);
    }

    #[test]
    fn intersection_is_symmetric_and_bigint_exact(a in finite(), b in finite()) {
        let i = a.intersection_number(&b);
        prop_assert_eq!(i, b.intersection_number(&a));
        let det = BigInt::from(*a.p()) * BigInt::from(*b.q()) - BigInt::from(*b.p()) * BigInt::from(*a.q());
        prop_assert_eq!(BigInt::from(i), if det < BigInt::from(0) { -det } else { det });
        prop_assert_eq!(a.intersection_number(&a), 0);
    }

    #[test]
    fn mirror_is_an_involution_preserving_intersections(a in finite(), b in finite()) {
        prop_assert_eq!(a.mirror().mirror(), a.clone());
        prop_assert_eq!(a.mirror().intersection_number(&b.mirror()), a.intersection_number(&b));
    }

    #[test]
    fn display_round_trips(a in finite()) {
        prop_assert_eq!(a.to_string().parse::<Slope>().unwrap(), a);
    }

    #[test]
    fn witness_lies_in_the_set(set in any_set()) {
        let w = set.witness().expect("every generated set is nonempty");
        prop_assert!(set.contains(&w));
    }
}
