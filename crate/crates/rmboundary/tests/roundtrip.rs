use num_bigint::BigInt;
use proptest::prelude::*;
use rmboundary::boundary::{CrossRatioEq, GaussRat, ProjPoint};
use rmboundary::exact::{fmt_rat, parse_pc, parse_quad, parse_rat, ratq, Disc, PCElem, QuadElem, Rat};
use rmboundary::orders::QOrder;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-1000i64..=1000, 1i64..=60).prop_map(|(p, q)| ratq(p, q))
}

fn arb_disc() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![-20i64, -12, -7, -4, -3, 5, 8, 12, 13, 17, 20, 21, 44, 45])
}

proptest! {
    #[test]
    fn rationals(r in arb_rat()) {
        prop_assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
    }

    #[test]
    fn quadratic_and_pseudo_cubic(dv in arb_disc(), u in arb_rat(), v in arb_rat(), q in arb_rat()) {
        let d = Disc::new(dv).unwrap();
        let x = QuadElem::new(d, u, v);
        prop_assert_eq!(parse_quad(&x.to_string(), d).unwrap(), x.clone());
        let w = PCElem::new(x, q);
        prop_assert_eq!(parse_pc(&w.to_string(), d).unwrap(), w);
    }

    #[test]
    fn ideals(dv in arb_disc(), n in 1u64..40) {
        let o = QOrder::from_value(dv).unwrap();
        if let Ok(list) = o.primitive_ideals_of_norm(n) {
            for i in list {
                prop_assert_eq!(o.parse_ideal(&i.to_string()).unwrap(), i.clone());
                let sq = i.mul(&i).unwrap();
                prop_assert_eq!(o.parse_ideal(&sq.to_string()).unwrap(), sq);
            }
        }
    }

    #[test]
    fn equations(a in prop::array::uniform3(-50i64..50), p in 0i64..97, q in 1i64..97) {
        let eq = CrossRatioEq::new(a.map(BigInt::from), ratq(p % q, q));
        prop_assert_eq!(CrossRatioEq::from_json(&eq.to_json()).unwrap(), eq);
    }

    #[test]
    fn points(re in arb_rat(), im in arb_rat()) {
        let z = GaussRat::new(re, im);
        let p = ProjPoint::Finite(z.clone());
        prop_assert_eq!(ProjPoint::parse(&p.to_string()).unwrap(), p);
        prop_assert_eq!(ProjPoint::parse(&z.to_string()).unwrap(), ProjPoint::Finite(z));
    }
}

#[test]
fn infinity_round_trips() {
    assert_eq!(ProjPoint::parse(&ProjPoint::Infinity.to_string()).unwrap(), ProjPoint::Infinity);
}
