//! Property tests over randomly generated presentations, complementing the
//! seeded verification suites with shrinking on failure.

use charslope::field::FieldSpec;
use charslope::geometry::{enumerate_coord_points, CoordPoint};
use charslope::order::ExtOrder;
use charslope::poly::Poly;
use charslope::presentation::PPresentation;
use proptest::prelude::*;
use std::sync::Arc;

const NVARS: usize = 2;

fn poly_strategy(field: Arc<FieldSpec>, min_ord: u32) -> impl Strategy<Value = Poly> {
    let p = field.p;
    prop::collection::vec(
        (
            1..p,
            prop::collection::vec(0u32..5, NVARS).prop_filter("total degree", move |e| {
                e.iter().sum::<u32>() >= min_ord
            }),
        ),
        0..4,
    )
    .prop_map(move |terms| {
        let mut poly = Poly::zero(&field, NVARS);
        for (c, exp) in terms {
            let t = Poly::term(&field, NVARS, field.from_u32(c), exp);
            poly = poly.add(&t).unwrap();
        }
        poly
    })
}

fn presentation_strategy(p: u32, e: u32) -> impl Strategy<Value = Option<PPresentation>> {
    let field = FieldSpec::prime(p).unwrap();
    let pe = p.pow(e) as usize;
    let strategies: Vec<_> = (1..=pe)
        .map(|j| poly_strategy(field.clone(), j as u32))
        .collect();
    let f = field.clone();
    strategies.prop_map(move |coeffs| PPresentation::new(&f, e, NVARS, coeffs).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // slope never decreases under specialization to a smaller coordinate point
    #[test]
    fn slope_monotone_under_specialization(pres in presentation_strategy(2, 1)) {
        if let Some(pres) = pres {
            let pts = enumerate_coord_points(NVARS);
            for big in &pts {
                for small in &pts {
                    // big carries every variable of small, so big is the
                    // deeper specialization and its slope dominates
                    if big.specializes(small) {
                        prop_assert!(pres.slope_at(small) <= pres.slope_at(big));
                    }
                }
            }
        }
    }

    // cleaning terminates and never lowers the slope
    #[test]
    fn cleaning_is_monotone(pres in presentation_strategy(2, 1)) {
        if let Some(pres) = pres {
            let origin = CoordPoint::origin(NVARS);
            if let Ok((cleaned, log)) = pres.clean_at(&origin) {
                prop_assert!(cleaned.slope_at(&origin) >= pres.slope_at(&origin));
                for w in log.windows(2) {
                    prop_assert!(w[1].slope_before > w[0].slope_before);
                }
            }
        }
    }

    // the a-term order bound: slope <= ord(a_{p^e}) / p^e at every point
    #[test]
    fn slope_bounded_by_a_term(pres in presentation_strategy(3, 1)) {
        if let Some(pres) = pres {
            for pt in enumerate_coord_points(NVARS) {
                prop_assert!(pres.slope_at(&pt) <= pres.a_term_order(&pt));
            }
        }
    }

    // shifting the section by alpha and back is the identity on coefficients
    #[test]
    fn shift_round_trip(pres in presentation_strategy(2, 2),
                        alpha in poly_strategy(FieldSpec::prime(2).unwrap(), 1)) {
        if let Some(pres) = pres {
            let there = pres.shift_z(&alpha).unwrap();
            let back = there.shift_z(&alpha.neg()).unwrap();
            for (a, b) in pres.coeffs.iter().zip(back.coeffs.iter()) {
                prop_assert_eq!(a.sub(b).unwrap().order_at(&[]), ExtOrder::Infinite);
            }
        }
    }
}
