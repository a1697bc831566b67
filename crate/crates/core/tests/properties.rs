use dmod_deform::algebra::{TruncatedAlgebra, Word};
use dmod_deform::chart::{ChartElement, ChartId, Curve, Inclusion};
use dmod_deform::cohomology::{CochainRep, CoverDiagram};
use dmod_deform::deformation::{
    build_exponential_family, build_tangent_family, check_deformation, tangent_representatives,
    DeformationData,
};
use dmod_deform::diffop::DiffOp;
use dmod_deform::ext::{Ext1Space, TruncationPolicy};
use dmod_deform::scalar::{frac, int, Scalar};
use dmod_deform::syntax::parse_element;
use proptest::prelude::*;

fn curve(regime_a_zero: bool) -> Curve {
    if regime_a_zero {
        Curve::from_ab(int(0), int(1)).unwrap()
    } else {
        Curve::from_ab(int(1), int(1)).unwrap()
    }
}

fn arb_raw(chart: ChartId) -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
    let w = if chart == ChartId::U3 {
        -4i64..5
    } else {
        0i64..4
    };
    prop::collection::vec((0i64..4, w, -4i64..5), 0..4)
}

fn element(c: &Curve, chart: ChartId, raw: &[(i64, i64, i64)]) -> ChartElement {
    let raw: Vec<(i64, i64, Scalar)> = raw.iter().map(|&(x, w, k)| (x, w, int(k))).collect();
    c.element(chart, &raw).unwrap()
}

fn arb_chart() -> impl Strategy<Value = ChartId> {
    prop::sample::select(ChartId::ALL.to_vec())
}

type Raw = Vec<(i64, i64, i64)>;

fn arb_case() -> impl Strategy<Value = (bool, ChartId, [Raw; 3])> {
    (any::<bool>(), arb_chart()).prop_flat_map(|(z, chart)| {
        (
            Just(z),
            Just(chart),
            [arb_raw(chart), arb_raw(chart), arb_raw(chart)],
        )
    })
}

fn op(c: &Curve, chart: ChartId, coeffs: &[Vec<(i64, i64, i64)>]) -> DiffOp {
    coeffs
        .iter()
        .enumerate()
        .fold(DiffOp::zero(chart), |p, (j, raw)| {
            p.with_term(j as u32, element(c, chart, raw))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chart_ring_axioms((z, chart, raws) in arb_case()) {
        let c = curve(z);
        let [u, v, w] = raws.map(|r| element(&c, chart, &r));
        let uv = c.mul(&u, &v).unwrap();
        prop_assert_eq!(c.mul(&uv, &w).unwrap(), c.mul(&u, &c.mul(&v, &w).unwrap()).unwrap());
        prop_assert_eq!(&uv, &c.mul(&v, &u).unwrap());
        prop_assert_eq!(c.mul(&u, &(&v + &w)).unwrap(), &uv + &c.mul(&u, &w).unwrap());
        let reduced = c.chart_reduce(chart, u.terms().iter().map(|(m, k)| (*m, k.clone()))).unwrap();
        prop_assert_eq!(reduced, u);
    }

    #[test]
    fn leibniz_and_restriction((z, chart, raws) in arb_case()) {
        let c = curve(z);
        let [u, v, _] = raws.map(|r| element(&c, chart, &r));
        let uv = c.mul(&u, &v).unwrap();
        let rhs = &c.mul(&c.derive(&u), &v).unwrap() + &c.mul(&u, &c.derive(&v)).unwrap();
        prop_assert_eq!(c.derive(&uv), rhs);
        if chart != ChartId::U3 {
            let incl = Inclusion::new(chart, ChartId::U3).unwrap();
            let r = |e: &ChartElement| c.restrict(e, incl).unwrap();
            prop_assert_eq!(r(&uv), c.mul(&r(&u), &r(&v)).unwrap());
            prop_assert_eq!(r(&c.derive(&u)), c.derive(&r(&u)));
        }
    }

    #[test]
    fn operators_act_and_are_nilpotent((z, chart, raws) in arb_case()) {
        let c = curve(z);
        let p = op(&c, chart, &raws[..2]);
        let q = op(&c, chart, &raws[1..]);
        let m = element(&c, chart, &raws[2]);
        let pq = c.op_compose(&p, &q).unwrap();
        prop_assert_eq!(
            c.op_apply(&pq, &m).unwrap(),
            c.op_apply(&p, &c.op_apply(&q, &m).unwrap()).unwrap()
        );
        let f = element(&c, chart, &raws[0]);
        let mut ad = pq.clone();
        for _ in 0..=pq.order().unwrap_or(0) {
            ad = c.commutator_with(&ad, &f);
        }
        prop_assert!(ad.is_zero());
        if chart != ChartId::U3 {
            let incl = Inclusion::new(chart, ChartId::U3).unwrap();
            let lhs = c.restrict_op(&pq, incl).unwrap();
            let rhs = c
                .op_compose(&c.restrict_op(&p, incl).unwrap(), &c.restrict_op(&q, incl).unwrap())
                .unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn reduction_is_idempotent_and_kills_the_image() {
    for z in [false, true] {
        let c = curve(z);
        for chart in ChartId::ALL {
            let space =
                Ext1Space::compute(&c, Inclusion::identity(chart), TruncationPolicy::default())
                    .unwrap();
            for (x, w) in [(0, 0), (1, 2), (2, 3), (2, 1)] {
                let w = if chart == ChartId::U3 { w - 3 } else { w };
                let g = c
                    .element(chart, &[(x, w, int(3)), (0, 1, frac(-1, 2))])
                    .unwrap();
                let k = space.reduce(&g).unwrap();
                assert_eq!(space.reduce(&space.element(&k)).unwrap(), k);
                let image = c.derive(&g);
                assert!(space.reduce(&image).unwrap().is_zero());
            }
        }
    }
}

fn reps(z: bool) -> (Curve, [CochainRep; 2]) {
    let c = curve(z);
    let d = CoverDiagram::build(&c, TruncationPolicy::default()).unwrap();
    let reps = tangent_representatives(&d).unwrap();
    (c, reps)
}

#[test]
fn exponential_family_at_order_one_is_the_tangent_family() {
    for z in [false, true] {
        let (c, reps) = reps(z);
        let tangent = build_tangent_family(&c, &reps);
        let exp1 = build_exponential_family(&c, &reps, 1);
        for chart in ChartId::ALL {
            assert_eq!(
                tangent.derivation_image(chart),
                exp1.derivation_image(chart)
            );
        }
        for incl in Inclusion::ALL {
            assert_eq!(tangent.restriction(incl), exp1.restriction(incl));
        }
        assert!(check_deformation(&tangent, 10).is_ok());
    }
}

#[test]
fn second_order_term_of_the_exponential() {
    let (c, reps) = reps(true);
    let data = build_exponential_family(&c, &reps, 2);
    let g = data.restriction(Inclusion::U1_U3);
    let expected = parse_element(&c, ChartId::U3, "1/2*x^4*y^-2").unwrap();
    assert_eq!(g.coefficient(&Word::new(&[2, 2])), expected);
    assert_eq!(
        g.coefficient(&Word::new(&[2])),
        parse_element(&c, ChartId::U3, "x^2*y^-1").unwrap()
    );
}

#[test]
fn vanishing_tau_gives_plain_restriction() {
    let (c, reps) = reps(false);
    let data = build_exponential_family(&c, &reps, 6);
    let g = data.restriction(Inclusion::U1_U3);
    assert_eq!(g.terms().len(), 1);
    assert_eq!(
        g.coefficient(&Word::empty()),
        ChartElement::one(ChartId::U3)
    );
}

#[test]
fn every_family_reduces_to_the_classical_structure() {
    for z in [false, true] {
        let (c, reps) = reps(z);
        for n in 1..=4 {
            let data = build_exponential_family(&c, &reps, n);
            assert!(data.residue_is_classical());
            let free = data.over(TruncatedAlgebra::free(2, n));
            assert!(free.residue_is_classical());
        }
    }
}

#[test]
fn defects_stay_in_condition_two_at_every_order() {
    for z in [false, true] {
        let (c, reps) = reps(z);
        for n in 1..=3 {
            let free = DeformationData::exponential(&c, &reps, TruncatedAlgebra::free(2, n));
            let check = check_deformation(&free, 4);
            assert!(
                check.violations.iter().all(|v| v.condition == 2),
                "order {n}"
            );
            assert_eq!(check.is_ok(), n < 2);
        }
    }
}
