use convreg::instances::{random_pair, random_point, random_polytope_with_origin};
use convreg::projection::{distance_lp, project_l2_exact};
use convreg::rational::{dot, ratio, sub, RVec, Rat};
use convreg::{
    dual_cone, inverse_sum, inverse_sum_membership, minkowski_sum, polar, recession_cone,
    HPolyhedron, NormKind, Row,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Possibly unbounded polyhedron `{a_j·x <= b_j}` with `b_j >= 0`.
fn random_polyhedron(seed: u64) -> HPolyhedron {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=5);
    let rows = (0..k)
        .map(|_| {
            let a: RVec = loop {
                let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
                if v.iter().any(|x| *x != 0) {
                    break v.iter().map(|x| Rat::from_integer((*x).into())).collect();
                }
            };
            Row::le(a, Rat::from_integer(rng.gen_range(0..=3).into()))
        })
        .collect();
    HPolyhedron::new(dim, rows).unwrap()
}

fn random_homogeneous(seed: u64) -> HPolyhedron {
    recession_cone(&random_polyhedron(seed)).unwrap()
}

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn bipolar_recovers_sets_containing_the_origin(seed in any::<u64>()) {
        let p = random_polyhedron(seed);
        let back = polar(&polar(&p).unwrap()).unwrap();
        prop_assert!(back.same_set(&p).unwrap());
    }

    #[test]
    fn polar_reverses_inclusion(seed in any::<u64>()) {
        let p = random_polytope_with_origin(seed);
        let q = HPolyhedron::new(p.dim(), p.rows()[1..].to_vec()).unwrap();
        prop_assert!(polar(&q).unwrap().included_in(&polar(&p).unwrap()).unwrap().holds);
    }

    #[test]
    fn polar_of_a_scaled_set_is_inversely_scaled(seed in any::<u64>(), num in 1i64..6, den in 1i64..6) {
        let p = random_polyhedron(seed);
        let t = ratio(num, den);
        let lhs = polar(&p.scaled(&t)).unwrap();
        let rhs = polar(&p).unwrap().scaled(&(Rat::one() / &t));
        prop_assert!(lhs.same_set(&rhs).unwrap());
    }

    #[test]
    fn recession_cone_is_dual_to_the_polar(seed in any::<u64>()) {
        let p = random_polyhedron(seed);
        let rec = recession_cone(&p).unwrap();
        prop_assert!(rec.same_set(&dual_cone(&polar(&p).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn h_to_v_to_h_round_trips(seed in any::<u64>()) {
        let p = random_polyhedron(seed);
        let back = p.to_v().unwrap().to_h();
        prop_assert!(back.same_set(&p).unwrap());
        prop_assert_eq!(back.canonical(), p.canonical());
    }

    #[test]
    fn dual_cone_is_an_involution_on_cones(seed in any::<u64>()) {
        let k = random_homogeneous(seed);
        prop_assert!(dual_cone(&dual_cone(&k).unwrap()).unwrap().same_set(&k).unwrap());
    }

    #[test]
    fn inverse_sum_matches_its_definition(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let s = inverse_sum(&a, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..12 {
            let x = random_point(&mut rng, a.dim(), 3);
            prop_assert_eq!(s.contains(&x), inverse_sum_membership(&a, &b, &x).unwrap(), "x = {:?}", x);
        }
    }

    #[test]
    fn polar_of_a_sum_is_the_inverse_sum_of_polars(seed in any::<u64>()) {
        let (a, b) = random_pair(seed);
        let lhs = polar(&minkowski_sum(&a, &b).unwrap()).unwrap();
        let rhs = inverse_sum(&polar(&a).unwrap(), &polar(&b).unwrap()).unwrap();
        prop_assert!(lhs.same_set(&rhs).unwrap());
    }

    #[test]
    fn inverse_sum_with_a_cone_is_the_intersection(seed in any::<u64>()) {
        let (k, b) = random_pair(seed | 1);
        prop_assert!(k.is_cone());
        prop_assert!(inverse_sum(&k, &b).unwrap().same_set(&k.intersect(&b).unwrap()).unwrap());
    }

    #[test]
    fn euclidean_projection_satisfies_the_variational_inequality(seed in any::<u64>()) {
        let p = random_polyhedron(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let x = random_point(&mut rng, p.dim(), 4);
        let (proj, sq) = project_l2_exact(&p, &x).unwrap();
        prop_assert!(p.contains(&proj));
        let r = sub(&x, &proj);
        prop_assert_eq!(dot(&r, &r), sq);
        let v = p.to_v().unwrap();
        for y in v.points() {
            prop_assert!(dot(&r, &sub(y, &proj)) <= Rat::zero());
        }
        for d in v.rays() {
            prop_assert!(dot(&r, d) <= Rat::zero());
        }
    }

    #[test]
    fn polyhedral_distance_is_the_smallest_feasible_radius(seed in any::<u64>(), l1 in any::<bool>()) {
        let kind = if l1 { NormKind::L1 } else { NormKind::Linf };
        let p = random_polyhedron(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdef);
        let x = random_point(&mut rng, p.dim(), 4);
        let (q, d) = distance_lp(&p, &x, kind).unwrap();
        prop_assert!(p.contains(&q));
        prop_assert_eq!(kind.eval(&sub(&x, &q)).unwrap(), d.clone());
        let ball = |r: &Rat| kind.unit_ball_h(p.dim()).unwrap().scaled(r).translated(&x);
        if d.is_zero() {
            prop_assert!(p.contains(&x));
        } else {
            prop_assert!(!p.intersect(&ball(&d)).unwrap().is_empty());
            let smaller = &d * ratio(999, 1000);
            prop_assert!(p.intersect(&ball(&smaller)).unwrap().is_empty());
        }
    }
}

#[test]
fn polar_requires_the_origin() {
    let p = HPolyhedron::new(1, vec![Row::le(vec![Rat::one()], -Rat::one())]).unwrap();
    assert!(polar(&p).is_err());
}
