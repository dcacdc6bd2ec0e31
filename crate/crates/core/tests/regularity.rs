use convreg::instances::{random_cone_collection, random_polyhedral_collection};
use convreg::rational::{add, is_zero_vec, ratio, scale, zeros, RVec, Rat};
use convreg::regularity::{
    lambda_d, lambda_g, lambda_n, min_decomposition, normality_inclusion_holds, polar_cones,
    Constant, Decomposition, SamplingParams,
};
use convreg::set::GeneratedCone;
use convreg::{NormContext, NormKind};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact_norm(l1: bool) -> NormContext {
    NormContext::exact(if l1 { NormKind::L1 } else { NormKind::Linf })
}

fn tol() -> Rat {
    ratio(1, 1_000_000)
}

/// A point of `Σ K_i` built from nonnegative generator combinations,
/// together with the per-cone pieces.
fn point_in_sum(cones: &[GeneratedCone], rng: &mut ChaCha8Rng) -> (RVec, Vec<RVec>) {
    let dim = cones[0].dim();
    let pieces: Vec<RVec> = cones
        .iter()
        .map(|k| {
            k.generators().iter().fold(zeros(dim), |acc, g| {
                add(&acc, &scale(g, &ratio(rng.gen_range(0..=4), 2)))
            })
        })
        .collect();
    let total = pieces.iter().fold(zeros(dim), |acc, p| add(&acc, p));
    (total, pieces)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cone_constants_coincide(seed in any::<u64>(), l1 in any::<bool>()) {
        let c = random_cone_collection(seed, exact_norm(l1));
        let params = SamplingParams::default();
        let n = lambda_n(&c, &tol(), &params).unwrap();
        let polars = polar_cones(&c).unwrap();
        let d = lambda_d(&polars, c.norm(), &params).unwrap();
        let g = lambda_g(&polars, c.norm(), &params).unwrap();
        prop_assert!(matches!(n, Constant::Exact(_)), "{:?}", n);
        prop_assert_eq!(&n, &d);
        prop_assert_eq!(&n, &g);
    }

    #[test]
    fn normality_inclusion_flips_at_lambda_n(seed in any::<u64>(), l1 in any::<bool>()) {
        let c = random_polyhedral_collection(seed, exact_norm(l1));
        let n = lambda_n(&c, &tol(), &SamplingParams::default()).unwrap();
        let Constant::Exact(v) = n else {
            prop_assert!(matches!(n, Constant::Infinite));
            return Ok(());
        };
        prop_assert!(v <= Rat::one() + tol());
        let one = Rat::one();
        let below = &v - tol();
        if below > Rat::zero() {
            prop_assert!(normality_inclusion_holds(&c, &below, &one).unwrap().holds);
        }
        let above = &v + ratio(2, 1_000_000);
        let verdict = normality_inclusion_holds(&c, &above, &one).unwrap();
        prop_assert!(!verdict.holds);
        let w = verdict.witness.unwrap();
        prop_assert!(c.sets().iter().all(|s| s.dim() == w.len()));
    }

    #[test]
    fn normality_inclusion_is_monotone_in_eta(seed in any::<u64>(), a in 1i64..20, b in 1i64..20) {
        let c = random_polyhedral_collection(seed, exact_norm(seed % 2 == 0));
        let (lo, hi) = (ratio(a.min(b), 10), ratio(a.max(b), 10));
        let one = Rat::one();
        if normality_inclusion_holds(&c, &hi, &one).unwrap().holds {
            prop_assert!(normality_inclusion_holds(&c, &lo, &one).unwrap().holds);
        }
    }

    #[test]
    fn exact_decompositions_are_feasible_and_no_worse_than_a_known_one(seed in any::<u64>(), l1 in any::<bool>()) {
        let c = random_cone_collection(seed, exact_norm(l1));
        let cones = polar_cones(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x77);
        let (x, pieces) = point_in_sum(&cones, &mut rng);
        prop_assume!(!is_zero_vec(&x));
        let dual = c.norm().dual_kind();
        let Decomposition::Exact { terms, norm_sum } = min_decomposition(&cones, &x, c.norm()).unwrap() else {
            return Err(TestCaseError::fail("polyhedral norms decompose exactly"));
        };
        let total = terms.iter().fold(zeros(c.dim()), |acc, (_, t)| add(&acc, t));
        prop_assert_eq!(total, x);
        for (i, t) in &terms {
            prop_assert!(cones[*i].contains(t));
        }
        let cost = |ts: &mut dyn Iterator<Item = &RVec>| ts.fold(Rat::zero(), |s, t| s + dual.eval(t).unwrap());
        prop_assert_eq!(&norm_sum, &cost(&mut terms.iter().map(|(_, t)| t)));
        prop_assert!(norm_sum <= cost(&mut pieces.iter()));
    }

    #[test]
    fn euclidean_decompositions_sit_between_the_polyhedral_ones(seed in any::<u64>()) {
        let c = random_cone_collection(seed, NormContext::float(NormKind::L2));
        let cones = polar_cones(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x99);
        let (x, _) = point_in_sum(&cones, &mut rng);
        prop_assume!(!is_zero_vec(&x));
        match min_decomposition(&cones, &x, c.norm()).unwrap() {
            Decomposition::Approx { residual, within_envelope, .. } => {
                prop_assert!(within_envelope);
                prop_assert!(residual < 1e-6, "residual {residual}, x = {x:?}");
            }
            Decomposition::Exact { .. } => return Err(TestCaseError::fail("euclidean decompositions are iterative")),
        }
    }
}
