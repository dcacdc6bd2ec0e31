//! Named analytic instances and seeded random instance families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::norm::{NormContext, NormKind};
use crate::polyhedron::{halfspace, HPolyhedron, Row};
use crate::rational::{rat, rvec, RVec};
use crate::set::{Ball, Collection, ConvexSet};

/// `{x1 <= 0}` and `{x2 <= 0}`.
pub fn right_angle(norm: NormContext) -> Collection {
    Collection::new(
        2,
        norm,
        vec![
            ConvexSet::HPoly(halfspace(rvec(&[1, 0]), rat(0))),
            ConvexSet::HPoly(halfspace(rvec(&[0, 1]), rat(0))),
        ],
        None,
    )
    .expect("valid instance")
}

/// The unit ball centred at `(0, 1)` and `{x2 <= 0}`, touching at the origin.
pub fn ball_tangency() -> Collection {
    Collection::new(
        2,
        NormContext::float(NormKind::L2),
        vec![
            ConvexSet::Ball(Ball::new(rvec(&[0, 1]), rat(1)).expect("positive radius")),
            ConvexSet::HPoly(halfspace(rvec(&[0, 1]), rat(0))),
        ],
        Some(ConvexSet::HPoly(HPolyhedron::origin(2))),
    )
    .expect("valid instance")
}

/// The intervals `[-1/i, 1/i]`, `i = 1, 2, ...`.
pub fn shrinking_intervals(norm: NormContext) -> Collection {
    Collection::new(1, norm, vec![ConvexSet::ShrinkingIntervals], None).expect("valid instance")
}

/// Two lines through the origin at 45 degrees, the diagonal first.
pub fn lines_at_45(norm: NormContext) -> Collection {
    let line =
        |a: &[i64]| ConvexSet::HPoly(HPolyhedron::new(2, vec![Row::eq(rvec(a), rat(0))]).unwrap());
    Collection::new(2, norm, vec![line(&[1, -1]), line(&[0, 1])], None).expect("valid instance")
}

fn nonzero_vector(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> RVec {
    loop {
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|x| *x != 0) {
            return rvec(&v);
        }
    }
}

/// 2 to 4 halfspaces `{a·x <= 0}` in dimension 2 or 3 with small integer
/// normals.
pub fn random_cone_collection(seed: u64, norm: NormContext) -> Collection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(2..=3);
    let m = rng.gen_range(2..=4);
    let sets = (0..m)
        .map(|_| ConvexSet::HPoly(halfspace(nonzero_vector(&mut rng, dim, 3), rat(0))))
        .collect();
    Collection::new(dim, norm, sets, None).expect("cones share the origin")
}

/// A bounded polyhedron with at most `max_facets` rows `a·x <= b`, `b >= 0`,
/// so it contains the origin.
pub fn random_polytope(rng: &mut ChaCha8Rng, dim: usize, max_facets: usize) -> HPolyhedron {
    loop {
        let k = rng.gen_range(dim + 1..=max_facets.max(dim + 1));
        let rows = (0..k)
            .map(|_| Row::le(nonzero_vector(rng, dim, 3), rat(rng.gen_range(0..=3))))
            .collect();
        let h = HPolyhedron::new(dim, rows).unwrap();
        if let Ok(v) = h.to_v() {
            if v.rays().is_empty() && !v.points().is_empty() {
                return h;
            }
        }
    }
}

/// A polyhedral cone `{a_j·x <= 0}` with one or two rows.
pub fn random_cone(rng: &mut ChaCha8Rng, dim: usize) -> HPolyhedron {
    let k = rng.gen_range(1..=2);
    let rows = (0..k)
        .map(|_| Row::le(nonzero_vector(rng, dim, 3), rat(0)))
        .collect();
    HPolyhedron::new(dim, rows).unwrap()
}

/// A polytope of dimension at most 3 with at most 6 facets containing 0.
pub fn random_polytope_with_origin(seed: u64) -> HPolyhedron {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(1..=3);
    random_polytope(&mut rng, dim, 6)
}

/// Two polyhedra containing 0 in a common dimension; the first is a cone
/// for odd seeds.
pub fn random_pair(seed: u64) -> (HPolyhedron, HPolyhedron) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(2..=3);
    let a = if seed % 2 == 1 {
        random_cone(&mut rng, dim)
    } else {
        random_polytope(&mut rng, dim, 5)
    };
    let b = random_polytope(&mut rng, dim, 5);
    (a, b)
}

/// Two or three polyhedra in the plane, each containing 0; halfspaces
/// through 0 mixed with polytopes.
pub fn random_polyhedral_collection(seed: u64, norm: NormContext) -> Collection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(2..=3);
    let sets = (0..m)
        .map(|_| {
            let h = if rng.gen_bool(0.3) {
                random_cone(&mut rng, 2)
            } else {
                random_polytope(&mut rng, 2, 5)
            };
            ConvexSet::HPoly(h)
        })
        .collect();
    Collection::new(2, norm, sets, None).expect("sets share the origin")
}

/// A point with small-denominator coordinates in `[-r, r]^dim`.
pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, r: i64) -> RVec {
    (0..dim)
        .map(|_| crate::rational::ratio(rng.gen_range(-4 * r..=4 * r), 4))
        .collect()
}
