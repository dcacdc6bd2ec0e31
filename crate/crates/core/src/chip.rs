//! Conical hull intersection properties at a point.
//!
//! * CHIP: `T(∩A_i, x) = ∩ T(A_i, x)`.
//! * Closure variant: the cones `cone(A_i - x)` have the closed
//!   intersection property. A ball with `x` on its sphere contributes the
//!   non-closed cone `{d : ⟨x - c, d⟩ < 0} ∪ {0}`; every other supported
//!   set contributes its (closed) tangent cone.
//! * Strong CHIP: `N(∩A_i, x) = Σ N(A_i, x)`.
//! * Normal CHIP: the cones `cone(A_i - x)` have the normal property. This
//!   holds iff the closure variant holds and the tangent cones have the
//!   normal property, so the constant reported is `λ_N` of the tangent cones.
//! * Weak normal CHIP: the same with the weak normal property, checked on
//!   the facet normals of the tangent cones and seeded random functionals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cones::{normal_cone, tangent_cone};
use crate::error::{GeomError, Result};
use crate::lp;
use crate::polyhedron::{check_dim, HPolyhedron, Row};
use crate::rational::{cmp_vec, neg, ratio, sub, RVec, Rat};
use crate::regularity::{lambda_n, weak_normal_eta, Constant, SamplingParams};
use crate::set::{Collection, ConvexSet, GeneratedCone};

#[derive(Clone, Debug, PartialEq)]
pub struct ChipOptions {
    pub tol: Rat,
    /// Random functionals tested for the weak normal CHIP, on top of the
    /// facet normals.
    pub dual_samples: usize,
    pub sampling: SamplingParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChipReport {
    pub point: RVec,
    pub chip: bool,
    pub chip_closure_variant: bool,
    pub strong_chip: bool,
    pub normal_chip: bool,
    /// `λ_N` of the tangent cones.
    pub normal_chip_constant: Constant,
    /// Holds on every tested functional.
    pub weak_normal_chip: bool,
    pub tested_functionals: usize,
    /// Failed property name to a direction or functional certifying it.
    pub witnesses: BTreeMap<String, RVec>,
}

impl ChipReport {
    /// The first witness in the order chip, closure variant, strong, weak.
    pub fn primary_witness(&self) -> Option<&RVec> {
        [
            "chip",
            "chip_closure_variant",
            "strong_chip",
            "weak_normal_chip",
        ]
        .iter()
        .find_map(|k| self.witnesses.get(*k))
    }
}

fn require_common_point(c: &Collection, x: &[Rat]) -> Result<()> {
    check_dim(c.dim(), x.len())?;
    if !c.contains(x) {
        let pt: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        return Err(GeomError::NotMember(format!(
            "({}) is not in every set",
            pt.join(", ")
        )));
    }
    Ok(())
}

/// `T(∩A_i, x)` from the intersection (override, concatenated rows, or
/// `{0}` for the interval family).
pub fn tangent_of_intersection(c: &Collection, x: &[Rat]) -> Result<HPolyhedron> {
    require_common_point(c, x)?;
    tangent_cone(&c.intersection()?, x)
}

/// `∩ T(A_i, x)`.
pub fn intersection_of_tangents(c: &Collection, x: &[Rat]) -> Result<HPolyhedron> {
    require_common_point(c, x)?;
    let ts = c
        .sets()
        .iter()
        .map(|s| tangent_cone(s, x))
        .collect::<Result<Vec<_>>>()?;
    HPolyhedron::intersect_all(c.dim(), ts.iter())
}

/// Lexicographically largest generator of the cone `outer` outside `inner`.
fn escaping_generator(outer: &HPolyhedron, inner: &HPolyhedron) -> Result<Option<RVec>> {
    let gens = GeneratedCone::from_h(outer)?;
    Ok(gens
        .generators()
        .iter()
        .filter(|g| !inner.contains(g))
        .max_by(|a, b| cmp_vec(a, b))
        .cloned())
}

/// Closed intersection property of the cones `cone(A_i - x)`; on failure a
/// direction of `∩ cl cone(A_i - x)` outside the closure of the
/// intersection.
fn closure_variant(c: &Collection, x: &[Rat]) -> Result<(bool, Option<RVec>)> {
    let n = c.dim();
    let mut closed = Vec::new();
    let mut open_normals: Vec<RVec> = Vec::new();
    for s in c.sets() {
        match s {
            ConvexSet::Ball(b) if b.on_boundary(x) => open_normals.push(sub(x, b.center())),
            s => closed.push(tangent_cone(s, x)?),
        }
    }
    let base = HPolyhedron::intersect_all(n, closed.iter())?;
    if open_normals.is_empty() {
        return Ok((true, None));
    }
    let mut rhs_rows = base.rows().to_vec();
    rhs_rows.extend(open_normals.iter().map(|v| Row::le(v.clone(), Rat::zero())));
    let rhs = HPolyhedron::new(n, rhs_rows)?;
    // Cones: {d ∈ C : ⟨n_k, d⟩ < 0 ∀k} is nonempty iff ⟨n_k, d⟩ <= -1 is
    // feasible. Then the closure of the intersection is the right side;
    // otherwise the intersection is {0}.
    let mut strict = base.rows().to_vec();
    strict.extend(open_normals.iter().map(|v| Row::le(v.clone(), -Rat::one())));
    if lp::feasible_point(&strict, n).is_some() {
        return Ok((true, None));
    }
    let origin = HPolyhedron::origin(n);
    if rhs.included_in(&origin)?.holds {
        return Ok((true, None));
    }
    Ok((false, escaping_generator(&rhs, &origin)?))
}

/// Functionals for the weak normal test: facet normals of the tangent cones
/// (both signs) followed by seeded random directions.
pub(crate) fn test_functionals(
    tangents: &[HPolyhedron],
    dim: usize,
    count: usize,
    seed: u64,
) -> Vec<RVec> {
    let mut out: Vec<RVec> = Vec::new();
    let mut push = |v: RVec| {
        if !v.iter().all(Zero::is_zero) && !out.contains(&v) {
            out.push(v);
        }
    };
    for t in tangents {
        for r in t.rows() {
            push(r.a.clone());
            push(neg(&r.a));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        push((0..dim).map(|_| ratio(rng.gen_range(-8..=8), 4)).collect());
    }
    out
}

/// All CHIP verdicts at `x`.
pub fn chip_report_at(c: &Collection, x: &[Rat], opts: &ChipOptions) -> Result<ChipReport> {
    require_common_point(c, x)?;
    let n = c.dim();
    let mut witnesses = BTreeMap::new();

    let t_inter = tangent_of_intersection(c, x)?;
    let inter_t = intersection_of_tangents(c, x)?;
    let chip = inter_t.included_in(&t_inter)?.holds;
    if !chip {
        if let Some(w) = escaping_generator(&inter_t, &t_inter)? {
            witnesses.insert("chip".to_string(), w);
        }
    }

    let (closure_ok, closure_witness) = closure_variant(c, x)?;
    if let Some(w) = closure_witness {
        witnesses.insert("chip_closure_variant".to_string(), w);
    }

    let n_inter = normal_cone(&c.intersection()?, x)?;
    let normals = c
        .sets()
        .iter()
        .map(|s| normal_cone(s, x))
        .collect::<Result<Vec<_>>>()?;
    let n_sum = GeneratedCone::sum(n, &normals)?;
    let sum_h = n_sum.to_h();
    let strong_chip = n_inter.generators().iter().all(|g| sum_h.contains(g));
    if !strong_chip {
        if let Some(g) = n_inter
            .generators()
            .iter()
            .filter(|g| !sum_h.contains(g))
            .max_by(|a, b| cmp_vec(a, b))
        {
            witnesses.insert("strong_chip".to_string(), g.clone());
        }
    }

    let tangents: Vec<HPolyhedron> = c
        .sets()
        .iter()
        .map(|s| tangent_cone(s, x))
        .collect::<Result<_>>()?;
    let tc = Collection::new(
        n,
        c.norm().clone(),
        tangents.iter().cloned().map(ConvexSet::HPoly).collect(),
        None,
    )?;
    let constant = lambda_n(&tc, &opts.tol, &opts.sampling)?;
    let normal_chip = closure_ok && constant.is_positive() == Some(true);

    let functionals = test_functionals(&tangents, n, opts.dual_samples, opts.sampling.seed);
    let mut weak_ok = closure_ok;
    for f in &functionals {
        if !weak_ok {
            break;
        }
        let eta = weak_normal_eta(&tc, f, &opts.tol)?;
        if eta.is_positive() != Some(true) {
            weak_ok = false;
            witnesses.insert("weak_normal_chip".to_string(), f.clone());
        }
    }
    Ok(ChipReport {
        point: x.to_vec(),
        chip,
        chip_closure_variant: closure_ok,
        strong_chip,
        normal_chip,
        normal_chip_constant: constant,
        weak_normal_chip: weak_ok,
        tested_functionals: functionals.len(),
        witnesses,
    })
}

/// The supplied points followed by the vertices of a polyhedral
/// intersection, without repeats; a point of the intersection when neither
/// gives one.
pub fn points_of_interest(c: &Collection, extra: &[RVec]) -> Vec<RVec> {
    let mut out: Vec<RVec> = Vec::new();
    for p in extra {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    if let Ok(h) = c.intersection_h() {
        if let Ok(v) = h.to_v() {
            for p in v.points() {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        }
        if out.is_empty() {
            out.extend(h.feasible_point());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{NormContext, NormKind};
    use crate::polyhedron::halfspace;
    use crate::rational::{rat, rvec};
    use crate::regularity::default_tol;
    use crate::set::Ball;

    fn opts(samples: usize) -> ChipOptions {
        ChipOptions {
            tol: default_tol(),
            dual_samples: 8,
            sampling: SamplingParams {
                samples,
                ..SamplingParams::default()
            },
        }
    }

    fn tangency() -> Collection {
        Collection::new(
            2,
            NormContext::float(NormKind::L2),
            vec![
                ConvexSet::Ball(Ball::new(rvec(&[0, 1]), rat(1)).unwrap()),
                ConvexSet::HPoly(halfspace(rvec(&[0, 1]), rat(0))),
            ],
            Some(ConvexSet::HPoly(HPolyhedron::origin(2))),
        )
        .unwrap()
    }

    #[test]
    fn right_angle_has_every_property() {
        let c = Collection::new(
            2,
            NormContext::exact(NormKind::Linf),
            vec![
                ConvexSet::HPoly(halfspace(rvec(&[1, 0]), rat(0))),
                ConvexSet::HPoly(halfspace(rvec(&[0, 1]), rat(0))),
            ],
            None,
        )
        .unwrap();
        let r = chip_report_at(&c, &rvec(&[0, 0]), &opts(100)).unwrap();
        assert!(
            r.chip
                && r.chip_closure_variant
                && r.strong_chip
                && r.normal_chip
                && r.weak_normal_chip
        );
        assert_eq!(r.normal_chip_constant, Constant::Exact(rat(1)));
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn ball_tangency_fails_chip_along_the_axis() {
        let c = tangency();
        let r = chip_report_at(&c, &rvec(&[0, 0]), &opts(2000)).unwrap();
        assert!(!r.chip);
        assert_eq!(r.witnesses["chip"], rvec(&[1, 0]));
        assert!(!r.chip_closure_variant);
        assert!(!r.strong_chip);
        assert!(!r.normal_chip);
        assert_eq!(r.primary_witness(), Some(&rvec(&[1, 0])));
    }

    #[test]
    fn interval_family_separates_the_two_chip_notions() {
        let c = Collection::new(
            1,
            NormContext::exact(NormKind::Linf),
            vec![ConvexSet::ShrinkingIntervals],
            None,
        )
        .unwrap();
        let r = chip_report_at(&c, &rvec(&[0]), &opts(100)).unwrap();
        assert!(!r.chip);
        assert_eq!(r.witnesses["chip"], rvec(&[1]));
        assert!(r.chip_closure_variant);
        assert!(!r.strong_chip);
    }

    #[test]
    fn boxes_tangent_of_intersection() {
        let c = Collection::new(
            2,
            NormContext::exact(NormKind::Linf),
            vec![
                ConvexSet::HPoly(HPolyhedron::cube(2, rat(0), rat(2))),
                ConvexSet::HPoly(HPolyhedron::cube(2, rat(1), rat(3))),
            ],
            None,
        )
        .unwrap();
        let t = tangent_of_intersection(&c, &rvec(&[1, 1])).unwrap();
        let quadrant = crate::polyhedron::homogeneous(2, &[rvec(&[-1, 0]), rvec(&[0, -1])]);
        assert!(t.same_set(&quadrant).unwrap());
        assert_eq!(points_of_interest(&c, &[]).len(), 4);
    }

    #[test]
    fn override_tangent_cone_is_the_origin() {
        let t = tangent_of_intersection(&tangency(), &rvec(&[0, 0])).unwrap();
        assert!(t.same_set(&HPolyhedron::origin(2)).unwrap());
    }

    #[test]
    fn outside_points_are_rejected() {
        assert!(matches!(
            chip_report_at(&tangency(), &rvec(&[1, 0]), &opts(10)),
            Err(GeomError::NotMember(_))
        ));
    }
}
