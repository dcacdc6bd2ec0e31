//! Tangent and normal cones at a point of a set.

use num_traits::Zero;

use crate::error::{GeomError, Result};
use crate::polyhedron::{check_dim, halfspace, HPolyhedron, Row};
use crate::rational::{neg, sub, RVec, Rat};
use crate::set::{ConvexSet, GeneratedCone};

fn require_member(s: &ConvexSet, x: &[Rat]) -> Result<()> {
    check_dim(s.dim(), x.len())?;
    if !s.contains(x) {
        let pt: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        return Err(GeomError::NotMember(format!(
            "({}) is not in the {} set",
            pt.join(", "),
            s.kind_name()
        )));
    }
    Ok(())
}

/// Rows active at `x`, homogenized.
pub fn tangent_cone_h(h: &HPolyhedron, x: &[Rat]) -> HPolyhedron {
    let rows = h
        .rows()
        .iter()
        .filter(|r| r.is_tight(x))
        .map(|r| Row {
            a: r.a.clone(),
            b: Rat::zero(),
            eq: r.eq,
        })
        .collect();
    HPolyhedron::new(h.dim(), rows).unwrap()
}

/// Cone generated by the active normals (both signs for equalities).
pub fn normal_cone_h(h: &HPolyhedron, x: &[Rat]) -> GeneratedCone {
    let mut gens: Vec<RVec> = Vec::new();
    for r in h.rows().iter().filter(|r| r.is_tight(x)) {
        gens.push(r.a.clone());
        if r.eq {
            gens.push(neg(&r.a));
        }
    }
    GeneratedCone::new(h.dim(), gens).unwrap()
}

/// Closed tangent cone `T(s, x)`. For the interval family this is the
/// tangent cone of every member at 0, namely R.
pub fn tangent_cone(s: &ConvexSet, x: &[Rat]) -> Result<HPolyhedron> {
    require_member(s, x)?;
    Ok(match s {
        ConvexSet::Ball(b) => {
            if b.on_boundary(x) {
                halfspace(sub(x, b.center()), Rat::zero())
            } else {
                HPolyhedron::whole_space(b.dim())
            }
        }
        ConvexSet::ShrinkingIntervals => HPolyhedron::whole_space(1),
        s => tangent_cone_h(&s.to_h().unwrap(), x),
    })
}

/// Normal cone `N(s, x)` in generated form; for the interval family the
/// normal cone of every member at 0, namely {0}.
pub fn normal_cone(s: &ConvexSet, x: &[Rat]) -> Result<GeneratedCone> {
    require_member(s, x)?;
    Ok(match s {
        ConvexSet::Ball(b) => {
            if b.on_boundary(x) {
                GeneratedCone::new(b.dim(), vec![sub(x, b.center())])?
            } else {
                GeneratedCone::zero(b.dim())
            }
        }
        ConvexSet::ShrinkingIntervals => GeneratedCone::zero(1),
        s => normal_cone_h(&s.to_h().unwrap(), x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::dual_cone;
    use crate::polyhedron::homogeneous;
    use crate::rational::{rat, rvec};
    use crate::set::Ball;

    fn square() -> ConvexSet {
        ConvexSet::HPoly(HPolyhedron::cube(2, rat(-1), rat(1)))
    }

    #[test]
    fn tangent_cones_of_square() {
        let t = tangent_cone(&square(), &rvec(&[1, 1])).unwrap();
        assert!(t
            .same_set(&homogeneous(2, &[rvec(&[1, 0]), rvec(&[0, 1])]))
            .unwrap());
        let t0 = tangent_cone(&square(), &rvec(&[0, 0])).unwrap();
        assert!(t0.same_set(&HPolyhedron::whole_space(2)).unwrap());
    }

    #[test]
    fn ball_cones_at_the_tangency_point() {
        let b = ConvexSet::Ball(Ball::new(rvec(&[0, 1]), rat(1)).unwrap());
        let t = tangent_cone(&b, &rvec(&[0, 0])).unwrap();
        assert!(t.same_set(&halfspace(rvec(&[0, -1]), rat(0))).unwrap());
        let n = normal_cone(&b, &rvec(&[0, 0])).unwrap();
        assert_eq!(n.generators(), &[rvec(&[0, -1])]);
    }

    #[test]
    fn normal_cones() {
        let h = ConvexSet::HPoly(halfspace(rvec(&[1, 0]), rat(0)));
        assert_eq!(
            normal_cone(&h, &rvec(&[0, 5])).unwrap().generators(),
            &[rvec(&[1, 0])]
        );
        assert!(normal_cone(&square(), &rvec(&[0, 0])).unwrap().is_zero());
    }

    #[test]
    fn tangent_and_normal_cones_are_dual() {
        let x = rvec(&[1, 0]);
        let t = tangent_cone(&square(), &x).unwrap();
        let n = normal_cone(&square(), &x).unwrap();
        assert!(dual_cone(&t).unwrap().same_set(&n.to_h()).unwrap());
        assert!(dual_cone(&n.to_v()).unwrap().same_set(&t).unwrap());
    }

    #[test]
    fn non_members_are_rejected() {
        assert!(matches!(
            tangent_cone(&square(), &rvec(&[2, 0])),
            Err(GeomError::NotMember(_))
        ));
    }
}
