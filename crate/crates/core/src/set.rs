//! Convex sets, finite collections, and the analytic shrinking-interval
//! family `A_i = [-1/i, 1/i]`, `i = 1, 2, ...`.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{conical_hull_poly, ConicalHull};
use crate::error::{GeomError, Result};
use crate::norm::NormContext;
use crate::polyhedron::{check_dim, halfspace, HPolyhedron, VPolyhedron};
use crate::rational::{dot, is_zero_vec, primitive, ratio, sq_norm, sub, to_f64, RVec, Rat};

/// `cone(generators)`, apex at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedCone {
    dim: usize,
    generators: Vec<RVec>,
}

impl GeneratedCone {
    /// Zero generators are dropped and the rest scaled to primitive integers.
    pub fn new(dim: usize, generators: Vec<RVec>) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::Invalid("dimension must be positive".into()));
        }
        let mut gens: Vec<RVec> = Vec::new();
        for g in generators {
            check_dim(dim, g.len())?;
            if is_zero_vec(&g) {
                continue;
            }
            let p = primitive(&g);
            if !gens.contains(&p) {
                gens.push(p);
            }
        }
        Ok(GeneratedCone {
            dim,
            generators: gens,
        })
    }

    pub fn zero(dim: usize) -> Self {
        GeneratedCone {
            dim,
            generators: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[RVec] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn to_v(&self) -> VPolyhedron {
        VPolyhedron::cone(self.dim, self.generators.clone()).unwrap()
    }

    pub fn to_h(&self) -> HPolyhedron {
        self.to_v().to_h()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        if is_zero_vec(x) {
            return true;
        }
        self.to_v().contains(x)
    }

    /// Cone generated by the union of the generators (the sum of the cones).
    pub fn sum<'a>(
        dim: usize,
        cones: impl IntoIterator<Item = &'a GeneratedCone>,
    ) -> Result<GeneratedCone> {
        let mut gens = Vec::new();
        for c in cones {
            check_dim(dim, c.dim)?;
            gens.extend(c.generators.iter().cloned());
        }
        GeneratedCone::new(dim, gens)
    }

    /// Generators of the cone `{x : a·x <= 0 (or = 0)}` given in H-form.
    pub fn from_h(h: &HPolyhedron) -> Result<GeneratedCone> {
        let v = h.to_v()?;
        let mut gens: Vec<RVec> = v.rays().to_vec();
        gens.extend(v.points().iter().filter(|p| !is_zero_vec(p)).cloned());
        GeneratedCone::new(h.dim(), gens)
    }
}

/// Closed Euclidean ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    center: RVec,
    radius: Rat,
}

impl Ball {
    pub fn new(center: RVec, radius: Rat) -> Result<Self> {
        if center.is_empty() {
            return Err(GeomError::Invalid("ball center must be nonempty".into()));
        }
        if !radius.is_positive() {
            return Err(GeomError::Invalid("ball radius must be positive".into()));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[Rat] {
        &self.center
    }

    pub fn radius(&self) -> &Rat {
        &self.radius
    }

    fn excess(&self, x: &[Rat]) -> Rat {
        sq_norm(&sub(x, &self.center)) - &self.radius * &self.radius
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        !self.excess(x).is_positive()
    }

    pub fn on_boundary(&self, x: &[Rat]) -> bool {
        self.excess(x).is_zero()
    }

    /// Euclidean distance in floating point, stable near the sphere.
    pub fn distance_f64(&self, x: &[f64]) -> f64 {
        let c: Vec<f64> = self.center.iter().map(to_f64).collect();
        let r = to_f64(&self.radius);
        let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        let d = d2.sqrt();
        if d <= r {
            0.0
        } else {
            (d2 - r * r) / (d + r)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet {
    HPoly(HPolyhedron),
    VPoly(VPolyhedron),
    Cone(GeneratedCone),
    Ball(Ball),
    /// The members `[-1/i, 1/i]` of R for `i = 1, 2, ...`, acting as an
    /// infinite sub-collection.
    ShrinkingIntervals,
}

impl ConvexSet {
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::HPoly(h) => h.dim(),
            ConvexSet::VPoly(v) => v.dim(),
            ConvexSet::Cone(c) => c.dim(),
            ConvexSet::Ball(b) => b.dim(),
            ConvexSet::ShrinkingIntervals => 1,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConvexSet::HPoly(_) => "hpoly",
            ConvexSet::VPoly(_) => "vpoly",
            ConvexSet::Cone(_) => "cone",
            ConvexSet::Ball(_) => "ball",
            ConvexSet::ShrinkingIntervals => "shrinking_intervals",
        }
    }

    /// Membership; for the interval family, membership in every member.
    pub fn contains(&self, x: &[Rat]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ConvexSet::HPoly(h) => h.contains(x),
            ConvexSet::VPoly(v) => v.contains(x),
            ConvexSet::Cone(c) => c.contains(x),
            ConvexSet::Ball(b) => b.contains(x),
            ConvexSet::ShrinkingIntervals => x[0].is_zero(),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(
            self,
            ConvexSet::HPoly(_) | ConvexSet::VPoly(_) | ConvexSet::Cone(_)
        )
    }

    pub fn to_h(&self) -> Option<HPolyhedron> {
        match self {
            ConvexSet::HPoly(h) => Some(h.clone()),
            ConvexSet::VPoly(v) => Some(v.to_h()),
            ConvexSet::Cone(c) => Some(c.to_h()),
            _ => None,
        }
    }

    pub fn to_v(&self) -> Option<Result<VPolyhedron>> {
        match self {
            ConvexSet::HPoly(h) => Some(h.to_v()),
            ConvexSet::VPoly(v) => Some(Ok(v.clone())),
            ConvexSet::Cone(c) => Some(Ok(c.to_v())),
            _ => None,
        }
    }

    pub fn is_cone(&self) -> bool {
        match self {
            ConvexSet::Cone(_) => true,
            ConvexSet::HPoly(h) => h.is_cone(),
            ConvexSet::VPoly(v) => v.points().iter().all(|p| is_zero_vec(p)) || v.to_h().is_cone(),
            _ => false,
        }
    }

    /// Polyhedron with the same inflated intersections and distance
    /// suprema. The interval family acts like `{0}`: the intersection of
    /// `[-1/i - η, 1/i + η]` over all `i` is `[-η, η]`, and
    /// `sup_i d(x, A_i) = |x|`.
    pub fn regularity_proxy(&self) -> Result<HPolyhedron> {
        match self {
            ConvexSet::ShrinkingIntervals => Ok(HPolyhedron::origin(1)),
            ConvexSet::Ball(_) => Err(GeomError::unsupported(
                "ball inflation has no polyhedral form",
            )),
            s => Ok(s.to_h().unwrap()),
        }
    }

    /// Closed conical hull of the set; for the interval family, of each
    /// member (all equal to R).
    pub fn conical_hull(&self) -> Result<ConicalHull> {
        match self {
            ConvexSet::HPoly(h) => conical_hull_poly(h),
            ConvexSet::VPoly(v) => conical_hull_poly(v),
            ConvexSet::Cone(c) => Ok(ConicalHull {
                cone: c.to_h(),
                was_closed: true,
            }),
            ConvexSet::ShrinkingIntervals => Ok(ConicalHull {
                cone: HPolyhedron::whole_space(1),
                was_closed: true,
            }),
            ConvexSet::Ball(b) => {
                let n = b.dim();
                let c2 = sq_norm(b.center());
                let r2 = b.radius() * b.radius();
                if c2 < r2 {
                    Ok(ConicalHull {
                        cone: HPolyhedron::whole_space(n),
                        was_closed: true,
                    })
                } else if c2 == r2 {
                    // Open halfspace {<c,x> > 0} plus the origin.
                    let a: RVec = b.center().iter().map(|v| -v).collect();
                    Ok(ConicalHull {
                        cone: halfspace(a, Rat::zero()),
                        was_closed: false,
                    })
                } else {
                    Err(GeomError::unsupported(
                        "conical hull of a ball away from the origin is not polyhedral",
                    ))
                }
            }
        }
    }

    /// The same set translated by `-x`.
    pub fn shifted(&self, x: &[Rat]) -> Result<ConvexSet> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            ConvexSet::HPoly(h) => {
                ConvexSet::HPoly(h.translated(&x.iter().map(|v| -v).collect::<RVec>()))
            }
            ConvexSet::VPoly(v) => ConvexSet::VPoly(VPolyhedron::new(
                v.dim(),
                v.points().iter().map(|p| sub(p, x)).collect(),
                v.rays().to_vec(),
            )?),
            ConvexSet::Cone(c) => ConvexSet::VPoly(VPolyhedron::new(
                c.dim(),
                vec![x.iter().map(|v| -v).collect()],
                c.generators().to_vec(),
            )?),
            ConvexSet::Ball(b) => {
                ConvexSet::Ball(Ball::new(sub(b.center(), x), b.radius().clone())?)
            }
            ConvexSet::ShrinkingIntervals => {
                if !x[0].is_zero() {
                    return Err(GeomError::unsupported(
                        "the interval family is only shifted by 0",
                    ));
                }
                ConvexSet::ShrinkingIntervals
            }
        })
    }
}

/// Finite collection of convex sets sharing one space and norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Collection {
    dim: usize,
    norm: NormContext,
    sets: Vec<ConvexSet>,
    intersection_override: Option<ConvexSet>,
}

/// Number of sampled points in the override consistency check.
pub const OVERRIDE_CHECK_SAMPLES: usize = 1000;

impl Collection {
    /// Validates dimensions, nonemptiness of the intersection (when it is
    /// representable) and consistency of an intersection override.
    pub fn new(
        dim: usize,
        norm: NormContext,
        sets: Vec<ConvexSet>,
        intersection_override: Option<ConvexSet>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::Invalid(
                "space dimension must be positive".into(),
            ));
        }
        if sets.is_empty() {
            return Err(GeomError::Invalid(
                "a collection needs at least one set".into(),
            ));
        }
        for s in sets.iter().chain(intersection_override.iter()) {
            check_dim(dim, s.dim())?;
        }
        let c = Collection {
            dim,
            norm,
            sets,
            intersection_override,
        };
        if let Ok(ConvexSet::HPoly(h)) = c.intersection() {
            if h.is_empty() {
                return Err(GeomError::Empty("the sets have no common point".into()));
            }
        }
        if c.intersection_override.is_some() {
            c.check_override()?;
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> &NormContext {
        &self.norm
    }

    pub fn sets(&self) -> &[ConvexSet] {
        &self.sets
    }

    pub fn intersection_override(&self) -> Option<&ConvexSet> {
        self.intersection_override.as_ref()
    }

    pub fn with_norm(&self, norm: NormContext) -> Collection {
        Collection {
            norm,
            ..self.clone()
        }
    }

    pub fn has_family(&self) -> bool {
        self.sets
            .iter()
            .any(|s| matches!(s, ConvexSet::ShrinkingIntervals))
    }

    pub fn is_polyhedral(&self) -> bool {
        self.sets.iter().all(ConvexSet::is_polyhedral)
    }

    pub fn is_cone_collection(&self) -> bool {
        self.sets.iter().all(ConvexSet::is_cone)
    }

    /// Membership in every set.
    pub fn contains(&self, x: &[Rat]) -> bool {
        self.sets.iter().all(|s| s.contains(x))
    }

    /// The intersection as a set: the override when present, otherwise the
    /// concatenated H-form, `{0}` for the interval family, or the single set.
    pub fn intersection(&self) -> Result<ConvexSet> {
        if let Some(o) = &self.intersection_override {
            return Ok(o.clone());
        }
        if self.sets.len() == 1 {
            return Ok(match &self.sets[0] {
                ConvexSet::ShrinkingIntervals => ConvexSet::HPoly(HPolyhedron::origin(1)),
                s => s.clone(),
            });
        }
        if self
            .sets
            .iter()
            .all(|s| s.is_polyhedral() || matches!(s, ConvexSet::ShrinkingIntervals))
        {
            let parts = self.proxies()?;
            return Ok(ConvexSet::HPoly(HPolyhedron::intersect_all(
                self.dim,
                parts.iter(),
            )?));
        }
        Err(GeomError::unsupported(
            "the intersection involving a ball has no polyhedral form; supply intersection_override",
        ))
    }

    /// Intersection as an H-polyhedron.
    pub fn intersection_h(&self) -> Result<HPolyhedron> {
        match self.intersection()? {
            ConvexSet::ShrinkingIntervals => Ok(HPolyhedron::origin(1)),
            s => s
                .to_h()
                .ok_or_else(|| GeomError::unsupported("the intersection is not polyhedral")),
        }
    }

    /// Polyhedral stand-ins used by the regularity computations.
    pub fn proxies(&self) -> Result<Vec<HPolyhedron>> {
        self.sets.iter().map(ConvexSet::regularity_proxy).collect()
    }

    fn sample_radius(&self) -> Rat {
        let mut r = Rat::one();
        let mut bump = |v: &Rat| {
            let a = v.abs();
            if a > r {
                r = a;
            }
        };
        for s in self.sets.iter().chain(self.intersection_override.iter()) {
            match s {
                ConvexSet::Ball(b) => {
                    for c in b.center() {
                        bump(&(c.abs() + b.radius()));
                    }
                }
                ConvexSet::HPoly(h) => {
                    if let Ok(v) = h.to_v() {
                        v.points().iter().flatten().for_each(&mut bump);
                    }
                }
                ConvexSet::VPoly(v) => v.points().iter().flatten().for_each(&mut bump),
                _ => {}
            }
        }
        r * Rat::from_integer(2.into())
    }

    /// Sampled check that the override and the true intersection agree:
    /// every sample lies in both or in neither.
    fn check_override(&self) -> Result<()> {
        let o = self.intersection_override.as_ref().unwrap();
        let radius = self.sample_radius();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut probes: Vec<RVec> = Vec::new();
        if let Some(Ok(v)) = o.to_v() {
            probes.extend(v.points().iter().cloned());
        }
        let den = 64i64;
        let span = (to_f64(&radius) * den as f64).ceil() as i64;
        for k in 0..OVERRIDE_CHECK_SAMPLES {
            let base = if k % 4 == 0 && !probes.is_empty() {
                Some(probes[k % probes.len()].clone())
            } else {
                None
            };
            let p: RVec = (0..self.dim)
                .map(|j| match &base {
                    Some(b) => &b[j] + ratio(rng.gen_range(-4..=4), den),
                    None => ratio(rng.gen_range(-span..=span), den),
                })
                .collect();
            probes.push(p);
        }
        for p in &probes {
            let in_o = o.contains(p);
            let in_all = self.contains(p);
            if in_o != in_all {
                let pt: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                return Err(GeomError::Invalid(format!(
                    "intersection_override disagrees with the sets at ({})",
                    pt.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// Interior point test for a ball, `|x - c| < r`.
pub fn ball_interior(b: &Ball, x: &[Rat]) -> bool {
    let d = sub(x, b.center());
    dot(&d, &d) < b.radius() * b.radius()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormKind;
    use crate::polyhedron::Row;
    use crate::rational::{rat, rvec};

    fn linf() -> NormContext {
        NormContext::exact(NormKind::Linf)
    }

    #[test]
    fn ball_membership_is_exact() {
        let b = Ball::new(rvec(&[0, 1]), rat(1)).unwrap();
        assert!(b.contains(&rvec(&[0, 0])));
        assert!(b.on_boundary(&rvec(&[0, 0])));
        assert!(!b.contains(&[ratio(1, 100), rat(0)]));
        assert!(ball_interior(&b, &rvec(&[0, 1])));
    }

    #[test]
    fn ball_conical_hulls() {
        let tangent = ConvexSet::Ball(Ball::new(rvec(&[0, 1]), rat(1)).unwrap())
            .conical_hull()
            .unwrap();
        assert!(!tangent.was_closed);
        assert!(tangent
            .cone
            .same_set(&halfspace(rvec(&[0, -1]), rat(0)))
            .unwrap());
        let inside = ConvexSet::Ball(Ball::new(rvec(&[0, 0]), rat(1)).unwrap())
            .conical_hull()
            .unwrap();
        assert!(inside.was_closed);
        assert!(inside.cone.same_set(&HPolyhedron::whole_space(2)).unwrap());
        let away = ConvexSet::Ball(Ball::new(rvec(&[0, 3]), rat(1)).unwrap()).conical_hull();
        assert!(away.unwrap_err().is_unsupported());
    }

    #[test]
    fn empty_intersection_is_rejected() {
        let a = ConvexSet::HPoly(halfspace(rvec(&[1]), rat(0)));
        let b = ConvexSet::HPoly(halfspace(rvec(&[-1]), rat(-1)));
        let err = Collection::new(1, linf(), vec![a, b], None).unwrap_err();
        assert!(matches!(err, GeomError::Empty(_)));
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let a = ConvexSet::HPoly(halfspace(rvec(&[1, 0]), rat(0)));
        let b = ConvexSet::HPoly(halfspace(rvec(&[1, 0, 0]), rat(0)));
        assert!(matches!(
            Collection::new(2, linf(), vec![a, b], None),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn override_is_spot_checked() {
        let ball = ConvexSet::Ball(Ball::new(rvec(&[0, 1]), rat(1)).unwrap());
        let half = ConvexSet::HPoly(halfspace(rvec(&[0, 1]), rat(0)));
        let good = ConvexSet::HPoly(HPolyhedron::origin(2));
        assert!(Collection::new(2, linf(), vec![ball.clone(), half.clone()], Some(good)).is_ok());
        let bad = ConvexSet::HPoly(
            HPolyhedron::new(
                2,
                vec![
                    Row::eq(rvec(&[0, 1]), rat(0)),
                    Row::le(rvec(&[1, 0]), rat(1)),
                    Row::le(rvec(&[-1, 0]), rat(1)),
                ],
            )
            .unwrap(),
        );
        assert!(Collection::new(2, linf(), vec![ball, half], Some(bad)).is_err());
    }

    #[test]
    fn family_behaves_like_origin() {
        let c = Collection::new(1, linf(), vec![ConvexSet::ShrinkingIntervals], None).unwrap();
        assert!(c.contains(&rvec(&[0])));
        assert!(!c.contains(&[ratio(1, 1000)]));
        assert!(c
            .intersection_h()
            .unwrap()
            .same_set(&HPolyhedron::origin(1))
            .unwrap());
        assert!(!c.is_cone_collection());
    }

    #[test]
    fn generated_cone_roundtrip() {
        let k = GeneratedCone::new(2, vec![rvec(&[2, 0]), rvec(&[0, 0]), rvec(&[1, 1])]).unwrap();
        assert_eq!(k.generators(), &[rvec(&[1, 0]), rvec(&[1, 1])]);
        let back = GeneratedCone::from_h(&k.to_h()).unwrap();
        assert!(back.to_h().same_set(&k.to_h()).unwrap());
    }
}
