//! Polar, dual and recession cones, Minkowski and inverse sums, conical
//! hulls of polyhedra.

use num_traits::{One, Signed, Zero};

use crate::error::{GeomError, Result};
use crate::polyhedron::{check_dim, HPolyhedron, Row, VPolyhedron};
use crate::rational::{add, dot, zeros, RVec, Rat};

/// Either representation of a polyhedron.
pub trait Polyhedral {
    fn dim(&self) -> usize;
    fn h_form(&self) -> HPolyhedron;
    fn v_form(&self) -> Result<VPolyhedron>;
    fn has_point(&self, x: &[Rat]) -> bool;
}

impl Polyhedral for HPolyhedron {
    fn dim(&self) -> usize {
        HPolyhedron::dim(self)
    }
    fn h_form(&self) -> HPolyhedron {
        self.clone()
    }
    fn v_form(&self) -> Result<VPolyhedron> {
        self.to_v()
    }
    fn has_point(&self, x: &[Rat]) -> bool {
        self.contains(x)
    }
}

impl Polyhedral for VPolyhedron {
    fn dim(&self) -> usize {
        VPolyhedron::dim(self)
    }
    fn h_form(&self) -> HPolyhedron {
        self.to_h()
    }
    fn v_form(&self) -> Result<VPolyhedron> {
        Ok(self.clone())
    }
    fn has_point(&self, x: &[Rat]) -> bool {
        self.contains(x)
    }
}

/// `{y : <y,p> <= 1 for p in points, <y,r> <= 0 for r in rays}`.
pub fn polar_of_generators(dim: usize, points: &[RVec], rays: &[RVec]) -> HPolyhedron {
    let mut rows = Vec::with_capacity(points.len() + rays.len());
    for p in points {
        rows.push(Row::le(p.clone(), Rat::one()));
    }
    for r in rays {
        rows.push(Row::le(r.clone(), Rat::zero()));
    }
    HPolyhedron::new(dim, rows).expect("generator dimensions checked by caller")
}

/// Polar set. Requires `0 ∈ s` so that the bipolar of the result is `s`.
pub fn polar<P: Polyhedral + ?Sized>(s: &P) -> Result<HPolyhedron> {
    if !s.has_point(&zeros(s.dim())) {
        return Err(GeomError::OriginNotContained("polar".into()));
    }
    let v = s.v_form()?;
    Ok(polar_of_generators(v.dim(), v.points(), v.rays()))
}

/// Dual (negative polar) cone `{y : <y,x> <= 0 for all x in s}`.
pub fn dual_cone<P: Polyhedral + ?Sized>(s: &P) -> Result<HPolyhedron> {
    let v = s.v_form()?;
    let gens: Vec<RVec> = v.points().iter().chain(v.rays()).cloned().collect();
    Ok(polar_of_generators(v.dim(), &[], &gens))
}

/// Recession cone: right-hand sides replaced by zero.
pub fn recession_cone(p: &HPolyhedron) -> Result<HPolyhedron> {
    if p.is_empty() {
        return Err(GeomError::Empty("recession cone of the empty set".into()));
    }
    Ok(homogenize(p))
}

pub(crate) fn homogenize(p: &HPolyhedron) -> HPolyhedron {
    let rows = p
        .rows()
        .iter()
        .map(|r| Row {
            a: r.a.clone(),
            b: Rat::zero(),
            eq: r.eq,
        })
        .collect();
    HPolyhedron::new(p.dim(), rows).unwrap()
}

/// Sum of two V-forms: pairwise point sums, union of rays.
pub fn minkowski_sum_v(p: &VPolyhedron, q: &VPolyhedron) -> Result<VPolyhedron> {
    check_dim(p.dim(), q.dim())?;
    let mut points = Vec::with_capacity(p.points().len() * q.points().len());
    for a in p.points() {
        for b in q.points() {
            let s = add(a, b);
            if !points.contains(&s) {
                points.push(s);
            }
        }
    }
    let mut rays: Vec<RVec> = p.rays().to_vec();
    for r in q.rays() {
        if !rays.contains(r) {
            rays.push(r.clone());
        }
    }
    VPolyhedron::new(p.dim(), points, rays)
}

pub fn minkowski_sum<P: Polyhedral + ?Sized, Q: Polyhedral + ?Sized>(
    p: &P,
    q: &Q,
) -> Result<HPolyhedron> {
    check_dim(p.dim(), q.dim())?;
    Ok(minkowski_sum_v(&p.v_form()?, &q.v_form()?)?.to_h())
}

/// Inverse sum through the polar: `(s1° + s2°)°`.
pub fn inverse_sum<P: Polyhedral + ?Sized, Q: Polyhedral + ?Sized>(
    s1: &P,
    s2: &Q,
) -> Result<HPolyhedron> {
    check_dim(s1.dim(), s2.dim())?;
    let z = zeros(s1.dim());
    if !s1.has_point(&z) || !s2.has_point(&z) {
        return Err(GeomError::OriginNotContained("inverse sum".into()));
    }
    let sum = minkowski_sum_v(&polar(s1)?.to_v()?, &polar(s2)?.to_v()?)?;
    Ok(polar_of_generators(sum.dim(), sum.points(), sum.rays()))
}

/// Closed interval of scalars `t` (bounds inclusive unless flagged).
#[derive(Clone, Debug)]
struct Interval {
    lo: Option<(Rat, bool)>,
    hi: Option<(Rat, bool)>,
    empty: bool,
}

impl Interval {
    fn all() -> Self {
        Interval {
            lo: None,
            hi: None,
            empty: false,
        }
    }

    fn raise_lo(&mut self, v: Rat, strict: bool) {
        match &self.lo {
            Some((cur, cur_strict)) if *cur > v || (*cur == v && (*cur_strict || !strict)) => {}
            _ => self.lo = Some((v, strict)),
        }
    }

    fn lower_hi(&mut self, v: Rat, strict: bool) {
        match &self.hi {
            Some((cur, cur_strict)) if *cur < v || (*cur == v && (*cur_strict || !strict)) => {}
            _ => self.hi = Some((v, strict)),
        }
    }

    /// Adds the constraint `c·t <= d` (or `=`).
    fn constrain(&mut self, c: &Rat, d: &Rat, eq: bool) {
        if c.is_zero() {
            if d.is_negative() || (eq && !d.is_zero()) {
                self.empty = true;
            }
            return;
        }
        let v = d / c;
        if eq {
            self.raise_lo(v.clone(), false);
            self.lower_hi(v, false);
        } else if c.is_positive() {
            self.lower_hi(v, false);
        } else {
            self.raise_lo(v, false);
        }
    }

    fn is_nonempty(&self) -> bool {
        if self.empty {
            return false;
        }
        match (&self.lo, &self.hi) {
            (Some((l, ls)), Some((h, hs))) => l < h || (l == h && !ls && !hs),
            _ => true,
        }
    }
}

/// Membership in `s1 # s2` straight from the three-term definition, with
/// `t` ranging over the open interval `(0,1)` and the endpoint terms taken
/// with recession cones. Independent of the polar route.
pub fn inverse_sum_membership(s1: &HPolyhedron, s2: &HPolyhedron, x: &[Rat]) -> Result<bool> {
    check_dim(s1.dim(), s2.dim())?;
    check_dim(s1.dim(), x.len())?;
    let z = zeros(s1.dim());
    if !s1.contains(&z) || !s2.contains(&z) {
        return Err(GeomError::OriginNotContained("inverse sum".into()));
    }
    // x ∈ t·s1  <=>  a·x <= t·b ;  x ∈ (1-t)·s2  <=>  a·x <= (1-t)·b.
    let mut iv = Interval::all();
    iv.raise_lo(Rat::zero(), true);
    iv.lower_hi(Rat::one(), true);
    for r in s1.rows() {
        let ax = dot(&r.a, x);
        iv.constrain(&-r.b.clone(), &-ax, r.eq);
    }
    for r in s2.rows() {
        let ax = dot(&r.a, x);
        iv.constrain(&r.b, &(&r.b - ax), r.eq);
    }
    if iv.is_nonempty() {
        return Ok(true);
    }
    if s1.contains(x) && homogenize(s2).contains(x) {
        return Ok(true);
    }
    Ok(s2.contains(x) && homogenize(s1).contains(x))
}

/// Same membership with `t` relaxed to the closed interval `[0,1]` in the
/// homogenized description. Agrees with [`inverse_sum_membership`] because
/// the endpoints reproduce the recession terms.
pub fn inverse_sum_membership_relaxed(
    s1: &HPolyhedron,
    s2: &HPolyhedron,
    x: &[Rat],
) -> Result<bool> {
    check_dim(s1.dim(), s2.dim())?;
    check_dim(s1.dim(), x.len())?;
    let mut iv = Interval::all();
    iv.raise_lo(Rat::zero(), false);
    iv.lower_hi(Rat::one(), false);
    for r in s1.rows() {
        iv.constrain(&-r.b.clone(), &-dot(&r.a, x), r.eq);
    }
    for r in s2.rows() {
        iv.constrain(&r.b, &(&r.b - dot(&r.a, x)), r.eq);
    }
    Ok(iv.is_nonempty())
}

/// Closed conical hull together with whether `cone(s)` was already closed.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicalHull {
    pub cone: HPolyhedron,
    pub was_closed: bool,
}

/// `s r ∈ p` for some `s > 0`.
pub(crate) fn open_ray_meets(p: &HPolyhedron, r: &[Rat]) -> bool {
    let mut iv = Interval::all();
    iv.raise_lo(Rat::zero(), true);
    for row in p.rows() {
        iv.constrain(&dot(&row.a, r), &row.b, row.eq);
    }
    iv.is_nonempty()
}

/// Conical hull of a polyhedron. The closure is `cone(points ∪ rays)`; the
/// hull itself is closed exactly when every generating ray direction is hit
/// by the set on its open ray.
pub fn conical_hull_poly<P: Polyhedral + ?Sized>(s: &P) -> Result<ConicalHull> {
    let v = s.v_form()?;
    let h = s.h_form();
    let gens: Vec<RVec> = v.points().iter().chain(v.rays()).cloned().collect();
    let cone = VPolyhedron::cone(v.dim(), gens)?.to_h();
    let was_closed = v.rays().iter().all(|r| open_ray_meets(&h, r));
    Ok(ConicalHull { cone, was_closed })
}
