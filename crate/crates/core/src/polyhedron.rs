//! H- and V-representations of rational polyhedra, conversion between them,
//! canonical form, membership and inclusion.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dd::{self, IVec};
use crate::error::{GeomError, Result};
use crate::lp::{self, LpStatus, Sense};
use crate::rational::{
    add, cmp_vec, dot, int_to_rat, is_zero_vec, neg, primitive, primitive_int, rat, row_echelon,
    scale, unit, zeros, RVec, Rat,
};

/// One linear constraint `a·x <= b`, or `a·x = b` when `eq` is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Row {
    pub a: RVec,
    pub b: Rat,
    pub eq: bool,
}

impl Row {
    pub fn le(a: RVec, b: Rat) -> Self {
        Row { a, b, eq: false }
    }

    pub fn eq(a: RVec, b: Rat) -> Self {
        Row { a, b, eq: true }
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        let v = dot(&self.a, x);
        if self.eq {
            v == self.b
        } else {
            v <= self.b
        }
    }

    pub fn is_tight(&self, x: &[Rat]) -> bool {
        dot(&self.a, x) == self.b
    }

    /// Positive rescaling to a primitive integer row over `(a, b)`.
    fn normalized(&self) -> Row {
        let mut v = self.a.clone();
        v.push(self.b.clone());
        let mut p = primitive(&v);
        if self.eq {
            if let Some(lead) = p.iter().find(|x| !x.is_zero()) {
                if lead.is_negative() {
                    p = neg(&p);
                }
            }
        }
        let b = p.pop().unwrap();
        Row {
            a: p,
            b,
            eq: self.eq,
        }
    }

    fn cmp_key(&self, other: &Row) -> Ordering {
        other
            .eq
            .cmp(&self.eq)
            .then_with(|| cmp_vec(&self.a, &other.a))
            .then_with(|| self.b.cmp(&other.b))
    }
}

/// Polyhedron `{x : a_i·x <= b_i (or = b_i)}` in `Q^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HPolyhedron {
    dim: usize,
    rows: Vec<Row>,
}

/// `conv(points) + cone(rays)`; lines appear as pairs of opposite rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolyhedron {
    dim: usize,
    points: Vec<RVec>,
    rays: Vec<RVec>,
}

/// Result of an inclusion test `p ⊂ q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inclusion {
    pub holds: bool,
    /// A point of `p` outside `q` when the inclusion fails.
    pub witness: Option<RVec>,
    /// When the violation is unbounded: a recession direction of `p`
    /// along which `q` is left.
    pub direction: Option<RVec>,
    /// Index of the violated row of `q`.
    pub violated_row: Option<usize>,
}

impl Inclusion {
    fn yes() -> Self {
        Inclusion {
            holds: true,
            witness: None,
            direction: None,
            violated_row: None,
        }
    }
}

impl HPolyhedron {
    pub fn new(dim: usize, rows: Vec<Row>) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::Invalid("dimension must be positive".into()));
        }
        for r in &rows {
            if r.a.len() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    found: r.a.len(),
                });
            }
        }
        Ok(HPolyhedron { dim, rows })
    }

    pub fn whole_space(dim: usize) -> Self {
        HPolyhedron {
            dim,
            rows: Vec::new(),
        }
    }

    /// The singleton `{0}`.
    pub fn origin(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|k| Row::eq(unit(dim, k), Rat::zero()))
            .collect();
        HPolyhedron { dim, rows }
    }

    /// Box `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: Rat, hi: Rat) -> Self {
        let mut rows = Vec::new();
        for k in 0..dim {
            rows.push(Row::le(unit(dim, k), hi.clone()));
            rows.push(Row::le(neg(&unit(dim, k)), -lo.clone()));
        }
        HPolyhedron { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Row> {
        self.rows
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(x))
    }

    pub fn is_empty(&self) -> bool {
        lp::feasible_point(&self.rows, self.dim).is_none()
    }

    pub fn feasible_point(&self) -> Option<RVec> {
        lp::feasible_point(&self.rows, self.dim)
    }

    /// Intersection by row concatenation.
    pub fn intersect(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        check_dim(self.dim, other.dim)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(HPolyhedron {
            dim: self.dim,
            rows,
        })
    }

    pub fn intersect_all<'a>(
        dim: usize,
        parts: impl IntoIterator<Item = &'a HPolyhedron>,
    ) -> Result<HPolyhedron> {
        let mut rows = Vec::new();
        for p in parts {
            check_dim(dim, p.dim)?;
            rows.extend(p.rows.iter().cloned());
        }
        Ok(HPolyhedron { dim, rows })
    }

    /// `s · P` for `s > 0`.
    pub fn scaled(&self, s: &Rat) -> HPolyhedron {
        assert!(s.is_positive());
        let rows = self
            .rows
            .iter()
            .map(|r| Row {
                a: r.a.clone(),
                b: &r.b * s,
                eq: r.eq,
            })
            .collect();
        HPolyhedron {
            dim: self.dim,
            rows,
        }
    }

    /// `P + t` for a translation vector `t`.
    pub fn translated(&self, t: &[Rat]) -> HPolyhedron {
        let rows = self
            .rows
            .iter()
            .map(|r| Row {
                a: r.a.clone(),
                b: &r.b + dot(&r.a, t),
                eq: r.eq,
            })
            .collect();
        HPolyhedron {
            dim: self.dim,
            rows,
        }
    }

    /// True when every row passes through the origin.
    pub fn is_homogeneous(&self) -> bool {
        self.rows.iter().all(|r| r.b.is_zero())
    }

    /// Whether the set is a (nonempty) convex cone.
    pub fn is_cone(&self) -> bool {
        if !self.contains(&zeros(self.dim)) {
            return false;
        }
        if self.is_homogeneous() {
            return true;
        }
        let rec = HPolyhedron {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|r| Row {
                    a: r.a.clone(),
                    b: Rat::zero(),
                    eq: r.eq,
                })
                .collect(),
        };
        self.included_in(&rec).map(|i| i.holds).unwrap_or(false)
    }

    /// Rows tight at `x` (indices).
    pub fn active_rows(&self, x: &[Rat]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| self.rows[i].is_tight(x))
            .collect()
    }

    /// Decides `self ⊂ q` by maximizing every row functional of `q` over
    /// `self`. An unbounded maximum means a recession direction of `self`
    /// escapes `q`.
    pub fn included_in(&self, q: &HPolyhedron) -> Result<Inclusion> {
        check_dim(self.dim, q.dim)?;
        if self.is_empty() {
            return Ok(Inclusion::yes());
        }
        for (idx, row) in q.rows.iter().enumerate() {
            let mut checks = vec![(row.a.clone(), row.b.clone())];
            if row.eq {
                checks.push((neg(&row.a), -row.b.clone()));
            }
            for (a, b) in checks {
                let out = lp::optimize(&a, Sense::Max, &self.rows, self.dim);
                match out.status {
                    LpStatus::Optimal => {
                        if out.value.as_ref().unwrap() > &b {
                            return Ok(Inclusion {
                                holds: false,
                                witness: out.point,
                                direction: None,
                                violated_row: Some(idx),
                            });
                        }
                    }
                    LpStatus::Unbounded => {
                        let x0 = out.point.unwrap();
                        let r = out.ray.unwrap();
                        let slope = dot(&a, &r);
                        let gap = &b - dot(&a, &x0);
                        let mut t = (gap / &slope).floor() + Rat::one();
                        if t.is_negative() {
                            t = Rat::zero();
                        }
                        let w = add(&x0, &scale(&r, &t));
                        return Ok(Inclusion {
                            holds: false,
                            witness: Some(w),
                            direction: Some(r),
                            violated_row: Some(idx),
                        });
                    }
                    LpStatus::Infeasible => return Ok(Inclusion::yes()),
                }
            }
        }
        Ok(Inclusion::yes())
    }

    /// Exact set equality by double inclusion.
    pub fn same_set(&self, other: &HPolyhedron) -> Result<bool> {
        Ok(self.included_in(other)?.holds && other.included_in(self)?.holds)
    }

    fn homogenized_constraints(&self) -> Vec<IVec> {
        let d = self.dim + 1;
        let mut cons = Vec::with_capacity(self.rows.len() * 2 + 1);
        let mut s_nonneg = vec![BigInt::zero(); d];
        s_nonneg[self.dim] = -BigInt::one();
        cons.push(s_nonneg);
        for r in &self.rows {
            let mut v = r.a.clone();
            v.push(-r.b.clone());
            let iv = primitive_int(&v);
            if r.eq {
                cons.push(iv.iter().map(|x| -x).collect());
            }
            cons.push(iv);
        }
        cons
    }

    /// Vertex/ray enumeration. Fails on the empty set.
    pub fn to_v(&self) -> Result<VPolyhedron> {
        let g = dd::generators(self.dim + 1, &self.homogenized_constraints());
        let n = self.dim;
        let mut points = Vec::new();
        let mut rays = Vec::new();
        for r in &g.rays {
            let s = &r[n];
            if s.is_positive() {
                let sr = Rat::from_integer(s.clone());
                points.push(
                    r[..n]
                        .iter()
                        .map(|x| Rat::from_integer(x.clone()) / &sr)
                        .collect(),
                );
            } else {
                rays.push(int_to_rat(&r[..n]));
            }
        }
        for l in &g.lines {
            let v = int_to_rat(&l[..n]);
            rays.push(v.clone());
            rays.push(neg(&v));
        }
        if points.is_empty() {
            return Err(GeomError::Empty("polyhedron has no points".into()));
        }
        Ok(VPolyhedron {
            dim: n,
            points,
            rays,
        })
    }

    /// Canonical form: implicit equalities made explicit and reduced to
    /// echelon form, inequalities reduced modulo the affine hull, scaled to
    /// primitive integers, redundant rows dropped (each by LP), rows sorted.
    /// The empty set canonicalizes to the single row `0 <= -1`.
    pub fn canonical(&self) -> HPolyhedron {
        let n = self.dim;
        if self.is_empty() {
            return HPolyhedron {
                dim: n,
                rows: vec![Row::le(zeros(n), -Rat::one())],
            };
        }
        let mut eqs: Vec<RVec> = Vec::new();
        let mut ineqs: Vec<Row> = Vec::new();
        for r in &self.rows {
            if is_zero_vec(&r.a) {
                continue;
            }
            if r.eq {
                let mut v = r.a.clone();
                v.push(r.b.clone());
                eqs.push(v);
                continue;
            }
            // Implicit equality: min a·x over P equals b.
            let out = lp::optimize(&r.a, Sense::Min, &self.rows, n);
            if out.status == LpStatus::Optimal && out.value.as_ref() == Some(&r.b) {
                let mut v = r.a.clone();
                v.push(r.b.clone());
                eqs.push(v);
            } else {
                ineqs.push(r.clone());
            }
        }
        let echelon = row_echelon(eqs);
        let pivots: Vec<usize> = echelon
            .iter()
            .map(|row| row.iter().position(|v| !v.is_zero()).unwrap())
            .collect();
        let mut eq_rows: Vec<Row> = echelon
            .iter()
            .map(|v| Row::eq(v[..n].to_vec(), v[n].clone()).normalized())
            .collect();

        let mut reduced: Vec<Row> = Vec::new();
        for r in ineqs {
            let mut a = r.a.clone();
            let mut b = r.b.clone();
            for (row, &p) in echelon.iter().zip(&pivots) {
                if !a[p].is_zero() {
                    let f = a[p].clone();
                    for k in 0..n {
                        a[k] -= &f * &row[k];
                    }
                    b -= &f * &row[n];
                }
            }
            if is_zero_vec(&a) {
                continue;
            }
            let nr = Row::le(a, b).normalized();
            if !reduced.contains(&nr) {
                reduced.push(nr);
            }
        }
        reduced.sort_by(|x, y| x.cmp_key(y));
        // Drop redundant inequalities one at a time in sorted order.
        let mut i = 0;
        while i < reduced.len() {
            let mut others: Vec<Row> = eq_rows.clone();
            others.extend(
                reduced
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, r)| r.clone()),
            );
            let out = lp::optimize(&reduced[i].a, Sense::Max, &others, n);
            let redundant =
                out.status == LpStatus::Optimal && out.value.as_ref().unwrap() <= &reduced[i].b;
            if redundant {
                reduced.remove(i);
            } else {
                i += 1;
            }
        }
        eq_rows.sort_by(|x, y| x.cmp_key(y));
        eq_rows.extend(reduced);
        HPolyhedron {
            dim: n,
            rows: eq_rows,
        }
    }

    pub fn is_canonical_empty(&self) -> bool {
        self.rows.len() == 1 && is_zero_vec(&self.rows[0].a) && self.rows[0].b.is_negative()
    }
}

impl fmt::Display for HPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "R^{}", self.dim);
        }
        let parts: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let a: Vec<String> = r.a.iter().map(|x| x.to_string()).collect();
                format!(
                    "[{}]·x {} {}",
                    a.join(", "),
                    if r.eq { "=" } else { "<=" },
                    r.b
                )
            })
            .collect();
        write!(f, "{{{}}}", parts.join("; "))
    }
}

impl VPolyhedron {
    pub fn new(dim: usize, points: Vec<RVec>, rays: Vec<RVec>) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::Invalid("dimension must be positive".into()));
        }
        for v in points.iter().chain(&rays) {
            check_dim(dim, v.len())?;
        }
        if points.is_empty() {
            return Err(GeomError::Empty("V-polyhedron without points".into()));
        }
        let rays = rays
            .into_iter()
            .filter(|r| !is_zero_vec(r))
            .map(|r| primitive(&r))
            .collect();
        Ok(VPolyhedron { dim, points, rays })
    }

    /// Convex hull of a finite point set.
    pub fn polytope(dim: usize, points: Vec<RVec>) -> Result<Self> {
        Self::new(dim, points, Vec::new())
    }

    /// `cone(rays)` with apex at the origin.
    pub fn cone(dim: usize, rays: Vec<RVec>) -> Result<Self> {
        Self::new(dim, vec![zeros(dim)], rays)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[RVec] {
        &self.points
    }

    pub fn rays(&self) -> &[RVec] {
        &self.rays
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// Facet/equality description.
    pub fn to_h(&self) -> HPolyhedron {
        let n = self.dim;
        let mut cons: Vec<IVec> = Vec::new();
        for p in &self.points {
            let mut v = p.clone();
            v.push(Rat::one());
            cons.push(primitive_int(&v));
        }
        for r in &self.rays {
            let mut v = r.clone();
            v.push(Rat::zero());
            cons.push(primitive_int(&v));
        }
        let g = dd::generators(n + 1, &cons);
        let mut rows = Vec::new();
        for l in &g.lines {
            let a = int_to_rat(&l[..n]);
            if is_zero_vec(&a) {
                continue;
            }
            rows.push(Row::eq(a, -Rat::from_integer(l[n].clone())));
        }
        for r in &g.rays {
            let a = int_to_rat(&r[..n]);
            if is_zero_vec(&a) {
                continue;
            }
            rows.push(Row::le(a, -Rat::from_integer(r[n].clone())));
        }
        HPolyhedron { dim: n, rows }
    }

    /// Membership by LP over the convex weights.
    pub fn contains(&self, x: &[Rat]) -> bool {
        let np = self.points.len();
        let nv = np + self.rays.len();
        let mut rows = Vec::new();
        for k in 0..self.dim {
            let mut a: RVec = self.points.iter().map(|p| p[k].clone()).collect();
            a.extend(self.rays.iter().map(|r| r[k].clone()));
            rows.push(Row::eq(a, x[k].clone()));
        }
        let mut ones = zeros(nv);
        for w in ones.iter_mut().take(np) {
            *w = Rat::one();
        }
        rows.push(Row::eq(ones, Rat::one()));
        for j in 0..nv {
            let mut a = zeros(nv);
            a[j] = -Rat::one();
            rows.push(Row::le(a, Rat::zero()));
        }
        lp::feasible_point(&rows, nv).is_some()
    }

    pub fn scaled(&self, s: &Rat) -> VPolyhedron {
        VPolyhedron {
            dim: self.dim,
            points: self.points.iter().map(|p| scale(p, s)).collect(),
            rays: self.rays.clone(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(GeomError::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// `{x : a·x <= b}`.
pub fn halfspace(a: RVec, b: Rat) -> HPolyhedron {
    let dim = a.len();
    HPolyhedron {
        dim,
        rows: vec![Row::le(a, b)],
    }
}

/// Orthant-style cone `{x : a_i·x <= 0}`.
pub fn homogeneous(dim: usize, normals: &[RVec]) -> HPolyhedron {
    HPolyhedron {
        dim,
        rows: normals.iter().map(|a| Row::le(a.clone(), rat(0))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, rvec};

    fn sorted(mut v: Vec<RVec>) -> Vec<RVec> {
        v.sort_by(|a, b| cmp_vec(a, b));
        v
    }

    #[test]
    fn box_vertices() {
        let b = HPolyhedron::cube(2, rat(-1), rat(1));
        let v = b.to_v().unwrap();
        assert!(v.rays().is_empty());
        assert_eq!(
            sorted(v.points().to_vec()),
            vec![
                rvec(&[-1, -1]),
                rvec(&[-1, 1]),
                rvec(&[1, -1]),
                rvec(&[1, 1])
            ]
        );
    }

    #[test]
    fn orthant_is_apex_plus_axis_rays() {
        let c = homogeneous(2, &[rvec(&[-1, 0]), rvec(&[0, -1])]);
        let v = c.to_v().unwrap();
        assert_eq!(v.points(), &[rvec(&[0, 0])]);
        assert_eq!(
            sorted(v.rays().to_vec()),
            vec![rvec(&[0, 1]), rvec(&[1, 0])]
        );
    }

    #[test]
    fn triangle_vertices_match_row_subset_enumeration() {
        let t = HPolyhedron::new(
            2,
            vec![
                Row::le(rvec(&[1, 1]), rat(2)),
                Row::le(rvec(&[-1, 0]), rat(0)),
                Row::le(rvec(&[0, -1]), rat(0)),
            ],
        )
        .unwrap();
        // Oracle: solve every pair of rows as equalities, keep feasible ones.
        let mut oracle = Vec::new();
        let rows = t.rows();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let m = vec![rows[i].a.clone(), rows[j].a.clone()];
                if let Some(x) = crate::rational::solve(&m, &[rows[i].b.clone(), rows[j].b.clone()])
                {
                    if t.contains(&x) && !oracle.contains(&x) {
                        oracle.push(x);
                    }
                }
            }
        }
        assert_eq!(
            sorted(oracle.clone()),
            vec![rvec(&[0, 0]), rvec(&[0, 2]), rvec(&[2, 0])]
        );
        assert_eq!(sorted(t.to_v().unwrap().points().to_vec()), sorted(oracle));
    }

    #[test]
    fn round_trip_is_identity_after_canonicalization() {
        let p = HPolyhedron::new(
            2,
            vec![
                Row::le(rvec(&[2, 2]), rat(4)),
                Row::le(rvec(&[-1, 0]), rat(0)),
                Row::le(rvec(&[0, -3]), rat(0)),
                Row::le(rvec(&[1, 0]), rat(5)),
            ],
        )
        .unwrap();
        let back = p.to_v().unwrap().to_h();
        assert_eq!(back.canonical(), p.canonical());
        assert_eq!(p.canonical().rows().len(), 3);
    }

    #[test]
    fn canonical_form_detects_implicit_equalities() {
        // x1 <= 0, -x1 <= 0, x2 <= 1, x1 + x2 <= 1 -> {x1 = 0, x2 <= 1}.
        let p = HPolyhedron::new(
            2,
            vec![
                Row::le(rvec(&[1, 0]), rat(0)),
                Row::le(rvec(&[-1, 0]), rat(0)),
                Row::le(rvec(&[0, 1]), rat(1)),
                Row::le(rvec(&[1, 1]), rat(1)),
            ],
        )
        .unwrap();
        let c = p.canonical();
        assert_eq!(
            c.rows(),
            &[
                Row::eq(rvec(&[1, 0]), rat(0)),
                Row::le(rvec(&[0, 1]), rat(1))
            ]
        );
    }

    #[test]
    fn empty_set_canonical() {
        let p = HPolyhedron::new(
            1,
            vec![Row::le(rvec(&[-1]), rat(-1)), Row::le(rvec(&[1]), rat(0))],
        )
        .unwrap();
        assert!(p.is_empty());
        assert!(p.canonical().is_canonical_empty());
        assert!(p.to_v().is_err());
    }

    #[test]
    fn inclusion_with_witness() {
        let small = HPolyhedron::cube(2, rat(-1), rat(1));
        let big = HPolyhedron::cube(2, rat(-2), rat(2));
        assert!(small.included_in(&small).unwrap().holds);
        assert!(small.included_in(&big).unwrap().holds);
        let inc = big.included_in(&small).unwrap();
        assert!(!inc.holds);
        let w = inc.witness.unwrap();
        assert!(big.contains(&w) && !small.contains(&w));
        assert_eq!(w[0], rat(2));
    }

    #[test]
    fn unbounded_inclusion_failure_reports_direction() {
        let line = HPolyhedron::new(2, vec![Row::eq(rvec(&[0, 1]), rat(0))]).unwrap();
        let inc = line.included_in(&HPolyhedron::origin(2)).unwrap();
        assert!(!inc.holds);
        assert_eq!(inc.direction.unwrap(), rvec(&[1, 0]));
        assert!(!HPolyhedron::origin(2).contains(&inc.witness.unwrap()));
    }

    #[test]
    fn v_membership() {
        let tri =
            VPolyhedron::polytope(2, vec![rvec(&[0, 0]), rvec(&[2, 0]), rvec(&[0, 2])]).unwrap();
        assert!(tri.contains(&rvec(&[1, 1])));
        assert!(!tri.contains(&[ratio(3, 2), rat(1)]));
    }

    #[test]
    fn cone_detection() {
        assert!(homogeneous(2, &[rvec(&[1, 0])]).is_cone());
        assert!(!HPolyhedron::cube(2, rat(-1), rat(1)).is_cone());
        let shifted = HPolyhedron::new(
            1,
            vec![Row::le(rvec(&[1]), rat(1)), Row::le(rvec(&[-1]), rat(0))],
        )
        .unwrap();
        assert!(!shifted.is_cone());
    }
}
