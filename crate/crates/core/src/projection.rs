//! Nearest points and distances.
//!
//! Euclidean projection onto a polyhedron enumerates candidate active sets of
//! at most `dim` linearly independent rows, projects onto each affine
//! subspace by solving the normal equations, and keeps the nearest feasible
//! candidate. Polyhedral-norm distances are linear programs.

use num_traits::{Signed, Zero};

use crate::error::{GeomError, Result};
use crate::lp::{self, LpStatus, Sense};
use crate::norm::{Mode, NormContext, NormKind};
use crate::polyhedron::{check_dim, HPolyhedron, Row};
use crate::rational::{dot, rank, solve, sq_norm, sub, to_f64, to_f64_vec, zeros, RVec, Rat};
use crate::set::ConvexSet;

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionResult {
    /// Nearest point (a floating-point copy when `exact_point` is set).
    pub point: Vec<f64>,
    pub exact_point: Option<RVec>,
    /// Distance in the context norm.
    pub distance: f64,
    /// Exact squared Euclidean distance (L2 onto polyhedra).
    pub sq_distance: Option<Rat>,
    /// Exact distance for polyhedral norms.
    pub exact_distance: Option<Rat>,
    /// Rows of a polyhedron tight at the nearest point.
    pub active_rows: Vec<usize>,
}

impl ProjectionResult {
    fn exact_l2(h: &HPolyhedron, p: RVec, sq: Rat) -> Self {
        let active_rows = h.active_rows(&p);
        ProjectionResult {
            point: to_f64_vec(&p),
            distance: to_f64(&sq).sqrt(),
            exact_point: Some(p),
            sq_distance: Some(sq),
            exact_distance: None,
            active_rows,
        }
    }
}

/// Iterates over all subsets of `0..m` of size at most `k`, smallest first.
fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k.min(m) {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for j in start..m {
                let mut t = s.clone();
                t.push(j);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Equality rows reduced to a linearly independent subset.
fn independent_equalities(rows: &[Row]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut mat: Vec<RVec> = Vec::new();
    for (i, r) in rows.iter().enumerate().filter(|(_, r)| r.eq) {
        mat.push(r.a.clone());
        if rank(&mat) == mat.len() {
            kept.push(i);
        } else {
            mat.pop();
        }
    }
    kept
}

/// Projection of `x` onto `{p : a_i·p = b_i, i in idx}`; `None` when the
/// normals are dependent.
fn affine_projection(rows: &[Row], idx: &[usize], x: &[Rat]) -> Option<RVec> {
    if idx.is_empty() {
        return Some(x.to_vec());
    }
    let gram: Vec<RVec> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| dot(&rows[i].a, &rows[j].a)).collect())
        .collect();
    let rhs: RVec = idx
        .iter()
        .map(|&i| dot(&rows[i].a, x) - &rows[i].b)
        .collect();
    let mu = solve(&gram, &rhs)?;
    let mut p = x.to_vec();
    for (m, &i) in mu.iter().zip(idx) {
        if m.is_zero() {
            continue;
        }
        for (pk, ak) in p.iter_mut().zip(&rows[i].a) {
            *pk -= m * ak;
        }
    }
    Some(p)
}

/// Exact Euclidean projection onto a nonempty H-polyhedron.
pub fn project_l2_exact(h: &HPolyhedron, x: &[Rat]) -> Result<(RVec, Rat)> {
    check_dim(h.dim(), x.len())?;
    if h.contains(x) {
        return Ok((x.to_vec(), Rat::zero()));
    }
    if h.is_empty() {
        return Err(GeomError::Empty("projection onto the empty set".into()));
    }
    let rows = h.rows();
    let eqs = independent_equalities(rows);
    let ineqs: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].eq).collect();
    let room = h.dim().saturating_sub(eqs.len());
    let mut best: Option<(RVec, Rat)> = None;
    for s in subsets(ineqs.len(), room) {
        let mut idx = eqs.clone();
        idx.extend(s.iter().map(|&j| ineqs[j]));
        let Some(p) = affine_projection(rows, &idx, x) else {
            continue;
        };
        if !h.contains(&p) {
            continue;
        }
        let d = sq_norm(&sub(x, &p));
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((p, d));
        }
    }
    best.ok_or_else(|| GeomError::Invalid("no feasible active set found".into()))
}

/// Exact distance in a polyhedral norm by linear programming; returns the
/// nearest point and the distance.
pub fn distance_lp(h: &HPolyhedron, x: &[Rat], kind: NormKind) -> Result<(RVec, Rat)> {
    check_dim(h.dim(), x.len())?;
    let n = h.dim();
    let extra = match kind {
        NormKind::Linf => 1,
        NormKind::L1 => n,
        NormKind::L2 => {
            return Err(GeomError::unsupported(
                "distance_lp needs a polyhedral norm",
            ))
        }
    };
    let nv = n + extra;
    let mut rows: Vec<Row> = h
        .rows()
        .iter()
        .map(|r| {
            let mut a = r.a.clone();
            a.extend(zeros(extra));
            Row {
                a,
                b: r.b.clone(),
                eq: r.eq,
            }
        })
        .collect();
    for k in 0..n {
        let slack = if kind == NormKind::Linf { n } else { n + k };
        // x_k - p_k <= s and p_k - x_k <= s.
        let mut lo = zeros(nv);
        lo[k] = -Rat::from_integer(1.into());
        lo[slack] = -Rat::from_integer(1.into());
        rows.push(Row::le(lo, -x[k].clone()));
        let mut hi = zeros(nv);
        hi[k] = Rat::from_integer(1.into());
        hi[slack] = -Rat::from_integer(1.into());
        rows.push(Row::le(hi, x[k].clone()));
    }
    let mut obj = zeros(nv);
    for v in obj.iter_mut().skip(n) {
        *v = Rat::from_integer(1.into());
    }
    let out = lp::optimize(&obj, Sense::Min, &rows, nv);
    match out.status {
        LpStatus::Optimal => {
            let z = out.point.unwrap();
            Ok((z[..n].to_vec(), out.value.unwrap()))
        }
        LpStatus::Infeasible => Err(GeomError::Empty("distance to the empty set".into())),
        LpStatus::Unbounded => unreachable!("norm distance is bounded below"),
    }
}

/// Projection of `x` onto `s` in the context norm.
///
/// For the interval family the target is the intersection `{0}`, whose
/// distance equals `sup_i d(x, A_i) = |x|`.
pub fn project(s: &ConvexSet, x: &[Rat], norm: &NormContext) -> Result<ProjectionResult> {
    check_dim(s.dim(), x.len())?;
    match s {
        ConvexSet::ShrinkingIntervals => {
            let d = x[0].abs();
            Ok(ProjectionResult {
                point: vec![0.0],
                exact_point: Some(vec![Rat::zero()]),
                distance: to_f64(&d),
                sq_distance: Some(&d * &d),
                exact_distance: Some(d),
                active_rows: Vec::new(),
            })
        }
        ConvexSet::Ball(b) => {
            if b.contains(x) {
                let f = to_f64_vec(x);
                return Ok(ProjectionResult {
                    point: f,
                    exact_point: Some(x.to_vec()),
                    distance: 0.0,
                    sq_distance: Some(Rat::zero()),
                    exact_distance: Some(Rat::zero()),
                    active_rows: Vec::new(),
                });
            }
            if norm.kind != NormKind::L2 {
                return Err(GeomError::unsupported(
                    "distance to a Euclidean ball in a polyhedral norm",
                ));
            }
            if norm.mode == Mode::Exact {
                return Err(GeomError::unsupported(
                    "exact projection onto a ball is irrational; use float mode",
                ));
            }
            let xf = to_f64_vec(x);
            let c = to_f64_vec(b.center());
            let r = to_f64(b.radius());
            let d = b.distance_f64(&xf);
            let len = r + d;
            let point = xf
                .iter()
                .zip(&c)
                .map(|(xi, ci)| ci + (xi - ci) * r / len)
                .collect();
            Ok(ProjectionResult {
                point,
                exact_point: None,
                distance: d,
                sq_distance: None,
                exact_distance: None,
                active_rows: Vec::new(),
            })
        }
        s => {
            let h = s.to_h().unwrap();
            match norm.kind {
                NormKind::L2 => {
                    let (p, sq) = project_l2_exact(&h, x)?;
                    Ok(ProjectionResult::exact_l2(&h, p, sq))
                }
                kind => {
                    let (p, d) = distance_lp(&h, x, kind)?;
                    let active_rows = h.active_rows(&p);
                    Ok(ProjectionResult {
                        point: to_f64_vec(&p),
                        exact_point: Some(p),
                        distance: to_f64(&d),
                        sq_distance: None,
                        exact_distance: Some(d),
                        active_rows,
                    })
                }
            }
        }
    }
}

/// A polyhedron in floating point for fast Euclidean projections.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    dim: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    eq: Vec<bool>,
    candidates: Vec<Vec<usize>>,
}

const FEAS_TOL: f64 = 1e-10;

impl FloatPoly {
    pub fn new(h: &HPolyhedron) -> Self {
        let rows = h.rows();
        let eqs = independent_equalities(rows);
        let ineqs: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].eq).collect();
        let room = h.dim().saturating_sub(eqs.len());
        let mut candidates = Vec::new();
        for s in subsets(ineqs.len(), room) {
            let mut idx = eqs.clone();
            idx.extend(s.iter().map(|&j| ineqs[j]));
            let normals: Vec<RVec> = idx.iter().map(|&i| rows[i].a.clone()).collect();
            if rank(&normals) == idx.len() {
                candidates.push(idx);
            }
        }
        FloatPoly {
            dim: h.dim(),
            a: rows.iter().map(|r| to_f64_vec(&r.a)).collect(),
            b: rows.iter().map(|r| to_f64(&r.b)).collect(),
            eq: rows.iter().map(|r| r.eq).collect(),
            candidates,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for ((a, b), eq) in self.a.iter().zip(&self.b).zip(&self.eq) {
            let v = fdot(a, x) - b;
            let scale = 1.0 + b.abs() + a.iter().map(|t| t.abs()).sum::<f64>();
            let rel = if *eq { v.abs() } else { v.max(0.0) } / scale;
            worst = worst.max(rel);
        }
        worst
    }

    /// Nearest point and Euclidean distance.
    pub fn project(&self, x: &[f64]) -> (Vec<f64>, f64) {
        if self.violation(x) <= 0.0 {
            return (x.to_vec(), 0.0);
        }
        let mut best: Option<(Vec<f64>, f64)> = None;
        let mut fallback: Option<(Vec<f64>, f64, f64)> = None;
        for idx in &self.candidates {
            let Some(p) = self.affine(idx, x) else {
                continue;
            };
            let d = x
                .iter()
                .zip(&p)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt();
            let viol = self.violation(&p);
            if viol <= FEAS_TOL {
                if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
                    best = Some((p, d));
                }
            } else if fallback.as_ref().is_none_or(|(_, _, bv)| viol < *bv) {
                fallback = Some((p, d, viol));
            }
        }
        best.or(fallback.map(|(p, d, _)| (p, d)))
            .unwrap_or_else(|| (x.to_vec(), f64::NAN))
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.project(x).1
    }

    fn affine(&self, idx: &[usize], x: &[f64]) -> Option<Vec<f64>> {
        let k = idx.len();
        if k == 0 {
            return Some(x.to_vec());
        }
        let mut m: Vec<Vec<f64>> = idx
            .iter()
            .map(|&i| {
                let mut row: Vec<f64> = idx.iter().map(|&j| fdot(&self.a[i], &self.a[j])).collect();
                row.push(fdot(&self.a[i], x) - self.b[i]);
                row
            })
            .collect();
        let mu = gauss_solve(&mut m, k)?;
        let mut p = x.to_vec();
        for (m, &i) in mu.iter().zip(idx) {
            for (pk, ak) in p.iter_mut().zip(&self.a[i]) {
                *pk -= m * ak;
            }
        }
        Some(p)
    }
}

pub(crate) fn fdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on an augmented `k x (k+1)`
/// matrix.
pub(crate) fn gauss_solve(m: &mut [Vec<f64>], k: usize) -> Option<Vec<f64>> {
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-14 {
            return None;
        }
        m.swap(c, p);
        for i in 0..k {
            if i != c {
                let f = m[i][c] / m[c][c];
                if f != 0.0 {
                    for j in c..=k {
                        m[i][j] -= f * m[c][j];
                    }
                }
            }
        }
    }
    Some((0..k).map(|i| m[i][k] / m[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::{halfspace, homogeneous};
    use crate::rational::{rat, ratio, rvec};
    use crate::set::Ball;

    #[test]
    fn l2_projections() {
        let sq = HPolyhedron::cube(2, rat(-1), rat(1));
        let (p, d) = project_l2_exact(&sq, &rvec(&[0, 0])).unwrap();
        assert_eq!((p, d), (rvec(&[0, 0]), rat(0)));
        let third = homogeneous(2, &[rvec(&[1, 0]), rvec(&[0, 1])]);
        let (p, d) = project_l2_exact(&third, &rvec(&[1, 1])).unwrap();
        assert_eq!((p, d), (rvec(&[0, 0]), rat(2)));
        let (p, d) = project_l2_exact(&halfspace(rvec(&[0, 1]), rat(0)), &rvec(&[0, 3])).unwrap();
        assert_eq!((p, d), (rvec(&[0, 0]), rat(9)));
    }

    #[test]
    fn projection_onto_a_slanted_edge() {
        // Triangle co{0, e1, e2}; x = (1,1) lands on the hypotenuse midpoint.
        let tri = HPolyhedron::new(
            2,
            vec![
                Row::le(rvec(&[-1, 0]), rat(0)),
                Row::le(rvec(&[0, -1]), rat(0)),
                Row::le(rvec(&[1, 1]), rat(1)),
            ],
        )
        .unwrap();
        let (p, d) = project_l2_exact(&tri, &rvec(&[1, 1])).unwrap();
        assert_eq!(p, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(d, ratio(1, 2));
        let fp = FloatPoly::new(&tri);
        let (q, e) = fp.project(&[1.0, 1.0]);
        assert!((q[0] - 0.5).abs() < 1e-12 && (e - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn polyhedral_norm_distances() {
        let third = homogeneous(2, &[rvec(&[1, 0]), rvec(&[0, 1])]);
        let (_, d) = distance_lp(&third, &rvec(&[1, 1]), NormKind::Linf).unwrap();
        assert_eq!(d, rat(1));
        let (_, d) = distance_lp(&third, &rvec(&[1, 1]), NormKind::L1).unwrap();
        assert_eq!(d, rat(2));
    }

    #[test]
    fn ball_projection_needs_float_mode() {
        let b = ConvexSet::Ball(Ball::new(rvec(&[0, 0]), rat(1)).unwrap());
        let x = rvec(&[3, 4]);
        assert!(project(&b, &x, &NormContext::exact(NormKind::L2))
            .unwrap_err()
            .is_unsupported());
        let r = project(&b, &x, &NormContext::float(NormKind::L2)).unwrap();
        assert!((r.distance - 4.0).abs() < 1e-12);
        assert!((r.point[0] - 0.6).abs() < 1e-12 && (r.point[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn family_distance_is_absolute_value() {
        let r = project(
            &ConvexSet::ShrinkingIntervals,
            &[ratio(-3, 4)],
            &NormContext::exact(NormKind::L2),
        )
        .unwrap();
        assert_eq!(r.exact_distance, Some(ratio(3, 4)));
    }
}
