//! Exact two-phase simplex over rationals with Bland's anti-cycling rule.
//!
//! Variables are free; each is split into a positive and a negative part.
//! Outcomes are deterministic for a given row order.

use crate::error::{GeomError, Result};
use crate::polyhedron::{HPolyhedron, Row};
use crate::rational::{dot, primitive, zeros, RVec, Rat};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Optimal value (when optimal).
    pub value: Option<Rat>,
    /// Optimal point, or a feasible point when unbounded.
    pub point: Option<RVec>,
    /// Improving recession direction (primitive integer) when unbounded.
    pub ray: Option<RVec>,
}

impl LpOutcome {
    fn infeasible() -> Self {
        LpOutcome {
            status: LpStatus::Infeasible,
            value: None,
            point: None,
            ray: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Optimizes `objective · x` over `region`.
pub fn solve_lp(objective: &[Rat], sense: Sense, region: &HPolyhedron) -> Result<LpOutcome> {
    if objective.len() != region.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: region.dim(),
            found: objective.len(),
        });
    }
    Ok(optimize(objective, sense, region.rows(), region.dim()))
}

/// Same as [`solve_lp`] on a raw row list over `dim` free variables.
pub fn optimize(objective: &[Rat], sense: Sense, rows: &[Row], dim: usize) -> LpOutcome {
    let c: RVec = match sense {
        Sense::Max => objective.to_vec(),
        Sense::Min => objective.iter().map(|x| -x).collect(),
    };
    let mut out = Tableau::new(rows, dim).run(&c);
    if sense == Sense::Min {
        out.value = out.value.map(|v| -v);
    }
    out
}

/// Feasibility only; returns a feasible point if one exists.
pub fn feasible_point(rows: &[Row], dim: usize) -> Option<RVec> {
    let out = optimize(&zeros(dim), Sense::Max, rows, dim);
    out.point
}

struct Tableau {
    dim: usize,
    /// Constraint rows; the last entry of each row is the right-hand side.
    t: Vec<RVec>,
    basis: Vec<usize>,
    ncols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn new(rows: &[Row], dim: usize) -> Self {
        let n_slack = rows.iter().filter(|r| !r.eq).count();
        let needs_art: Vec<bool> = rows.iter().map(|r| r.eq || r.b.is_negative()).collect();
        let n_art = needs_art.iter().filter(|&&x| x).count();
        let first_slack = 2 * dim;
        let first_artificial = first_slack + n_slack;
        let ncols = first_artificial + n_art;

        let mut t = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let mut slack = first_slack;
        let mut art = first_artificial;
        for (row, &art_needed) in rows.iter().zip(&needs_art) {
            let mut r = vec![Rat::zero(); ncols + 1];
            let flip = row.b.is_negative();
            for (k, a) in row.a.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let v = if flip { -a } else { a.clone() };
                r[dim + k] = -v.clone();
                r[k] = v;
            }
            if !row.eq {
                r[slack] = if flip { -Rat::one() } else { Rat::one() };
            }
            r[ncols] = row.b.abs();
            if art_needed {
                r[art] = Rat::one();
                basis.push(art);
                art += 1;
            } else {
                basis.push(slack);
            }
            if !row.eq {
                slack += 1;
            }
            t.push(r);
        }
        Tableau {
            dim,
            t,
            basis,
            ncols,
            first_artificial,
        }
    }

    fn rhs(&self) -> usize {
        self.ncols
    }

    fn pivot(&mut self, obj: &mut RVec, r: usize, q: usize) {
        let inv = self.t[r][q].recip();
        for x in self.t[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = self.t[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[q].is_zero() {
                continue;
            }
            let f = row[q].clone();
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
        }
        if !obj[q].is_zero() {
            let f = obj[q].clone();
            for &j in &nz {
                obj[j] -= &f * &prow[j];
            }
        }
        self.basis[r] = q;
    }

    /// Runs Bland-rule iterations on `obj` (reduced costs, `obj[rhs] = -z`)
    /// over columns `< limit`. Returns the unbounded entering column, if any.
    fn iterate(&mut self, obj: &mut RVec, limit: usize) -> Option<usize> {
        let rhs = self.rhs();
        loop {
            let q = (0..limit).find(|&j| obj[j].is_positive())?;
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Some(q),
                Some((r, _)) => self.pivot(obj, r, q),
            }
        }
    }

    fn basic_solution(&self) -> RVec {
        let mut z = zeros(self.ncols);
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.t[i][self.rhs()].clone();
        }
        self.to_x(&z)
    }

    fn to_x(&self, z: &[Rat]) -> RVec {
        (0..self.dim).map(|k| &z[k] - &z[self.dim + k]).collect()
    }

    fn run(mut self, c: &[Rat]) -> LpOutcome {
        let rhs = self.rhs();
        let n_art = self.ncols - self.first_artificial;
        if n_art > 0 {
            // Phase 1: maximize -(sum of artificials).
            let mut obj = vec![Rat::zero(); self.ncols + 1];
            for (i, &b) in self.basis.iter().enumerate() {
                if b >= self.first_artificial {
                    for j in 0..=self.ncols {
                        if !self.t[i][j].is_zero() {
                            obj[j] += &self.t[i][j];
                        }
                    }
                }
            }
            for j in self.first_artificial..self.ncols {
                obj[j] = Rat::zero();
            }
            self.iterate(&mut obj, self.ncols);
            if !obj[rhs].is_zero() {
                return LpOutcome::infeasible();
            }
            // Drive remaining artificials out of the basis.
            let mut i = 0;
            while i < self.t.len() {
                if self.basis[i] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.t[i][j].is_zero()) {
                        Some(q) => {
                            let mut dummy = vec![Rat::zero(); self.ncols + 1];
                            self.pivot(&mut dummy, i, q);
                            i += 1;
                        }
                        None => {
                            self.t.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }
        // Phase 2 over structural and slack columns only.
        let limit = self.first_artificial;
        let mut cost = vec![Rat::zero(); self.ncols];
        for k in 0..self.dim {
            cost[k] = c[k].clone();
            cost[self.dim + k] = -c[k].clone();
        }
        let mut obj = vec![Rat::zero(); self.ncols + 1];
        obj[..limit].clone_from_slice(&cost[..limit]);
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            let cb = cost[b].clone();
            for j in 0..limit {
                if !self.t[i][j].is_zero() {
                    obj[j] -= &cb * &self.t[i][j];
                }
            }
            obj[rhs] -= &cb * &self.t[i][rhs];
        }
        match self.iterate(&mut obj, limit) {
            None => {
                let point = self.basic_solution();
                let value = dot(c, &point);
                LpOutcome {
                    status: LpStatus::Optimal,
                    value: Some(value),
                    point: Some(point),
                    ray: None,
                }
            }
            Some(q) => {
                let mut dz = zeros(self.ncols);
                dz[q] = Rat::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.t[i][q].is_zero() {
                        dz[b] = -self.t[i][q].clone();
                    }
                }
                let ray = primitive(&self.to_x(&dz));
                LpOutcome {
                    status: LpStatus::Unbounded,
                    value: None,
                    point: Some(self.basic_solution()),
                    ray: Some(ray),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio, rvec};

    fn le(a: &[i64], b: i64) -> Row {
        Row::le(rvec(a), rat(b))
    }

    fn box2() -> HPolyhedron {
        HPolyhedron::new(
            2,
            vec![
                le(&[1, 0], 1),
                le(&[-1, 0], 1),
                le(&[0, 1], 1),
                le(&[0, -1], 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn box_maximum_is_one_at_a_fixed_vertex() {
        let out = solve_lp(&rvec(&[1, 0]), Sense::Max, &box2()).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.value, Some(rat(1)));
        let p = out.point.unwrap();
        assert_eq!(p[0], rat(1));
        assert!(p[1].abs() <= rat(1));
        // Deterministic across runs.
        let again = solve_lp(&rvec(&[1, 0]), Sense::Max, &box2()).unwrap();
        assert_eq!(again.point.unwrap(), p);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let p = HPolyhedron::new(1, vec![le(&[-1], -1), le(&[1], 0)]).unwrap();
        let out = solve_lp(&rvec(&[1]), Sense::Max, &p).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
    }

    #[test]
    fn halfplane_is_unbounded_with_improving_ray() {
        let p = HPolyhedron::new(2, vec![le(&[0, 1], 0)]).unwrap();
        let out = solve_lp(&rvec(&[1, 0]), Sense::Max, &p).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
        let ray = out.ray.unwrap();
        assert!(dot(&rvec(&[1, 0]), &ray) > rat(0));
        assert!(dot(&rvec(&[0, 1]), &ray) <= rat(0));
    }

    #[test]
    fn equality_rows_and_minimization() {
        // x + y = 1, x >= 0, y >= 0; minimize x - y -> -1 at (0, 1).
        let rows = vec![
            Row::eq(rvec(&[1, 1]), rat(1)),
            le(&[-1, 0], 0),
            le(&[0, -1], 0),
        ];
        let out = optimize(&rvec(&[1, -1]), Sense::Min, &rows, 2);
        assert_eq!(out.value, Some(rat(-1)));
        assert_eq!(out.point.unwrap(), rvec(&[0, 1]));
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Many constraints through the optimum (1/2, 1/2).
        let rows = vec![
            le(&[1, 1], 1),
            le(&[2, 2], 2),
            le(&[1, -1], 0),
            le(&[-1, 1], 0),
            le(&[3, 1], 2),
            le(&[1, 3], 2),
        ];
        let out = optimize(&rvec(&[1, 1]), Sense::Max, &rows, 2);
        assert_eq!(out.value, Some(rat(1)));
        assert_eq!(out.point.unwrap(), vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(matches!(
            solve_lp(&rvec(&[1]), Sense::Max, &box2()),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }
}
