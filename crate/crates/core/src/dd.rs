//! Double description method for polyhedral cones `{y : h·y <= 0}`.
//!
//! Works on primitive integer vectors. Constraints are processed in input
//! order; lineality is tracked explicitly, and two rays are adjacent when the
//! constraints tight at both have rank `d - lines - 2`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{primitive_bigint, rank, Rat};

pub(crate) type IVec = Vec<BigInt>;

#[derive(Clone, Debug, Default)]
pub(crate) struct ConeGenerators {
    pub lines: Vec<IVec>,
    pub rays: Vec<IVec>,
}

#[derive(Clone, Debug)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64).max(1)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64)
                .filter(move |b| bits >> b & 1 == 1)
                .map(move |b| w * 64 + b)
        })
    }
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc + x * y
        }
    })
}

fn combine(ca: &BigInt, a: &[BigInt], cb: &BigInt, b: &[BigInt]) -> IVec {
    primitive_bigint(a.iter().zip(b).map(|(x, y)| ca * x + cb * y).collect())
}

/// Generators of `{y in Z^dim : h·y <= 0 for all h}`.
pub(crate) fn generators(dim: usize, constraints: &[IVec]) -> ConeGenerators {
    let m = constraints.len();
    let mut lines: Vec<IVec> = (0..dim)
        .map(|k| {
            (0..dim)
                .map(|j| {
                    if j == k {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut rays: Vec<(IVec, BitSet)> = Vec::new();

    for (k, h) in constraints.iter().enumerate() {
        if h.iter().all(Zero::is_zero) {
            continue;
        }
        let pivot = lines.iter().position(|l| !idot(h, l).is_zero());
        if let Some(p) = pivot {
            let l0 = lines.remove(p);
            let v0 = idot(h, &l0);
            let abs_v0 = v0.abs();
            let sign_v0 = if v0.is_positive() {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            for l in lines.iter_mut() {
                let v = idot(h, l);
                if !v.is_zero() {
                    *l = combine(&v0, l, &(-v), &l0);
                }
            }
            for (r, z) in rays.iter_mut() {
                let v = idot(h, r);
                if !v.is_zero() {
                    *r = combine(&abs_v0, r, &(-(&sign_v0 * v)), &l0);
                }
                z.insert(k);
            }
            let new_ray: IVec = l0.iter().map(|x| -(&sign_v0 * x)).collect();
            let mut z = BitSet::new(m);
            for j in 0..k {
                z.insert(j);
            }
            rays.push((primitive_bigint(new_ray), z));
            continue;
        }

        let vals: Vec<BigInt> = rays.iter().map(|(r, _)| idot(h, r)).collect();
        if !vals.iter().any(|v| v.is_positive()) {
            for ((_, z), v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    z.insert(k);
                }
            }
            continue;
        }
        let target_rank = dim - lines.len();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let negs: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<(IVec, BitSet)> = Vec::new();
        for (i, (r, z)) in rays.iter().enumerate() {
            if vals[i].is_positive() {
                continue;
            }
            let mut z = z.clone();
            if vals[i].is_zero() {
                z.insert(k);
            }
            next.push((r.clone(), z));
        }
        for &p in &pos {
            for &q in &negs {
                let common = rays[p].1.and(&rays[q].1);
                if target_rank < 2 || common.count() < target_rank - 2 {
                    continue;
                }
                let rows: Vec<Vec<Rat>> = common
                    .iter()
                    .map(|j| {
                        constraints[j]
                            .iter()
                            .cloned()
                            .map(Rat::from_integer)
                            .collect()
                    })
                    .collect();
                if rank(&rows) != target_rank - 2 {
                    continue;
                }
                let vp = &vals[p];
                let vq = &vals[q];
                let new_ray = combine(vp, &rays[q].0, &(-vq), &rays[p].0);
                let mut z = common;
                z.insert(k);
                next.push((new_ray, z));
            }
        }
        rays = next;
    }

    let lines = lines.into_iter().map(canonical_line).collect();
    ConeGenerators {
        lines,
        rays: rays.into_iter().map(|(r, _)| r).collect(),
    }
}

/// Lines are defined up to sign; fix the first nonzero entry positive.
fn canonical_line(l: IVec) -> IVec {
    let l = primitive_bigint(l);
    match l.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => l.into_iter().map(|x| -x).collect(),
        _ => l,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(xs: &[i64]) -> IVec {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn sorted(mut v: Vec<IVec>) -> Vec<IVec> {
        v.sort();
        v
    }

    #[test]
    fn nonnegative_orthant() {
        let g = generators(3, &[iv(&[-1, 0, 0]), iv(&[0, -1, 0]), iv(&[0, 0, -1])]);
        assert!(g.lines.is_empty());
        assert_eq!(
            sorted(g.rays),
            vec![iv(&[0, 0, 1]), iv(&[0, 1, 0]), iv(&[1, 0, 0])]
        );
    }

    #[test]
    fn halfspace_has_lineality() {
        let g = generators(2, &[iv(&[1, 1])]);
        assert_eq!(g.lines.len(), 1);
        assert_eq!(g.rays.len(), 1);
        assert!(idot(&iv(&[1, 1]), &g.lines[0]).is_zero());
        assert!(idot(&iv(&[1, 1]), &g.rays[0]).is_negative());
    }

    #[test]
    fn square_pyramid_has_four_rays() {
        // Cone over the square [-1,1]^2 at height 1: |y1| <= y3, |y2| <= y3.
        let g = generators(
            3,
            &[
                iv(&[1, 0, -1]),
                iv(&[-1, 0, -1]),
                iv(&[0, 1, -1]),
                iv(&[0, -1, -1]),
            ],
        );
        assert!(g.lines.is_empty());
        assert_eq!(
            sorted(g.rays),
            vec![
                iv(&[-1, -1, 1]),
                iv(&[-1, 1, 1]),
                iv(&[1, -1, 1]),
                iv(&[1, 1, 1])
            ]
        );
    }

    #[test]
    fn redundant_constraints_do_not_add_rays() {
        let g = generators(
            2,
            &[iv(&[-1, 0]), iv(&[0, -1]), iv(&[-1, -1]), iv(&[-2, 0])],
        );
        assert_eq!(sorted(g.rays), vec![iv(&[0, 1]), iv(&[1, 0])]);
    }
}
