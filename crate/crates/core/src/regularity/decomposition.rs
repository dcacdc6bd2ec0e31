//! Cheapest decompositions `x* = Σ x*_i` with `x*_i` in given cones, and
//! the Jamenson constant `λ_G`.
//!
//! Functionals are measured in the dual norm. For polyhedral dual norms
//! the decomposition is a linear program; for the Euclidean norm it is
//! solved by ADMM on the splitting `w_i = z_i`, where the `z_i` step is
//! the prox of `‖·‖ + ι_{cone}` (shrinkage of the cone projection).

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::lp::{self, LpStatus, Sense};
use crate::norm::{NormContext, NormKind};
use crate::polyhedron::{check_dim, HPolyhedron, Row};
use crate::projection::FloatPoly;
use crate::rational::{is_zero_vec, to_f64, to_f64_vec, unit, zeros, RVec, Rat};
use crate::set::GeneratedCone;

use super::normality::capped;
use super::{Constant, SamplingParams};

#[derive(Clone, Debug, PartialEq)]
pub enum Decomposition {
    Exact {
        /// `(cone index, x*_i)` for every cone.
        terms: Vec<(usize, RVec)>,
        norm_sum: Rat,
    },
    Approx {
        terms: Vec<(usize, Vec<f64>)>,
        norm_sum: f64,
        /// `‖Σ x*_i - x*‖`.
        residual: f64,
        /// Whether `norm_sum` lies between the exact l∞ and l1 values.
        within_envelope: bool,
    },
}

impl Decomposition {
    pub fn norm_sum_f64(&self) -> f64 {
        match self {
            Decomposition::Exact { norm_sum, .. } => to_f64(norm_sum),
            Decomposition::Approx { norm_sum, .. } => *norm_sum,
        }
    }

    pub fn terms_f64(&self) -> Vec<(usize, Vec<f64>)> {
        match self {
            Decomposition::Exact { terms, .. } => {
                terms.iter().map(|(i, v)| (*i, to_f64_vec(v))).collect()
            }
            Decomposition::Approx { terms, .. } => terms.clone(),
        }
    }
}

fn validate(cones: &[GeneratedCone], xstar: &[Rat]) -> Result<usize> {
    let dim = xstar.len();
    if cones.is_empty() {
        return Err(GeomError::Invalid("no cones to decompose over".into()));
    }
    for c in cones {
        check_dim(dim, c.dim())?;
    }
    if is_zero_vec(xstar) {
        return Err(GeomError::Invalid(
            "the zero functional has no normalized decomposition".into(),
        ));
    }
    if !GeneratedCone::sum(dim, cones)?.contains(xstar) {
        return Err(GeomError::NotMember(
            "functional is outside the sum of the cones".into(),
        ));
    }
    Ok(dim)
}

/// Exact minimum of `Σ ‖x*_i‖` for a polyhedral norm `kind` (l1 or l∞).
///
/// Variables: one coefficient per generator, then per-cone bounds (one per
/// coordinate for l1, one per cone for l∞).
fn exact_decomposition(cones: &[GeneratedCone], xstar: &[Rat], kind: NormKind) -> Decomposition {
    let n = xstar.len();
    let offsets: Vec<usize> = cones
        .iter()
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += c.generators().len();
            Some(o)
        })
        .collect();
    let ng: usize = cones.iter().map(|c| c.generators().len()).sum();
    let per_cone = if kind == NormKind::L1 { n } else { 1 };
    let nv = ng + cones.len() * per_cone;
    let mut rows = Vec::new();
    for g in 0..ng {
        rows.push(Row::le(
            unit(nv, g).into_iter().map(|v| -v).collect(),
            Rat::zero(),
        ));
    }
    for k in 0..n {
        let mut a = zeros(nv);
        for (c, &o) in cones.iter().zip(&offsets) {
            for (j, g) in c.generators().iter().enumerate() {
                a[o + j] = g[k].clone();
            }
        }
        rows.push(Row::eq(a, xstar[k].clone()));
    }
    for (i, (c, &o)) in cones.iter().zip(&offsets).enumerate() {
        for k in 0..n {
            let bound = ng + i * per_cone + if kind == NormKind::L1 { k } else { 0 };
            for sign in [Rat::one(), -Rat::one()] {
                let mut a = zeros(nv);
                for (j, g) in c.generators().iter().enumerate() {
                    a[o + j] = &sign * &g[k];
                }
                a[bound] = -Rat::one();
                rows.push(Row::le(a, Rat::zero()));
            }
        }
    }
    let mut obj = zeros(nv);
    for v in obj.iter_mut().skip(ng) {
        *v = Rat::one();
    }
    let out = lp::optimize(&obj, Sense::Min, &rows, nv);
    debug_assert_eq!(out.status, LpStatus::Optimal);
    let t = out.point.expect("membership was checked");
    let mut terms = Vec::with_capacity(cones.len());
    let mut norm_sum = Rat::zero();
    for (i, (c, &o)) in cones.iter().zip(&offsets).enumerate() {
        let mut w = zeros(n);
        for (j, g) in c.generators().iter().enumerate() {
            for k in 0..n {
                w[k] += &t[o + j] * &g[k];
            }
        }
        norm_sum += kind.eval(&w).unwrap();
        terms.push((i, w));
    }
    Decomposition::Exact { terms, norm_sum }
}

/// Euclidean projections onto the cones.
#[derive(Clone, Debug)]
pub(crate) struct ConeProjector {
    polys: Vec<Option<FloatPoly>>,
}

impl ConeProjector {
    pub(crate) fn new(cones: &[GeneratedCone]) -> Self {
        ConeProjector {
            polys: cones
                .iter()
                .map(|c| (!c.is_zero()).then(|| FloatPoly::new(&c.to_h())))
                .collect(),
        }
    }

    fn project(&self, i: usize, x: &[f64]) -> Vec<f64> {
        match &self.polys[i] {
            Some(p) => p.project(x).0,
            None => vec![0.0; x.len()],
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

/// ADMM stopping tolerance used when evaluating a single functional.
pub(crate) const ADMM_TOL: f64 = 1e-9;
pub(crate) const ADMM_MAX_ITER: usize = 20_000;
/// Penalty updates happen every `RHO_PERIOD` iterations up to `RHO_WARMUP`;
/// a fixed penalty afterwards keeps the iteration convergent.
const RHO_PERIOD: usize = 10;
const RHO_WARMUP: usize = 2_000;

/// Euclidean decomposition by ADMM. Returns the terms (in the cones), their
/// norm sum and the recomposition residual.
pub(crate) fn admm(
    proj: &ConeProjector,
    x: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<Vec<f64>>, f64, f64) {
    let n = x.len();
    let m = proj.polys.len();
    let scale = norm2(x);
    let xs: Vec<f64> = x.iter().map(|v| v / scale).collect();
    let mut z = vec![vec![0.0; n]; m];
    let mut u = vec![vec![0.0; n]; m];
    let mut w = vec![vec![0.0; n]; m];
    let mut rho = 1.0;
    for it in 1..=max_iter {
        // w-step: project z - u onto {Σ w_i = x}.
        let mut total = vec![0.0; n];
        for i in 0..m {
            for k in 0..n {
                w[i][k] = z[i][k] - u[i][k];
                total[k] += w[i][k];
            }
        }
        for i in 0..m {
            for k in 0..n {
                w[i][k] += (xs[k] - total[k]) / m as f64;
            }
        }
        // z-step: shrink the cone projection of w + u.
        let mut dual_res = 0.0;
        let mut primal_res = 0.0;
        for i in 0..m {
            let v: Vec<f64> = (0..n).map(|k| w[i][k] + u[i][k]).collect();
            let p = proj.project(i, &v);
            let np = norm2(&p);
            let f = if np > 1.0 / rho {
                1.0 - 1.0 / (rho * np)
            } else {
                0.0
            };
            for k in 0..n {
                let zk = f * p[k];
                dual_res += (zk - z[i][k]).powi(2);
                z[i][k] = zk;
                u[i][k] += w[i][k] - zk;
                primal_res += (w[i][k] - zk).powi(2);
            }
        }
        let r = primal_res.sqrt();
        let s = rho * dual_res.sqrt();
        if r < tol && s < tol {
            break;
        }
        if it % RHO_PERIOD != 0 || it > RHO_WARMUP {
            continue;
        }
        if r > 10.0 * s {
            rho *= 2.0;
            u.iter_mut().flatten().for_each(|v| *v /= 2.0);
        } else if s > 10.0 * r {
            rho /= 2.0;
            u.iter_mut().flatten().for_each(|v| *v *= 2.0);
        }
    }
    let terms: Vec<Vec<f64>> = z
        .iter()
        .map(|t| t.iter().map(|v| v * scale).collect())
        .collect();
    let sum: f64 = terms.iter().map(|t| norm2(t)).sum();
    let residual = norm2(
        &(0..n)
            .map(|k| terms.iter().map(|t| t[k]).sum::<f64>() - x[k])
            .collect::<Vec<_>>(),
    );
    (terms, sum, residual)
}

/// Cheapest decomposition of `xstar` over the cones, measured in the dual
/// of `norm.kind`.
pub fn min_decomposition(
    cones: &[GeneratedCone],
    xstar: &[Rat],
    norm: &NormContext,
) -> Result<Decomposition> {
    validate(cones, xstar)?;
    let kind = norm.dual_kind();
    if kind.is_polyhedral() {
        return Ok(exact_decomposition(cones, xstar, kind));
    }
    let proj = ConeProjector::new(cones);
    let (terms, norm_sum, residual) = admm(&proj, &to_f64_vec(xstar), ADMM_TOL, ADMM_MAX_ITER);
    let lo = exact_decomposition(cones, xstar, NormKind::Linf).norm_sum_f64();
    let hi = exact_decomposition(cones, xstar, NormKind::L1).norm_sum_f64();
    let slack = 1e-6 * hi.max(1.0);
    Ok(Decomposition::Approx {
        terms: terms.into_iter().enumerate().collect(),
        norm_sum,
        residual,
        within_envelope: norm_sum >= lo - slack && norm_sum <= hi + slack,
    })
}

/// `B* ∩ (Σ cones)` for a polyhedral dual norm.
pub(crate) fn unit_sum_polytope(
    cones: &[GeneratedCone],
    dual: NormKind,
    dim: usize,
) -> Result<HPolyhedron> {
    let sum = GeneratedCone::sum(dim, cones)?;
    dual.unit_ball_h(dim)?.intersect(&sum.to_h())
}

/// Sampling budget for the cheap first pass of Euclidean sup estimates.
const COARSE_TOL: f64 = 1e-7;
const COARSE_MAX_ITER: usize = 4000;
const REFINE_CANDIDATES: usize = 8;
const REFINE_MAX_EVALS: usize = 400;

/// Largest sampled `f(v)/‖v‖` over unit functionals `v` in the sum cone,
/// where `f` is the Euclidean decomposition cost. Directions are drawn as
/// random nonnegative combinations of the generators and the best ones are
/// refined by compass search on the weights.
pub(crate) fn sampled_max_ratio(
    cones: &[GeneratedCone],
    params: &SamplingParams,
    stream_base: u64,
) -> f64 {
    let gens: Vec<Vec<f64>> = cones
        .iter()
        .flat_map(|c| c.generators().iter().map(|g| to_f64_vec(g)))
        .collect();
    if gens.is_empty() {
        return 0.0;
    }
    let proj = ConeProjector::new(cones);
    let combine = |wts: &[f64]| -> Vec<f64> {
        let n = gens[0].len();
        (0..n)
            .map(|k| gens.iter().zip(wts).map(|(g, w)| w * g[k]).sum())
            .collect()
    };
    let ratio = |wts: &[f64], tol: f64, iters: usize| -> Option<f64> {
        let v = combine(wts);
        let nv = norm2(&v);
        if nv < 1e-12 {
            return None;
        }
        Some(admm(&proj, &v, tol, iters).1 / nv)
    };
    let draw = |k: usize| -> (Vec<f64>, Option<f64>) {
        let wts: Vec<f64> = if k < gens.len() {
            (0..gens.len())
                .map(|j| if j == k { 1.0 } else { 0.0 })
                .collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(stream_base + k as u64);
            (0..gens.len())
                .map(|_| rng.sample::<f64, _>(Exp1))
                .collect()
        };
        let r = ratio(&wts, COARSE_TOL, COARSE_MAX_ITER);
        (wts, r)
    };
    let total = params.samples.max(gens.len());
    let drawn: Vec<(Vec<f64>, Option<f64>)> = if params.parallel {
        (0..total).into_par_iter().map(draw).collect()
    } else {
        (0..total).map(draw).collect()
    };
    let mut ranked: Vec<(usize, f64)> = drawn
        .iter()
        .enumerate()
        .filter_map(|(k, (_, r))| r.map(|r| (k, r)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(REFINE_CANDIDATES);
    let refine = |&(k, _): &(usize, f64)| -> f64 {
        let mut w = drawn[k].0.clone();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        let mut f = ratio(&w, ADMM_TOL, ADMM_MAX_ITER).unwrap_or(0.0);
        let mut step = 0.25;
        let mut evals = 0;
        while step > 1e-9 && evals < REFINE_MAX_EVALS {
            let mut improved = false;
            for j in 0..w.len() {
                for sign in [1.0, -1.0] {
                    let mut y = w.clone();
                    y[j] = (y[j] + sign * step).max(0.0);
                    if y == w {
                        continue;
                    }
                    evals += 1;
                    if let Some(fy) = ratio(&y, ADMM_TOL, ADMM_MAX_ITER) {
                        if fy > f {
                            w = y;
                            f = fy;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        f
    };
    let refined: Vec<f64> = if params.parallel {
        ranked.par_iter().map(refine).collect()
    } else {
        ranked.iter().map(refine).collect()
    };
    refined.into_iter().fold(0.0, f64::max)
}

/// Jamenson constant `λ_G`: the largest η with every functional of the sum
/// cone decomposing at cost at most `‖x*‖/η`.
///
/// Polyhedral dual norms: the cost is convex and positively homogeneous, so
/// its maximum over `B* ∩ Σ cones` sits at a vertex; exact. Euclidean norm:
/// sampled, an upper bound on `λ_G`.
pub fn lambda_g(
    cones: &[GeneratedCone],
    norm: &NormContext,
    params: &SamplingParams,
) -> Result<Constant> {
    let Some(first) = cones.first() else {
        return Err(GeomError::Invalid("no cones".into()));
    };
    let dim = first.dim();
    if cones.iter().all(GeneratedCone::is_zero) {
        return Ok(Constant::Infinite);
    }
    let dual = norm.dual_kind();
    if !dual.is_polyhedral() {
        return Ok(Constant::Approx(sampled_max_ratio(cones, params, 0)).reciprocal());
    }
    let poly = unit_sum_polytope(cones, dual, dim)?;
    let mut worst = Rat::zero();
    for v in poly.to_v()?.points() {
        if is_zero_vec(v) {
            continue;
        }
        let Decomposition::Exact { norm_sum, .. } = exact_decomposition(cones, v, dual) else {
            unreachable!()
        };
        let r = norm_sum / dual.eval(v).unwrap();
        if r > worst {
            worst = r;
        }
    }
    if !worst.is_positive() {
        return Ok(Constant::Infinite);
    }
    Ok(capped(worst.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio, rvec};

    fn rays(vs: &[&[i64]]) -> Vec<GeneratedCone> {
        vs.iter()
            .map(|v| GeneratedCone::new(v.len(), vec![rvec(v)]).unwrap())
            .collect()
    }

    #[test]
    fn independent_rays_decompose_uniquely() {
        let cones = rays(&[&[1, 0], &[0, 1]]);
        let d =
            min_decomposition(&cones, &rvec(&[1, 1]), &NormContext::exact(NormKind::Linf)).unwrap();
        assert_eq!(
            d,
            Decomposition::Exact {
                terms: vec![(0, rvec(&[1, 0])), (1, rvec(&[0, 1]))],
                norm_sum: rat(2)
            }
        );
        let d =
            min_decomposition(&cones, &rvec(&[1, 1]), &NormContext::float(NormKind::L2)).unwrap();
        let Decomposition::Approx {
            norm_sum,
            residual,
            within_envelope,
            ..
        } = d
        else {
            panic!()
        };
        assert!((norm_sum - 2.0).abs() < 1e-6, "{norm_sum}");
        assert!(residual < 1e-6);
        assert!(within_envelope);
    }

    #[test]
    fn opposite_rays_use_one_side() {
        let cones = rays(&[&[1, 2], &[-1, -2]]);
        let d =
            min_decomposition(&cones, &rvec(&[1, 2]), &NormContext::exact(NormKind::L1)).unwrap();
        assert_eq!(d.norm_sum_f64(), 2.0);
        let d =
            min_decomposition(&cones, &rvec(&[1, 2]), &NormContext::float(NormKind::L2)).unwrap();
        assert!((d.norm_sum_f64() - 5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn admm_settles_on_a_pointed_sum_of_four_rays() {
        let cones = rays(&[&[-1, -2, 3], &[-3, -1, 1], &[-1, 0, -3], &[-3, 1, -3]]);
        let x = vec![ratio(-19, 2), ratio(-3, 2), ratio(-7, 2)];
        let d = min_decomposition(&cones, &x, &NormContext::float(NormKind::L2)).unwrap();
        let Decomposition::Approx {
            residual,
            within_envelope,
            ..
        } = d
        else {
            panic!()
        };
        assert!(residual < 1e-6, "{residual}");
        assert!(within_envelope);
    }

    #[test]
    fn single_cone_costs_the_norm() {
        let cones = vec![GeneratedCone::new(2, vec![rvec(&[1, 0]), rvec(&[1, 1])]).unwrap()];
        let x = vec![ratio(3, 2), ratio(1, 2)];
        let d = min_decomposition(&cones, &x, &NormContext::exact(NormKind::Linf)).unwrap();
        assert_eq!(d.norm_sum_f64(), 2.0);
    }

    #[test]
    fn outside_functionals_and_zero_are_rejected() {
        let cones = rays(&[&[1, 0]]);
        let ctx = NormContext::exact(NormKind::Linf);
        assert!(matches!(
            min_decomposition(&cones, &rvec(&[0, 1]), &ctx),
            Err(GeomError::NotMember(_))
        ));
        assert!(min_decomposition(&cones, &rvec(&[0, 0]), &ctx).is_err());
    }

    #[test]
    fn generating_constants_of_rays() {
        let ctx = NormContext::exact(NormKind::Linf);
        let p = SamplingParams::default();
        assert_eq!(
            lambda_g(&rays(&[&[1, 0], &[0, 1]]), &ctx, &p).unwrap(),
            Constant::Exact(rat(1))
        );
        assert_eq!(
            lambda_g(&rays(&[&[1, 1]]), &ctx, &p).unwrap(),
            Constant::Exact(rat(1))
        );
        assert_eq!(
            lambda_g(&rays(&[&[2, 1], &[-2, -1]]), &ctx, &p).unwrap(),
            Constant::Exact(rat(1))
        );
        assert_eq!(
            lambda_g(&[GeneratedCone::zero(2)], &ctx, &p).unwrap(),
            Constant::Infinite
        );
    }

    #[test]
    fn euclidean_bisector_constant() {
        let ctx = NormContext::float(NormKind::L2);
        let p = SamplingParams {
            samples: 2000,
            ..SamplingParams::default()
        };
        let v = lambda_g(&rays(&[&[1, 0], &[0, 1]]), &ctx, &p)
            .unwrap()
            .to_f64()
            .unwrap();
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6, "{v}");
    }
}
