//! Polar cones of a cone collection and the dual normality constant `λ_D`.
//!
//! `λ_D` is the largest η with
//! `B* ∩ Σ K_i° ⊂ co ∪ (K_i° ∩ (1/η)B*)`. The right side is `(1/η)R` for
//! the polytope `R = co ∪ (K_i° ∩ B*)`, so the inclusion holds iff
//! `η·c·v <= d` for every vertex `v` of the left side and every row
//! `c·y <= d` of `R`.

use num_traits::Signed;

use crate::calculus::dual_cone;
use crate::error::{GeomError, Result};
use crate::norm::{NormContext, NormKind};
use crate::polyhedron::{HPolyhedron, VPolyhedron};
use crate::rational::{dot, neg, scale, RVec, Rat};
use crate::set::{Collection, GeneratedCone};

use super::decomposition::{sampled_max_ratio, unit_sum_polytope};
use super::normality::{capped, NormalityVerdict};
use super::{Constant, SamplingParams};

/// Generators of the polar `K°` of a polyhedral cone `K`.
pub fn polar_cone_generators(k: &HPolyhedron) -> Result<GeneratedCone> {
    if !k.is_cone() {
        return Err(GeomError::Invalid(
            "polar cone generators need a cone".into(),
        ));
    }
    let canon = k.canonical();
    if canon.is_homogeneous() {
        // Farkas: the polar of {a_j·x <= 0} is cone{a_j}.
        let mut gens: Vec<RVec> = Vec::new();
        for r in canon.rows() {
            gens.push(r.a.clone());
            if r.eq {
                gens.push(neg(&r.a));
            }
        }
        return GeneratedCone::new(k.dim(), gens);
    }
    GeneratedCone::from_h(&dual_cone(k)?)
}

/// Polars of the (proxy) sets of a cone collection.
pub fn polar_cones(c: &Collection) -> Result<Vec<GeneratedCone>> {
    c.proxies()?
        .iter()
        .map(|p| {
            polar_cone_generators(p).map_err(|_| {
                GeomError::Invalid("dual constants are defined for cone collections only".into())
            })
        })
        .collect()
}

/// Both sides of the dual inclusion at η = 1 for a polyhedral dual norm.
struct DualData {
    lhs_vertices: Vec<RVec>,
    rhs: HPolyhedron,
}

fn dual_data(cones: &[GeneratedCone], dual: NormKind, dim: usize) -> Result<DualData> {
    let lhs = unit_sum_polytope(cones, dual, dim)?;
    let lhs_vertices = lhs.to_v()?.points().to_vec();
    let ball = dual.unit_ball_h(dim)?;
    let mut pts: Vec<RVec> = Vec::new();
    for k in cones {
        for p in ball.intersect(&k.to_h())?.to_v()?.points() {
            if !pts.contains(p) {
                pts.push(p.clone());
            }
        }
    }
    let rhs = VPolyhedron::polytope(dim, pts)?.to_h().canonical();
    Ok(DualData { lhs_vertices, rhs })
}

/// Decides `B* ∩ Σ K_i° ⊂ co ∪ (K_i° ∩ (1/η)B*)` for a polyhedral dual
/// norm; the witness is a left-side vertex outside the right side.
pub fn dual_normality_inclusion(
    cones: &[GeneratedCone],
    norm: &NormContext,
    eta: &Rat,
) -> Result<NormalityVerdict> {
    let dim = cones
        .first()
        .ok_or_else(|| GeomError::Invalid("no cones".into()))?
        .dim();
    let dual = norm.dual_kind();
    if !dual.is_polyhedral() {
        return Err(GeomError::unsupported(
            "dual normality inclusion: needs a polyhedral norm (l1 or linf)",
        ));
    }
    let data = dual_data(cones, dual, dim)?;
    for v in &data.lhs_vertices {
        if !data.rhs.contains(&scale(v, eta)) {
            return Ok(NormalityVerdict {
                holds: false,
                witness: Some(v.clone()),
            });
        }
    }
    Ok(NormalityVerdict {
        holds: true,
        witness: None,
    })
}

/// Seed stream offset separating the `λ_D` samples from the `λ_G` ones.
const LAMBDA_D_STREAM: u64 = 1 << 48;

/// Dual normality constant of the polar cones `cones = {K_i°}`.
///
/// Polyhedral dual norms give the exact value. With the Euclidean norm the
/// inclusion at η amounts to every unit functional of the sum cone having a
/// decomposition of cost at most `1/η`; the constant is estimated from an
/// independent seed stream and bounds `λ_D` from above.
pub fn lambda_d(
    cones: &[GeneratedCone],
    norm: &NormContext,
    params: &SamplingParams,
) -> Result<Constant> {
    let dim = cones
        .first()
        .ok_or_else(|| GeomError::Invalid("no cones".into()))?
        .dim();
    if cones.iter().all(GeneratedCone::is_zero) {
        return Ok(Constant::Infinite);
    }
    let dual = norm.dual_kind();
    if !dual.is_polyhedral() {
        return Ok(
            Constant::Approx(sampled_max_ratio(cones, params, LAMBDA_D_STREAM)).reciprocal(),
        );
    }
    let data = dual_data(cones, dual, dim)?;
    let mut best: Option<Rat> = None;
    for v in &data.lhs_vertices {
        for r in data.rhs.rows() {
            let mut checks = vec![(dot(&r.a, v), r.b.clone())];
            if r.eq {
                checks.push((-dot(&r.a, v), -r.b.clone()));
            }
            for (cv, d) in checks {
                if cv.is_positive() {
                    let q = d / cv;
                    if best.as_ref().is_none_or(|b| &q < b) {
                        best = Some(q);
                    }
                }
            }
        }
    }
    Ok(best.map_or(Constant::Infinite, capped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::{halfspace, homogeneous};
    use crate::rational::{rat, ratio, rvec};

    fn axes() -> Vec<GeneratedCone> {
        vec![
            GeneratedCone::new(2, vec![rvec(&[1, 0])]).unwrap(),
            GeneratedCone::new(2, vec![rvec(&[0, 1])]).unwrap(),
        ]
    }

    #[test]
    fn polar_of_halfspace_is_its_normal_ray() {
        let k = polar_cone_generators(&halfspace(rvec(&[2, 0]), rat(0))).unwrap();
        assert_eq!(k.generators(), &[rvec(&[1, 0])]);
        let q = polar_cone_generators(&homogeneous(2, &[rvec(&[-1, 0]), rvec(&[0, -1])])).unwrap();
        assert!(q.contains(&rvec(&[-3, -5])));
        assert!(!q.contains(&rvec(&[1, -5])));
    }

    #[test]
    fn axis_rays_in_l1() {
        // Primal linf, so functionals are measured in l1.
        let ctx = NormContext::exact(NormKind::Linf);
        assert_eq!(
            lambda_d(&axes(), &ctx, &SamplingParams::default()).unwrap(),
            Constant::Exact(rat(1))
        );
        assert!(
            dual_normality_inclusion(&axes(), &ctx, &rat(1))
                .unwrap()
                .holds
        );
        assert!(
            !dual_normality_inclusion(&axes(), &ctx, &ratio(1001, 1000))
                .unwrap()
                .holds
        );
    }

    #[test]
    fn axis_rays_in_linf_dual() {
        // Functional (1,1) has l∞ norm 1 but costs 2 to decompose.
        let ctx = NormContext::exact(NormKind::L1);
        assert_eq!(
            lambda_d(&axes(), &ctx, &SamplingParams::default()).unwrap(),
            Constant::Exact(ratio(1, 2))
        );
    }

    #[test]
    fn zero_polar_is_infinite() {
        let ctx = NormContext::exact(NormKind::Linf);
        assert_eq!(
            lambda_d(&[GeneratedCone::zero(2)], &ctx, &SamplingParams::default()).unwrap(),
            Constant::Infinite
        );
    }

    #[test]
    fn euclidean_axis_rays() {
        let ctx = NormContext::float(NormKind::L2);
        let p = SamplingParams {
            samples: 2000,
            ..SamplingParams::default()
        };
        let v = lambda_d(&axes(), &ctx, &p).unwrap().to_f64().unwrap();
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4, "{v}");
    }
}
