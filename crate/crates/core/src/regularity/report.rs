//! All constants of a collection in one report.

use num_traits::Zero;

use crate::error::{GeomError, Result};
use crate::norm::{Mode, NormKind};
use crate::rational::Rat;
use crate::set::{Collection, ConvexSet};

use super::dual::polar_cones;
use super::normality::{allow_sampled, proxies_are_cones, LambdaUn, LambdaUnKind};
use super::sampling::{check_rho, gamma_estimate, gamma_lower_bound, GammaEstimate};
use super::{self as reg, Constant, SamplingParams};

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsOptions {
    pub tol: Rat,
    pub delta_grid: Vec<Rat>,
    pub sampling: SamplingParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsReport {
    pub norm_kind: NormKind,
    pub mode: Mode,
    pub lambda_n: Constant,
    pub lambda_un: LambdaUn,
    pub lambda_d: Constant,
    pub lambda_g: Constant,
    pub gamma: GammaEstimate,
    pub bisect_tol: Rat,
    pub samples: usize,
    pub seed: u64,
    /// Which side each sampled value certifies.
    pub notes: Vec<String>,
}

const CONE_ONLY: &str = "defined for cone collections only";

/// Computes every constant the norm and the collection admit.
pub fn compute_constants(c: &Collection, opts: &ConstantsOptions) -> Result<ConstantsReport> {
    allow_sampled(c, "constants")?;
    check_rho(&opts.sampling.rho)?;
    if opts.tol.is_zero() || opts.tol < Rat::zero() {
        return Err(GeomError::Invalid(
            "bisection tolerance must be positive".into(),
        ));
    }
    let has_ball = c.sets().iter().any(|s| matches!(s, ConvexSet::Ball(_)));
    let kind = c.norm().kind;
    if has_ball && kind.is_polyhedral() {
        return Err(GeomError::unsupported(
            "constants: collections with balls need the l2 norm",
        ));
    }
    let cones = !has_ball && proxies_are_cones(c)?;
    let p = &opts.sampling;
    let mut notes = Vec::new();
    let (lambda_n, lambda_un, lambda_d, lambda_g, gamma): (
        Constant,
        LambdaUn,
        Constant,
        Constant,
        GammaEstimate,
    );
    if kind.is_polyhedral() {
        lambda_n = reg::lambda_n(c, &opts.tol, p)?;
        lambda_un = if cones {
            LambdaUn {
                value: lambda_n.clone(),
                kind: LambdaUnKind::ConeEqual,
            }
        } else {
            notes.push("lambda_UN is the minimum over the delta grid, an upper bound".into());
            reg::lambda_un(c, &opts.tol, &opts.delta_grid, p)?
        };
        if cones {
            let polars = polar_cones(c)?;
            lambda_d = reg::lambda_d(&polars, c.norm(), p)?;
            lambda_g = reg::lambda_g(&polars, c.norm(), p)?;
        } else {
            lambda_d = Constant::Unavailable(CONE_ONLY.into());
            lambda_g = Constant::Unavailable(CONE_ONLY.into());
        }
        gamma = gamma_estimate(c, p, &lambda_un.value)?;
    } else if cones {
        let lower = gamma_lower_bound(c, p)?;
        lambda_n = Constant::Approx(lower.value).reciprocal();
        lambda_un = LambdaUn {
            value: lambda_n.clone(),
            kind: LambdaUnKind::ConeEqual,
        };
        let polars = polar_cones(c)?;
        lambda_d = reg::lambda_d(&polars, c.norm(), p)?;
        lambda_g = reg::lambda_g(&polars, c.norm(), p)?;
        let upper = lambda_un.value.reciprocal().to_f64().unwrap();
        gamma = GammaEstimate { lower, upper };
        notes.push("l2: lambda_N, lambda_D and lambda_G are sampled upper bounds".into());
        notes.push("l2: gamma_ub is the reciprocal of the sampled lambda_UN".into());
    } else {
        let why = "l2 needs a cone collection";
        lambda_n = Constant::Unavailable(why.into());
        lambda_un = LambdaUn {
            value: Constant::Unavailable(why.into()),
            kind: LambdaUnKind::Unavailable,
        };
        lambda_d = Constant::Unavailable(CONE_ONLY.into());
        lambda_g = Constant::Unavailable(CONE_ONLY.into());
        gamma = gamma_estimate(c, p, &lambda_un.value)?;
    }
    notes.push("gamma_lb is a sampled lower bound".into());
    Ok(ConstantsReport {
        norm_kind: kind,
        mode: c.norm().mode,
        lambda_n,
        lambda_un,
        lambda_d,
        lambda_g,
        gamma,
        bisect_tol: opts.tol.clone(),
        samples: p.samples,
        seed: p.seed,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormContext;
    use crate::polyhedron::halfspace;
    use crate::rational::{rat, rvec};
    use crate::regularity::default_tol;

    fn right_angle(ctx: NormContext) -> Collection {
        Collection::new(
            2,
            ctx,
            vec![
                ConvexSet::HPoly(halfspace(rvec(&[1, 0]), rat(0))),
                ConvexSet::HPoly(halfspace(rvec(&[0, 1]), rat(0))),
            ],
            None,
        )
        .unwrap()
    }

    fn opts(samples: usize) -> ConstantsOptions {
        ConstantsOptions {
            tol: default_tol(),
            delta_grid: vec![rat(1)],
            sampling: SamplingParams {
                samples,
                ..SamplingParams::default()
            },
        }
    }

    #[test]
    fn right_angle_linf() {
        let r = compute_constants(
            &right_angle(NormContext::exact(NormKind::Linf)),
            &opts(1000),
        )
        .unwrap();
        assert_eq!(r.lambda_n, Constant::Exact(rat(1)));
        assert_eq!(r.lambda_d, Constant::Exact(rat(1)));
        assert_eq!(r.lambda_g, Constant::Exact(rat(1)));
        assert_eq!(r.lambda_un.kind, LambdaUnKind::ConeEqual);
        assert_eq!(r.gamma.upper, 1.0);
        assert!(r.gamma.lower.value <= 1.0 + 1e-12);
    }

    #[test]
    fn right_angle_l2() {
        let r = compute_constants(
            &right_angle(NormContext::float(NormKind::L2)),
            &opts(10_000),
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.lambda_n.to_f64().unwrap() - h).abs() < 1e-4);
        assert!((r.lambda_g.to_f64().unwrap() - h).abs() < 1e-4);
        assert!((r.lambda_d.to_f64().unwrap() - h).abs() < 1e-4);
        assert!(r.gamma.lower.value >= 1.41 && r.gamma.lower.value <= 1.4143);
    }

    #[test]
    fn exact_l2_is_unsupported() {
        let e = compute_constants(&right_angle(NormContext::exact(NormKind::L2)), &opts(10))
            .unwrap_err();
        assert!(e.is_unsupported());
        assert!(e.to_string().contains("constants"));
    }
}
