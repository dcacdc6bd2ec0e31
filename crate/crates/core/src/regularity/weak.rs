//! Largest η with `∩(A_i + ηB) ⊂ (∩A_i) + {x*}°` for one functional `x*`.
//!
//! `(∩A_i) + {x*}°` is the halfspace `⟨x*, x⟩ <= 1 + σ_A(x*)` (the whole
//! space when the support value is infinite), so each test is one LP.

use num_traits::{One, Zero};

use crate::error::Result;
use crate::rational::{is_zero_vec, Rat};
use crate::set::{Collection, ConvexSet, GeneratedCone};

use super::bisect::bisect;
use super::decomposition::min_decomposition;
use super::dual::polar_cones;
use super::normality::{allow_sampled, capped, proxies_are_cones, Inflation};
use super::Constant;

#[derive(Clone, Debug, PartialEq)]
pub enum WeakEta {
    /// `x* = 0`: `{0}°` is the whole space.
    Unconstrained,
    Value(Constant),
    /// The inclusion fails already below the bisection tolerance.
    NotFound,
}

impl WeakEta {
    /// Whether some positive η works.
    pub fn is_positive(&self) -> Option<bool> {
        match self {
            WeakEta::Unconstrained => Some(true),
            WeakEta::Value(c) => c.is_positive(),
            WeakEta::NotFound => Some(false),
        }
    }
}

/// Decides `∩(A_i + ηB) ⊂ (∩A_i) + {x*}°` exactly for a polyhedral norm.
pub fn weak_normal_inclusion_holds(c: &Collection, xstar: &[Rat], eta: &Rat) -> Result<bool> {
    crate::polyhedron::check_dim(c.dim(), xstar.len())?;
    if is_zero_vec(xstar) {
        return Ok(true);
    }
    let inf = Inflation::new(c, "weak normal inclusion")?;
    let Some(sigma) = inf.support(xstar) else {
        return Ok(true);
    };
    Ok(inf
        .inflated_support(xstar, eta)
        .is_some_and(|(v, _)| v <= sigma + Rat::one()))
}

/// Weak-normal constant for the functional `xstar`.
///
/// Exact for polyhedral norms (closed form on cones, bisection to `tol`
/// otherwise). For Euclidean cone collections it equals `1/f(x*)`, where
/// `f` is the cheapest decomposition of `x*` over the polar cones, and is
/// infinite when `x*` lies outside their sum.
pub fn weak_normal_eta(c: &Collection, xstar: &[Rat], tol: &Rat) -> Result<WeakEta> {
    crate::polyhedron::check_dim(c.dim(), xstar.len())?;
    if is_zero_vec(xstar) {
        return Ok(WeakEta::Unconstrained);
    }
    if !c.norm().kind.is_polyhedral() {
        allow_sampled(c, "weak normal constant")?;
        let cones =
            c.sets().iter().all(|s| !matches!(s, ConvexSet::Ball(_))) && proxies_are_cones(c)?;
        if !cones {
            return Ok(WeakEta::Value(Constant::Unavailable(
                "l2 weak normality needs a cone collection".into(),
            )));
        }
        let polars = polar_cones(c)?;
        if !GeneratedCone::sum(c.dim(), &polars)?.contains(xstar) {
            return Ok(WeakEta::Value(Constant::Infinite));
        }
        let d = min_decomposition(&polars, xstar, c.norm())?;
        return Ok(WeakEta::Value(
            Constant::Approx(d.norm_sum_f64()).reciprocal(),
        ));
    }
    let inf = Inflation::new(c, "weak normal constant")?;
    let Some(sigma) = inf.support(xstar) else {
        return Ok(WeakEta::Value(Constant::Infinite));
    };
    let bound = sigma + Rat::one();
    if inf.is_conic() {
        // σ_A(x*) = 0 here and the left side scales with η.
        return Ok(match inf.inflated_support(xstar, &Rat::one()) {
            None => WeakEta::NotFound,
            Some((h, _)) if h.is_zero() => WeakEta::Value(Constant::Infinite),
            Some((h, _)) => WeakEta::Value(capped(bound / h)),
        });
    }
    let out = bisect(tol, |eta| {
        Ok(inf
            .inflated_support(xstar, eta)
            .is_some_and(|(v, _)| v <= bound))
    })?;
    if out.lo.is_zero() && !out.is_infinite() {
        return Ok(WeakEta::NotFound);
    }
    Ok(WeakEta::Value(Constant::from_bisect(&out)))
}
