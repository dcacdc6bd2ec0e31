//! The inclusion `∩(A_i + ηδB) ⊂ (∩A_i) + δB` and the constants built on it.
//!
//! For a polyhedron `A` and a polyhedral unit ball `B` the facet normals of
//! `A + tB` are the same for every `t > 0`. Each facet row `a·x <= b` of
//! `A + B` therefore gives `A + tB = {a·x <= α + tβ}` with `β = ‖a‖_*` and
//! `α = b - β`, so one Minkowski sum per set serves every `t`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::calculus::minkowski_sum;
use crate::error::{GeomError, Result};
use crate::lp::{self, LpStatus, Sense};
use crate::norm::{Mode, NormKind};
use crate::polyhedron::{HPolyhedron, Row};
use crate::rational::{dot, scale, RVec, Rat};
use crate::set::{Collection, ConvexSet};

use super::bisect::{bisect, CAP_EXPONENT};
use super::sampling::gamma_lower_bound;
use super::{Constant, SamplingParams};

/// Outcome of one inclusion test.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalityVerdict {
    pub holds: bool,
    /// A point of the inflated intersection outside the target.
    pub witness: Option<RVec>,
}

/// One row `a·x <= α + tβ` of an inflated set.
#[derive(Clone, Debug)]
pub(crate) struct InflatedRow {
    pub a: RVec,
    pub alpha: Rat,
    pub beta: Rat,
}

impl InflatedRow {
    fn at(&self, t: &Rat) -> Row {
        Row::le(self.a.clone(), &self.alpha + t * &self.beta)
    }
}

/// Rows of `A + tB` valid for every `t >= 0`.
pub(crate) fn inflated_rows(a: &HPolyhedron, kind: NormKind) -> Result<Vec<InflatedRow>> {
    let dual = kind.dual();
    let ball = kind.unit_ball_v(a.dim())?;
    let sum = minkowski_sum(a, &ball)?.canonical();
    let mut out = Vec::with_capacity(sum.rows().len());
    for r in sum.rows() {
        // A + B is full-dimensional, so the canonical form has no equalities.
        debug_assert!(!r.eq);
        let beta = dual.eval(&r.a).expect("polyhedral dual norm");
        out.push(InflatedRow {
            a: r.a.clone(),
            alpha: &r.b - &beta,
            beta,
        });
    }
    Ok(out)
}

/// A polyhedral collection prepared for inflation tests.
#[derive(Clone, Debug)]
pub(crate) struct Inflation {
    dim: usize,
    /// Rows of all `A_i + tB`.
    sets: Vec<InflatedRow>,
    /// Rows of `A + tB` for the intersection `A`.
    target: Vec<InflatedRow>,
    /// The intersection itself.
    inter: HPolyhedron,
    /// Present when every set and the intersection are cones: the maximum
    /// of each target functional over `∩(A_i + B)`, `None` when unbounded.
    heights: Option<Vec<Height>>,
}

#[derive(Clone, Debug)]
pub(crate) enum Height {
    Finite { value: Rat, argmax: RVec },
    Unbounded { ray: RVec },
}

/// Euclidean constants are only estimated by sampling, which float mode
/// permits and exact mode does not.
pub(crate) fn allow_sampled(c: &Collection, what: &str) -> Result<()> {
    if c.norm().kind.is_polyhedral() || c.norm().mode == Mode::Float {
        Ok(())
    } else {
        c.norm().require_polyhedral(what)
    }
}

fn polyhedral_kind(c: &Collection, what: &str) -> Result<NormKind> {
    c.norm().require_polyhedral(what)?;
    Ok(c.norm().kind)
}

impl Inflation {
    pub(crate) fn new(c: &Collection, what: &str) -> Result<Self> {
        let kind = polyhedral_kind(c, what)?;
        let proxies = c.proxies()?;
        let inter = HPolyhedron::intersect_all(c.dim(), proxies.iter())?;
        let mut sets = Vec::new();
        for p in &proxies {
            sets.extend(inflated_rows(p, kind)?);
        }
        let target = inflated_rows(&inter, kind)?;
        let mut inf = Inflation {
            dim: c.dim(),
            sets,
            target,
            inter,
            heights: None,
        };
        let conic = inf
            .sets
            .iter()
            .chain(inf.target.iter())
            .all(|r| r.alpha.is_zero());
        if conic {
            let rows = inf.rows_at(&Rat::one());
            let heights = inf
                .target
                .iter()
                .map(|t| {
                    let out = lp::optimize(&t.a, Sense::Max, &rows, inf.dim);
                    match out.status {
                        LpStatus::Optimal => Height::Finite {
                            value: out.value.unwrap(),
                            argmax: out.point.unwrap(),
                        },
                        LpStatus::Unbounded => Height::Unbounded {
                            ray: out.ray.unwrap(),
                        },
                        LpStatus::Infeasible => {
                            unreachable!("inflated intersection contains the intersection")
                        }
                    }
                })
                .collect();
            inf.heights = Some(heights);
        }
        Ok(inf)
    }

    pub(crate) fn is_conic(&self) -> bool {
        self.heights.is_some()
    }

    /// Rows of `∩(A_i + tB)`.
    pub(crate) fn rows_at(&self, t: &Rat) -> Vec<Row> {
        self.sets.iter().map(|r| r.at(t)).collect()
    }

    /// `∩(A_i + tB)` as a polyhedron.
    pub(crate) fn inflated(&self, t: &Rat) -> HPolyhedron {
        HPolyhedron::new(self.dim, self.rows_at(t)).unwrap()
    }

    /// `(∩A_i) + tB` as a polyhedron.
    pub(crate) fn target(&self, t: &Rat) -> HPolyhedron {
        HPolyhedron::new(self.dim, self.target.iter().map(|r| r.at(t)).collect()).unwrap()
    }

    /// Decides `∩(A_i + ηδB) ⊂ (∩A_i) + δB`.
    pub(crate) fn holds(&self, eta: &Rat, delta: &Rat) -> Result<NormalityVerdict> {
        if !eta.is_positive() || !delta.is_positive() {
            if eta.is_negative() || !delta.is_positive() {
                return Err(GeomError::Invalid(
                    "η must be nonnegative and δ positive".into(),
                ));
            }
            return Ok(NormalityVerdict {
                holds: true,
                witness: None,
            });
        }
        let t = eta * delta;
        if let Some(heights) = &self.heights {
            // Both sides scale linearly: the test reduces to η·h <= ‖c‖_*.
            for (row, h) in self.target.iter().zip(heights) {
                let bound = delta * &row.beta;
                match h {
                    Height::Finite { value, argmax } => {
                        if &t * value > bound {
                            return Ok(NormalityVerdict {
                                holds: false,
                                witness: Some(scale(argmax, &t)),
                            });
                        }
                    }
                    Height::Unbounded { ray } => {
                        let slope = dot(&row.a, ray);
                        let s = (&bound / &slope).floor() + Rat::one();
                        return Ok(NormalityVerdict {
                            holds: false,
                            witness: Some(scale(ray, &s)),
                        });
                    }
                }
            }
            return Ok(NormalityVerdict {
                holds: true,
                witness: None,
            });
        }
        let inc = self.inflated(&t).included_in(&self.target(delta))?;
        Ok(NormalityVerdict {
            holds: inc.holds,
            witness: inc.witness,
        })
    }

    /// The largest η with the inclusion at δ = 1, when it has a closed form
    /// (cone case): the minimum of `‖c‖_* / h_c` over the target rows.
    pub(crate) fn closed_form(&self) -> Option<Constant> {
        let heights = self.heights.as_ref()?;
        let mut best: Option<Rat> = None;
        for (row, h) in self.target.iter().zip(heights) {
            match h {
                Height::Unbounded { .. } => return Some(Constant::Exact(Rat::zero())),
                Height::Finite { value, .. } if value.is_positive() => {
                    let r = &row.beta / value;
                    if best.as_ref().is_none_or(|b| &r < b) {
                        best = Some(r);
                    }
                }
                Height::Finite { .. } => {}
            }
        }
        Some(best.map_or(Constant::Infinite, capped))
    }

    /// Support function of the intersection, `None` when unbounded.
    pub(crate) fn support(&self, y: &[Rat]) -> Option<Rat> {
        let out = lp::optimize(y, Sense::Max, self.inter.rows(), self.dim);
        out.value
    }

    /// `max ⟨y, x⟩` over `∩(A_i + tB)` with a maximizer, `None` when
    /// unbounded.
    pub(crate) fn inflated_support(&self, y: &[Rat], t: &Rat) -> Option<(Rat, RVec)> {
        let out = lp::optimize(y, Sense::Max, &self.rows_at(t), self.dim);
        match out.status {
            LpStatus::Optimal => Some((out.value.unwrap(), out.point.unwrap())),
            _ => None,
        }
    }
}

/// Values at or beyond the bisection cap count as infinite.
pub(crate) fn capped(r: Rat) -> Constant {
    let cap = Rat::from_integer(BigInt::one() << CAP_EXPONENT);
    if r >= cap {
        Constant::Infinite
    } else {
        Constant::Exact(r)
    }
}

/// Decides `∩(A_i + ηδB) ⊂ (∩A_i) + δB` for a polyhedral norm.
pub fn normality_inclusion_holds(
    c: &Collection,
    eta: &Rat,
    delta: &Rat,
) -> Result<NormalityVerdict> {
    Inflation::new(c, "normality inclusion")?.holds(eta, delta)
}

/// Whether every regularity proxy is a cone.
pub(crate) fn proxies_are_cones(c: &Collection) -> Result<bool> {
    Ok(c.proxies()?.iter().all(HPolyhedron::is_cone))
}

fn lambda_at(inf: &Inflation, tol: &Rat, delta: &Rat) -> Result<Constant> {
    if let Some(v) = inf.closed_form() {
        return Ok(v);
    }
    let out = bisect(tol, |eta| Ok(inf.holds(eta, delta)?.holds))?;
    Ok(Constant::from_bisect(&out))
}

/// Normality constant `λ_N`: the supremum of η with
/// `∩(A_i + ηB) ⊂ (∩A_i) + B`.
///
/// Polyhedral norms give an exact value (closed form for cones, bisection
/// to `tol` otherwise). With the Euclidean norm, cone collections get
/// `1/γ` from sampled distance ratios, an upper bound on `λ_N`.
pub fn lambda_n(c: &Collection, tol: &Rat, params: &SamplingParams) -> Result<Constant> {
    if c.norm().kind.is_polyhedral() {
        let inf = Inflation::new(c, "lambda_N")?;
        return lambda_at(&inf, tol, &Rat::one());
    }
    allow_sampled(c, "lambda_N")?;
    if c.sets().iter().any(|s| matches!(s, ConvexSet::Ball(_))) || !proxies_are_cones(c)? {
        return Ok(Constant::Unavailable(
            "l2 normality constant needs a cone collection".into(),
        ));
    }
    let g = gamma_lower_bound(c, params)?;
    Ok(Constant::Approx(g.value).reciprocal())
}

/// How a `λ_UN` value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaUnKind {
    /// Cone collection: equal to `λ_N`.
    ConeEqual,
    /// Minimum of the per-δ constants over a finite grid. The inclusion
    /// must hold for every δ, so this bounds `λ_UN` from above.
    GridUpperBound,
    Unavailable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaUn {
    pub value: Constant,
    pub kind: LambdaUnKind,
}

/// Uniform normality constant.
pub fn lambda_un(
    c: &Collection,
    tol: &Rat,
    delta_grid: &[Rat],
    params: &SamplingParams,
) -> Result<LambdaUn> {
    let cones = c.sets().iter().all(|s| !matches!(s, ConvexSet::Ball(_))) && proxies_are_cones(c)?;
    if cones {
        return Ok(LambdaUn {
            value: lambda_n(c, tol, params)?,
            kind: LambdaUnKind::ConeEqual,
        });
    }
    if !c.norm().kind.is_polyhedral() {
        allow_sampled(c, "lambda_UN")?;
        return Ok(LambdaUn {
            value: Constant::Unavailable("l2 uniform normality needs a cone collection".into()),
            kind: LambdaUnKind::Unavailable,
        });
    }
    if delta_grid.is_empty() {
        return Err(GeomError::Invalid(
            "lambda_UN of a non-cone collection needs a nonempty δ grid".into(),
        ));
    }
    if let Some(d) = delta_grid.iter().find(|d| !d.is_positive()) {
        return Err(GeomError::Invalid(format!(
            "δ grid values must be positive, got {d}"
        )));
    }
    let inf = Inflation::new(c, "lambda_UN")?;
    let mut best = Constant::Infinite;
    for d in delta_grid {
        let v = lambda_at(&inf, tol, d)?;
        if let (Constant::Exact(x), Constant::Exact(y)) = (&v, &best) {
            if x < y {
                best = v;
            }
        } else if best == Constant::Infinite {
            best = v;
        }
    }
    Ok(LambdaUn {
        value: best,
        kind: LambdaUnKind::GridUpperBound,
    })
}
