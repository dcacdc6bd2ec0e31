//! Sampled lower bounds for the linear-regularity constant
//! `γ = sup d(x, ∩A_i) / sup_i d(x, A_i)`.
//!
//! Every sample index owns its own ChaCha stream, so the sample set does
//! not depend on scheduling and parallel runs reproduce sequential ones.
//! The best candidates are refined by compass search and, when all sets are
//! polyhedral, re-evaluated exactly at a nearby rational point so the
//! reported bound never exceeds the true constant.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::norm::NormKind;
use crate::polyhedron::{HPolyhedron, Row};
use crate::projection::{project_l2_exact, FloatPoly};
use crate::rational::{dot, round_to, to_f64, to_f64_vec, RVec, Rat};
use crate::set::{Ball, Collection, ConvexSet};

use super::normality::allow_sampled;
use super::{Constant, SamplingParams};

/// Distance evaluator for one set in a fixed norm.
#[derive(Clone, Debug)]
pub enum DistanceOracle {
    /// Polyhedral norm: `d(x, P) = max(0, max_k ⟨y_k, x⟩ - s_k)` over the
    /// vertices `(y_k, s_k)` of `{‖y‖_* <= 1, y ∈ rec(P)^⊖, ⟨y, p⟩ <= s
    /// for the points p of P}`.
    Support {
        float: Vec<(Vec<f64>, f64)>,
        exact: Vec<(RVec, Rat)>,
    },
    /// Euclidean distance to a polyhedron.
    Euclid {
        poly: FloatPoly,
        h: HPolyhedron,
    },
    Ball(Ball),
}

fn support_vertices(h: &HPolyhedron, kind: NormKind) -> Result<Vec<(RVec, Rat)>> {
    let n = h.dim();
    let v = h.to_v()?;
    let lift = |a: &[Rat], last: Rat| {
        let mut w = a.to_vec();
        w.push(last);
        w
    };
    let mut rows = Vec::new();
    for r in kind.dual().unit_ball_h(n)?.rows() {
        rows.push(Row::le(lift(&r.a, Rat::zero()), r.b.clone()));
    }
    for r in v.rays() {
        rows.push(Row::le(lift(r, Rat::zero()), Rat::zero()));
    }
    for p in v.points() {
        rows.push(Row::le(lift(p, -Rat::from_integer(1.into())), Rat::zero()));
    }
    let e = HPolyhedron::new(n + 1, rows)?.to_v()?;
    Ok(e.points()
        .iter()
        .map(|q| (q[..n].to_vec(), q[n].clone()))
        .collect())
}

impl DistanceOracle {
    pub fn polyhedron(h: &HPolyhedron, kind: NormKind) -> Result<Self> {
        if kind == NormKind::L2 {
            return Ok(DistanceOracle::Euclid {
                poly: FloatPoly::new(h),
                h: h.clone(),
            });
        }
        let exact = support_vertices(h, kind)?;
        let float = exact
            .iter()
            .map(|(y, s)| (to_f64_vec(y), to_f64(s)))
            .collect();
        Ok(DistanceOracle::Support { float, exact })
    }

    /// Oracle for a set; the interval family is measured through `{0}`,
    /// which has the same distance supremum `|x|`.
    pub fn for_set(s: &ConvexSet, kind: NormKind) -> Result<Self> {
        match s {
            ConvexSet::Ball(b) if kind == NormKind::L2 => Ok(DistanceOracle::Ball(b.clone())),
            ConvexSet::Ball(_) => Err(GeomError::unsupported(
                "distance to a ball needs the l2 norm",
            )),
            s => DistanceOracle::polyhedron(&s.regularity_proxy()?, kind),
        }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            DistanceOracle::Support { float, .. } => float
                .iter()
                .map(|(y, s)| y.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - s)
                .fold(0.0, f64::max),
            DistanceOracle::Euclid { poly, .. } => poly.distance(x),
            DistanceOracle::Ball(b) => b.distance_f64(x),
        }
    }

    /// Exact distance for polyhedral norms.
    pub fn exact_distance(&self, x: &[Rat]) -> Option<Rat> {
        match self {
            DistanceOracle::Support { exact, .. } => {
                let mut best = Rat::zero();
                for (y, s) in exact {
                    let v = dot(y, x) - s;
                    if v > best {
                        best = v;
                    }
                }
                Some(best)
            }
            _ => None,
        }
    }

    /// Exact squared distance (any norm, polyhedral sets).
    pub fn exact_sq_distance(&self, x: &[Rat]) -> Option<Rat> {
        match self {
            DistanceOracle::Support { .. } => self.exact_distance(x).map(|d| &d * &d),
            DistanceOracle::Euclid { h, .. } => project_l2_exact(h, x).ok().map(|(_, sq)| sq),
            DistanceOracle::Ball(_) => None,
        }
    }
}

/// Distance-ratio evaluator for a collection.
#[derive(Clone, Debug)]
pub(crate) struct RatioEvaluator {
    dim: usize,
    kind: NormKind,
    sets: Vec<DistanceOracle>,
    inter: DistanceOracle,
}

/// Denominators below this (relative to `1 + ‖x‖`) are rounding noise.
const NOISE_FLOOR: f64 = 1e-12;

impl RatioEvaluator {
    pub(crate) fn new(c: &Collection) -> Result<Self> {
        let kind = c.norm().kind;
        let sets = c
            .sets()
            .iter()
            .map(|s| DistanceOracle::for_set(s, kind))
            .collect::<Result<Vec<_>>>()?;
        let inter = match c.intersection()? {
            ConvexSet::Ball(b) if kind == NormKind::L2 => DistanceOracle::Ball(b),
            s => DistanceOracle::polyhedron(
                &s.to_h()
                    .ok_or_else(|| GeomError::unsupported("distance to the intersection"))?,
                kind,
            )?,
        };
        Ok(RatioEvaluator {
            dim: c.dim(),
            kind,
            sets,
            inter,
        })
    }

    fn is_exact(&self) -> bool {
        self.sets
            .iter()
            .chain(std::iter::once(&self.inter))
            .all(|o| !matches!(o, DistanceOracle::Ball(_)))
    }

    /// `d(x, A) / max_i d(x, A_i)`, `None` when `x` is (numerically) in
    /// every set.
    pub(crate) fn ratio(&self, x: &[f64]) -> Option<f64> {
        let den = self.sets.iter().map(|o| o.distance(x)).fold(0.0, f64::max);
        let scale = 1.0 + self.kind.eval_f64(x);
        if den.is_nan() || den <= NOISE_FLOOR * scale {
            return None;
        }
        let r = self.inter.distance(x) / den;
        r.is_finite().then_some(r)
    }

    /// The ratio at a rational point, computed exactly and rounded once.
    fn exact_ratio(&self, x: &[Rat]) -> Option<f64> {
        if self.kind == NormKind::L2 {
            let mut den = Rat::zero();
            for o in &self.sets {
                let d = o.exact_sq_distance(x)?;
                if d > den {
                    den = d;
                }
            }
            if den.is_zero() {
                return None;
            }
            Some(to_f64(&(self.inter.exact_sq_distance(x)? / den)).sqrt())
        } else {
            let mut den = Rat::zero();
            for o in &self.sets {
                let d = o.exact_distance(x)?;
                if d > den {
                    den = d;
                }
            }
            if den.is_zero() {
                return None;
            }
            Some(to_f64(&(self.inter.exact_distance(x)? / den)))
        }
    }
}

/// Best sampled ratio and where it was found.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSample {
    pub value: f64,
    pub point: Vec<f64>,
    /// Samples with a nonzero denominator.
    pub valid: usize,
    /// Whether `value` was re-evaluated in exact arithmetic.
    pub exact: bool,
}

/// Lower and upper bounds for `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaEstimate {
    pub lower: GammaSample,
    /// `1/λ_UN`; `+inf` when unavailable.
    pub upper: f64,
}

const REFINE_CANDIDATES: usize = 8;
const REFINE_MAX_EVALS: usize = 2000;
const LOG_RADIUS_RANGE: (f64, f64) = (-6.0, 2.0);

struct Sampler<'a> {
    eval: &'a RatioEvaluator,
    conic: bool,
    centers: Vec<Vec<f64>>,
    rho: Option<f64>,
    seed: u64,
}

/// A sample: point, its ratio, and the length scale used to draw it.
type Drawn = (Vec<f64>, Option<f64>, f64);

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|t| *t /= n);
    }
}

impl Sampler<'_> {
    fn admissible(&self, x: &[f64]) -> bool {
        self.rho.is_none_or(|r| self.eval.kind.eval_f64(x) <= r)
    }

    fn draw(&self, k: usize) -> Drawn {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        let n = self.eval.dim;
        let mut dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        normalize(&mut dir);
        let (x, scale) = if self.conic {
            (dir, 1.0)
        } else {
            let c = &self.centers[k % self.centers.len()];
            let r = 10f64.powf(rng.gen_range(LOG_RADIUS_RANGE.0..LOG_RADIUS_RANGE.1));
            (c.iter().zip(&dir).map(|(a, d)| a + r * d).collect(), r)
        };
        let ratio = if self.admissible(&x) {
            self.eval.ratio(&x)
        } else {
            None
        };
        (x, ratio, scale)
    }

    /// Compass search from a sample, staying on the unit sphere for cones.
    fn refine(&self, mut x: Vec<f64>, mut f: f64, scale: f64) -> (Vec<f64>, f64) {
        let mut step = 0.25 * scale;
        let min_step = 1e-10 * scale;
        let mut evals = 0;
        while step > min_step && evals < REFINE_MAX_EVALS {
            let mut improved = false;
            for j in 0..x.len() {
                for sign in [1.0, -1.0] {
                    let mut y = x.clone();
                    y[j] += sign * step;
                    if self.conic {
                        normalize(&mut y);
                    }
                    if !self.admissible(&y) {
                        continue;
                    }
                    evals += 1;
                    if let Some(fy) = self.eval.ratio(&y) {
                        if fy > f {
                            x = y;
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
        (x, f)
    }
}

/// Sampling centers for non-cone collections: the origin, the supplied
/// points, the vertices of a polyhedral intersection and one of its points.
fn centers(c: &Collection, params: &SamplingParams) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![0.0; c.dim()]];
    out.extend(params.points.iter().map(|p| to_f64_vec(p)));
    if let Ok(inter) = c.intersection() {
        if let Some(h) = inter.to_h() {
            if let Ok(v) = h.to_v() {
                out.extend(v.points().iter().map(|p| to_f64_vec(p)));
            }
            if let Some(p) = h.feasible_point() {
                out.push(to_f64_vec(&p));
            }
        } else if let ConvexSet::Ball(b) = inter {
            out.push(to_f64_vec(b.center()));
        }
    }
    let mut uniq: Vec<Vec<f64>> = Vec::new();
    for p in out {
        if !uniq.contains(&p) {
            uniq.push(p);
        }
    }
    uniq
}

/// Whether sampling may use the unit sphere: every set acts as a cone.
fn conic(c: &Collection) -> Result<bool> {
    if c.sets().iter().any(|s| matches!(s, ConvexSet::Ball(_))) {
        return Ok(false);
    }
    let inter_cone = match c.intersection()? {
        ConvexSet::Ball(_) => false,
        s => s.to_h().is_some_and(|h| h.is_cone()),
    };
    Ok(inter_cone && c.proxies()?.iter().all(HPolyhedron::is_cone))
}

/// Seeded lower bound `γ_lb <= γ`: the largest ratio over the samples.
pub fn gamma_lower_bound(c: &Collection, params: &SamplingParams) -> Result<GammaSample> {
    allow_sampled(c, "gamma")?;
    let eval = RatioEvaluator::new(c)?;
    let sampler = Sampler {
        eval: &eval,
        conic: conic(c)?,
        centers: centers(c, params),
        rho: params.rho.as_ref().map(to_f64),
        seed: params.seed,
    };
    let drawn: Vec<Drawn> = if params.parallel {
        (0..params.samples)
            .into_par_iter()
            .map(|k| sampler.draw(k))
            .collect()
    } else {
        (0..params.samples).map(|k| sampler.draw(k)).collect()
    };
    let mut ranked: Vec<(usize, f64)> = drawn
        .iter()
        .enumerate()
        .filter_map(|(k, (_, r, _))| r.map(|r| (k, r)))
        .collect();
    let valid = ranked.len();
    if valid == 0 {
        return Ok(GammaSample {
            value: 0.0,
            point: vec![0.0; c.dim()],
            valid,
            exact: eval.is_exact(),
        });
    }
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(REFINE_CANDIDATES);
    let refine = |&(k, f): &(usize, f64)| {
        let (x, _, scale) = &drawn[k];
        sampler.refine(x.clone(), f, *scale)
    };
    let refined: Vec<(Vec<f64>, f64)> = if params.parallel {
        ranked.par_iter().map(refine).collect()
    } else {
        ranked.iter().map(refine).collect()
    };
    let exact = eval.is_exact();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (x, f) in refined {
        let value = if exact {
            // Round to a nearby rational point and evaluate exactly there.
            let xr: RVec = x.iter().map(|&t| round_to(t, 1 << 40)).collect();
            match eval.exact_ratio(&xr) {
                Some(v) => v,
                None => continue,
            }
        } else {
            f
        };
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((x, value));
        }
    }
    let (point, value) = best.unwrap_or_else(|| (vec![0.0; c.dim()], 0.0));
    Ok(GammaSample {
        value,
        point,
        valid,
        exact,
    })
}

/// `γ_lb` from sampling and `γ_ub = 1/λ_UN`.
pub fn gamma_estimate(
    c: &Collection,
    params: &SamplingParams,
    lambda_un: &Constant,
) -> Result<GammaEstimate> {
    let lower = gamma_lower_bound(c, params)?;
    let upper = match lambda_un {
        Constant::Unavailable(_) => f64::INFINITY,
        l => l.reciprocal().to_f64().unwrap(),
    };
    Ok(GammaEstimate { lower, upper })
}

/// Rejects a negative sampling radius.
pub(crate) fn check_rho(rho: &Option<Rat>) -> Result<()> {
    match rho {
        Some(r) if !r.is_positive() => {
            Err(GeomError::Invalid(format!("rho must be positive, got {r}")))
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormContext;
    use crate::polyhedron::halfspace;
    use crate::rational::{rat, rvec};

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

    fn params(samples: usize) -> SamplingParams {
        SamplingParams {
            samples,
            ..SamplingParams::default()
        }
    }

    #[test]
    fn support_distance_matches_linf_geometry() {
        let h = halfspace(rvec(&[1, 0]), rat(0));
        let o = DistanceOracle::polyhedron(&h, NormKind::Linf).unwrap();
        assert_eq!(o.exact_distance(&rvec(&[3, 7])), Some(rat(3)));
        let q = HPolyhedron::intersect_all(2, [&h, &halfspace(rvec(&[0, 1]), rat(0))]).unwrap();
        let o = DistanceOracle::polyhedron(&q, NormKind::L1).unwrap();
        assert_eq!(o.exact_distance(&rvec(&[1, 2])), Some(rat(3)));
        assert!((o.distance(&[1.0, 2.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn right_angle_gamma_in_l2() {
        let c = right_angle(NormContext::float(NormKind::L2));
        let g = gamma_lower_bound(&c, &params(10_000)).unwrap();
        assert!(g.exact);
        assert!(g.value <= std::f64::consts::SQRT_2 * (1.0 + 1e-12));
        assert!(g.value > std::f64::consts::SQRT_2 - 1e-4, "{}", g.value);
    }

    #[test]
    fn right_angle_gamma_in_linf_is_one() {
        let c = right_angle(NormContext::exact(NormKind::Linf));
        let g = gamma_lower_bound(&c, &params(2000)).unwrap();
        assert!((g.value - 1.0).abs() < 1e-12, "{}", g.value);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let c = right_angle(NormContext::float(NormKind::L2));
        let a = gamma_lower_bound(&c, &params(500)).unwrap();
        let b = gamma_lower_bound(
            &c,
            &SamplingParams {
                parallel: true,
                ..params(500)
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ball_tangency_blows_up() {
        let ball = ConvexSet::Ball(Ball::new(rvec(&[0, 1]), rat(1)).unwrap());
        let half = ConvexSet::HPoly(halfspace(rvec(&[0, 1]), rat(0)));
        let c = Collection::new(
            2,
            NormContext::float(NormKind::L2),
            vec![ball, half],
            Some(ConvexSet::HPoly(HPolyhedron::origin(2))),
        )
        .unwrap();
        let p = SamplingParams {
            points: vec![rvec(&[0, 0])],
            ..params(10_000)
        };
        let g = gamma_lower_bound(&c, &p).unwrap();
        assert!(!g.exact);
        assert!(g.value > 1e3, "{}", g.value);
    }

    #[test]
    fn single_set_ratio_is_one() {
        let c = Collection::new(
            2,
            NormContext::float(NormKind::L2),
            vec![ConvexSet::HPoly(HPolyhedron::cube(2, rat(-1), rat(1)))],
            None,
        )
        .unwrap();
        let g = gamma_lower_bound(&c, &params(1000)).unwrap();
        assert!((g.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn interval_family_ratio_is_one() {
        let c = Collection::new(
            1,
            NormContext::exact(NormKind::Linf),
            vec![ConvexSet::ShrinkingIntervals],
            None,
        )
        .unwrap();
        let g = gamma_lower_bound(&c, &params(1000)).unwrap();
        assert_eq!(g.value, 1.0);
    }
}
