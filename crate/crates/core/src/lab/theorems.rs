//! One check per result. Each check first tests its hypotheses on the
//! instance, then evaluates both sides through separate computations.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::calculus::{inverse_sum, polar};
use crate::chip::{
    chip_report_at, intersection_of_tangents, points_of_interest, tangent_of_intersection,
    test_functionals, ChipOptions, ChipReport,
};
use crate::cones::normal_cone;
use crate::error::{GeomError, Result};
use crate::polyhedron::{HPolyhedron, VPolyhedron};
use crate::projection::distance_lp;
use crate::rational::{from_f64_vec, ratio, zeros, RVec, Rat};
use crate::regularity::{
    default_tol, format_f64, gamma_lower_bound, lambda_d, lambda_g, lambda_n, lambda_un,
    normality_inclusion_holds, polar_cones, proxies_are_cones, weak_normal_eta,
    weak_normal_inclusion_holds, Constant, LambdaUnKind, SamplingParams, WeakEta, CAP_EXPONENT,
};
use crate::set::{Collection, ConvexSet, GeneratedCone};

pub const THEOREM_IDS: [&str; 11] = [
    "prop_3_1",
    "thm_4_1",
    "thm_4_2",
    "cor_4_2",
    "thm_5_1",
    "prop_5_1",
    "thm_5_2",
    "thm_5_3",
    "thm_5_4",
    "lemma_5_1_5_2",
    "thm_5_5",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremStatus {
    Pass,
    Fail,
    HypothesisNotMet,
    Unsupported,
}

impl TheoremStatus {
    pub fn label(self) -> &'static str {
        match self {
            TheoremStatus::Pass => "PASS",
            TheoremStatus::Fail => "FAIL",
            TheoremStatus::HypothesisNotMet => "HYPOTHESIS_NOT_MET",
            TheoremStatus::Unsupported => "UNSUPPORTED",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub id: String,
    pub status: TheoremStatus,
    /// Computed quantities in evaluation order.
    pub details: Vec<(String, String)>,
    /// Reproduces the first violation, or names the unmet hypothesis.
    pub witness: Option<String>,
}

impl TheoremReport {
    pub fn to_markdown(&self) -> String {
        let mut s = format!("## {}: {}\n\n", self.id, self.status.label());
        for (k, v) in &self.details {
            let _ = writeln!(s, "- {k}: {v}");
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "- witness: {w}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyParams {
    pub tol: Rat,
    pub delta_grid: Vec<Rat>,
    pub sampling: SamplingParams,
    /// Random functionals tested on top of facet normals.
    pub dual_samples: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            tol: default_tol(),
            delta_grid: vec![ratio(1, 2), Rat::one(), Rat::from_integer(2.into())],
            sampling: SamplingParams::default(),
            dual_samples: 8,
        }
    }
}

/// Runs the check named `id`. Representation limits give `Unsupported`
/// rather than an error.
pub fn verify(id: &str, c: &Collection, p: &VerifyParams) -> Result<TheoremReport> {
    let check: fn(&Collection, &VerifyParams, &mut Log) -> Result<()> = match id {
        "prop_3_1" => prop_3_1,
        "thm_4_1" => thm_4_1,
        "thm_4_2" => thm_4_2,
        "cor_4_2" => cor_4_2,
        "thm_5_1" => |c, p, log| chain_5_1_5_4(c, p, log, false),
        "prop_5_1" => prop_5_1,
        "thm_5_2" => thm_5_2,
        "thm_5_3" => thm_5_3,
        "thm_5_4" => |c, p, log| chain_5_1_5_4(c, p, log, true),
        "lemma_5_1_5_2" => lemma_5_1_5_2,
        "thm_5_5" => thm_5_5,
        _ => {
            return Err(GeomError::Invalid(format!(
                "unknown theorem id '{id}' (known: {})",
                THEOREM_IDS.join(", ")
            )))
        }
    };
    let mut log = Log::default();
    match check(c, p, &mut log) {
        Ok(()) => {}
        Err(e) if e.is_unsupported() => log.gate(TheoremStatus::Unsupported, e.to_string()),
        Err(e) => return Err(e),
    }
    let status = log.status.unwrap_or(if log.failed {
        TheoremStatus::Fail
    } else {
        TheoremStatus::Pass
    });
    Ok(TheoremReport {
        id: id.to_string(),
        status,
        details: log.details,
        witness: log.witness,
    })
}

#[derive(Default)]
struct Log {
    details: Vec<(String, String)>,
    witness: Option<String>,
    failed: bool,
    /// Set when the check stops before its conclusion.
    status: Option<TheoremStatus>,
}

impl Log {
    fn note(&mut self, key: &str, value: impl ToString) {
        self.details.push((key.to_string(), value.to_string()));
    }

    fn fail(&mut self, witness: String) {
        self.failed = true;
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    fn gate(&mut self, status: TheoremStatus, reason: String) {
        self.status = Some(status);
        self.witness = Some(reason);
    }
}

fn fmt_vec(v: &[Rat]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn fmt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

fn has_ball(c: &Collection) -> bool {
    c.sets().iter().any(|s| matches!(s, ConvexSet::Ball(_)))
}

/// Cone collection, counting the interval family through its `{0}` proxy.
fn cone_collection(c: &Collection) -> bool {
    !has_ball(c) && proxies_are_cones(c).unwrap_or(false)
}

fn sampled(c: &Collection) -> bool {
    !c.norm().kind.is_polyhedral()
}

/// Agreement of two constants: within `2·tol` when both are exact, within
/// a relative `1e-3` when sampled.
fn agree(a: &Constant, b: &Constant, tol: &Rat) -> bool {
    match (a, b) {
        (Constant::Infinite, Constant::Infinite) => true,
        (Constant::Exact(x), Constant::Exact(y)) => {
            (x - y).abs() <= tol * Rat::from_integer(2.into())
        }
        (Constant::Unavailable(_), _) | (_, Constant::Unavailable(_)) => false,
        (Constant::Infinite, _) | (_, Constant::Infinite) => false,
        _ => {
            let (x, y) = (a.to_f64().unwrap(), b.to_f64().unwrap());
            (x - y).abs() <= 1e-3 * x.abs().max(y.abs()).max(1.0)
        }
    }
}

fn positive(c: &Constant) -> Result<bool> {
    c.is_positive()
        .ok_or_else(|| GeomError::unsupported(format!("constant unavailable: {c:?}")))
}

const GAMMA_SLACK: f64 = 1e-6;

// ---------------------------------------------------------------------
// Polar-side constructions.

/// Closed convex hull of a union of polyhedra.
fn hull_of_union(dim: usize, parts: &[HPolyhedron]) -> Result<HPolyhedron> {
    let mut pts: Vec<RVec> = Vec::new();
    let mut rays: Vec<RVec> = Vec::new();
    for p in parts {
        let v = p.to_v()?;
        for q in v.points() {
            if !pts.contains(q) {
                pts.push(q.clone());
            }
        }
        for r in v.rays() {
            if !rays.contains(r) {
                rays.push(r.clone());
            }
        }
    }
    Ok(VPolyhedron::new(dim, pts, rays)?.to_h())
}

/// Polars `A_i°`, their hull and the dual unit ball.
struct PolarSide {
    dim: usize,
    polars: Vec<HPolyhedron>,
    hull: HPolyhedron,
    ball: HPolyhedron,
}

impl PolarSide {
    /// `None` when 0 is not in every set.
    fn new(c: &Collection) -> Result<Option<Self>> {
        let dim = c.dim();
        let proxies = c.proxies()?;
        if proxies.iter().any(|p| !p.contains(&zeros(dim))) {
            return Ok(None);
        }
        let polars = proxies.iter().map(polar).collect::<Result<Vec<_>>>()?;
        let hull = hull_of_union(dim, &polars)?;
        let ball = c.norm().dual_kind().unit_ball_h(dim)?;
        Ok(Some(PolarSide {
            dim,
            polars,
            hull,
            ball,
        }))
    }

    /// `co ∪ (A_i° # rB*)`.
    fn truncated_hull(&self, r: &Rat) -> Result<HPolyhedron> {
        let ball = self.ball.scaled(r);
        let parts = self
            .polars
            .iter()
            .map(|p| inverse_sum(p, &ball))
            .collect::<Result<Vec<_>>>()?;
        hull_of_union(self.dim, &parts)
    }
}

// ---------------------------------------------------------------------
// Normal property of cones: normal iff uniformly normal; normal implies the
// closed intersection and weak normal properties.

fn prop_3_1(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    c.norm().require_polyhedral("verify prop_3_1")?;
    if !cone_collection(c) {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            "not a cone collection".into(),
        );
        return Ok(());
    }
    let lam = lambda_n(c, &p.tol, &p.sampling)?;
    log.note("lambda_N", &lam);
    let normal = positive(&lam)?;
    // (i): the per-δ inclusions hold exactly up to λ_N and fail beyond it.
    let (hold_at, fail_at) = match &lam {
        Constant::Exact(v) if v.is_positive() => (Some(v.clone()), Some(v + &p.tol)),
        Constant::Exact(_) => (None, Some(p.tol.clone())),
        _ => (
            Some(Rat::from_integer(num_bigint::BigInt::from(
                1u64 << CAP_EXPONENT,
            ))),
            None,
        ),
    };
    let mut uniform = true;
    for d in &p.delta_grid {
        if let Some(eta) = &hold_at {
            if !normality_inclusion_holds(c, eta, d)?.holds {
                uniform = false;
                log.fail(format!("delta = {d}: inclusion fails at eta = {eta}"));
            }
        }
        if let Some(eta) = &fail_at {
            if normality_inclusion_holds(c, eta, d)?.holds {
                log.fail(format!(
                    "delta = {d}: inclusion holds beyond lambda_N at eta = {eta}"
                ));
            }
        }
    }
    log.note("deltas tested", p.delta_grid.len());
    log.note("uniform normal", uniform && normal);
    if normal != (uniform && normal) {
        log.fail("normal but not uniformly normal".into());
    }
    // (ii): polyhedral cones intersect in a closed cone; weak normality on the
    // tested functionals.
    log.note("closed intersection", "true (polyhedral)");
    if normal {
        let proxies = c.proxies()?;
        let fs = test_functionals(&proxies, c.dim(), p.dual_samples, p.sampling.seed);
        for f in &fs {
            if weak_normal_eta(c, f, &p.tol)?.is_positive() != Some(true) {
                log.fail(format!(
                    "normal but not weak normal at x* = ({})",
                    fmt_vec(f)
                ));
            }
        }
        log.note("weak normal functionals", fs.len());
    }
    log.note("closures", "coincide with the cones (polyhedral)");
    Ok(())
}

// ---------------------------------------------------------------------
// Weak normality against its literal dual inclusion, per functional.

fn thm_4_1(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    c.norm().require_polyhedral("verify thm_4_1")?;
    let Some(side) = PolarSide::new(c)? else {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            "0 is not in every set".into(),
        );
        return Ok(());
    };
    log.note("closed intersection", "true (polyhedral)");
    let proxies = c.proxies()?;
    let fs = test_functionals(&proxies, c.dim(), p.dual_samples, p.sampling.seed);
    let mut tests = 0usize;
    for f in &fs {
        let etas: Vec<Rat> = match weak_normal_eta(c, f, &p.tol)? {
            WeakEta::Unconstrained => continue,
            WeakEta::Value(Constant::Exact(v)) if v.is_positive() => {
                vec![
                    &v / Rat::from_integer(2.into()),
                    v.clone(),
                    &v * Rat::from_integer(2.into()),
                ]
            }
            WeakEta::Value(Constant::Infinite) => vec![Rat::one(), Rat::from_integer(1024.into())],
            WeakEta::Value(_) | WeakEta::NotFound => vec![p.tol.clone()],
        };
        let segment = VPolyhedron::polytope(side.dim, vec![zeros(side.dim), f.clone()])?;
        let lhs = inverse_sum(&segment, &side.hull)?;
        for eta in etas {
            tests += 1;
            let primal = weak_normal_inclusion_holds(c, f, &eta)?;
            let dual = lhs.included_in(&side.truncated_hull(&eta.recip())?)?.holds;
            if primal != dual {
                log.fail(format!(
                    "x* = ({}), eta = {eta}: primal {primal}, dual {dual}",
                    fmt_vec(f)
                ));
            }
        }
    }
    log.note("functionals", fs.len());
    log.note("inclusion pairs compared", tests);
    Ok(())
}

// ---------------------------------------------------------------------
// Normality inclusion, its dual form on a geometric η grid, and the relaxed
// primal inclusion.

/// Ten values per decade around λ_N, rounded to thousandths.
fn eta_grid(lam: &Constant) -> Vec<Rat> {
    let (lo, hi) = match lam {
        Constant::Exact(v) if v.is_positive() => {
            let c = crate::rational::to_f64(v).log10();
            (
                (10.0 * (c - 1.0)).floor() as i64,
                (10.0 * (c + 1.0)).ceil() as i64,
            )
        }
        _ => (-10, 10),
    };
    let mut out: Vec<Rat> = Vec::new();
    for k in lo..=hi {
        let milli = (10f64.powf(k as f64 / 10.0) * 1000.0).round().max(1.0) as i64;
        let eta = ratio(milli, 1000);
        if !out.contains(&eta) {
            out.push(eta);
        }
    }
    out
}

fn thm_4_2(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    c.norm().require_polyhedral("verify thm_4_2")?;
    let Some(side) = PolarSide::new(c)? else {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            "0 is not in every set".into(),
        );
        return Ok(());
    };
    let lam = lambda_n(c, &p.tol, &p.sampling)?;
    log.note("lambda_N", &lam);
    let grid = eta_grid(&lam);
    let lhs = inverse_sum(&side.ball, &side.hull)?;
    let mut primal = Vec::with_capacity(grid.len());
    let mut dual = Vec::with_capacity(grid.len());
    for eta in &grid {
        primal.push(normality_inclusion_holds(c, eta, &Rat::one())?.holds);
        dual.push(lhs.included_in(&side.truncated_hull(&eta.recip())?)?.holds);
    }
    let mut violations = 0usize;
    for j in 0..grid.len() {
        for i in 0..j {
            if primal[j] && !dual[i] {
                violations += 1;
                log.fail(format!(
                    "primal holds at eta = {}, dual fails at {}",
                    grid[j], grid[i]
                ));
            }
        }
        if dual[j] && !primal[j] {
            violations += 1;
            log.fail(format!(
                "dual holds at eta = {}, relaxed primal fails",
                grid[j]
            ));
        }
    }
    log.note(
        "grid",
        format!(
            "{} values from {} to {}",
            grid.len(),
            grid[0],
            grid[grid.len() - 1]
        ),
    );
    log.note("primal holds", primal.iter().filter(|b| **b).count());
    log.note("dual holds", dual.iter().filter(|b| **b).count());
    log.note("violations", violations);
    Ok(())
}

// ---------------------------------------------------------------------
// λ_D = λ_N = λ_G on cone collections.

fn cor_4_2(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    if !cone_collection(c) {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            "not a cone collection".into(),
        );
        return Ok(());
    }
    log.note("closed intersection", "true (polyhedral cones)");
    let n = lambda_n(c, &p.tol, &p.sampling)?;
    let polars = polar_cones(c)?;
    let d = lambda_d(&polars, c.norm(), &p.sampling)?;
    let g = lambda_g(&polars, c.norm(), &p.sampling)?;
    log.note("lambda_N", &n);
    log.note("lambda_D", &d);
    log.note("lambda_G", &g);
    if sampled(c) {
        log.note("certified", "sampled upper bounds, compared within 1e-3");
    }
    if !agree(&n, &d, &p.tol) || !agree(&n, &g, &p.tol) {
        log.fail(format!("lambda_N = {n}, lambda_D = {d}, lambda_G = {g}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Per-point CHIP data.

struct PointData {
    report: ChipReport,
    tangents: Collection,
    lambda_g: Constant,
}

fn point_data(c: &Collection, p: &VerifyParams) -> Result<Vec<PointData>> {
    let points = points_of_interest(c, &p.sampling.points);
    if points.is_empty() {
        return Err(GeomError::unsupported(
            "no point of the intersection to test; supply points",
        ));
    }
    let opts = ChipOptions {
        tol: p.tol.clone(),
        dual_samples: p.dual_samples,
        sampling: p.sampling.clone(),
    };
    let mut out = Vec::new();
    for x in points {
        let report = chip_report_at(c, &x, &opts)?;
        let normals = c
            .sets()
            .iter()
            .map(|s| normal_cone(s, &x))
            .collect::<Result<Vec<GeneratedCone>>>()?;
        let lambda_g = lambda_g(&normals, c.norm(), &p.sampling)?;
        let ts = c
            .sets()
            .iter()
            .map(|s| crate::cones::tangent_cone(s, &x))
            .collect::<Result<Vec<_>>>()?;
        let tangents = Collection::new(
            c.dim(),
            c.norm().clone(),
            ts.into_iter().map(ConvexSet::HPoly).collect(),
            None,
        )?;
        out.push(PointData {
            report,
            tangents,
            lambda_g,
        });
    }
    Ok(out)
}

/// Gates on CHIP at every tested point.
fn chip_gate(points: &[PointData], log: &mut Log) -> bool {
    if let Some(d) = points.iter().find(|d| !d.report.chip) {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            format!("CHIP fails at ({})", fmt_vec(&d.report.point)),
        );
        return false;
    }
    true
}

/// Sampled `γ` of the tangent cones against `1/λ_N` of the same cones.
fn tangent_gamma(d: &PointData, p: &VerifyParams, log: &mut Log) -> Result<bool> {
    let lb = gamma_lower_bound(&d.tangents, &p.sampling)?.value;
    let ub = d
        .report
        .normal_chip_constant
        .reciprocal()
        .to_f64()
        .unwrap_or(f64::INFINITY);
    if lb > ub * (1.0 + GAMMA_SLACK) {
        log.fail(format!(
            "at ({}): gamma_lb = {} exceeds 1/lambda_N = {}",
            fmt_vec(&d.report.point),
            format_f64(lb),
            format_f64(ub)
        ));
    }
    Ok(ub.is_finite())
}

fn chain_5_1_5_4(c: &Collection, p: &VerifyParams, log: &mut Log, with_gamma: bool) -> Result<()> {
    let points = point_data(c, p)?;
    log.note("points", points.len());
    if !chip_gate(&points, log) {
        return Ok(());
    }
    for d in &points {
        let x = fmt_vec(&d.report.point);
        let lam_t = &d.report.normal_chip_constant;
        let mut statuses = vec![
            d.report.normal_chip,
            positive(&d.lambda_g)?,
            positive(lam_t)?,
        ];
        if with_gamma {
            statuses.push(tangent_gamma(d, p, log)?);
        }
        log.note(
            &format!("({x})"),
            format!(
                "statuses {:?}, lambda_N(T) = {lam_t}, lambda_G(N) = {}",
                statuses, d.lambda_g
            ),
        );
        if statuses.iter().any(|s| *s != statuses[0]) {
            log.fail(format!("at ({x}): statuses disagree {statuses:?}"));
        }
        if !agree(lam_t, &d.lambda_g, &p.tol) {
            log.fail(format!(
                "at ({x}): lambda_N(T) = {lam_t} but lambda_G(N) = {}",
                d.lambda_g
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Strong CHIP implies weak normal CHIP.

fn prop_5_1(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    let points = point_data(c, p)?;
    let strong: Vec<&PointData> = points.iter().filter(|d| d.report.strong_chip).collect();
    log.note("points", points.len());
    log.note("strong CHIP points", strong.len());
    if strong.is_empty() {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            "strong CHIP fails at every tested point".into(),
        );
        return Ok(());
    }
    for d in strong {
        if !d.report.weak_normal_chip {
            let f = d
                .report
                .witnesses
                .get("weak_normal_chip")
                .map(|v| fmt_vec(v))
                .unwrap_or_default();
            log.fail(format!(
                "at ({}): weak normal CHIP fails for x* = ({f})",
                fmt_vec(&d.report.point)
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Linear regularity and the uniform normal property.

fn thm_5_2(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    let kind = c.norm().kind;
    c.norm().require_polyhedral("verify thm_5_2")?;
    let lun = lambda_un(c, &p.tol, &p.delta_grid, &p.sampling)?;
    log.note("lambda_UN", &lun.value);
    log.note("lambda_UN kind", format!("{:?}", lun.kind));
    let g = gamma_lower_bound(c, &p.sampling)?;
    log.note("gamma_lb", format_f64(g.value));
    log.note("uniform normal", fmt_bool(lun.value.is_positive()));
    // The best sample lies in every A_i + sB but outside A + δB for δ just
    // below d(x, A), so the uniform inclusion must fail at η = s/δ.
    if g.valid > 0 && g.value > 0.0 {
        let x = from_f64_vec(&g.point);
        let inter = c.intersection_h()?;
        let da = distance_lp(&inter, &x, kind)?.1;
        let mut s = Rat::zero();
        for h in c.proxies()? {
            let d = distance_lp(&h, &x, kind)?.1;
            if d > s {
                s = d;
            }
        }
        if s.is_positive() && da.is_positive() {
            let delta = &da * ratio(999, 1000);
            let eta = &s / &delta;
            let holds = normality_inclusion_holds(c, &eta, &delta)?.holds;
            log.note(
                "sample cross-check",
                format!(
                    "eta = {}, delta = {}",
                    format_f64(crate::rational::to_f64(&eta)),
                    format_f64(crate::rational::to_f64(&delta))
                ),
            );
            if holds {
                log.fail(format!(
                    "inclusion holds at the sampled point ({})",
                    fmt_vec(&x)
                ));
            }
        }
    }
    if lun.kind == LambdaUnKind::ConeEqual {
        let ub = lun.value.reciprocal().to_f64().unwrap();
        log.note("gamma_ub", format_f64(ub));
        if g.value > ub * (1.0 + GAMMA_SLACK) {
            log.fail(format!(
                "gamma_lb = {} exceeds 1/lambda_UN = {}",
                format_f64(g.value),
                format_f64(ub)
            ));
        }
        log.note("linear regularity", ub.is_finite());
        if ub.is_finite() != positive(&lun.value)? {
            log.fail("linear regularity and uniform normality disagree".into());
        }
    } else {
        // Non-cone λ_UN values hold at every grid δ.
        if let Constant::Exact(v) = &lun.value {
            if v.is_positive() {
                for d in &p.delta_grid {
                    if !normality_inclusion_holds(c, v, d)?.holds {
                        log.fail(format!("grid value {v} fails at delta = {d}"));
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Cones: linear regularity, normality, and (G_η) of the polars.

fn thm_5_3(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    if !cone_collection(c) {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            "not a cone collection".into(),
        );
        return Ok(());
    }
    let n = lambda_n(c, &p.tol, &p.sampling)?;
    let g = lambda_g(&polar_cones(c)?, c.norm(), &p.sampling)?;
    let lb = gamma_lower_bound(c, &p.sampling)?.value;
    let ub = n.reciprocal().to_f64().unwrap_or(f64::INFINITY);
    log.note("lambda_N", &n);
    log.note("lambda_G", &g);
    log.note("gamma_lb", format_f64(lb));
    log.note("gamma_ub", format_f64(ub));
    if lb > ub * (1.0 + GAMMA_SLACK) {
        log.fail(format!(
            "gamma_lb = {} exceeds 1/lambda_N = {}",
            format_f64(lb),
            format_f64(ub)
        ));
    }
    let statuses = [ub.is_finite(), positive(&n)?, positive(&g)?];
    log.note("statuses", format!("{statuses:?}"));
    if statuses.iter().any(|s| *s != statuses[0]) {
        log.fail(format!("statuses disagree {statuses:?}"));
    }
    if !agree(&n, &g, &p.tol) {
        log.fail(format!("lambda_N = {n} but lambda_G = {g}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Normal-cone characterization of linear regularity.

/// `N(A, x) ∩ B* ⊂ co ∪ (N(A_i, x) ∩ γB*)`, exact.
fn normal_hull_inclusion(
    n_a: &GeneratedCone,
    normals: &[GeneratedCone],
    ball: &HPolyhedron,
    gamma: &Rat,
) -> Result<bool> {
    let dim = ball.dim();
    let scaled = ball.scaled(gamma);
    let mut pts: Vec<RVec> = Vec::new();
    for k in normals {
        for q in k.to_h().intersect(&scaled)?.to_v()?.points() {
            if !pts.contains(q) {
                pts.push(q.clone());
            }
        }
    }
    let rhs = VPolyhedron::polytope(dim, pts)?.to_h();
    let lhs = n_a.to_h().intersect(ball)?.to_v()?;
    Ok(lhs.points().iter().all(|v| rhs.contains(v)))
}

fn lemma_5_1_5_2(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    c.norm().require_polyhedral("verify lemma_5_1_5_2")?;
    if c.has_family() {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            "the index set N is not compact".into(),
        );
        return Ok(());
    }
    let ball = c.norm().dual_kind().unit_ball_h(c.dim())?;
    let inter = c.intersection()?;
    let points = points_of_interest(c, &p.sampling.points);
    let mut tests = 0usize;
    for x in &points {
        let chip = intersection_of_tangents(c, x)?
            .included_in(&tangent_of_intersection(c, x)?)?
            .holds;
        let n_a = normal_cone(&inter, x)?;
        let normals = c
            .sets()
            .iter()
            .map(|s| normal_cone(s, x))
            .collect::<Result<Vec<_>>>()?;
        let lg = lambda_g(&normals, c.norm(), &p.sampling)?;
        let gammas: Vec<Rat> = match &lg {
            Constant::Exact(v) if v.is_positive() => {
                let g = v.recip();
                vec![&g * ratio(9, 10), g.clone(), &g * ratio(11, 10)]
            }
            _ => vec![Rat::one()],
        };
        for gamma in gammas {
            tests += 1;
            let ii = normal_hull_inclusion(&n_a, &normals, &ball, &gamma)?;
            let jam = match &lg {
                Constant::Infinite => true,
                Constant::Exact(v) => v * &gamma >= Rat::one(),
                _ => return Err(GeomError::unsupported("lambda_G unavailable")),
            };
            if ii != (chip && jam) {
                log.fail(format!(
                    "at ({}), gamma = {gamma}: (ii) {ii}, CHIP {chip}, (G) {jam}",
                    fmt_vec(x)
                ));
            }
        }
    }
    log.note("points", points.len());
    log.note("(point, gamma) pairs", tests);
    // Cones: at 0 the constant 1/λ_G of the polars bounds every distance ratio.
    if cone_collection(c) {
        let lg = lambda_g(&polar_cones(c)?, c.norm(), &p.sampling)?;
        let gamma = lg.reciprocal().to_f64().unwrap();
        let lb = gamma_lower_bound(c, &p.sampling)?.value;
        log.note("gamma from (ii) at 0", format_f64(gamma));
        log.note("gamma_lb", format_f64(lb));
        if lb > gamma * (1.0 + GAMMA_SLACK) {
            log.fail(format!(
                "gamma_lb = {} exceeds {}",
                format_f64(lb),
                format_f64(gamma)
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Linear regularity against CHIP plus uniform tangent/normal constants.

fn thm_5_5(c: &Collection, p: &VerifyParams, log: &mut Log) -> Result<()> {
    if c.has_family() {
        log.gate(
            TheoremStatus::HypothesisNotMet,
            "the index set N is not compact".into(),
        );
        return Ok(());
    }
    log.note("index set", format!("finite ({} sets)", c.sets().len()));
    let lun = lambda_un(c, &p.tol, &p.delta_grid, &p.sampling)?;
    let linreg = positive(&lun.value)?;
    log.note("lambda_UN", &lun.value);
    let points = point_data(c, p)?;
    let chip = points.iter().all(|d| d.report.chip);
    let mut min_t = Constant::Infinite;
    let mut min_g = Constant::Infinite;
    let mut gamma_finite = true;
    let (mut tangent_ok, mut jam_ok) = (true, true);
    for d in &points {
        tangent_ok &= positive(&d.report.normal_chip_constant)?;
        jam_ok &= positive(&d.lambda_g)?;
        gamma_finite &= tangent_gamma(d, p, log)?;
        if d.report.normal_chip_constant.to_f64() < min_t.to_f64() {
            min_t = d.report.normal_chip_constant.clone();
        }
        if d.lambda_g.to_f64() < min_g.to_f64() {
            min_g = d.lambda_g.clone();
        }
    }
    log.note("points", points.len());
    log.note("CHIP", chip);
    log.note("min lambda_N(T)", &min_t);
    log.note("min lambda_G(N)", &min_g);
    let statuses = [
        linreg,
        chip && tangent_ok,
        chip && jam_ok,
        chip && gamma_finite,
    ];
    log.note("statuses", format!("{statuses:?}"));
    if statuses.iter().any(|s| *s != statuses[0]) {
        log.fail(format!("statuses disagree {statuses:?}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{NormContext, NormKind};
    use crate::polyhedron::halfspace;
    use crate::rational::{rat, rvec};
    use crate::set::Ball;

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

    fn params(samples: usize) -> VerifyParams {
        VerifyParams {
            sampling: SamplingParams {
                samples,
                ..SamplingParams::default()
            },
            ..VerifyParams::default()
        }
    }

    fn boxes() -> Collection {
        Collection::new(
            2,
            NormContext::exact(NormKind::Linf),
            vec![
                ConvexSet::HPoly(HPolyhedron::cube(2, rat(-1), rat(1))),
                ConvexSet::HPoly(HPolyhedron::cube(2, ratio(-1, 2), rat(2))),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn every_check_passes_on_the_right_angle() {
        let c = right_angle(NormContext::exact(NormKind::Linf));
        for id in THEOREM_IDS {
            let r = verify(id, &c, &params(500)).unwrap();
            assert_eq!(r.status, TheoremStatus::Pass, "{id}: {r:?}");
        }
        let r = verify("cor_4_2", &c, &params(10)).unwrap();
        assert!(r.to_markdown().starts_with("## cor_4_2: PASS"));
        assert!(r.details.contains(&("lambda_D".into(), "1".into())));
    }

    #[test]
    fn non_cone_checks_pass_on_boxes() {
        let c = boxes();
        for id in [
            "thm_4_1",
            "thm_4_2",
            "thm_5_1",
            "prop_5_1",
            "thm_5_2",
            "thm_5_4",
            "lemma_5_1_5_2",
            "thm_5_5",
        ] {
            let r = verify(id, &c, &params(500)).unwrap();
            assert_eq!(r.status, TheoremStatus::Pass, "{id}: {r:?}");
        }
        assert_eq!(
            verify("cor_4_2", &c, &params(10)).unwrap().status,
            TheoremStatus::HypothesisNotMet
        );
    }

    #[test]
    fn whole_space_passes_trivially() {
        let c = Collection::new(
            2,
            NormContext::exact(NormKind::Linf),
            vec![ConvexSet::HPoly(HPolyhedron::whole_space(2))],
            None,
        )
        .unwrap();
        assert_eq!(
            verify("thm_5_2", &c, &params(200)).unwrap().status,
            TheoremStatus::Pass
        );
    }

    #[test]
    fn tangency_fails_the_chip_hypothesis() {
        let c = Collection::new(
            2,
            NormContext::float(NormKind::L2),
            vec![
                ConvexSet::Ball(Ball::new(rvec(&[0, 1]), rat(1)).unwrap()),
                ConvexSet::HPoly(halfspace(rvec(&[0, 1]), rat(0))),
            ],
            Some(ConvexSet::HPoly(HPolyhedron::origin(2))),
        )
        .unwrap();
        let r = verify("thm_5_4", &c, &params(500)).unwrap();
        assert_eq!(r.status, TheoremStatus::HypothesisNotMet);
        assert_eq!(
            verify("thm_4_2", &c, &params(10)).unwrap().status,
            TheoremStatus::Unsupported
        );
    }

    #[test]
    fn interval_family_is_not_compact() {
        let c = Collection::new(
            1,
            NormContext::exact(NormKind::Linf),
            vec![ConvexSet::ShrinkingIntervals],
            None,
        )
        .unwrap();
        assert_eq!(
            verify("thm_5_5", &c, &params(10)).unwrap().status,
            TheoremStatus::HypothesisNotMet
        );
    }

    #[test]
    fn unknown_ids_are_errors() {
        let c = right_angle(NormContext::exact(NormKind::Linf));
        assert!(matches!(
            verify("thm_9_9", &c, &params(10)),
            Err(GeomError::Invalid(_))
        ));
    }

    #[test]
    fn grid_has_ten_values_per_decade() {
        let g = eta_grid(&Constant::Exact(rat(1)));
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], ratio(1, 10));
        assert_eq!(g[20], rat(10));
        assert!(g.contains(&ratio(1259, 1000)));
    }
}
