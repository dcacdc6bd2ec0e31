//! Cyclic projections onto a collection and their convergence rate.

use num_traits::Zero;

use crate::error::{GeomError, Result};
use crate::norm::Mode;
use crate::polyhedron::check_dim;
use crate::projection::project;
use crate::rational::{from_f64_vec, to_f64_vec, RVec, Rat};
use crate::set::Collection;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// The start followed by the point after each full cycle.
    pub iterates: Vec<Vec<f64>>,
    /// `d(x_k, ∩A_i)` for each entry of `iterates`.
    pub errors: Vec<f64>,
    /// `errors[k] / errors[k-1]`; `None` for the start and after a zero error.
    pub ratios: Vec<Option<f64>>,
    /// Least-squares per-cycle rate over the second half; `0` after finite
    /// convergence, `None` with too few positive errors.
    pub rate: Option<f64>,
    /// Errors never increase (up to float rounding).
    pub fejer: bool,
}

const FEJER_SLACK: f64 = 1e-12;

/// Projects through the sets in order for `cycles` full cycles.
///
/// Exact mode keeps rational iterates when every projection is exact; float
/// mode rounds each iterate to `f64`.
pub fn cyclic_projection(c: &Collection, x0: &[Rat], cycles: usize) -> Result<Trajectory> {
    check_dim(c.dim(), x0.len())?;
    if cycles == 0 {
        return Err(GeomError::Invalid("cycles must be at least 1".into()));
    }
    let target = c.intersection()?;
    let norm = c.norm();
    let exact = norm.mode == Mode::Exact;
    let mut x: RVec = x0.to_vec();
    let mut iterates = vec![to_f64_vec(&x)];
    let mut errors = vec![project(&target, &x, norm)?.distance];
    for _ in 0..cycles {
        for s in c.sets() {
            let p = project(s, &x, norm)?;
            x = match (exact, p.exact_point) {
                (true, Some(e)) => e,
                _ => from_f64_vec(&p.point),
            };
        }
        iterates.push(to_f64_vec(&x));
        errors.push(project(&target, &x, norm)?.distance);
    }
    let ratios = std::iter::once(None)
        .chain(
            errors
                .windows(2)
                .map(|w| if w[0] > 0.0 { Some(w[1] / w[0]) } else { None }),
        )
        .collect();
    let fejer = errors
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + FEJER_SLACK) + f64::MIN_POSITIVE);
    let rate = fit_rate(&errors);
    Ok(Trajectory {
        iterates,
        errors,
        ratios,
        rate,
        fejer,
    })
}

/// `exp` of the least-squares slope of `ln e_k` against `k` over the second
/// half of the cycles.
fn fit_rate(errors: &[f64]) -> Option<f64> {
    if errors.last().is_some_and(|e| e.is_zero()) {
        return Some(0.0);
    }
    let cycles = errors.len() - 1;
    let pts: Vec<(f64, f64)> = (cycles / 2..=cycles)
        .filter(|&k| errors[k] > 0.0)
        .map(|k| (k as f64, errors[k].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some((sxy / sxx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::{NormContext, NormKind};
    use crate::polyhedron::{HPolyhedron, Row};
    use crate::rational::{rat, rvec};
    use crate::set::ConvexSet;

    fn line(a: &[i64]) -> ConvexSet {
        ConvexSet::HPoly(HPolyhedron::new(2, vec![Row::eq(rvec(a), rat(0))]).unwrap())
    }

    #[test]
    fn orthogonal_lines_meet_after_one_cycle() {
        let c = Collection::new(
            2,
            NormContext::exact(NormKind::L2),
            vec![line(&[0, 1]), line(&[1, 0])],
            None,
        )
        .unwrap();
        let t = cyclic_projection(&c, &rvec(&[1, 1]), 3).unwrap();
        assert_eq!(t.errors[1], 0.0);
        assert_eq!(t.rate, Some(0.0));
        assert!(t.fejer);
    }

    #[test]
    fn lines_at_45_degrees_halve_the_error() {
        let c = Collection::new(
            2,
            NormContext::exact(NormKind::L2),
            vec![line(&[1, -1]), line(&[0, 1])],
            None,
        )
        .unwrap();
        let t = cyclic_projection(&c, &rvec(&[0, 1]), 50).unwrap();
        assert!(t.fejer);
        assert!((t.rate.unwrap() - 0.5).abs() < 1e-9, "{:?}", t.rate);
        assert!(t.ratios[10].is_some_and(|r| (r - 0.5).abs() < 1e-12));
    }

    #[test]
    fn single_set_converges_in_one_step() {
        let c = Collection::new(
            2,
            NormContext::float(NormKind::L2),
            vec![line(&[1, 1])],
            None,
        )
        .unwrap();
        let t = cyclic_projection(&c, &rvec(&[3, -7]), 1).unwrap();
        assert_eq!(t.errors[1], 0.0);
    }

    #[test]
    fn zero_cycles_are_rejected() {
        let c = Collection::new(
            2,
            NormContext::float(NormKind::L2),
            vec![line(&[1, 1])],
            None,
        )
        .unwrap();
        assert!(cyclic_projection(&c, &rvec(&[0, 0]), 0).is_err());
    }
}
