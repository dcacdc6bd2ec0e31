//! Norm kinds, arithmetic modes, and polyhedral unit balls.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{GeomError, Result};
use crate::polyhedron::{HPolyhedron, Row, VPolyhedron};
use crate::rational::{norm1, norm_inf, parse_rat, unit, zeros, RVec, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl NormKind {
    /// The norm of the dual space.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::Linf,
            NormKind::L2 => NormKind::L2,
            NormKind::Linf => NormKind::L1,
        }
    }

    pub fn is_polyhedral(self) -> bool {
        self != NormKind::L2
    }

    pub fn name(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::Linf => "linf",
        }
    }

    /// Exact value; `None` for the Euclidean norm.
    pub fn eval(self, x: &[Rat]) -> Option<Rat> {
        match self {
            NormKind::L1 => Some(norm1(x)),
            NormKind::Linf => Some(norm_inf(x)),
            NormKind::L2 => None,
        }
    }

    pub fn eval_f64(self, x: &[f64]) -> f64 {
        match self {
            NormKind::L1 => x.iter().map(|v| v.abs()).sum(),
            NormKind::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::Linf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Vertices of the closed unit ball.
    pub fn unit_ball_v(self, dim: usize) -> Result<VPolyhedron> {
        let points = match self {
            NormKind::L1 => {
                let mut pts = Vec::with_capacity(2 * dim);
                for k in 0..dim {
                    pts.push(unit(dim, k));
                    let mut v = zeros(dim);
                    v[k] = -Rat::one();
                    pts.push(v);
                }
                pts
            }
            NormKind::Linf => sign_vectors(dim),
            NormKind::L2 => {
                return Err(GeomError::unsupported(
                    "the Euclidean unit ball is not polyhedral",
                ))
            }
        };
        VPolyhedron::polytope(dim, points)
    }

    /// Facet description of the closed unit ball.
    pub fn unit_ball_h(self, dim: usize) -> Result<HPolyhedron> {
        let rows = match self {
            NormKind::Linf => {
                let mut rows = Vec::with_capacity(2 * dim);
                for k in 0..dim {
                    rows.push(Row::le(unit(dim, k), Rat::one()));
                    let mut v = zeros(dim);
                    v[k] = -Rat::one();
                    rows.push(Row::le(v, Rat::one()));
                }
                rows
            }
            NormKind::L1 => sign_vectors(dim)
                .into_iter()
                .map(|s| Row::le(s, Rat::one()))
                .collect(),
            NormKind::L2 => {
                return Err(GeomError::unsupported(
                    "the Euclidean unit ball is not polyhedral",
                ))
            }
        };
        HPolyhedron::new(dim, rows)
    }
}

fn sign_vectors(dim: usize) -> Vec<RVec> {
    (0..1usize << dim)
        .map(|mask| {
            (0..dim)
                .map(|k| {
                    if mask >> k & 1 == 1 {
                        -Rat::one()
                    } else {
                        Rat::one()
                    }
                })
                .collect()
        })
        .collect()
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" => Ok(NormKind::Linf),
            _ => Err(format!("unknown norm kind {s:?} (expected l1, l2 or linf)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            _ => Err(format!("unknown mode {s:?} (expected exact or float)")),
        }
    }
}

/// Norm of `X`, arithmetic mode and float tolerance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormContext {
    pub kind: NormKind,
    pub mode: Mode,
    pub tol: Rat,
}

impl NormContext {
    pub fn new(kind: NormKind, mode: Mode, tol: Rat) -> Result<Self> {
        if tol.is_negative() {
            return Err(GeomError::Invalid("tolerance must be nonnegative".into()));
        }
        Ok(NormContext { kind, mode, tol })
    }

    pub fn exact(kind: NormKind) -> Self {
        NormContext {
            kind,
            mode: Mode::Exact,
            tol: Rat::zero(),
        }
    }

    pub fn float(kind: NormKind) -> Self {
        NormContext {
            kind,
            mode: Mode::Float,
            tol: Rat::new(1.into(), 1_000_000.into()),
        }
    }

    pub fn parse_tol(s: &str) -> std::result::Result<Rat, String> {
        parse_rat(s)
    }

    pub fn dual_kind(&self) -> NormKind {
        self.kind.dual()
    }

    pub fn tol_f64(&self) -> f64 {
        crate::rational::to_f64(&self.tol)
    }

    /// Errors unless computations that inflate sets by the unit ball can be
    /// done exactly. `what` names the caller in the diagnostic.
    pub fn require_polyhedral(&self, what: &str) -> Result<()> {
        if self.kind.is_polyhedral() {
            Ok(())
        } else if self.mode == Mode::Exact {
            Err(GeomError::unsupported(format!(
                "{what}: the l2 norm has no exact ball inflation; use mode \"float\" or a polyhedral norm"
            )))
        } else {
            Err(GeomError::unsupported(format!(
                "{what}: needs a polyhedral norm (l1 or linf)"
            )))
        }
    }
}
