pub mod calculus;
pub mod chip;
pub mod cones;
pub mod error;
pub mod instances;
pub mod lab;
pub mod lp;
pub mod norm;
pub mod polyhedron;
pub mod projection;
pub mod rational;
pub mod regularity;
pub mod set;

mod dd;

pub use calculus::{
    conical_hull_poly, dual_cone, inverse_sum, inverse_sum_membership, minkowski_sum, polar,
    recession_cone, ConicalHull, Polyhedral,
};
pub use error::{GeomError, Result};
pub use lp::{solve_lp, LpOutcome, LpStatus, Sense};
pub use norm::{Mode, NormContext, NormKind};
pub use polyhedron::{HPolyhedron, Inclusion, Row, VPolyhedron};
pub use rational::{RVec, Rat};
