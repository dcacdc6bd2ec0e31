//! End-to-end checks of the regularity results on an instance, and the
//! cyclic projection experiment.

mod cyclic;
mod theorems;

pub use cyclic::{cyclic_projection, Trajectory};
pub use theorems::{verify, TheoremReport, TheoremStatus, VerifyParams, THEOREM_IDS};
