//! Normality, dual normality, Jamenson and linear-regularity constants.
//!
//! With a polyhedral norm every inclusion is decided exactly and constants
//! come from bisection or vertex enumeration. With the Euclidean norm the
//! constants of cone collections are estimated by seeded sampling; each such
//! value is a one-sided bound and is labelled as such.

mod bisect;
mod decomposition;
mod dual;
mod normality;
mod report;
mod sampling;
mod weak;

use std::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{to_f64, Rat};

pub use bisect::{bisect, default_tol, BisectOutcome, CAP_EXPONENT};
pub use decomposition::{lambda_g, min_decomposition, Decomposition};
pub use dual::{dual_normality_inclusion, lambda_d, polar_cone_generators, polar_cones};
pub(crate) use normality::proxies_are_cones;
pub use normality::{
    lambda_n, lambda_un, normality_inclusion_holds, LambdaUn, LambdaUnKind, NormalityVerdict,
};
pub use report::{compute_constants, ConstantsOptions, ConstantsReport};
pub use sampling::{gamma_estimate, gamma_lower_bound, DistanceOracle, GammaEstimate, GammaSample};
pub use weak::{weak_normal_eta, weak_normal_inclusion_holds, WeakEta};

/// A computed constant.
#[derive(Clone, Debug, PartialEq)]
pub enum Constant {
    Exact(Rat),
    /// Sampled or iterative value; which side is certified is reported
    /// alongside.
    Approx(f64),
    Infinite,
    Unavailable(String),
}

impl Constant {
    pub fn to_f64(&self) -> Option<f64> {
        match self {
            Constant::Exact(r) => Some(to_f64(r)),
            Constant::Approx(v) => Some(*v),
            Constant::Infinite => Some(f64::INFINITY),
            Constant::Unavailable(_) => None,
        }
    }

    pub fn is_available(&self) -> bool {
        !matches!(self, Constant::Unavailable(_))
    }

    /// `Some(true)` when the constant is known to be strictly positive.
    pub fn is_positive(&self) -> Option<bool> {
        match self {
            Constant::Exact(r) => Some(r.is_positive()),
            Constant::Approx(v) => Some(*v > 0.0),
            Constant::Infinite => Some(true),
            Constant::Unavailable(_) => None,
        }
    }

    /// `1/c`, with `1/0 = inf` and `1/inf = 0`.
    pub fn reciprocal(&self) -> Constant {
        match self {
            Constant::Exact(r) if r.is_zero() => Constant::Infinite,
            Constant::Exact(r) => Constant::Exact(r.recip()),
            Constant::Approx(v) if *v == 0.0 => Constant::Infinite,
            Constant::Approx(v) => Constant::Approx(1.0 / v),
            Constant::Infinite => Constant::Exact(Rat::zero()),
            Constant::Unavailable(s) => Constant::Unavailable(s.clone()),
        }
    }

    pub(crate) fn from_bisect(out: &BisectOutcome) -> Constant {
        if out.is_infinite() {
            Constant::Infinite
        } else {
            Constant::Exact(out.lo.clone())
        }
    }
}

/// Floats with 12 significant digits.
pub fn format_f64(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", 11, v);
    // Trim the mantissa's trailing zeros, then print plainly when moderate.
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let plain = format!("{:.*}", decimals, v);
        if plain.contains('.') {
            plain
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            plain
        }
    } else {
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{exp}")
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Exact(r) => write!(f, "{r}"),
            Constant::Approx(v) => f.write_str(&format_f64(*v)),
            Constant::Infinite => f.write_str("inf"),
            Constant::Unavailable(_) => f.write_str("n/a"),
        }
    }
}

/// Seeded sampling controls shared by the sampled estimators.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingParams {
    pub samples: usize,
    pub seed: u64,
    /// Restricts samples to `rho·B_X`.
    pub rho: Option<Rat>,
    /// Extra centers for targeted sampling.
    pub points: Vec<Vec<Rat>>,
    pub parallel: bool,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            samples: 10_000,
            seed: 0,
            rho: None,
            points: Vec::new(),
            parallel: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn float_formatting_keeps_twelve_digits() {
        assert_eq!(format_f64(std::f64::consts::SQRT_2), "1.41421356237");
        assert_eq!(format_f64(0.5), "0.5");
        assert_eq!(format_f64(1.0), "1");
        assert_eq!(format_f64(2.5e-9), "2.5e-9");
        assert_eq!(format_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn reciprocals() {
        assert_eq!(
            Constant::Exact(ratio(2, 3)).reciprocal(),
            Constant::Exact(ratio(3, 2))
        );
        assert_eq!(
            Constant::Infinite.reciprocal(),
            Constant::Exact(Rat::zero())
        );
        assert_eq!(
            Constant::Exact(Rat::zero()).reciprocal(),
            Constant::Infinite
        );
    }
}
