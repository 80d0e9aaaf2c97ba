//! Orbifold Euler characteristics of Coxeter polyhedra and hyperbolic
//! volumes via Gauss-Bonnet.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coxeter::{CoxeterDiagram, SubdiagramAnalysis};
use crate::decimal;
use crate::table::rational_str;
use crate::{Error, Result};

/// Exact Euler characteristic of an even-dimensional hyperbolic orbifold and
/// its volume `volume_coefficient * pi^(n/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbifoldInvariants {
    #[serde(with = "rational_str")]
    pub euler: BigRational,
    pub dimension: usize,
    /// Coefficient of `pi^2` (n = 4) or `pi` (n = 2).
    #[serde(with = "rational_str")]
    pub volume_coefficient: BigRational,
    pub volume_numeric: f64,
}

impl OrbifoldInvariants {
    pub fn pi_power(&self) -> u32 {
        (self.dimension / 2) as u32
    }

    /// Volume with `significant` significant digits, computed exactly.
    pub fn volume_decimal(&self, significant: usize) -> String {
        decimal::pi_multiple_significant(&self.volume_coefficient, self.pi_power(), significant)
    }
}

/// `sum over elliptic subsets S of (-1)^|S| / |W_S|`, the empty set included.
pub fn orbifold_euler_characteristic(diagram: &CoxeterDiagram) -> BigRational {
    SubdiagramAnalysis::new(diagram)
        .elliptic_subsets()
        .into_iter()
        .map(|s| {
            let sign = if s.size % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            BigRational::new(sign, s.order)
        })
        .fold(BigRational::zero(), |acc, term| acc + term)
}

/// Gauss-Bonnet: `vol = (4 pi^2 / 3) chi` for `n = 4`, `vol = -2 pi chi` for
/// `n = 2`.
pub fn hyperbolic_volume(euler: &BigRational, n: usize) -> Result<OrbifoldInvariants> {
    let (coefficient, power) = match n {
        4 => (BigRational::new(4.into(), 3.into()), 2),
        2 => (BigRational::from_integer((-2).into()), 1),
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    let volume_coefficient = coefficient * euler;
    let volume_numeric =
        volume_coefficient.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(power);
    Ok(OrbifoldInvariants { euler: euler.clone(), dimension: n, volume_coefficient, volume_numeric })
}

/// Euler characteristic of `W \ H^n` extended by a diagram symmetry group of
/// the given order.
pub fn quotient_invariants(w_euler: &BigRational, automorphism_order: u64) -> Result<BigRational> {
    if automorphism_order == 0 {
        return Err(Error::NonpositiveAutomorphismOrder);
    }
    Ok(w_euler / BigRational::from_integer(automorphism_order.into()))
}
