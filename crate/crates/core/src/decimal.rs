//! Decimal rendering of exact rationals and rational multiples of powers of pi.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed, ToPrimitive, Zero};

const GUARD_DIGITS: usize = 20;

/// `arctan(1/x) * scale`, truncated termwise.
fn arctan_inv(x: u32, scale: &BigInt) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = scale / &x;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// `pi * 10^digits`, rounded down, from Machin's formula
/// `pi = 16 arctan(1/5) - 4 arctan(1/239)`.
pub fn pi_scaled(digits: usize) -> BigInt {
    let guard = BigInt::from(10).pow(10u32);
    let scale = BigInt::from(10).pow(digits as u32) * &guard;
    let pi = arctan_inv(5, &scale) * 16 - arctan_inv(239, &scale) * 4;
    pi / guard
}

/// Rational approximation of `pi` good to `digits` decimal places.
pub fn pi_rational(digits: usize) -> BigRational {
    BigRational::new(pi_scaled(digits), BigInt::from(10).pow(digits as u32))
}

/// `value` rounded half away from zero to `frac_digits` decimals.
pub fn fixed(value: &BigRational, frac_digits: usize) -> String {
    let scaled = (value * BigInt::from(10).pow(frac_digits as u32)).round().to_integer();
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let body = if frac_digits == 0 {
        digits
    } else {
        let padded = format!("{digits:0>width$}", width = frac_digits + 1);
        let (int, frac) = padded.split_at(padded.len() - frac_digits);
        format!("{int}.{frac}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn times_pi_power(coef: &BigRational, power: u32, frac_digits: usize) -> BigRational {
    let pi = pi_rational(frac_digits + GUARD_DIGITS + 2 * power as usize);
    coef * Pow::pow(pi, power)
}

/// `coef * pi^power` with `frac_digits` decimals.
pub fn pi_multiple_fixed(coef: &BigRational, power: u32, frac_digits: usize) -> String {
    fixed(&times_pi_power(coef, power, frac_digits), frac_digits)
}

/// `coef * pi^power` with `significant` significant digits.
pub fn pi_multiple_significant(coef: &BigRational, power: u32, significant: usize) -> String {
    if coef.is_zero() {
        return "0".to_string();
    }
    let significant = significant.max(1) as i64;
    let estimate = coef.to_f64().unwrap_or(1.0).abs() * std::f64::consts::PI.powi(power as i32);
    let mut exponent = estimate.log10().floor() as i64;
    let frac = |e: i64| (significant - 1 - e).max(0) as usize;
    let value = times_pi_power(coef, power, frac(exponent - 1));
    // Correct the f64 estimate of the leading exponent exactly.
    let ten = BigRational::from_integer(10.into());
    let abs = value.abs();
    while abs >= Pow::pow(&ten, (exponent + 1) as i32) {
        exponent += 1;
    }
    while abs < Pow::pow(&ten, exponent as i32) {
        exponent -= 1;
    }
    fixed(&value, frac(exponent))
}

/// Exact rational as a percentage with `frac_digits` decimals.
pub fn percentage(fraction: &BigRational, frac_digits: usize) -> String {
    format!("{}%", fixed(&(fraction * BigInt::from(100)), frac_digits))
}
