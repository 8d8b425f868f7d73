//! Numeric scalar abstraction.
//!
//! Every data structure that carries node values, gate parameters or
//! tolerances is generic over [`Scalar`]. `f64` is the working precision;
//! `f32` is supported for the same algorithms at reduced precision.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable as a node value.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    /// Converts a small integer exactly (all integers used here fit in 24 bits).
    fn int(value: u64) -> Self {
        Self::from_u64(value).expect("integer literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `min(upper, max(0, x))`, the truncation applied by arithmetic gates.
pub fn clamp_to<S: Scalar>(x: S, upper: S) -> S {
    if x.is_nan() {
        return x;
    }
    x.max(S::zero()).min(upper)
}

/// A small fraction `p/q` whose value in `S` is exactly `x`, if one exists with `q <= max_den`.
pub fn exact_fraction<S: Scalar>(x: S, max_den: u64) -> Option<(u64, u64)> {
    if !(x >= S::zero() && x <= S::one()) {
        return None;
    }
    for q in 1..=max_den {
        let p = (x * S::int(q)).round();
        let p_int = p.to_u64()?;
        if p_int > q {
            continue;
        }
        if S::int(p_int) / S::int(q) == x {
            return Some((p_int, q));
        }
    }
    None
}

/// Canonical text for a number: a short decimal when one round-trips,
/// otherwise a fraction `p/q` with small denominator, otherwise the
/// shortest round-trip decimal.
pub fn format_number<S: Scalar>(x: S) -> String {
    let decimal = format!("{x}");
    let significant = decimal.trim_start_matches("0.").trim_start_matches('0').len();
    if significant <= 6 {
        return decimal;
    }
    match exact_fraction(x, 1000) {
        Some((p, q)) if q > 1 => format!("{p}/{q}"),
        _ => decimal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_behaviour() {
        assert_eq!(clamp_to(1.3_f64, 1.0), 1.0);
        assert_eq!(clamp_to(-0.2_f64, 1.0), 0.0);
        assert_eq!(clamp_to(0.4_f64, 0.5), 0.4);
        assert_eq!(clamp_to(0.7_f32, 0.5), 0.5);
    }

    #[test]
    fn fractions_found_only_when_exact() {
        assert_eq!(exact_fraction(1.0_f64 / 3.0, 1000), Some((1, 3)));
        assert_eq!(exact_fraction(4.0_f64 / 15.0, 1000), Some((4, 15)));
        assert_eq!(exact_fraction(0.123456789_f64, 1000), None);
        assert_eq!(exact_fraction(1.0_f32 / 3.0, 1000), Some((1, 3)));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.5_f64), "0.5");
        assert_eq!(format_number(0.3_f64), "0.3");
        assert_eq!(format_number(1.0_f64 / 3.0), "1/3");
        assert_eq!(format_number(0.0_f64), "0");
        assert_eq!(format_number(1.0_f64), "1");
        let odd = 0.123456789_f64;
        assert_eq!(format_number(odd).parse::<f64>().unwrap(), odd);
    }
}
