//! Scalar abstraction for the geometry kernel.
//!
//! All polytope and tent machinery is generic over [`Scalar`], with two
//! concrete modes: exact arbitrary-precision rationals ([`Rat`]) for golden
//! geometry and certificates, and `f64` for everything inside the optimizer.
//! Exact mode compares with zero tolerance; float mode uses a small absolute
//! tolerance suited to desk-scale coordinates.

use num::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use std::fmt::{Debug, Display};

/// Exact rational scalar used throughout the geometry layer.
pub type Rat = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// True when arithmetic is exact and comparisons carry no tolerance.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Absolute tolerance for geometric predicates; zero in exact mode.
    fn tol() -> Self;

    fn approx_zero(&self) -> bool {
        self.abs() <= Self::tol()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).approx_zero()
    }

    /// Sign with tolerance: -1, 0, +1.
    fn sign3(&self) -> i32 {
        if self.approx_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Scales the halfspace `(a, b)` by a positive factor into canonical form:
    /// coprime integers in exact mode, unit normal for floats.
    fn normalize_halfspace(a: &mut [Self], b: &mut Self);
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_rat(r: &Rat) -> Self {
        ToPrimitive::to_f64(r).unwrap_or_else(|| {
            // Fall back to separate numerator/denominator conversion for
            // magnitudes outside f64 integer range.
            let n = ToPrimitive::to_f64(r.numer()).unwrap_or(f64::NAN);
            let d = ToPrimitive::to_f64(r.denom()).unwrap_or(f64::NAN);
            n / d
        })
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn tol() -> Self {
        1e-9
    }

    fn normalize_halfspace(a: &mut [Self], b: &mut Self) {
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in a.iter_mut() {
                *v /= norm;
            }
            *b /= norm;
        }
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rat::from_integer(v.into())
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        Rat::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        <f64 as Scalar>::from_rat(self)
    }

    fn tol() -> Self {
        Rat::from_integer(0.into())
    }

    fn normalize_halfspace(a: &mut [Self], b: &mut Self) {
        use num::Integer;
        let mut lcm = num::BigInt::from(1);
        for v in a.iter().chain(std::iter::once(&*b)) {
            lcm = lcm.lcm(v.denom());
        }
        let scale = Rat::from_integer(lcm);
        let mut gcd = num::BigInt::from(0);
        for v in a.iter_mut() {
            *v = v.clone() * scale.clone();
            gcd = gcd.gcd(v.numer());
        }
        *b = b.clone() * scale;
        gcd = gcd.gcd(b.numer());
        if gcd > 1.into() {
            let inv = Rat::from_integer(gcd);
            for v in a.iter_mut() {
                *v = v.clone() / inv.clone();
            }
            *b = b.clone() / inv;
        }
    }
}

/// Parses a decimal literal (`-3.458`, `1/2`, `7`) into an exact rational.
pub fn rat_from_decimal_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: num::BigInt = num.trim().parse().ok()?;
        let d: num::BigInt = den.trim().parse().ok()?;
        if d == 0.into() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i32, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    if digits.chars().any(|c| !c.is_ascii_digit()) {
        return None;
    }
    let numer: num::BigInt = if digits.is_empty() {
        0.into()
    } else {
        digits.parse().ok()?
    };
    let denom = num::BigInt::from(10u32).pow(frac_part.len() as u32);
    let mut r = Rat::new(numer, denom);
    if sign < 0 {
        r = -r;
    }
    Some(r)
}

/// Renders a rational as `p/q`, or just `p` when the denominator is one.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom() == &num::BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_convert_exactly() {
        let r = rat_from_decimal_str("-3.458").unwrap();
        assert_eq!(r, Rat::new((-1729).into(), 500.into()));
        assert_eq!(rat_from_decimal_str("0.5").unwrap(), Rat::new(1.into(), 2.into()));
        assert_eq!(rat_from_decimal_str("7").unwrap(), Rat::from_integer(7.into()));
        assert_eq!(rat_from_decimal_str("46/7").unwrap(), Rat::new(46.into(), 7.into()));
        assert!(rat_from_decimal_str("1/0").is_none());
        assert!(rat_from_decimal_str("abc").is_none());
    }

    #[test]
    fn rational_round_trip_string() {
        let r = rat_from_decimal_str("1297/359").unwrap();
        assert_eq!(rat_to_string(&r), "1297/359");
        assert_eq!(rat_to_string(&Rat::from_integer(8.into())), "8");
    }
}
