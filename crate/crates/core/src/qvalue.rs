//! Exact nonnegative values: rationals, `+inf`, and q-th roots of rationals.
//!
//! Every numeric quantity the toolkit produces is a [`QValue`]. Roots only
//! arise from power means with exponent `q > 1`; they are kept symbolically
//! as `r^(1/q)` and compared by raising both sides to a common power, so no
//! comparison ever goes through floating point.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ValueError;

/// Arbitrary precision rational used throughout the crate.
pub type Rational = BigRational;

/// Shorthand for building `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A nonnegative exact value.
///
/// `Root` is always normalized: `index >= 2` and the radicand is positive and
/// not a perfect `index`-th power. Use [`QValue::root`] to construct one.
#[derive(Clone, Debug)]
pub enum QValue {
    Finite(Rational),
    Root { radicand: Rational, index: u32 },
    Infinity,
}

impl QValue {
    pub fn zero() -> Self {
        QValue::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        QValue::Finite(Rational::one())
    }

    /// Wraps a nonnegative rational.
    pub fn rational(r: Rational) -> Result<Self, ValueError> {
        if r.is_negative() {
            return Err(ValueError::Negative(r.to_string()));
        }
        Ok(QValue::Finite(r))
    }

    /// `radicand^(1/index)`, normalized to rational form when exact.
    pub fn root(radicand: Rational, index: u32) -> Result<Self, ValueError> {
        if index == 0 {
            return Err(ValueError::ZeroRootIndex);
        }
        if radicand.is_negative() {
            return Err(ValueError::Negative(radicand.to_string()));
        }
        if index == 1 || radicand.is_zero() {
            return Ok(QValue::Finite(radicand));
        }
        if let Some(exact) = exact_root(&radicand, index) {
            return Ok(QValue::Finite(exact));
        }
        Ok(QValue::Root { radicand, index })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, QValue::Finite(r) if r.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, QValue::Infinity)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            QValue::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// Exact sum. Sums that would leave the representable set (two
    /// irrational terms, or an irrational and a nonzero rational) are errors.
    pub fn checked_add(&self, other: &QValue) -> Result<QValue, ValueError> {
        match (self, other) {
            (QValue::Infinity, _) | (_, QValue::Infinity) => Ok(QValue::Infinity),
            (a, b) if a.is_zero() => Ok(b.clone()),
            (a, b) if b.is_zero() => Ok(a.clone()),
            (QValue::Finite(a), QValue::Finite(b)) => Ok(QValue::Finite(a + b)),
            (a, b) => {
                // r^(1/q) + r^(1/q) = (2^q r)^(1/q): the only irrational sum we
                // can keep exact without a field extension.
                if a.cmp(b) == Ordering::Equal {
                    a.scale(&int(2))
                } else {
                    Err(ValueError::Inexact(format!("{a} + {b}")))
                }
            }
        }
    }

    /// Multiplication by a nonnegative rational constant.
    pub fn scale(&self, c: &Rational) -> Result<QValue, ValueError> {
        if c.is_negative() {
            return Err(ValueError::Negative(c.to_string()));
        }
        Ok(match self {
            _ if c.is_zero() => QValue::zero(),
            QValue::Finite(a) => QValue::Finite(a * c),
            QValue::Root { radicand, index } => {
                QValue::root(radicand * pow_rational(c, *index), *index)?
            }
            QValue::Infinity => QValue::Infinity,
        })
    }

    /// Integer power.
    pub fn pow(&self, exp: u32) -> QValue {
        match self {
            QValue::Finite(a) => QValue::Finite(pow_rational(a, exp)),
            QValue::Root { radicand, index } => {
                QValue::root(pow_rational(radicand, exp), *index).expect("nonnegative radicand")
            }
            QValue::Infinity if exp == 0 => QValue::one(),
            QValue::Infinity => QValue::Infinity,
        }
    }

    /// Integer root `self^(1/index)`.
    pub fn nth_root(&self, index: u32) -> Result<QValue, ValueError> {
        match self {
            QValue::Finite(a) => QValue::root(a.clone(), index),
            QValue::Root { radicand, index: p } => {
                let combined = p
                    .checked_mul(index)
                    .ok_or_else(|| ValueError::Inexact("root index overflow".into()))?;
                QValue::root(radicand.clone(), combined)
            }
            QValue::Infinity => Ok(QValue::Infinity),
        }
    }

    /// `self^(p/s)` for a positive rational exponent given as `p/s`.
    pub fn pow_ratio(&self, p: u32, s: u32) -> Result<QValue, ValueError> {
        self.pow(p).nth_root(s)
    }

    /// `self / other` when that quotient is rational.
    pub fn rational_quotient(&self, other: &QValue) -> Option<Rational> {
        let (r1, p) = self.radical()?;
        let (r2, q) = other.radical()?;
        if r2.is_zero() {
            return None;
        }
        let power = pow_rational(&r1, q) / pow_rational(&r2, p);
        match QValue::root(power, p.checked_mul(q)?).ok()? {
            QValue::Finite(x) => Some(x),
            _ => None,
        }
    }

    fn radical(&self) -> Option<(Rational, u32)> {
        match self {
            QValue::Finite(a) => Some((a.clone(), 1)),
            QValue::Root { radicand, index } => Some((radicand.clone(), *index)),
            QValue::Infinity => None,
        }
    }

    pub fn max(self, other: QValue) -> QValue {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nearest `f64`; exact for small rationals, within rounding otherwise.
    pub fn to_f64(&self) -> f64 {
        match self {
            QValue::Finite(a) => rational_to_f64(a),
            QValue::Root { radicand, index } => rational_to_f64(radicand).powf(1.0 / *index as f64),
            QValue::Infinity => f64::INFINITY,
        }
    }

    /// Rational bounds `lo <= self <= hi` with `hi - lo <= 2^-bits`.
    /// Rationals return themselves twice. `None` for infinity.
    pub fn rational_bounds(&self, bits: u32) -> Option<(Rational, Rational)> {
        match self {
            QValue::Finite(a) => Some((a.clone(), a.clone())),
            QValue::Root { radicand, index } => {
                let scale = BigInt::one() << (bits as usize * *index as usize);
                let scaled = (radicand * Rational::from_integer(scale)).floor().to_integer();
                let floor_root = scaled.nth_root(*index);
                let denom = BigInt::one() << bits as usize;
                let lo = Rational::new(floor_root.clone(), denom.clone());
                let hi = Rational::new(floor_root + BigInt::one(), denom);
                Some((lo, hi))
            }
            QValue::Infinity => None,
        }
    }
}

impl Ord for QValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use QValue::*;
        match (self, other) {
            (Infinity, Infinity) => Ordering::Equal,
            (Infinity, _) => Ordering::Greater,
            (_, Infinity) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(a), Root { radicand, index }) => pow_rational(a, *index).cmp(radicand),
            (Root { radicand, index }, Finite(b)) => radicand.cmp(&pow_rational(b, *index)),
            (
                Root { radicand: r1, index: p },
                Root { radicand: r2, index: q },
            ) => pow_rational(r1, *q).cmp(&pow_rational(r2, *p)),
        }
    }
}

impl PartialOrd for QValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for QValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QValue {}

impl From<Rational> for QValue {
    fn from(r: Rational) -> Self {
        QValue::Finite(r)
    }
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QValue::Finite(a) => write!(f, "{a}"),
            QValue::Root { radicand, index } => write!(f, "({radicand})^(1/{index})"),
            QValue::Infinity => write!(f, "inf"),
        }
    }
}

pub fn pow_rational(r: &Rational, exp: u32) -> Rational {
    num_traits::pow::pow(r.clone(), exp as usize)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // `Ratio::to_f64` only fails on overflow.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact `q`-th root of a nonnegative rational in lowest terms, if any.
fn exact_root(r: &Rational, q: u32) -> Option<Rational> {
    let num = r.numer().to_biguint()?;
    let den = r.denom().to_biguint()?;
    let a = perfect_root(&num, q)?;
    let b = perfect_root(&den, q)?;
    Some(Rational::new(
        BigInt::from_biguint(Sign::Plus, a),
        BigInt::from_biguint(Sign::Plus, b),
    ))
}

fn perfect_root(n: &BigUint, q: u32) -> Option<BigUint> {
    let root = n.nth_root(q);
    if num_traits::pow::pow(root.clone(), q as usize) == *n {
        Some(root)
    } else {
        None
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions). `x` must be finite and nonnegative.
pub fn approximate_f64(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() || x <= 0.0 {
        return Rational::zero();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = frac - a;
        if rem < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    Rational::new(BigInt::from(p1), BigInt::from(q1))
}

/// Exact rational value of a finite `f64`.
pub fn exact_from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_with_index_one_is_rational() {
        assert_eq!(QValue::root(ratio(3, 4), 1).unwrap(), QValue::Finite(ratio(3, 4)));
        assert!(matches!(QValue::root(ratio(3, 4), 1).unwrap(), QValue::Finite(_)));
    }

    #[test]
    fn perfect_powers_normalize() {
        let v = QValue::root(ratio(4, 9), 2).unwrap();
        assert!(matches!(v, QValue::Finite(ref r) if *r == ratio(2, 3)));
        let w = QValue::root(ratio(2, 1), 2).unwrap();
        assert!(matches!(w, QValue::Root { .. }));
    }

    #[test]
    fn cross_power_comparison() {
        // 2^(1/2) < 3^(1/3)?  2^3 = 8 < 3^2 = 9
        let a = QValue::root(int(2), 2).unwrap();
        let b = QValue::root(int(3), 3).unwrap();
        assert!(a < b);
        // 2^(1/2) == 4^(1/4)
        let c = QValue::root(int(4), 4).unwrap();
        assert_eq!(a, c);
        assert!(QValue::Finite(int(1)) < a);
        assert!(a < QValue::Infinity);
    }

    #[test]
    fn sums() {
        let half = QValue::Finite(ratio(1, 2));
        assert_eq!(half.checked_add(&half).unwrap(), QValue::one());
        let r = QValue::root(int(2), 2).unwrap();
        assert_eq!(r.checked_add(&QValue::zero()).unwrap(), r);
        assert!(r.checked_add(&half).is_err());
        assert_eq!(r.checked_add(&r).unwrap(), QValue::root(int(8), 2).unwrap());
        assert!(QValue::Infinity.checked_add(&half).unwrap().is_infinite());
    }

    #[test]
    fn scale_and_powers() {
        let r = QValue::root(int(2), 2).unwrap();
        assert_eq!(r.scale(&int(3)).unwrap(), QValue::root(int(18), 2).unwrap());
        assert_eq!(r.pow(2), QValue::Finite(int(2)));
        assert_eq!(QValue::Finite(int(8)).pow_ratio(2, 3).unwrap(), QValue::Finite(int(4)));
    }

    #[test]
    fn bounds_bracket_value() {
        let r = QValue::root(int(2), 2).unwrap();
        let (lo, hi) = r.rational_bounds(40).unwrap();
        assert!(QValue::Finite(lo) <= r);
        assert!(QValue::Finite(hi) >= r);
    }

    #[test]
    fn continued_fraction_snaps_simple_values() {
        assert_eq!(approximate_f64(0.5, 1_000_000), ratio(1, 2));
        assert_eq!(approximate_f64(1.0 / 3.0, 1_000_000), ratio(1, 3));
        assert_eq!(approximate_f64(0.0, 10), Rational::zero());
    }

    #[test]
    fn negative_rejected() {
        assert!(QValue::rational(ratio(-1, 2)).is_err());
        assert!(QValue::root(ratio(-1, 2), 2).is_err());
        assert!(QValue::root(int(2), 0).is_err());
    }
}
