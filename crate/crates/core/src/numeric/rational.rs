//! Arbitrary-precision rationals with an inline machine-word fast path.
//!
//! Most coordinates produced by the tiling generators are small integers in
//! Z[γ], so the common case stays in `i64` (with `i128` intermediates) and
//! only promotes to [`BigRational`] when a result no longer fits.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number in lowest terms with a positive denominator.
///
/// The representation is canonical: a value that fits in `i64` numerator and
/// denominator (excluding `i64::MIN`) is always stored as `Small`, so derived
/// structural equality coincides with numeric equality.
#[derive(Clone, Debug)]
pub enum Rational {
    Small { num: i64, den: i64 },
    Big(BigRational),
}

fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rational {
    pub const ZERO: Rational = Rational::Small { num: 0, den: 1 };
    pub const ONE: Rational = Rational::Small { num: 1, den: 1 };

    pub fn from_int(v: i64) -> Self {
        if v == i64::MIN {
            Rational::Big(BigRational::from_integer(BigInt::from(v)))
        } else {
            Rational::Small { num: v, den: 1 }
        }
    }

    /// Builds `num / den`, reducing to lowest terms.
    ///
    /// Panics if `den` is zero.
    pub fn new(num: i64, den: i64) -> Self {
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let (mut num, mut den) = (num, den);
        if den < 0 {
            num = -num;
            den = -den;
        }
        if num == 0 {
            return Self::ZERO;
        }
        if den != 1 {
            let g = num.gcd(&den);
            if g != 1 {
                num /= g;
                den /= g;
            }
        }
        if fits(num) && fits(den) {
            Rational::Small {
                num: num as i64,
                den: den as i64,
            }
        } else {
            Rational::Big(BigRational::new_raw(BigInt::from(num), BigInt::from(den)))
        }
    }

    pub fn from_big(r: BigRational) -> Self {
        // BigRational keeps itself reduced with a positive denominator.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN && d != i64::MIN {
                return Rational::Small { num: n, den: d };
            }
        }
        Rational::Big(r)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small { num, .. } => BigInt::from(*num),
            Rational::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small { den, .. } => BigInt::from(*den),
            Rational::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small { num: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small { den, .. } => *den == 1,
            Rational::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small { num, .. } => num.signum() as i32,
            Rational::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rational::Small { num, den } => {
                if *den == 1 {
                    *num as f64
                } else {
                    *num as f64 / *den as f64
                }
            }
            Rational::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            Rational::Small { num, den } => Self::from_i128(*den as i128, *num as i128),
            Rational::Big(r) => Self::from_big(r.recip()),
        }
    }

    /// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Self::from_big)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::ZERO
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => a == c && b == d,
            (Rational::Big(a), Rational::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rational::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Rational::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                if *b == 1 && *d == 1 {
                    Rational::from_i128(*a as i128 + *c as i128, 1)
                } else if b == d {
                    Rational::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    Rational::from_i128(
                        *a as i128 * *d as i128 + *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        match (self, rhs) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                if *a == 0 || *c == 0 {
                    Rational::ZERO
                } else if *b == 1 && *d == 1 {
                    Rational::from_i128(*a as i128 * *c as i128, 1)
                } else {
                    Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
                }
            }
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        self * &rhs.recip()
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            // num is never i64::MIN in canonical form
            Rational::Small { num, den } => Rational::Small { num: -num, den: *den },
            Rational::Big(r) => Rational::from_big(-r),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational::from_big(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small { num, den } if *den == 1 => write!(f, "{num}"),
            Rational::Small { num, den } => write!(f, "{num}/{den}"),
            Rational::Big(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts integers (`-3`), fractions (`7/4`) and plain decimals
    /// (`1.618034`, read exactly as `1618034/1000000`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Rational::from_big(BigRational::new(n, d)));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| err())?
        };
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

impl One for Rational {
    fn one() -> Self {
        Self::ONE
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}
